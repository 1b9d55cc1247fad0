"""Effect of the smooth low-pass projection P_lambda on the noise terms.

Uses a narrow Gaussian on a period of 8 pi so that the grid resolves
frequencies up to 32. Once lambda reaches that Nyquist frequency the projection
is the identity and the error vanishes.
"""

import math

from stochbbm import experiments as ex
from stochbbm.config import SimConfig, initial_profile
from stochbbm.spectral import energy_norm, to_spectral


def main():
    cfg = SimConfig(L=8 * math.pi, ic="gaussian", ic_width=0.3, T0=0.25, dt=2**-8)
    u = to_spectral(cfg.grid, initial_profile(cfg))
    cfg = cfg.replace(ic_amplitude=0.3 / energy_norm(u, cfg.sigma0))
    rep = ex.run_lambda_study(cfg, (2, 4, 8, 16, 32, 64))
    print(f"grid Nyquist frequency: {rep.metrics['grid_nyquist']:g}")
    for lam, e in zip(rep.metrics["lambdas"], rep.metrics["errors"]):
        print(f"lambda {lam:5g}   e = {e:.3e}")


if __name__ == "__main__":
    main()
