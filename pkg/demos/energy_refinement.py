"""Pathwise conservation of the Hamiltonian under step refinement.

One Brownian path at the finest step is coarsened to each level, so every
level sees the same noise. The deviation should halve with each halving of dt.
"""

from stochbbm import experiments as ex
from stochbbm.config import SimConfig


def main():
    rep = ex.run_energy_conservation(SimConfig(dt=2**-8, levels=4))
    m = rep.metrics
    print(f"{'dt':>12} {'max rel dev':>14}")
    for dt, dev in zip(m["dts"], m["max_rel_deviation"]):
        print(f"{dt:12.3e} {dev:14.4e}")
    print("observed orders:", ", ".join(f"{o:.3f}" for o in m["orders"]))


if __name__ == "__main__":
    main()
