"""Single realization on the default profile.

Integrates the small-data cosine profile to T0 = 1 and prints how far the
Hamiltonian and the H^sigma norm move along the path.
"""

from stochbbm import experiments as ex
from stochbbm.config import SimConfig


def main():
    cfg = SimConfig(dt=2**-9)
    rep = ex.run_simulate(cfg)
    m = rep.metrics
    print(f"C_H estimate          {m['C_H']:.4f}")
    print(f"initial energy norm   {m['initial_energy_norm']:.4e}")
    print(f"H^sigma norm  t=0     {m['initial_H_sigma_norm']:.6e}")
    print(f"H^sigma norm  t=T0    {m['final_H_sigma_norm']:.6e}")
    print(f"max rel. H deviation  {m['max_energy_deviation']:.2e}")
    print(f"min theta_R           {m['min_theta_R']}")


if __name__ == "__main__":
    main()
