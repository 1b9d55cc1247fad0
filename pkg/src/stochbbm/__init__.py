"""Pseudospectral simulation of a stochastic BBM-type equation with transport noise.

    du = -d_x K (u + K u^2) dt + d_x (u + K u^2) o dB,   K(xi) = (1 + xi^2)^(-sigma0)

on a periodic grid, with the linear stochastic flow propagated exactly as a
Fourier phase.
"""

from .config import SimConfig, initial_condition, load_config, parse_config_text
from .dynamics import (EquationParams, energy_drift_rate, energy_norm_sq, eval_f, eval_g,
                       eval_truncated, frechet_dH, hamiltonian, ito_rhs, milstein_correction,
                       theta)
from .errors import (ConfigError, DivergenceError, NonContractionError, NumericError,
                     StepRejected, StochBBMError, UsageError)
from .experiments import (ExperimentReport, SampleSpec, estimate_CH, run_energy_conservation,
                          run_energy_drift_study,
                          run_ensemble, run_lambda_study, run_order_study, run_picard_study,
                          run_simulate, run_truncation_consistency)
from .integrator import (SchemeKind, StoppingMonitor, Trajectory, integrate, picard_segment,
                         step_exponential_ito, step_linear, step_midpoint_stratonovich,
                         update_monitor)
from .noise import NoiseModel, NoisePath, apply_random_translation, coarsen_path, sample_path
from .spectral import (Grid, MultiplierSymbol, SpectralField, apply_multiplier,
                       dealiased_product, energy_norm, sobolev_norm, to_physical, to_spectral)

__version__ = "0.1.0"
