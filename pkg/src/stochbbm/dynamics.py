"""Right-hand sides of the stochastic BBM-type equation

    du = -d_x K (u + K u^2) dt + d_x (u + K u^2) o dB,     K(xi) = (1 + xi^2)^(-sigma0),

in mild/Ito form, together with the Hamiltonian and the energy balance of the
norm-truncated equation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigError
from .spectral import (Grid, MultiplierSymbol, SpectralField, dealiased_product,
                       energy_norm, integrate_product, sobolev_norm)


def theta(s):
    """C^1 cutoff profile: 1 on [-1, 1], 0 outside [-2, 2], smoothstep between."""
    w = np.clip(np.abs(s) - 1.0, 0.0, 1.0)
    return 1.0 - (3.0 * w**2 - 2.0 * w**3)


def theta_prime(s):
    a = np.abs(s)
    w = np.clip(a - 1.0, 0.0, 1.0)
    return -np.sign(s) * 6.0 * w * (1.0 - w)


def cutoff(r: float, R: float) -> float:
    """theta_R(r) = theta(r / R); R = inf disables the cutoff."""
    if math.isinf(R):
        return 1.0
    return float(theta(r / R))


def lowpass_symbol(lam: float) -> MultiplierSymbol:
    """P_lambda with symbol theta(xi / lambda)."""
    if math.isinf(lam):
        return MultiplierSymbol("P_inf", lambda xi: np.ones_like(xi), {"lam": lam})
    return MultiplierSymbol("P_lambda", lambda xi: theta(xi / lam), {"lam": lam})


@dataclass(frozen=True)
class EquationParams:
    sigma0: float = 1.0
    sigma: float = 1.0
    gamma_sq: float = 0.0
    R: float = math.inf
    lam: float = math.inf
    nonlinear: bool = True

    def __post_init__(self):
        if not self.sigma0 > 0.5:
            raise ConfigError(f"sigma0 must exceed 1/2, got {self.sigma0}")
        if not self.sigma >= 0:
            raise ConfigError(f"sigma must be >= 0, got {self.sigma}")
        if not (np.isfinite(self.gamma_sq) and self.gamma_sq >= 0):
            raise ConfigError(f"gamma_sq must be finite and >= 0, got {self.gamma_sq}")
        if not self.R > 0:
            raise ConfigError(f"R must be positive or inf, got {self.R}")
        if not self.lam > 0:
            raise ConfigError(f"lambda must be positive or inf, got {self.lam}")

    @property
    def in_wellposed_regime(self) -> bool:
        return self.sigma >= max(self.sigma0, 1.0)


class Operators:
    """Diagonal symbols evaluated once per (grid, sigma0, lambda)."""

    def __init__(self, grid: Grid, sigma0: float, lam: float):
        xi = grid.xi
        nyq = grid.nyquist_index
        self.grid = grid
        self.K = (1.0 + xi**2) ** (-sigma0)
        self.Kinv = 1.0 / self.K
        dx = 1j * xi
        # odd symbols vanish on the unpaired mode
        dx[nyq] = 0.0
        self.dx = dx
        self.dxK = dx * self.K
        self.dxK2 = dx * self.K**2
        self.P = np.ones_like(xi) if math.isinf(lam) else theta(xi / lam)
        self.dxP = dx * self.P
        self.dx2P2 = -(xi**2) * self.P**2
        # phase speed xi*K(xi); translation uses xi*P(xi)
        self.xiK = xi * self.K
        self.xiP = xi * self.P
        self.xiK[nyq] = 0.0
        self.xiP[nyq] = 0.0

    def group(self, dt: float, dB: float) -> np.ndarray:
        """Symbol of S(dt) S_W: exp(-i xi K dt + i xi P_lambda dB)."""
        return np.exp(1j * (self.xiP * dB - self.xiK * dt))


@lru_cache(maxsize=64)
def operators(grid: Grid, sigma0: float, lam: float = math.inf) -> Operators:
    return Operators(grid, sigma0, lam)


def _ops(u: SpectralField, p: EquationParams) -> Operators:
    return operators(u.grid, p.sigma0, p.lam)


def _square(u: SpectralField) -> SpectralField:
    return dealiased_product(u, u)


def eval_g(u: SpectralField, p: EquationParams) -> SpectralField:
    """g(u) = d_x K u^2."""
    ops = _ops(u, p)
    return SpectralField(u.grid, ops.dxK * _square(u).coeffs)


def _f_from(u: SpectralField, usq: SpectralField, g: SpectralField,
            p: EquationParams, ops: Operators) -> SpectralField:
    c = -ops.dxK2 * usq.coeffs
    if p.gamma_sq:
        c = c + p.gamma_sq * ops.dxK * dealiased_product(u, g).coeffs
    return SpectralField(u.grid, c)


def eval_f(u: SpectralField, p: EquationParams) -> SpectralField:
    """f(u) = -d_x K^2 u^2 + Gamma^2 d_x K (u d_x K u^2)."""
    ops = _ops(u, p)
    usq = _square(u)
    g = SpectralField(u.grid, ops.dxK * usq.coeffs)
    return _f_from(u, usq, g, p, ops)


def nonlinear_terms(u: SpectralField, p: EquationParams) -> tuple[SpectralField, SpectralField]:
    """(f(u), g(u)) sharing the dealiased square."""
    ops = _ops(u, p)
    usq = _square(u)
    g = SpectralField(u.grid, ops.dxK * usq.coeffs)
    return _f_from(u, usq, g, p, ops), g


def eval_truncated(u: SpectralField, p: EquationParams, sigma: float | None = None):
    """(f_R(u), g_R(u), theta_R(||u||_{H^sigma}))."""
    sigma = p.sigma if sigma is None else sigma
    th = cutoff(sobolev_norm(u, sigma), p.R)
    if not p.nonlinear or th == 0.0:
        z = SpectralField.zeros(u.grid)
        return z, z, th
    f, g = nonlinear_terms(u, p)
    if th == 1.0:
        return f, g, th
    return th * f, th * g, th


def milstein_correction(u: SpectralField, p: EquationParams,
                        sigma: float | None = None) -> SpectralField:
    """Second-order noise term M(u) of the exponential Milstein step.

    In the frame moving with the exact linear flow the equation has scalar
    noise with coefficient g_R, so the strong order-one correction is
    1/2 (dB^2 - Gamma^2 dt) M(u) with

        M(u) = g_R'(u)[g_R(u) + d_x P u] - d_x P g_R(u),

    g'(u)[v] = 2 d_x K (u v).  The last two terms cancel for lambda = inf.
    """
    sigma = p.sigma if sigma is None else sigma
    grid = u.grid
    if not p.nonlinear:
        return SpectralField.zeros(grid)
    ops = _ops(u, p)
    hs = sobolev_norm(u, sigma)
    th = cutoff(hs, p.R)
    if th == 0.0:
        return SpectralField.zeros(grid)
    g = eval_g(u, p)
    gR = th * g.coeffs
    v = SpectralField(grid, gR + ops.dxP * u.coeffs)
    corr = th * 2.0 * ops.dxK * dealiased_product(u, v).coeffs - ops.dxP * gR
    if not math.isinf(p.R) and hs > 0:
        # derivative of theta_R(||u||_{H^sigma}) in direction v
        w = (1.0 + grid.xi**2) ** sigma
        dnorm = grid.period * float(np.sum(w * np.real(np.conj(u.coeffs) * v.coeffs))) / hs
        corr = corr + float(theta_prime(hs / p.R)) * dnorm / p.R * g.coeffs
    return SpectralField(grid, corr)


def energy_norm_sq(u: SpectralField, p: EquationParams) -> float:
    return energy_norm(u, p.sigma0) ** 2


def hamiltonian(u: SpectralField, p: EquationParams) -> float:
    """H(u) = int (1/2 (K^{-1/2} u)^2 + 1/3 u^3) dx."""
    return energy_norm_sq(u, p) + integrate_product(u, u, u) / 3.0


def frechet_dH(u: SpectralField, phi: SpectralField, p: EquationParams) -> float:
    """dH(u) phi = int (K^{-1/2}u K^{-1/2}phi + u^2 phi) dx."""
    u._check(phi)
    ops = _ops(u, p)
    quad = u.grid.period * float(np.sum(ops.Kinv * np.real(np.conj(u.coeffs) * phi.coeffs)))
    return quad + integrate_product(u, u, phi)


def ito_rhs(u: SpectralField, p: EquationParams, sigma: float | None = None):
    """Drift and diffusion of the (lambda, R)-regularized Ito equation.

    drift     = -d_x K u + Gamma^2/2 d_x^2 P^2 u + f_R(u) + Gamma^2 d_x P g_R(u)
    diffusion = d_x P u + g_R(u)
    """
    ops = _ops(u, p)
    fR, gR, _ = eval_truncated(u, p, sigma)
    c = u.coeffs
    drift = (-ops.dxK * c + 0.5 * p.gamma_sq * ops.dx2P2 * c
             + fR.coeffs + p.gamma_sq * ops.dxP * gR.coeffs)
    diffusion = ops.dxP * c + gR.coeffs
    return SpectralField(u.grid, drift), SpectralField(u.grid, diffusion)


def energy_drift_rate(u: SpectralField, p: EquationParams, sigma: float | None = None) -> float:
    """dH/dt of the R-truncated equation (lambda = inf).

    (theta_R - 1) int u^2 d_x K u dx
      + theta_R (theta_R - 1) Gamma^2 int (1/2 g K^{-1} g + u g^2) dx
    """
    sigma = p.sigma if sigma is None else sigma
    th = cutoff(sobolev_norm(u, sigma), p.R)
    if th == 1.0 or not p.nonlinear:
        return 0.0
    ops = _ops(u, p)
    dxKu = SpectralField(u.grid, ops.dxK * u.coeffs)
    rate = (th - 1.0) * integrate_product(u, u, dxKu)
    if p.gamma_sq and th != 0.0:
        g = eval_g(u, p)
        gKg = u.grid.period * float(np.sum(ops.Kinv * np.abs(g.coeffs) ** 2))
        rate += th * (th - 1.0) * p.gamma_sq * (0.5 * gKg + integrate_product(u, g, g))
    return rate
