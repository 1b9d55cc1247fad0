"""Periodic pseudospectral discretization.

Coefficients are Fourier *series* coefficients,

    c_k = (1/N) sum_j u(x_j) exp(-i xi_k x_j),   u(x_j) = sum_k c_k exp(i xi_k x_j),

stored in FFT order (``numpy.fft.fftfreq``).  With this convention the squared
H^s norm is ``L * sum_k (1 + xi_k^2)^s |c_k|^2`` and Parseval is exact on the
grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from .errors import ConfigError, NumericError


@dataclass(frozen=True)
class Grid:
    """Uniform grid on the torus [0, L) with N collocation points."""

    period: float
    size: int

    def __post_init__(self):
        if not (np.isfinite(self.period) and self.period > 0):
            raise ConfigError(f"grid period must be positive, got {self.period}")
        if int(self.size) != self.size or self.size < 8 or self.size % 2:
            raise ConfigError(f"grid size must be an even integer >= 8, got {self.size}")
        object.__setattr__(self, "period", float(self.period))
        object.__setattr__(self, "size", int(self.size))

    @cached_property
    def x(self) -> np.ndarray:
        return np.arange(self.size) * (self.period / self.size)

    @cached_property
    def k(self) -> np.ndarray:
        """Integer wavenumbers in FFT order, -N/2 included."""
        return np.fft.fftfreq(self.size, d=1.0 / self.size).astype(int)

    @cached_property
    def xi(self) -> np.ndarray:
        """Angular frequencies 2*pi*k/L in FFT order."""
        return 2 * np.pi * self.k / self.period

    @cached_property
    def frequencies(self) -> np.ndarray:
        """Angular frequencies sorted increasingly, -N/2 ... N/2-1."""
        return np.sort(self.xi)

    @property
    def nyquist_index(self) -> int:
        return self.size // 2

    @property
    def nyquist(self) -> float:
        """Largest resolved angular frequency, pi*N/L."""
        return np.pi * self.size / self.period

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        # keep |k| < N/3; also kills the aliased band when 3 divides N
        kmax = (self.size - 1) // 3
        return np.abs(self.k) <= kmax

    @cached_property
    def _padded_size(self) -> int:
        return 3 * self.size // 2


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Fourier series coefficients of a real field on ``grid``."""

    grid: Grid
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (self.grid.size,):
            raise ConfigError(
                f"expected {self.grid.size} coefficients, got shape {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def _check(self, other: SpectralField):
        if other.grid != self.grid:
            raise ConfigError("fields live on different grids")

    def __add__(self, other):
        self._check(other)
        return SpectralField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check(other)
        return SpectralField(self.grid, self.coeffs - other.coeffs)

    def __neg__(self):
        return SpectralField(self.grid, -self.coeffs)

    def __mul__(self, scalar):
        return SpectralField(self.grid, self.coeffs * scalar)

    __rmul__ = __mul__

    @classmethod
    def zeros(cls, grid: Grid) -> SpectralField:
        return cls(grid, np.zeros(grid.size, dtype=complex))

    def physical(self) -> np.ndarray:
        return to_physical(self)


@dataclass(frozen=True)
class MultiplierSymbol:
    """A Fourier multiplier, i.e. a function of the angular frequency."""

    name: str
    evaluator: Callable[[np.ndarray], np.ndarray] = field(compare=False)
    params: dict = field(default_factory=dict, compare=False)
    unitary: bool = False

    def __call__(self, xi):
        return self.evaluator(np.asarray(xi, dtype=float))

    def on(self, grid: Grid) -> np.ndarray:
        """Symbol values on ``grid`` (FFT order), made Hermitian at -N/2.

        The unpaired mode -N/2 cannot carry an imaginary part in a real field.
        Unitary (pure phase) symbols act as the identity there, which keeps
        them exact isometries; other symbols keep their real part.
        """
        vals = np.asarray(self(grid.xi), dtype=complex)
        if vals.shape == ():
            vals = np.full(grid.size, vals)
        if not np.all(np.isfinite(vals)):
            raise NumericError(f"symbol {self.name!r} is not finite on the grid")
        vals = vals.copy()
        nyq = grid.nyquist_index
        vals[nyq] = 1.0 if self.unitary else vals[nyq].real
        return vals


def to_spectral(grid: Grid, u) -> SpectralField:
    u = np.asarray(u)
    if u.shape != (grid.size,):
        raise ConfigError(f"field has shape {u.shape}, grid expects ({grid.size},)")
    if np.iscomplexobj(u):
        raise ConfigError("physical fields must be real")
    c = np.fft.fft(u) / grid.size
    # exact Hermitian symmetry
    c = 0.5 * (c + np.conj(c[-grid.k]))
    return SpectralField(grid, c)


def to_physical(u: SpectralField) -> np.ndarray:
    return np.fft.ifft(u.coeffs * u.grid.size).real


def apply_multiplier(u: SpectralField, m: MultiplierSymbol | np.ndarray) -> SpectralField:
    vals = m.on(u.grid) if isinstance(m, MultiplierSymbol) else m
    return SpectralField(u.grid, u.coeffs * vals)


def sobolev_norm(u: SpectralField, sigma: float) -> float:
    g = u.grid
    w = (1.0 + g.xi**2) ** sigma
    return float(np.sqrt(g.period * np.sum(w * np.abs(u.coeffs) ** 2)))


def energy_norm(u: SpectralField, sigma0: float) -> float:
    """Quadratic part of the Hamiltonian, (1/2 int (K^{-1/2} u)^2 dx)^{1/2}."""
    g = u.grid
    kinv = 1.0 / bessel_symbol(sigma0)(g.xi).real
    return float(np.sqrt(0.5 * g.period * np.sum(kinv * np.abs(u.coeffs) ** 2)))


def inner(u: SpectralField, v: SpectralField) -> float:
    """L^2 inner product int u v dx of two real fields."""
    u._check(v)
    return float(u.grid.period * np.real(np.vdot(u.coeffs, v.coeffs)))


def dealias(u: SpectralField) -> SpectralField:
    return SpectralField(u.grid, np.where(u.grid.dealias_mask, u.coeffs, 0))


def dealiased_product(u: SpectralField, v: SpectralField) -> SpectralField:
    """Pointwise product with the 2/3 rule applied before and after."""
    u._check(v)
    mask = u.grid.dealias_mask
    a = np.fft.ifft(np.where(mask, u.coeffs, 0)).real
    b = np.fft.ifft(np.where(mask, v.coeffs, 0)).real if v is not u else a
    c = np.fft.fft(a * b) * u.grid.size
    return SpectralField(u.grid, np.where(mask, c, 0))


def padded_physical(u: SpectralField) -> np.ndarray:
    """Samples of the trigonometric interpolant on the 3/2-refined grid."""
    g = u.grid
    n, m = g.size, g._padded_size
    half = n // 2
    c = np.zeros(m, dtype=complex)
    c[:half] = u.coeffs[:half]
    c[m - half + 1:] = u.coeffs[half + 1:]
    # split the unpaired mode between +-N/2
    c[half] = 0.5 * u.coeffs[half]
    c[m - half] = 0.5 * u.coeffs[half]
    return np.fft.ifft(c * m).real


def integrate_product(*fields: SpectralField) -> float:
    """int prod(fields) dx by trapezoid quadrature on the 3/2-padded grid."""
    g = fields[0].grid
    for f in fields[1:]:
        fields[0]._check(f)
    vals = padded_physical(fields[0])
    for f in fields[1:]:
        vals = vals * padded_physical(f)
    return float(g.period * np.mean(vals))


# --- symbols -----------------------------------------------------------------

def bessel_symbol(sigma0: float) -> MultiplierSymbol:
    """K(xi) = (1 + xi^2)^(-sigma0)."""
    return MultiplierSymbol("K", lambda xi: (1.0 + xi**2) ** (-sigma0),
                            {"sigma0": sigma0})


def bessel_inv_sqrt_symbol(sigma0: float) -> MultiplierSymbol:
    return MultiplierSymbol("K^-1/2", lambda xi: (1.0 + xi**2) ** (0.5 * sigma0),
                            {"sigma0": sigma0})


def derivative_symbol(order: int = 1) -> MultiplierSymbol:
    return MultiplierSymbol("d/dx", lambda xi: (1j * xi) ** order, {"order": order})


def translation_symbol(beta: float) -> MultiplierSymbol:
    """exp(i xi beta): u -> u(. + beta)."""
    return MultiplierSymbol("translation", lambda xi: np.exp(1j * xi * beta),
                            {"beta": beta}, unitary=True)


def dispersive_group_symbol(sigma0: float, t: float) -> MultiplierSymbol:
    """exp(-i xi K(xi) t), the deterministic linear flow."""
    return MultiplierSymbol(
        "S(t)",
        lambda xi: np.exp(-1j * xi * (1.0 + xi**2) ** (-sigma0) * t),
        {"sigma0": sigma0, "t": t}, unitary=True)
