"""Driving noise: the aggregated scalar Brownian motion B = sum_j gamma_j W_j.

Only the variance rate Gamma^2 = sum_j gamma_j^2 and the increments of B enter
the dynamics; the individual gamma_j are kept as metadata.

Stream discipline: member ``i`` of an ensemble with seed ``s`` draws its
standard normals from ``Philox(SeedSequence(s, spawn_key=(i,)))``, so members
are independent, reproducible and can be sampled in any order.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ConfigError
from .spectral import SpectralField, apply_multiplier, translation_symbol


def _exact_sum_of_squares(gammas) -> float:
    # square the shortest decimal representation exactly and round once, so
    # that e.g. gammas (0.1, 0.1) give exactly the float 0.02
    total = sum((Fraction(repr(float(g))) ** 2 for g in gammas), Fraction(0))
    return float(total)


@dataclass(frozen=True)
class NoiseModel:
    gamma_sq_sum: float
    gammas: tuple = ()

    def __post_init__(self):
        if not np.isfinite(self.gamma_sq_sum) or self.gamma_sq_sum < 0:
            raise ConfigError(f"Gamma^2 must be finite and >= 0, got {self.gamma_sq_sum}")

    @classmethod
    def from_gammas(cls, gammas: Sequence[float]) -> NoiseModel:
        gammas = tuple(float(g) for g in gammas)
        if not all(np.isfinite(gammas)):
            raise ConfigError("noise coefficients must be finite")
        return cls(_exact_sum_of_squares(gammas), gammas)

    @property
    def gamma(self) -> float:
        return float(np.sqrt(self.gamma_sq_sum))


@dataclass(frozen=True, eq=False)
class NoisePath:
    """Discrete path of B on t_n = n*dt, n = 0..n_steps."""

    dt: float
    increments: np.ndarray = field(repr=False)
    cumulative: np.ndarray = field(repr=False)
    seed: int | None = None
    member: int = 0

    @property
    def n_steps(self) -> int:
        return len(self.increments)

    @property
    def horizon(self) -> float:
        return self.n_steps * self.dt

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.dt

    @classmethod
    def from_increments(cls, dt, increments, seed=None, member=0) -> NoisePath:
        inc = np.asarray(increments, dtype=float)
        cum = np.concatenate([[0.0], np.cumsum(inc)])
        return cls(float(dt), inc, cum, seed, member)


def _n_steps(horizon: float, dt: float) -> int:
    if not (dt > 0 and horizon > 0):
        raise ConfigError(f"horizon and dt must be positive (T={horizon}, dt={dt})")
    n = int(round(horizon / dt))
    if n < 1 or abs(n * dt - horizon) > 1e-9 * horizon:
        raise ConfigError(f"dt={dt} does not divide horizon T={horizon}")
    return n


def normal_stream(seed: int, member: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(member),))
    return np.random.Generator(np.random.Philox(ss))


def path_from_normals(model: NoiseModel, dt: float, normals, seed=None, member=0) -> NoisePath:
    z = np.asarray(normals, dtype=float)
    return NoisePath.from_increments(dt, np.sqrt(model.gamma_sq_sum * dt) * z, seed, member)


def sample_path(model: NoiseModel, horizon: float, dt: float, seed: int,
                member: int = 0) -> NoisePath:
    n = _n_steps(horizon, dt)
    z = normal_stream(seed, member).standard_normal(n)
    return path_from_normals(model, dt, z, seed, member)


def coarsen_path(path: NoisePath, factor: int) -> NoisePath:
    """Same Brownian path observed every ``factor`` fine steps."""
    if int(factor) != factor or factor < 1:
        raise ConfigError(f"coarsening factor must be a positive integer, got {factor}")
    factor = int(factor)
    if path.n_steps % factor:
        raise ConfigError(f"factor {factor} does not divide {path.n_steps} steps")
    inc = path.increments.reshape(-1, factor).sum(axis=1)
    cum = path.cumulative[::factor].copy()
    return NoisePath(path.dt * factor, inc, cum, path.seed, path.member)


def truncate_path(path: NoisePath, n_steps: int) -> NoisePath:
    return NoisePath(path.dt, path.increments[:n_steps].copy(),
                     path.cumulative[:n_steps + 1].copy(), path.seed, path.member)


def apply_random_translation(u: SpectralField, beta: float) -> SpectralField:
    """S_W for a Brownian increment beta: u -> u(. + beta)."""
    return apply_multiplier(u, translation_symbol(beta))


def write_path_csv(path: NoisePath, filename) -> None:
    with open(filename, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "t", "dB", "B"])
        t = path.times
        for n in range(path.n_steps + 1):
            db = path.increments[n] if n < path.n_steps else 0.0
            w.writerow([n, repr(float(t[n])), repr(float(db)), repr(float(path.cumulative[n]))])


def read_path_csv(filename) -> NoisePath:
    """Load a path written by :func:`write_path_csv` (the last dB row is unused)."""
    with open(filename, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if len(rows) < 2:
        raise ConfigError(f"{filename}: path needs at least one step")
    t = np.array([float(r["t"]) for r in rows])
    inc = np.array([float(r["dB"]) for r in rows[:-1]])
    cum = np.array([float(r["B"]) for r in rows])
    dt = float(t[1] - t[0])
    return NoisePath(dt, inc, cum)
