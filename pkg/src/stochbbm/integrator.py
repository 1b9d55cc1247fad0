"""Time stepping of the mild equation, Picard iteration and stopping times."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .dynamics import (EquationParams, cutoff, eval_truncated, hamiltonian,
                       milstein_correction, operators)
from .errors import (ConfigError, DivergenceError, NonContractionError,
                     StepRejected, UsageError)
from .noise import NoisePath
from .spectral import SpectralField, dealiased_product, energy_norm, sobolev_norm


class SchemeKind(str, Enum):
    EXPONENTIAL_ITO = "exponential-ito"
    MIDPOINT_STRATONOVICH = "midpoint-stratonovich"
    LINEAR_EXACT = "linear-exact"


def _finite_or_raise(u: SpectralField, prev: SpectralField, step=None, t=None):
    if not np.all(np.isfinite(u.coeffs)):
        raise DivergenceError(f"non-finite state at step {step}", last_state=prev,
                              step=step, time=t)
    return u


def step_linear(u: SpectralField, dt: float, dB: float, p: EquationParams) -> SpectralField:
    """Exact linear stochastic flow S(dt) S_W over one step."""
    ops = operators(u.grid, p.sigma0, p.lam)
    return SpectralField(u.grid, ops.group(dt, dB) * u.coeffs)


def _duhamel_increment(u: SpectralField, dt: float, dB: float, p: EquationParams,
                       sigma: float | None, milstein: bool) -> np.ndarray:
    fR, gR, _ = eval_truncated(u, p, sigma)
    inc = dt * fR.coeffs + dB * gR.coeffs
    if milstein and p.nonlinear and p.gamma_sq:
        inc = inc + 0.5 * (dB * dB - p.gamma_sq * dt) * milstein_correction(u, p, sigma).coeffs
    return inc


def step_exponential_ito(u: SpectralField, dt: float, dB: float, p: EquationParams,
                         sigma: float | None = None, milstein: bool = True) -> SpectralField:
    """One step of the mild equation with the linear stochastic flow exact.

        u_{n+1} = S(dt) S_W(dB) [u_n + dt f_R(u_n) + dB g_R(u_n)
                                 + 1/2 (dB^2 - Gamma^2 dt) M(u_n)]

    ``milstein=False`` drops the M term (exponential Euler-Maruyama, strong
    order 1/2); see :func:`stochbbm.dynamics.milstein_correction`.
    """
    if not dt > 0:
        raise ConfigError(f"dt must be positive, got {dt}")
    ops = operators(u.grid, p.sigma0, p.lam)
    # overflow is detected below and raised as a divergence
    with np.errstate(over="ignore", invalid="ignore"):
        v = u.coeffs + _duhamel_increment(u, dt, dB, p, sigma, milstein)
        out = SpectralField(u.grid, ops.group(dt, dB) * v)
    return _finite_or_raise(out, u)


def step_midpoint_stratonovich(u: SpectralField, dt: float, dB: float, p: EquationParams,
                               sigma: float | None = None, tol: float = 1e-12,
                               max_iter: int = 50) -> SpectralField:
    """Implicit midpoint rule for the Stratonovich form.

    The linear part is inverted exactly in Fourier space (Cayley transform);
    the fixed-point iteration acts on the nonlinear part only.  A finite R
    applies theta_R at the midpoint state, which matches the truncated Ito
    equation only while theta_R = 1.
    """
    if not dt > 0:
        raise ConfigError(f"dt must be positive, got {dt}")
    if not math.isinf(p.lam):
        raise ConfigError("the Stratonovich midpoint scheme requires lambda = inf")
    sigma = p.sigma if sigma is None else sigma
    ops = operators(u.grid, p.sigma0, p.lam)
    ell = 1j * (ops.xiP * dB - ops.xiK * dt)
    denom = 1.0 - 0.5 * ell
    u0 = u.coeffs
    m = SpectralField(u.grid, u0 / denom)
    if not p.nonlinear:
        return SpectralField(u.grid, 2.0 * m.coeffs - u0)
    nl = ops.dxK * (dB - dt * ops.K)
    scale = tol * max(1.0, sobolev_norm(u, sigma))
    for _ in range(max_iter):
        # a diverging iteration overflows; that is reported as a rejection
        with np.errstate(over="ignore", invalid="ignore"):
            th = cutoff(sobolev_norm(m, sigma), p.R)
            rhs = u0 + 0.5 * th * nl * dealiased_product(m, m).coeffs
            m_new = SpectralField(u.grid, rhs / denom)
            if not np.all(np.isfinite(m_new.coeffs)):
                raise StepRejected("midpoint iteration produced non-finite values")
            diff = sobolev_norm(m_new - m, sigma)
        m = m_new
        if diff < scale:
            return SpectralField(u.grid, 2.0 * m.coeffs - u0)
    raise StepRejected(f"midpoint iteration did not converge in {max_iter} iterations "
                       f"(last update {diff:.3e})")


# --- stopping times ------------------------------------------------------------

@dataclass
class StoppingMonitor:
    """First-crossing times of ||u||_{H^sigma} > m and ||u||_H > energy_threshold.

    Unset crossings report the horizon (inf over the empty set).
    """

    sigma_threshold: float
    energy_threshold: float
    horizon: float
    sigma: float = 1.0
    sigma0: float = 1.0
    tau_sigma: float | None = None
    tau_energy: float | None = None
    last_t: float = -math.inf

    def update(self, t: float, u: SpectralField, hs: float | None = None,
               en: float | None = None) -> StoppingMonitor:
        if t < self.last_t:
            raise UsageError(f"monitor times must be nondecreasing ({t} < {self.last_t})")
        self.last_t = t
        if self.tau_sigma is None:
            hs = sobolev_norm(u, self.sigma) if hs is None else hs
            if hs > self.sigma_threshold:
                self.tau_sigma = t
        if self.tau_energy is None:
            en = energy_norm(u, self.sigma0) if en is None else en
            if en > self.energy_threshold:
                self.tau_energy = t
        return self

    @property
    def tau_m(self) -> float:
        return self.horizon if self.tau_sigma is None else self.tau_sigma

    @property
    def T2(self) -> float:
        return self.horizon if self.tau_energy is None else self.tau_energy

    @property
    def crossed_sigma(self) -> bool:
        return self.tau_sigma is not None

    @property
    def crossed_energy(self) -> bool:
        return self.tau_energy is not None


def update_monitor(monitor: StoppingMonitor, t: float, u: SpectralField) -> StoppingMonitor:
    return monitor.update(t, u)


# --- trajectories ----------------------------------------------------------------

DIAGNOSTIC_COLUMNS = ("t", "H_sigma_norm", "energy_norm", "hamiltonian", "theta_R", "B_t")


@dataclass
class Trajectory:
    """States every ``stride`` steps plus diagnostics at every step."""

    grid: object
    params: EquationParams
    times: np.ndarray
    states: np.ndarray  # (n_snapshots, N) complex coefficients
    diagnostics: dict = field(default_factory=dict)
    steps: np.ndarray | None = None
    diverged: bool = False
    diverged_step: int | None = None
    last_state: SpectralField | None = None
    rejections: int = 0

    def state(self, i: int) -> SpectralField:
        return SpectralField(self.grid, self.states[i])

    @property
    def final(self) -> SpectralField:
        return self.state(-1)

    def __len__(self):
        return len(self.times)


def diagnostics_of(u: SpectralField, p: EquationParams, sigma: float | None = None) -> tuple:
    sigma = p.sigma if sigma is None else sigma
    # states close to blow-up may have norms beyond the float range; record inf
    with np.errstate(over="ignore", invalid="ignore"):
        hs = sobolev_norm(u, sigma)
        en = energy_norm(u, p.sigma0)
        ham = hamiltonian(u, p)
    return hs, en, ham, cutoff(hs, p.R) if p.nonlinear else 1.0


def _midpoint_substeps(u, dt, dB, p, sigma, rng_key, depth=0, max_depth=8):
    """Midpoint step, halved recursively on rejection via a Brownian bridge."""
    try:
        return step_midpoint_stratonovich(u, dt, dB, p, sigma=sigma), 0
    except StepRejected:
        if depth >= max_depth:
            raise
    ss = np.random.SeedSequence(rng_key[0], spawn_key=(*rng_key[1:], depth))
    z = np.random.Generator(np.random.Philox(ss)).standard_normal()
    half = 0.5 * dB + np.sqrt(p.gamma_sq * dt / 4.0) * z
    u, r1 = _midpoint_substeps(u, dt / 2, half, p, sigma, (*rng_key, 0), depth + 1, max_depth)
    u, r2 = _midpoint_substeps(u, dt / 2, dB - half, p, sigma, (*rng_key, 1), depth + 1, max_depth)
    return u, 1 + r1 + r2


def integrate(u0: SpectralField, path: NoisePath, p: EquationParams,
              scheme: SchemeKind | str = SchemeKind.EXPONENTIAL_ITO,
              monitor: StoppingMonitor | None = None, stride: int = 1,
              n_steps: int | None = None, sigma: float | None = None,
              milstein: bool = True) -> Trajectory:
    """Advance ``u0`` along ``path``.

    A non-finite state stops the run; the trajectory is flagged ``diverged``
    and keeps the last finite state.  Rejected midpoint steps are retried on
    two half steps (Brownian bridge refinement, deterministic per seed).
    """
    scheme = SchemeKind(scheme)
    sigma = p.sigma if sigma is None else sigma
    n_steps = path.n_steps if n_steps is None else n_steps
    if n_steps > path.n_steps:
        raise ConfigError(f"path has {path.n_steps} steps, {n_steps} requested")
    if scheme is SchemeKind.LINEAR_EXACT and p.nonlinear:
        raise ConfigError("linear-exact scheme requires nonlinear=False")
    if stride < 1:
        raise ConfigError("stride must be >= 1")
    dt = path.dt
    ops = operators(u0.grid, p.sigma0, p.lam)
    bridge_seed = 0 if path.seed is None else int(path.seed)

    times, states, steps, rows = [], [], [], []

    def record(n, u, force=False):
        hs, en, ham, th = diagnostics_of(u, p, sigma)
        if monitor is not None:
            monitor.update(n * dt, u, hs=hs, en=en)
        rows.append((n * dt, hs, en, ham, th, path.cumulative[n]))
        if force or n % stride == 0 or n == n_steps:
            times.append(n * dt)
            steps.append(n)
            states.append(u.coeffs)

    u = u0
    record(0, u)
    diverged, bad_step, rejections = False, None, 0
    for n in range(n_steps):
        dB = path.increments[n]
        try:
            if scheme is SchemeKind.LINEAR_EXACT:
                # exact group from t = 0, no accumulated phase round-off
                u = SpectralField(u0.grid, ops.group((n + 1) * dt, path.cumulative[n + 1]) * u0.coeffs)
            elif scheme is SchemeKind.EXPONENTIAL_ITO:
                u = step_exponential_ito(u, dt, dB, p, sigma=sigma, milstein=milstein)
            else:
                u, r = _midpoint_substeps(u, dt, dB, p, sigma, (bridge_seed, path.member, n))
                rejections += r
                if not np.all(np.isfinite(u.coeffs)):
                    raise DivergenceError("non-finite state", step=n)
        except (DivergenceError, StepRejected):
            diverged, bad_step = True, n
            break
        record(n + 1, u)

    if diverged and steps[-1] != bad_step:
        # keep the last finite state even off-stride
        times.append(bad_step * dt)
        steps.append(bad_step)
        states.append(u.coeffs)

    diag = {name: np.array([r[i] for r in rows]) for i, name in enumerate(DIAGNOSTIC_COLUMNS)}
    return Trajectory(u0.grid, p, np.array(times), np.array(states), diag,
                      np.array(steps), diverged, bad_step, u, rejections)


# --- Picard iteration --------------------------------------------------------------

@dataclass
class PicardResult:
    trajectory: Trajectory
    distances: list
    ratios: list
    iterations: int


def picard_segment(u_start: SpectralField, path: NoisePath, p: EquationParams,
                   T_seg: float, tol: float = 1e-12, max_iter: int = 50,
                   sigma: float | None = None, milstein: bool = True) -> PicardResult:
    """Fixed point of the time-discretized Duhamel map on [0, T_seg].

    (T u)(t_k) = S(t_k, 0) [u_start + sum_{i<k} S(0, t_i) (dt f_R(u_i) + dB_i g_R(u_i) + ...)]

    with the same integrand as :func:`step_exponential_ito`, so the fixed
    point coincides with the stepped trajectory up to round-off.

    Iterates are compared in the sup_k ||.||_{H^sigma} metric; ``tol`` is
    relative to max(1, ||u_start||_{H^sigma}).
    """
    sigma = p.sigma if sigma is None else sigma
    dt = path.dt
    n = int(round(T_seg / dt))
    if n < 1 or abs(n * dt - T_seg) > 1e-9 * T_seg or n > path.n_steps:
        raise ConfigError(f"T_seg={T_seg} is not a whole number of path steps")
    grid = u_start.grid
    ops = operators(grid, p.sigma0, p.lam)
    t = np.arange(n + 1) * dt
    B = path.cumulative[: n + 1]
    fwd = np.array([ops.group(t[k], B[k]) for k in range(n + 1)])
    back = np.conj(fwd)
    u_cur = fwd * u_start.coeffs
    scale = tol * max(1.0, sobolev_norm(u_start, sigma))
    weight = (1.0 + grid.xi**2) ** sigma

    distances = []
    for it in range(1, max_iter + 1):
        acc = np.empty_like(u_cur)
        acc[0] = u_start.coeffs
        for k in range(n):
            uk = SpectralField(grid, u_cur[k])
            inc = _duhamel_increment(uk, dt, path.increments[k], p, sigma, milstein)
            acc[k + 1] = acc[k] + back[k] * inc
        u_new = fwd * acc
        d = float(np.sqrt(grid.period * np.max(np.sum(weight * np.abs(u_new - u_cur) ** 2, axis=1))))
        distances.append(d)
        u_cur = u_new
        if d < scale:
            break
    else:
        raise NonContractionError(
            f"Picard iteration did not converge in {max_iter} iterations", distances)

    ratios = [b / a for a, b in zip(distances[:-1], distances[1:]) if a > 0]
    rows = []
    for k in range(n + 1):
        uk = SpectralField(grid, u_cur[k])
        rows.append((t[k], *diagnostics_of(uk, p, sigma), B[k]))
    diag = {name: np.array([r[i] for r in rows]) for i, name in enumerate(DIAGNOSTIC_COLUMNS)}
    traj = Trajectory(grid, p, t, u_cur, diag, np.arange(n + 1))
    return PicardResult(traj, distances, ratios, len(distances))
