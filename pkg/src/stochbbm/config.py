"""Run configuration: a flat ``key = value`` text format.

Lines are ``key = value``; ``#`` starts a comment.  Numeric values may use
``pi``, ``inf`` and arithmetic (``64*pi``, ``2**-10``, ``2^-10``).  Lists are
comma separated.  Unknown keys are errors.
"""

from __future__ import annotations

import ast
import dataclasses
import logging
import math
import operator
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .dynamics import EquationParams
from .errors import ConfigError
from .integrator import SchemeKind
from .noise import NoiseModel
from .spectral import Grid, SpectralField, energy_norm, to_spectral

log = logging.getLogger(__name__)

IC_PROFILES = ("cos", "two-mode", "gaussian", "sech2", "zero", "file")


@dataclass
class SimConfig:
    sigma0: float = 1.0
    sigma: float = 1.0
    L: float = 64 * math.pi
    N: int = 256
    dt: float = 2.0**-10
    T0: float = 1.0
    gamma_sq: float | None = 0.04
    gammas: tuple = ()
    R: float = math.inf
    lam: float = math.inf
    scheme: str = SchemeKind.EXPONENTIAL_ITO.value
    milstein: bool = True
    nonlinear: bool = True
    seed: int = 20240531
    ensemble_size: int = 100
    snapshot_stride: int = 64
    save_fields: bool = True
    # initial condition
    ic: str = "cos"
    ic_mode: int = 4
    ic_amplitude: float | None = None
    ic_energy_fraction: float = 0.1
    ic_width: float = 1.0
    ic_file: str = ""
    # Ĉ_H sampling
    ch_samples: int = 400
    ch_seed: int = 7
    # studies
    levels: int = 3
    order_levels: int = 4
    lambda_list: tuple = (4.0, 8.0, 16.0)
    truncation_m: float | None = None
    monitor_m: float | None = None

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.gammas and self.gamma_sq is not None and \
                NoiseModel.from_gammas(self.gammas).gamma_sq_sum != self.gamma_sq:
            raise ConfigError("give either gamma_sq or gammas, not conflicting both")
        try:
            SchemeKind(self.scheme)
        except ValueError:
            raise ConfigError(f"unknown scheme {self.scheme!r}; "
                              f"expected one of {[s.value for s in SchemeKind]}") from None
        if self.ic not in IC_PROFILES:
            raise ConfigError(f"unknown ic {self.ic!r}; expected one of {IC_PROFILES}")
        if self.ic == "file" and not self.ic_file:
            raise ConfigError("ic = file requires ic_file")
        for name in ("dt", "T0"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        for name in ("ensemble_size", "snapshot_stride", "levels", "order_levels"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.levels < 2 or self.order_levels < 2:
            raise ConfigError("refinement studies need at least 2 levels")
        n = self.T0 / self.dt
        if abs(n - round(n)) > 1e-9 * n:
            raise ConfigError(f"dt={self.dt} does not divide T0={self.T0}")
        Grid(self.L, self.N)
        self.params()
        if not self.params().in_wellposed_regime:
            log.warning("sigma=%g < max(sigma0, 1): outside the well-posedness regime",
                        self.sigma)

    # --- derived objects -------------------------------------------------------

    @property
    def grid(self) -> Grid:
        return Grid(self.L, self.N)

    @property
    def noise(self) -> NoiseModel:
        if self.gammas:
            return NoiseModel.from_gammas(self.gammas)
        return NoiseModel(0.0 if self.gamma_sq is None else self.gamma_sq)

    @property
    def n_steps(self) -> int:
        return int(round(self.T0 / self.dt))

    def params(self, **overrides) -> EquationParams:
        kw = dict(sigma0=self.sigma0, sigma=self.sigma,
                  gamma_sq=self.noise.gamma_sq_sum, R=self.R, lam=self.lam,
                  nonlinear=self.nonlinear)
        kw.update(overrides)
        return EquationParams(**kw)

    def replace(self, **changes) -> SimConfig:
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def echo(self) -> str:
        lines = ["# stochbbm run configuration"]
        for k, v in self.to_dict().items():
            lines.append(f"{k} = {_format_value(v)}")
        return "\n".join(lines) + "\n"


# --- parsing -------------------------------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNARY = {ast.USub: operator.neg, ast.UAdd: operator.pos}
_NAMES = {"pi": math.pi, "inf": math.inf, "e": math.e}


def _eval_number(text: str) -> float:
    text = text.strip().replace("^", "**")
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError:
        raise ConfigError(f"cannot parse number {text!r}") from None

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return node.value
        if isinstance(node, ast.Name) and node.id.lower() in _NAMES:
            return _NAMES[node.id.lower()]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            return _UNARY[type(node.op)](ev(node.operand))
        raise ConfigError(f"unsupported expression {text!r}")

    return ev(tree)


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _format_value(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "inf" if math.isinf(v) else repr(v)
    if isinstance(v, (tuple, list)):
        return ", ".join(_format_value(x) for x in v)
    return str(v)


_FIELD_TYPES = {
    "sigma0": float, "sigma": float, "L": float, "N": int, "dt": float, "T0": float,
    "gamma_sq": "optfloat", "gammas": "floats", "R": float, "lam": float, "scheme": str,
    "milstein": bool, "nonlinear": bool, "seed": int, "ensemble_size": int,
    "snapshot_stride": int, "save_fields": bool, "ic": str, "ic_mode": int,
    "ic_amplitude": "optfloat", "ic_energy_fraction": float, "ic_width": float,
    "ic_file": str, "ch_samples": int, "ch_seed": int, "levels": int, "order_levels": int,
    "lambda_list": "floats", "truncation_m": "optfloat", "monitor_m": "optfloat",
}
# keep the schema in sync with the dataclass
assert set(_FIELD_TYPES) == {f.name for f in fields(SimConfig)}

ALIASES = {"lambda": "lam", "period": "L", "horizon": "T0", "gamma2": "gamma_sq"}


def convert_value(key: str, text: str):
    kind = _FIELD_TYPES[key]
    text = text.strip()
    if kind is float:
        return float(_eval_number(text))
    if kind is int:
        v = _eval_number(text)
        if float(v) != int(v):
            raise ConfigError(f"{key} must be an integer, got {text!r}")
        return int(v)
    if kind is bool:
        return _parse_bool(text)
    if kind is str:
        return text
    if kind == "optfloat":
        return None if text.lower() in ("none", "auto", "") else float(_eval_number(text))
    if kind == "floats":
        return tuple(float(_eval_number(t)) for t in text.split(",") if t.strip())
    raise AssertionError(kind)


def parse_config_text(text: str, base: SimConfig | None = None) -> SimConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        key = ALIASES.get(key, key)
        if key not in _FIELD_TYPES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = convert_value(key, val)
        except ConfigError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None
    if "gammas" in values and "gamma_sq" not in values:
        values["gamma_sq"] = None
    base = base or SimConfig()
    return base.replace(**values)


def load_config(path) -> SimConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config_text(text)


# --- initial conditions ---------------------------------------------------------------

def initial_profile(cfg: SimConfig) -> np.ndarray:
    """Unit-amplitude profile sampled on the grid."""
    grid = cfg.grid
    x, L = grid.x, grid.period
    k = 2 * np.pi * cfg.ic_mode / L
    if cfg.ic == "cos":
        return np.cos(k * x)
    if cfg.ic == "two-mode":
        return np.cos(k * x) + 0.5 * np.cos(2 * k * x)
    if cfg.ic == "gaussian":
        return np.exp(-0.5 * ((x - L / 2) / cfg.ic_width) ** 2)
    if cfg.ic == "sech2":
        return 1.0 / np.cosh((x - L / 2) / cfg.ic_width) ** 2
    if cfg.ic == "zero":
        return np.zeros_like(x)
    from .io import read_field_file
    return read_field_file(cfg.ic_file, grid)


def initial_condition(cfg: SimConfig, C_H: float | None = None) -> SpectralField:
    """u0 with amplitude ``ic_amplitude``, or scaled to ||u0||_H = ic_energy_fraction / Ĉ_H."""
    u = to_spectral(cfg.grid, initial_profile(cfg))
    if cfg.ic in ("zero", "file"):
        return u if cfg.ic_amplitude is None else u * cfg.ic_amplitude
    if cfg.ic_amplitude is not None:
        return u * cfg.ic_amplitude
    if C_H is None:
        from .experiments import estimate_CH_for
        C_H = estimate_CH_for(cfg)
    return u * (cfg.ic_energy_fraction / C_H / energy_norm(u, cfg.sigma0))
