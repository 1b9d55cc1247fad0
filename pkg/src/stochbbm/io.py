"""Persistence of trajectories, field snapshots and reports.

Output directory layout::

    config.echo          full configuration, ``key = value``
    report.json          metrics (deterministic; no timings)
    timings.json         wall-clock timings
    trajectory-<tag>.csv per-step diagnostics
    fields-<tag>.bin     physical-space snapshots

Trajectory CSV columns: ``step, t, H_sigma_norm, energy_norm, hamiltonian,
theta_R, B_t``; floats are written with ``repr`` so they round-trip exactly.

Binary field files: a 16-byte header (8-byte magic ``b"SBBMFLD1"``, uint32 N,
uint32 snapshot count, little-endian) followed by, per snapshot, one float64
time and N float64 samples u(x_j), little-endian.
"""

from __future__ import annotations

import csv
import json
import math
import struct
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .integrator import DIAGNOSTIC_COLUMNS, Trajectory
from .spectral import Grid, to_physical, SpectralField

MAGIC = b"SBBMFLD1"
_HEADER = struct.Struct("<8sII")


def write_trajectory_csv(traj: Trajectory, filename) -> None:
    d = traj.diagnostics
    with open(filename, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["step", *DIAGNOSTIC_COLUMNS])
        for n in range(len(d["t"])):
            w.writerow([n, *(repr(float(d[c][n])) for c in DIAGNOSTIC_COLUMNS)])


def read_trajectory_csv(filename) -> dict:
    with open(filename, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {c: np.array([float(r[c]) for r in rows]) for c in DIAGNOSTIC_COLUMNS}


def write_fields(traj: Trajectory, filename) -> None:
    grid = traj.grid
    with open(filename, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, grid.size, len(traj.times)))
        for t, c in zip(traj.times, traj.states):
            u = to_physical(SpectralField(grid, c))
            fh.write(np.float64(t).astype("<f8").tobytes())
            fh.write(u.astype("<f8").tobytes())


def read_fields(filename) -> tuple[np.ndarray, np.ndarray]:
    """Return (times, samples) with samples of shape (count, N)."""
    data = Path(filename).read_bytes()
    if len(data) < _HEADER.size:
        raise ConfigError(f"{filename}: truncated header")
    magic, n, count = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ConfigError(f"{filename}: bad magic {magic!r}")
    body = np.frombuffer(data, dtype="<f8", offset=_HEADER.size)
    if body.size != count * (n + 1):
        raise ConfigError(f"{filename}: expected {count} snapshots of {n} samples")
    body = body.reshape(count, n + 1)
    return body[:, 0].copy(), body[:, 1:].copy()


def read_field_file(filename, grid: Grid) -> np.ndarray:
    """Initial field from a binary field dump (first snapshot) or a text column."""
    filename = Path(filename)
    with open(filename, "rb") as fh:
        head = fh.read(8)
    if head == MAGIC:
        _, samples = read_fields(filename)
        u = samples[0]
    else:
        u = np.loadtxt(filename, dtype=float).ravel()
    if u.shape != (grid.size,):
        raise ConfigError(f"{filename}: {u.size} samples for a grid of {grid.size}")
    return u


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dump_json(obj, filename) -> None:
    with open(filename, "w") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")
