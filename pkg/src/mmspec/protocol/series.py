"""Uniform time series, grid construction, seed derivation and CSV I/O."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

GRID_TOL = 1e-9


def uniform_grid(T: float, dt: float, t0: float = 0.0) -> tuple[np.ndarray, float]:
    """Grid ``t0, t0 + dt', ..., t0 + T`` with ``dt' = T / round(T / dt)``.

    The spacing is adjusted (never by more than half a step overall) so the
    last point lands exactly on ``T``.
    """
    if not T > 0:
        raise ValueError("T must be positive")
    if not 0 < dt <= T:
        raise ValueError("dt must satisfy 0 < dt <= T")
    steps = max(1, int(round(T / dt)))
    step = T / steps
    return t0 + step * np.arange(steps + 1), step


def derive_seed(root, *key: int) -> np.random.SeedSequence:
    """Child seed keyed on ``key`` (e.g. time index, sample index), independent of call order."""
    if isinstance(root, np.random.SeedSequence):
        return np.random.SeedSequence(root.entropy, spawn_key=tuple(root.spawn_key) + tuple(key))
    return np.random.SeedSequence(0 if root is None else int(root), spawn_key=tuple(int(k) for k in key))


def rng_for(root, *key: int) -> np.random.Generator:
    return np.random.default_rng(derive_seed(root, *key))


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Complex samples on a uniform, strictly increasing time grid.

    ``errors`` (optional) holds per-point standard errors as ``re_err + 1j*im_err``.
    """

    times: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)
    errors: np.ndarray | None = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float).reshape(-1)
        v = np.asarray(self.values, dtype=complex).reshape(-1)
        if t.shape != v.shape:
            raise ValueError(f"{t.size} times but {v.size} values")
        if t.size < 2:
            raise ValueError("a time series needs at least two points")
        check_uniform(t)
        if not np.all(np.isfinite(v)):
            raise ValueError("time series values must be finite")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)
        if self.errors is not None:
            e = np.asarray(self.errors, dtype=complex).reshape(-1)
            if e.shape != v.shape:
                raise ValueError("errors must match values in length")
            object.__setattr__(self, "errors", e)

    def __len__(self) -> int:
        return self.times.size

    @property
    def dt(self) -> float:
        return float((self.times[-1] - self.times[0]) / (self.times.size - 1))

    @property
    def T(self) -> float:
        return float(self.times[-1] - self.times[0])

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        with_err = self.errors is not None
        w.writerow(["t", "re", "im"] + (["re_err", "im_err"] if with_err else []))
        for i in range(self.times.size):
            row = [repr(float(self.times[i])), repr(float(self.values[i].real)),
                   repr(float(self.values[i].imag))]
            if with_err:
                row += [repr(float(self.errors[i].real)), repr(float(self.errors[i].imag))]
            w.writerow(row)
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, path) -> "TimeSeries":
        return cls.from_csv_text(Path(path).read_text())

    @classmethod
    def from_csv_text(cls, text: str) -> "TimeSeries":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0][:3] != ["t", "re", "im"]:
            raise ValueError("series CSV must start with header t,re,im")
        data = np.array([[float(x) for x in r] for r in rows[1:] if r], dtype=float)
        if data.ndim != 2 or data.shape[0] < 2:
            raise ValueError("series CSV needs at least two rows")
        errors = data[:, 3] + 1j * data[:, 4] if data.shape[1] >= 5 else None
        return cls(data[:, 0], data[:, 1] + 1j * data[:, 2], {}, errors)


def check_uniform(t: np.ndarray, tol: float = GRID_TOL) -> float:
    if t.size < 2:
        raise ValueError("grid needs at least two points")
    d = np.diff(t)
    if np.any(d <= 0):
        raise ValueError("time grid must be strictly increasing")
    step = (t[-1] - t[0]) / (t.size - 1)
    if np.max(np.abs(d - step)) > tol * max(1.0, float(np.max(np.abs(t)))):
        raise ValueError("time grid is not uniform")
    return float(step)
