"""Power spectra of time series, quadratic regridding and peak extraction.

Transform convention: for samples ``u_k = u(t_k)`` on a uniform grid,

    F(omega_m) = dt * sum_k u_k exp(+i omega_m t_k),    omega_m = 2 pi m / (N dt)

so a series ``exp(-i lambda t)`` peaks at ``omega = +lambda``, and
``sum |u_k|^2 dt = (d_omega / 2 pi) sum |F_m|^2``. Frequencies are returned
in ascending order over ``[-pi/dt, pi/dt)``.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .protocol.series import TimeSeries, check_uniform


@dataclass(frozen=True, eq=False)
class PowerSpectrum:
    frequencies: np.ndarray
    magnitudes: np.ndarray
    normalized: bool = False
    coefficients: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        f = np.asarray(self.frequencies, dtype=float)
        m = np.asarray(self.magnitudes, dtype=float)
        if f.shape != m.shape or f.ndim != 1:
            raise ValueError("frequencies and magnitudes must be 1-D and equal length")
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "magnitudes", m)

    @property
    def spacing(self) -> float:
        return float(self.frequencies[1] - self.frequencies[0])

    def __len__(self) -> int:
        return self.frequencies.size

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["omega", "magnitude"])
        for f, m in zip(self.frequencies, self.magnitudes):
            w.writerow([repr(float(f)), repr(float(m))])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv_text(cls, text: str) -> "PowerSpectrum":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0][:2] != ["omega", "magnitude"]:
            raise ValueError("spectrum CSV must start with header omega,magnitude")
        data = np.array([[float(x) for x in r[:2]] for r in rows[1:] if r], dtype=float)
        if data.ndim != 2 or data.shape[0] < 3:
            raise ValueError("spectrum CSV needs at least three rows")
        return cls(data[:, 0], data[:, 1])


@dataclass(frozen=True)
class Peak:
    omega: float
    magnitude: float
    bin: int


@dataclass(frozen=True)
class PeakSet:
    peaks: tuple[Peak, ...] = ()

    def __len__(self) -> int:
        return len(self.peaks)

    def __iter__(self):
        return iter(self.peaks)

    @property
    def omegas(self) -> np.ndarray:
        return np.array([p.omega for p in self.peaks])

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["omega_est", "magnitude", "bin"])
        for p in self.peaks:
            w.writerow([repr(p.omega), repr(p.magnitude), p.bin])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text


def dft_frequencies(n: int, dt: float) -> np.ndarray:
    return np.fft.fftshift(2 * np.pi * np.fft.fftfreq(n, dt))


def dft(series: TimeSeries, normalize: bool = False, window: str | None = None) -> PowerSpectrum:
    """Magnitude of the scaled transform; ``window="hann"`` tapers the series first."""
    t = np.asarray(series.times, dtype=float)
    if t.size < 4:
        raise ValueError("DFT needs at least four points")
    dt = check_uniform(t)
    u = np.asarray(series.values, dtype=complex)
    if window == "hann":
        u = u * np.hanning(u.size)
    elif window is not None:
        raise ValueError(f"unknown window {window!r}")
    n = u.size
    # ifft carries exp(+i ...); a nonzero start time only adds a phase per bin
    coeff = dt * n * np.fft.ifft(u)
    omega = 2 * np.pi * np.fft.fftfreq(n, dt)
    coeff = coeff * np.exp(1j * omega * t[0])
    coeff = np.fft.fftshift(coeff)
    mags = np.abs(coeff)
    if normalize:
        top = mags.max()
        if top > 0:
            mags = mags / top
    return PowerSpectrum(dft_frequencies(n, dt), mags, normalize, coeff)


def interpolate_quadratic(series: TimeSeries, target_times: Sequence[float]) -> TimeSeries:
    """Three-point Lagrange interpolation through the nearest source samples."""
    src_t = series.times
    src_v = series.values
    tgt = np.asarray(target_times, dtype=float).reshape(-1)
    if src_t.size < 3:
        raise ValueError("quadratic interpolation needs at least three source points")
    span_tol = 1e-12 * max(1.0, float(np.max(np.abs(src_t))))
    if tgt.min() < src_t[0] - span_tol or tgt.max() > src_t[-1] + span_tol:
        raise ValueError("target grid extends outside the source span (no extrapolation)")
    dt = series.dt
    # centre index of the nearest three-point stencil
    c = np.clip(np.rint((tgt - src_t[0]) / dt).astype(int), 1, src_t.size - 2)
    x0, x1, x2 = src_t[c - 1], src_t[c], src_t[c + 1]
    y0, y1, y2 = src_v[c - 1], src_v[c], src_v[c + 1]
    l0 = (tgt - x1) * (tgt - x2) / ((x0 - x1) * (x0 - x2))
    l1 = (tgt - x0) * (tgt - x2) / ((x1 - x0) * (x1 - x2))
    l2 = (tgt - x0) * (tgt - x1) / ((x2 - x0) * (x2 - x1))
    vals = l0 * y0 + l1 * y1 + l2 * y2
    meta = dict(series.meta)
    meta["interpolated_from_dt"] = dt
    return TimeSeries(tgt, vals, meta)


def find_peaks(spec: PowerSpectrum, threshold: float = 0.2) -> PeakSet:
    """Local maxima above ``threshold * max``, refined by a parabola through three bins.

    The frequency axis is treated as periodic, so the first and last bins are
    neighbours.
    """
    if not 0 < threshold < 1:
        raise ValueError("threshold must lie in (0, 1)")
    m = spec.magnitudes
    top = float(m.max()) if m.size else 0.0
    if top <= 0:
        return PeakSet()
    left = np.roll(m, 1)
    right = np.roll(m, -1)
    # strict on the left so flat-topped plateaus yield one peak
    cand = np.flatnonzero((m > left) & (m >= right) & (m > threshold * top))
    dw = spec.spacing
    peaks = []
    for k in cand:
        a, b, c = left[k], m[k], right[k]
        denom = a - 2 * b + c
        shift = 0.5 * (a - c) / denom if denom != 0 else 0.0
        shift = float(np.clip(shift, -0.5, 0.5))
        peak_mag = b - 0.25 * (a - c) * shift
        peaks.append(Peak(float(spec.frequencies[k] + shift * dw), float(peak_mag), int(k)))
    return PeakSet(tuple(peaks))
