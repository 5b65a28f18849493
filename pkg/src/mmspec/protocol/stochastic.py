"""Classical baseline: random-phase states and their averaged autocorrelations."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .. import _kernels
from ..errors import EulerInstabilityWarning
from ..operators import Hamiltonian, diagonalize, to_dense
from ..simulator import StateVector
from .series import TimeSeries, derive_seed, uniform_grid

DRIFT_LIMIT = 0.10
CHUNK = 64


@dataclass(frozen=True)
class Euler:
    """Truncated propagator ``(I - i H dt_inner)^m`` with no renormalization."""

    inner_dt: float

    def __post_init__(self):
        if not self.inner_dt > 0:
            raise ValueError("inner_dt must be positive")


@dataclass(frozen=True, eq=False)
class StochasticSample:
    state: StateVector
    seed: int


@dataclass(frozen=True, eq=False)
class StochasticResult:
    """Averaged series plus diagnostics.

    ``variance`` is the estimated variance of the mean at each time
    (``E|x - mean|^2 / K``); ``norm_drift`` is the worst ``| |psi| - 1 |``
    seen by the Euler propagator and ``None`` for the exact one.
    """

    mean: TimeSeries
    variance: np.ndarray
    samples: np.ndarray | None = None
    norm_drift: float | None = None

    @property
    def stderr(self) -> np.ndarray:
        return np.sqrt(self.variance)


def _basis_matrix(n: int, basis) -> np.ndarray | None:
    if basis is None or basis == "computational":
        return None
    if isinstance(basis, Hamiltonian):
        if basis.num_qubits != n:
            raise ValueError("auxiliary Hamiltonian width differs from n")
        return diagonalize(basis).eigenvectors
    raise ValueError(f"basis must be 'computational' or a Hamiltonian, got {basis!r}")


def _phases(d: int, seed) -> np.ndarray:
    theta = np.random.default_rng(seed).uniform(0.0, 2 * math.pi, d)
    return np.exp(1j * theta) / math.sqrt(d)


def stochastic_state(n: int, seed, basis="computational") -> StochasticSample:
    """Equal-weight random-phase superposition over a full orthonormal basis.

    ``basis`` is ``"computational"`` or a Hamiltonian whose eigenvectors are used.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    d = 1 << n
    amps = _phases(d, derive_seed(seed))
    v = _basis_matrix(n, basis)
    if v is not None:
        amps = v @ amps
    return StochasticSample(StateVector(amps), seed)


def _sample_block(d, root, start, stop, v):
    cols = [_phases(d, derive_seed(root, k)) for k in range(start, stop)]
    psi = np.stack(cols, axis=1)
    return psi if v is None else v @ psi


def run_stochastic_series(H: Hamiltonian, K: int, T: float, dt: float, propagator="exact",
                          root_seed=0, basis="computational",
                          keep_samples: bool = False) -> StochasticResult:
    """Average ``<psi_k| U(t) |psi_k>`` over ``K`` random-phase states.

    Sample ``k`` is seeded from ``(root_seed, k)`` so results do not depend
    on chunking. ``propagator`` is ``"exact"`` (eigendecomposition) or
    :class:`Euler`; the latter warns with :class:`EulerInstabilityWarning`
    when the norm drifts by more than 10%.
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    times, step = uniform_grid(T, dt)
    n, d = H.num_qubits, H.dim
    v = _basis_matrix(n, basis)
    total = np.zeros(times.size, dtype=complex)
    total_sq = np.zeros(times.size, dtype=complex)
    kept = [] if keep_samples else None
    drift = None

    if propagator == "exact":
        spec = diagonalize(H)
        vecs = spec.eigenvectors
        phases = np.exp(-1j * np.multiply.outer(spec.all_eigenvalues, times))
        run = lambda psi: (np.abs(vecs.conj().T @ psi) ** 2).T @ phases  # noqa: E731
    elif isinstance(propagator, Euler):
        h = to_dense(H)
        if propagator.inner_dt * np.linalg.norm(h, 2) >= 1:
            raise ValueError("inner_dt * |H| must be < 1 for the Euler propagator")
        stride = int(round(step / propagator.inner_dt))
        if stride < 1 or abs(stride * propagator.inner_dt - step) > 1e-9 * step:
            raise ValueError("grid spacing must be an integer multiple of inner_dt")
        one_step = np.eye(d, dtype=complex) - 1j * propagator.inner_dt * h
        n_steps = stride * (times.size - 1)
        drift = 0.0

        def run(psi):
            nonlocal drift
            vals, norms = _kernels.euler_autocorr(one_step, np.ascontiguousarray(psi), n_steps, stride)
            drift = max(drift, float(np.max(np.abs(norms - 1.0))))
            return vals
    else:
        raise ValueError(f"propagator must be 'exact' or Euler(...), got {propagator!r}")

    for start in range(0, K, CHUNK):
        psi = _sample_block(d, root_seed, start, min(K, start + CHUNK), v)
        vals = run(psi)
        total += vals.sum(axis=0)
        total_sq += (vals.real ** 2).sum(axis=0) + 1j * (vals.imag ** 2).sum(axis=0)
        if kept is not None:
            kept.append(vals)

    mean = total / K
    err = None
    if K > 1:
        var_re = np.clip(total_sq.real / K - mean.real ** 2, 0, None) / (K - 1)
        var_im = np.clip(total_sq.imag / K - mean.imag ** 2, 0, None) / (K - 1)
        var = var_re + var_im
        err = np.sqrt(var_re) + 1j * np.sqrt(var_im)
    else:
        var = np.full(times.size, np.nan)
    if drift is not None and drift > DRIFT_LIMIT:
        warnings.warn(f"Euler norm drift {drift:.3g} exceeds {DRIFT_LIMIT:.0%}; reduce inner_dt",
                      EulerInstabilityWarning, stacklevel=2)
    meta = {"dt": step, "T": float(times[-1]), "K": K, "seed": root_seed,
            "propagator": "exact" if propagator == "exact" else "euler",
            "inner_dt": getattr(propagator, "inner_dt", None), "norm_drift": drift}
    series = TimeSeries(times, mean, meta, err)
    samples = np.concatenate(kept, axis=0) if kept is not None else None
    return StochasticResult(series, var, samples, drift)
