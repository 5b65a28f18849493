"""Statevector and density-matrix backends with Kraus channels and shot sampling."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import _kernels
from .circuit import Circuit, Gate, apply_gate
from .operators import PauliString

PSD_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        _check_pow2(a.shape[0])
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def zero(cls, width: int) -> "StateVector":
        a = np.zeros(1 << width, dtype=np.complex128)
        a[0] = 1
        return cls(a)

    @property
    def width(self) -> int:
        return self.amplitudes.shape[0].bit_length() - 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def to_density(self) -> "DensityMatrix":
        a = self.amplitudes
        return DensityMatrix(np.outer(a, a.conj()))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("density matrix must be square")
        _check_pow2(m.shape[0])
        object.__setattr__(self, "entries", m)

    @classmethod
    def maximally_mixed(cls, width: int) -> "DensityMatrix":
        d = 1 << width
        return cls(np.eye(d, dtype=np.complex128) / d)

    @classmethod
    def zero(cls, width: int) -> "DensityMatrix":
        m = np.zeros((1 << width, 1 << width), dtype=np.complex128)
        m[0, 0] = 1
        return cls(m)

    @property
    def width(self) -> int:
        return self.entries.shape[0].bit_length() - 1

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def is_valid(self, atol: float = 1e-10) -> bool:
        m = self.entries
        if np.max(np.abs(m - m.conj().T)) > atol or abs(np.trace(m) - 1) > atol:
            return False
        return bool(np.linalg.eigvalsh((m + m.conj().T) / 2).min() >= -PSD_TOL)


State = Union[StateVector, DensityMatrix]


def _check_pow2(dim: int) -> None:
    if dim < 1 or dim & (dim - 1):
        raise ValueError(f"dimension {dim} is not a power of two")


def tensor(*states: State) -> State:
    """Tensor product; the first argument occupies the lowest qubits."""
    if all(isinstance(s, StateVector) for s in states):
        a = np.array([1.0 + 0j])
        for s in states:
            a = np.kron(s.amplitudes, a)
        return StateVector(a)
    m = np.array([[1.0 + 0j]])
    for s in states:
        e = s.to_density().entries if isinstance(s, StateVector) else s.entries
        m = np.kron(e, m)
    return DensityMatrix(m)


class QuantumChannel:
    """Kraus-form channel on ``num_qubits`` qubits; must be trace preserving."""

    def __init__(self, kraus_ops: Sequence[np.ndarray], name: str = "channel", atol: float = 1e-10):
        ops = [np.asarray(k, dtype=np.complex128) for k in kraus_ops]
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        dim = ops[0].shape[0]
        _check_pow2(dim)
        for k in ops:
            if k.shape != (dim, dim):
                raise ValueError("Kraus operators must share one square shape")
        completeness = sum(k.conj().T @ k for k in ops)
        err = np.max(np.abs(completeness - np.eye(dim)))
        if err > atol:
            raise ValueError(f"Kraus set is not trace preserving (deviation {err:.3g})")
        self.kraus_ops = tuple(ops)
        self.name = name

    @property
    def num_qubits(self) -> int:
        return self.kraus_ops[0].shape[0].bit_length() - 1

    def __repr__(self) -> str:
        return f"QuantumChannel({self.name!r}, num_qubits={self.num_qubits}, kraus={len(self.kraus_ops)})"


def depolarizing(p: float, num_qubits: int = 1) -> QuantumChannel:
    """``rho -> (1-p) rho + p I/d`` via the uniform Pauli Kraus set."""
    if not 0 <= p <= 1:
        raise ValueError("depolarizing probability must lie in [0, 1]")
    from itertools import product
    from .operators import pauli_string_product

    n_paulis = 4 ** num_qubits
    ops = []
    for letters in product("IXYZ", repeat=num_qubits):
        mat = pauli_string_product(letters)
        w = 1 - p + p / n_paulis if set(letters) == {"I"} else p / n_paulis
        ops.append(math.sqrt(w) * mat)
    return QuantumChannel(ops, f"depolarizing({p})")


def amplitude_damping(gamma: float) -> QuantumChannel:
    if not 0 <= gamma <= 1:
        raise ValueError("damping strength must lie in [0, 1]")
    k0 = np.array([[1, 0], [0, math.sqrt(1 - gamma)]], dtype=complex)
    k1 = np.array([[0, math.sqrt(gamma)], [0, 0]], dtype=complex)
    return QuantumChannel([k0, k1], f"amplitude_damping({gamma})")


def damping_strength(idle_time: float, t1: float) -> float:
    """``gamma = 1 - exp(-t/T1)`` for an idle period (same time units for both)."""
    if t1 <= 0:
        raise ValueError("T1 must be positive")
    return -math.expm1(-idle_time / t1)


def random_channel(rng: np.random.Generator, num_qubits: int = 1, num_kraus: int = 3) -> QuantumChannel:
    """Random CPTP map from a Haar-ish isometry (Stinespring)."""
    d = 1 << num_qubits
    g = rng.normal(size=(d * num_kraus, d)) + 1j * rng.normal(size=(d * num_kraus, d))
    q, _ = np.linalg.qr(g)
    return QuantumChannel([q[k * d:(k + 1) * d] for k in range(num_kraus)], "random")


def apply_unitary(state: State, matrix: np.ndarray, qubits: Sequence[int]) -> State:
    """Apply a dense ``2^k`` matrix; ``qubits[0]`` is the most significant local bit."""
    mat = np.asarray(matrix, dtype=np.complex128)
    qubits = list(qubits)
    if isinstance(state, StateVector):
        a = state.amplitudes.copy().reshape(-1, 1)
        _kernels.apply_kq(a, mat, qubits)
        return StateVector(a.reshape(-1))
    return DensityMatrix(_conjugate(state.entries, lambda blk: _kernels.apply_kq(blk, mat, qubits)))


def _conjugate(rho: np.ndarray, left) -> np.ndarray:
    # left(block) multiplies block in place by an operator K; returns K rho K^dagger
    a = rho.copy()
    left(a)
    b = np.ascontiguousarray(a.conj().T)
    left(b)
    return b


def apply_circuit(state: State, c: Circuit, noise=None) -> State:
    """Run ``c`` on ``state``. ``noise(gate)`` may return channels to apply after a gate."""
    if state.width != c.width:
        raise ValueError(f"state width {state.width} != circuit width {c.width}")
    if isinstance(state, StateVector):
        if noise is not None:
            raise ValueError("noise channels need a density-matrix state")
        a = state.amplitudes.copy().reshape(-1, 1)
        for g in c.gates:
            apply_gate(a, g)
        return StateVector(a.reshape(-1))
    rho = state.entries
    if noise is None:
        return DensityMatrix(_conjugate(rho, lambda blk: _apply_all(blk, c.gates)))
    for g in c.gates:
        rho = _conjugate(rho, lambda blk, g=g: apply_gate(blk, g))
        for ch, qubits in noise(g):
            rho = _apply_channel_raw(rho, ch, qubits)
    return DensityMatrix(rho)


def _apply_all(block: np.ndarray, gates: Sequence[Gate]) -> None:
    for g in gates:
        apply_gate(block, g)


def _apply_channel_raw(rho: np.ndarray, ch: QuantumChannel, qubits: Sequence[int]) -> np.ndarray:
    qubits = list(qubits)
    if ch.num_qubits == len(qubits):
        out = np.zeros_like(rho)
        for k in ch.kraus_ops:
            out += _conjugate(rho, lambda blk, k=k: _kernels.apply_kq(blk, k, qubits))
        return out
    if ch.num_qubits == 1:
        for q in qubits:
            rho = _apply_channel_raw(rho, ch, [q])
        return rho
    raise ValueError(f"{ch.num_qubits}-qubit channel cannot act on qubits {qubits}")


def apply_channel(rho: DensityMatrix, ch: QuantumChannel, qubits: Sequence[int]) -> DensityMatrix:
    """Apply ``ch`` jointly to ``qubits``, or qubit-by-qubit for a one-qubit channel."""
    if not isinstance(rho, DensityMatrix):
        raise TypeError("channels act on density matrices")
    for q in qubits:
        if not 0 <= q < rho.width:
            raise ValueError(f"qubit {q} outside width {rho.width}")
    return DensityMatrix(_apply_channel_raw(rho.entries, ch, qubits))


def partial_trace(state: State, keep: Sequence[int]) -> DensityMatrix:
    """Reduced state on ``keep``; kept qubits are relabelled in ascending order."""
    keep = sorted(set(int(q) for q in keep))
    if not keep:
        raise ValueError("keep set must be non-empty")
    n = state.width
    if keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"keep {keep} outside width {n}")
    traced = [q for q in range(n) if q not in keep]
    k = len(keep)
    if isinstance(state, StateVector):
        t = state.amplitudes.reshape((2,) * n)
        # axis for qubit q is n-1-q
        ax_keep = [n - 1 - q for q in reversed(keep)]
        ax_tr = [n - 1 - q for q in traced]
        t = np.transpose(t, ax_keep + ax_tr).reshape(1 << k, -1)
        return DensityMatrix(t @ t.conj().T)
    t = state.entries.reshape((2,) * (2 * n))
    letters = [chr(ord("a") + i) for i in range(n)]
    row = list(letters)
    col = [chr(ord("A") + i) for i in range(n)]
    for q in traced:
        col[n - 1 - q] = row[n - 1 - q]
    out_r = [row[n - 1 - q] for q in reversed(keep)]
    out_c = [col[n - 1 - q] for q in reversed(keep)]
    spec = "".join(row) + "".join(col) + "->" + "".join(out_r) + "".join(out_c)
    return DensityMatrix(np.einsum(spec, t).reshape(1 << k, 1 << k))


def expectation(state: State, observable: PauliString) -> float:
    """``Tr(rho P)`` (or ``<psi|P|psi>``), returned as a real number."""
    if len(observable) != state.width:
        raise ValueError(f"observable width {len(observable)} != state width {state.width}")
    xm, zm, ny = observable.masks()
    dim = 1 << state.width
    phase = _kernels.pauli_action_phase(dim, xm, zm, ny)
    idx = np.arange(dim)
    if isinstance(state, StateVector):
        a = state.amplitudes
        val = np.sum(a[idx ^ xm].conj() * phase * a)
    else:
        val = np.sum(phase * state.entries[idx, idx ^ xm])
    return float(val.real)


def sample_expectation(state: State, observable: PauliString, shots: int, seed=None) -> float:
    """Mean of ``shots`` simulated +-1 outcomes for ``observable``."""
    if shots < 1:
        raise ValueError("shots must be at least 1")
    return sample_from_expectation(expectation(state, observable), shots, seed)


def sample_from_expectation(value: float, shots: int, seed=None) -> float:
    p_plus = min(max((1 + value) / 2, 0.0), 1.0)
    rng = np.random.default_rng(seed)
    k = int(rng.binomial(shots, p_plus))
    return (2 * k - shots) / shots


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    if w.min() < -PSD_TOL:
        raise ValueError(f"matrix is not positive semidefinite (min eigenvalue {w.min():.3g})")
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def fidelity(rho: State, sigma: State) -> float:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2``."""
    r = rho.to_density().entries if isinstance(rho, StateVector) else rho.entries
    s = sigma.to_density().entries if isinstance(sigma, StateVector) else sigma.entries
    if r.shape != s.shape:
        raise ValueError("fidelity needs equal dimensions")
    sr = _psd_sqrt(r)
    _psd_sqrt(s)  # validates sigma
    w = np.linalg.eigvalsh(sr @ s @ sr)
    f = float(np.sum(np.sqrt(np.clip(w, 0, None))) ** 2)
    return min(max(f, 0.0), 1.0)


def fidelity_with_mixed(rho: DensityMatrix) -> float:
    """Fidelity with ``I/d``, computed from the spectrum of ``rho``."""
    w = np.linalg.eigvalsh(rho.entries)
    if w.min() < -PSD_TOL:
        raise ValueError("state is not positive semidefinite")
    return float(np.sum(np.sqrt(np.clip(w, 0, None))) ** 2 / rho.dim)
