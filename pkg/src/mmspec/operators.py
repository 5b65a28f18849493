"""Pauli-sum Hamiltonians and the exact-diagonalization oracle.

Qubit ordering: character ``k`` of a Pauli string acts on qubit ``k``, and
qubit 0 is the least significant bit of a computational-basis index.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import DimensionError, NumericalError, ParseError

MAX_DENSE_QUBITS = 14
PAULI_LETTERS = "IXYZ"

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class PauliString:
    ops: str

    def __post_init__(self):
        ops = str(self.ops).upper()
        if len(ops) < 1:
            raise ValueError("Pauli string must act on at least one qubit")
        bad = set(ops) - set(PAULI_LETTERS)
        if bad:
            raise ValueError(f"invalid Pauli letters {sorted(bad)} in {self.ops!r}")
        object.__setattr__(self, "ops", ops)

    @classmethod
    def single(cls, num_qubits: int, qubit: int, letter: str) -> "PauliString":
        ops = ["I"] * num_qubits
        ops[qubit] = letter
        return cls("".join(ops))

    def __len__(self) -> int:
        return len(self.ops)

    def __getitem__(self, q: int) -> str:
        return self.ops[q]

    def __str__(self) -> str:
        return self.ops

    @property
    def num_qubits(self) -> int:
        return len(self.ops)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(q for q, p in enumerate(self.ops) if p != "I")

    @property
    def weight(self) -> int:
        return len(self.support)

    def is_identity(self) -> bool:
        return self.weight == 0

    def masks(self) -> tuple[int, int, int]:
        """Return ``(xmask, zmask, n_y)`` so that ``P|x> = i^n_y (-1)^{|x & zmask|} |x ^ xmask>``."""
        xmask = zmask = n_y = 0
        for q, p in enumerate(self.ops):
            if p in "XY":
                xmask |= 1 << q
            if p in "ZY":
                zmask |= 1 << q
            if p == "Y":
                n_y += 1
        return xmask, zmask, n_y

    def to_matrix(self) -> np.ndarray:
        _check_dense(self.num_qubits)
        dim = 1 << self.num_qubits
        out = np.zeros((dim, dim), dtype=np.complex128)
        _kernels.pauli_accumulate(out, *self.masks(), 1.0)
        return out


@dataclass(frozen=True)
class PauliTerm:
    coefficient: float
    string: PauliString

    def __post_init__(self):
        c = float(self.coefficient)
        if not math.isfinite(c):
            raise ValueError(f"non-finite coefficient {self.coefficient!r}")
        object.__setattr__(self, "coefficient", c)
        if not isinstance(self.string, PauliString):
            object.__setattr__(self, "string", PauliString(self.string))


@dataclass(frozen=True)
class Hamiltonian:
    """Real-weighted sum of Pauli strings, all acting on ``num_qubits`` qubits."""

    terms: tuple[PauliTerm, ...]
    num_qubits: int

    def __post_init__(self):
        terms = tuple(t if isinstance(t, PauliTerm) else PauliTerm(*t) for t in self.terms)
        if self.num_qubits < 1:
            raise ValueError("num_qubits must be positive")
        for t in terms:
            if len(t.string) != self.num_qubits:
                raise ValueError(
                    f"term {t.string} has length {len(t.string)}, expected {self.num_qubits}")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_list(cls, pairs: Iterable[tuple[float, str]], num_qubits: int | None = None) -> "Hamiltonian":
        terms = [PauliTerm(c, PauliString(s)) for c, s in pairs]
        if num_qubits is None:
            if not terms:
                raise ValueError("num_qubits is required for an empty term list")
            num_qubits = len(terms[0].string)
        return cls(tuple(terms), num_qubits)

    @property
    def dim(self) -> int:
        return 1 << self.num_qubits

    def __len__(self) -> int:
        return len(self.terms)

    def norm_bound(self) -> float:
        """Triangle-inequality bound on the spectral norm."""
        return float(sum(abs(t.coefficient) for t in self.terms))


@dataclass(frozen=True)
class Spectrum:
    """Distinct eigenvalues (ascending) with multiplicities.

    ``eigenvectors`` (when present) holds one orthonormal column per eigenvalue
    counted with multiplicity, in the order of :attr:`all_eigenvalues`.
    """

    eigenvalues: np.ndarray
    multiplicities: np.ndarray
    eigenvectors: np.ndarray | None = field(default=None, repr=False)
    raw_eigenvalues: np.ndarray | None = field(default=None, repr=False)

    @property
    def all_eigenvalues(self) -> np.ndarray:
        if self.raw_eigenvalues is not None:
            return self.raw_eigenvalues
        return np.repeat(self.eigenvalues, self.multiplicities)

    @property
    def dim(self) -> int:
        return int(self.multiplicities.sum())

    def propagator(self, t: float) -> np.ndarray:
        """``exp(-iHt)`` from the eigendecomposition."""
        if self.eigenvectors is None:
            raise ValueError("spectrum was computed without eigenvectors")
        v = self.eigenvectors
        return (v * np.exp(-1j * self.all_eigenvalues * t)) @ v.conj().T

    def trace_evolution(self, t):
        """``sum_j exp(-i lambda_j t)`` for scalar or array ``t``."""
        t = np.asarray(t, dtype=float)
        phases = np.exp(-1j * np.multiply.outer(t, self.eigenvalues))
        res = phases @ self.multiplicities.astype(float)
        return complex(res) if res.ndim == 0 else res


def _check_dense(num_qubits: int, limit: int = MAX_DENSE_QUBITS) -> None:
    if num_qubits > limit:
        raise DimensionError(f"{num_qubits} qubits exceeds the dense limit of {limit}")


def build_heisenberg(n: int, J: float = 1.0, B: float = 1.0, boundary: str = "open") -> Hamiltonian:
    """Heisenberg chain ``-J sum (XX + YY + ZZ) - B sum Z`` on ``n`` sites.

    Terms are ordered XX, YY, ZZ for each bond left to right, then the Z
    fields site by site; the synthesis layer relies on this order.
    """
    if n < 1:
        raise ValueError("site count must be at least 1")
    if not (math.isfinite(J) and math.isfinite(B)):
        raise ValueError("J and B must be finite")
    if boundary not in ("open", "periodic"):
        raise ValueError(f"unknown boundary {boundary!r}")
    bonds = [(i, i + 1) for i in range(n - 1)]
    if boundary == "periodic" and n > 2:
        bonds.append((n - 1, 0))
    terms = []
    for i, j in bonds:
        for p in "XYZ":
            ops = ["I"] * n
            ops[i] = ops[j] = p
            terms.append(PauliTerm(-J, PauliString("".join(ops))))
    for i in range(n):
        terms.append(PauliTerm(-B, PauliString.single(n, i, "Z")))
    return Hamiltonian(tuple(terms), n)


def to_dense(H: Hamiltonian, max_qubits: int = MAX_DENSE_QUBITS) -> np.ndarray:
    _check_dense(H.num_qubits, max_qubits)
    out = np.zeros((H.dim, H.dim), dtype=np.complex128)
    for term in H.terms:
        _kernels.pauli_accumulate(out, *term.string.masks(), term.coefficient)
    return out


def _group(values: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    groups: list[list[float]] = []
    for v in values:
        if groups and v - groups[-1][-1] <= tol:
            groups[-1].append(v)
        else:
            groups.append([v])
    return (np.array([np.mean(g) for g in groups]),
            np.array([len(g) for g in groups], dtype=np.int64))


def diagonalize(H: Hamiltonian, eigenvectors: bool = True) -> Spectrum:
    """Exact spectrum of ``H``; eigenvalues closer than ``1e-9 max(1, |H|)`` are merged."""
    mat = to_dense(H)
    try:
        if eigenvectors:
            w, v = np.linalg.eigh(mat)
        else:
            w, v = np.linalg.eigvalsh(mat), None
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc
    if not np.all(np.isfinite(w)):
        raise NumericalError("eigensolver returned non-finite eigenvalues")
    scale = max(1.0, float(np.max(np.abs(w))) if w.size else 0.0)
    vals, mult = _group(np.sort(w), 1e-9 * scale)
    return Spectrum(vals, mult, v, w)


def trace_evolution_exact(H: Hamiltonian, t, spectrum: Spectrum | None = None):
    """Ground-truth ``u(t) = Tr exp(-iHt)``; ``t`` may be an array."""
    spec = spectrum if spectrum is not None else diagonalize(H, eigenvectors=False)
    return spec.trace_evolution(t)


def parse_hamiltonian(text: str) -> Hamiltonian:
    """Parse ``coefficient PAULI_STRING`` lines; ``#`` starts a comment."""
    pairs: list[tuple[float, str]] = []
    width = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected 'coefficient PAULI_STRING', got {raw.strip()!r}", lineno)
        try:
            coeff = float(parts[0])
        except ValueError:
            raise ParseError(f"bad coefficient {parts[0]!r}", lineno) from None
        if not math.isfinite(coeff):
            raise ParseError(f"non-finite coefficient {parts[0]!r}", lineno)
        ops = parts[1].upper()
        if set(ops) - set(PAULI_LETTERS):
            raise ParseError(f"bad Pauli string {parts[1]!r}", lineno)
        if width is None:
            width = len(ops)
        elif len(ops) != width:
            raise ParseError(f"Pauli string length {len(ops)} differs from {width}", lineno)
        pairs.append((coeff, ops))
    if not pairs:
        raise ParseError("no terms found")
    return Hamiltonian.from_list(pairs, width)


def format_hamiltonian(H: Hamiltonian) -> str:
    return "".join(f"{t.coefficient!r} {t.string}\n" for t in H.terms)


def random_hamiltonian(num_qubits: int, num_terms: int, rng: np.random.Generator,
                       scale: float = 1.0) -> Hamiltonian:
    """Random real-weighted Pauli sum (used by property tests and benchmarks)."""
    letters = rng.integers(0, 4, size=(num_terms, num_qubits))
    coeffs = rng.normal(scale=scale, size=num_terms)
    pairs = [(float(c), "".join(PAULI_LETTERS[i] for i in row)) for c, row in zip(coeffs, letters)]
    return Hamiltonian.from_list(pairs, num_qubits)


def pauli_string_product(strings: Sequence[str]) -> np.ndarray:
    """Kronecker-product matrix in this package's qubit order (qubit 0 = LSB)."""
    mat = np.array([[1.0 + 0j]])
    for p in strings:
        mat = np.kron(PAULI_MATRICES[p], mat)
    return mat
