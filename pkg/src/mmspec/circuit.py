"""Gate-level circuit IR with unitary extraction, counting and a text format."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import DimensionError, ParseError

MAX_UNITARY_QUBITS = 12


class GateKind(str, Enum):
    H = "H"
    X = "X"
    S = "S"
    SDG = "Sdg"
    T = "T"
    TDG = "Tdg"
    RZ = "Rz"
    CX = "CX"
    RZZ = "RZZ"
    SWAP = "SWAP"

    @property
    def arity(self) -> int:
        return 2 if self in _TWO_QUBIT else 1

    @property
    def parametric(self) -> bool:
        return self in (GateKind.RZ, GateKind.RZZ)


_TWO_QUBIT = frozenset({GateKind.CX, GateKind.RZZ, GateKind.SWAP})
_LOOKUP = {k.value.upper(): k for k in GateKind}

_SQ = 1 / math.sqrt(2)
_FIXED = {
    GateKind.H: np.array([[_SQ, _SQ], [_SQ, -_SQ]], dtype=complex),
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.S: np.diag([1, 1j]).astype(complex),
    GateKind.SDG: np.diag([1, -1j]).astype(complex),
    GateKind.T: np.diag([1, np.exp(1j * math.pi / 4)]),
    GateKind.TDG: np.diag([1, np.exp(-1j * math.pi / 4)]),
    GateKind.CX: np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    GateKind.SWAP: np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}
_INVERSE = {
    GateKind.S: GateKind.SDG, GateKind.SDG: GateKind.S,
    GateKind.T: GateKind.TDG, GateKind.TDG: GateKind.T,
}


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        kind = self.kind if isinstance(self.kind, GateKind) else gate_kind(self.kind)
        object.__setattr__(self, "kind", kind)
        qubits = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qubits)
        if len(qubits) != kind.arity:
            raise ValueError(f"{kind.value} takes {kind.arity} qubit(s), got {qubits}")
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"repeated operand in {kind.value}{qubits}")
        if min(qubits) < 0:
            raise ValueError(f"negative qubit index in {qubits}")
        if kind.parametric:
            if self.angle is None or not math.isfinite(float(self.angle)):
                raise ValueError(f"{kind.value} needs a finite angle")
            object.__setattr__(self, "angle", float(self.angle))
        elif self.angle is not None:
            raise ValueError(f"{kind.value} takes no angle")

    def matrix(self) -> np.ndarray:
        """Local matrix; for two-qubit gates the first operand is the high bit."""
        if self.kind is GateKind.RZ:
            h = self.angle / 2
            return np.diag([np.exp(-1j * h), np.exp(1j * h)])
        if self.kind is GateKind.RZZ:
            h = self.angle / 2
            return np.diag([np.exp(-1j * h), np.exp(1j * h), np.exp(1j * h), np.exp(-1j * h)])
        return _FIXED[self.kind]

    def inverse(self) -> "Gate":
        if self.kind.parametric:
            return Gate(self.kind, self.qubits, -self.angle)
        return Gate(_INVERSE.get(self.kind, self.kind), self.qubits)

    def remap(self, mapping) -> "Gate":
        return Gate(self.kind, tuple(mapping[q] for q in self.qubits), self.angle)

    def to_line(self) -> str:
        parts = [self.kind.value, *map(str, self.qubits)]
        if self.angle is not None:
            parts.append(repr(self.angle))
        return " ".join(parts)


def gate_kind(name) -> GateKind:
    try:
        return _LOOKUP[str(name).upper()]
    except KeyError:
        raise ValueError(f"unknown gate kind {name!r}") from None


# Short constructors, used heavily by the synthesis layer.
def H(q): return Gate(GateKind.H, (q,))
def X(q): return Gate(GateKind.X, (q,))
def S(q): return Gate(GateKind.S, (q,))
def Sdg(q): return Gate(GateKind.SDG, (q,))
def T(q): return Gate(GateKind.T, (q,))
def Tdg(q): return Gate(GateKind.TDG, (q,))
def Rz(q, theta): return Gate(GateKind.RZ, (q,), theta)
def CX(c, t): return Gate(GateKind.CX, (c, t))
def RZZ(a, b, theta): return Gate(GateKind.RZZ, (a, b), theta)
def SWAP(a, b): return Gate(GateKind.SWAP, (a, b))


@dataclass(frozen=True)
class Circuit:
    width: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        if self.width < 0:
            raise ValueError("width must be non-negative")
        gates = tuple(self.gates)
        for g in gates:
            if max(g.qubits) >= self.width:
                raise ValueError(f"gate {g.to_line()!r} exceeds circuit width {self.width}")
        object.__setattr__(self, "gates", gates)

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        return compose(self, other)

    def with_width(self, width: int) -> "Circuit":
        return Circuit(width, self.gates)

    def count(self, kind, effective: bool = False) -> int:
        return count_gates(self, kind, effective)

    def qubit_gates(self, q: int) -> list[Gate]:
        return [g for g in self.gates if q in g.qubits]


def unitary_of(c: Circuit) -> np.ndarray:
    """Product of gate matrices in application order."""
    if c.width > MAX_UNITARY_QUBITS:
        raise DimensionError(f"width {c.width} exceeds unitary limit {MAX_UNITARY_QUBITS}")
    u = np.eye(1 << c.width, dtype=np.complex128)
    for g in c.gates:
        apply_gate(u, g)
    return u


def apply_gate(block: np.ndarray, g: Gate) -> None:
    """Left-multiply every column of ``block`` by the gate, in place."""
    if g.kind.arity == 1:
        _kernels.apply_1q(block, g.matrix(), g.qubits[0])
    else:
        _kernels.apply_2q(block, g.matrix(), g.qubits[0], g.qubits[1])


def count_gates(c: Circuit, kind, effective: bool = False) -> int:
    """Number of gates of ``kind``; with ``effective`` each SWAP adds 3 to a CX count."""
    kind = kind if isinstance(kind, GateKind) else gate_kind(kind)
    n = sum(1 for g in c.gates if g.kind is kind)
    if effective and kind is GateKind.CX:
        n += 3 * sum(1 for g in c.gates if g.kind is GateKind.SWAP)
    return n


def compose(a: Circuit, b: Circuit) -> Circuit:
    """``a`` followed by ``b``."""
    if a.width != b.width:
        raise ValueError(f"width mismatch: {a.width} != {b.width}")
    return Circuit(a.width, a.gates + b.gates)


def dagger(c: Circuit) -> Circuit:
    return Circuit(c.width, tuple(g.inverse() for g in reversed(c.gates)))


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, atol: float = 1e-10) -> bool:
    """Entrywise comparison after removing the global phase fixed by ``a``'s largest entry."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        return False
    k = np.unravel_index(np.argmax(np.abs(a)), a.shape)
    if abs(a[k]) < atol:
        return bool(np.allclose(a, b, atol=atol, rtol=0))
    if abs(b[k]) < atol:
        return False
    phase = (b[k] / abs(b[k])) / (a[k] / abs(a[k]))
    return bool(np.max(np.abs(a * phase - b)) <= atol)


def circuit_to_text(c: Circuit) -> str:
    lines = [f"WIDTH {c.width}"] + [g.to_line() for g in c.gates]
    return "\n".join(lines) + "\n"


def circuit_from_text(text: str) -> Circuit:
    width = None
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0].upper() == "WIDTH":
            if width is not None or len(parts) != 2:
                raise ParseError("malformed WIDTH header", lineno)
            width = int(parts[1])
            continue
        try:
            kind = gate_kind(parts[0])
            nq = kind.arity
            qubits = tuple(int(p) for p in parts[1:1 + nq])
            rest = parts[1 + nq:]
            angle = float(rest[0]) if kind.parametric and rest else None
            if len(rest) != (1 if kind.parametric else 0):
                raise ValueError(f"wrong operand count for {kind.value}")
            gates.append(Gate(kind, qubits, angle))
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
    if width is None:
        width = max((max(g.qubits) for g in gates), default=-1) + 1
    try:
        return Circuit(width, tuple(gates))
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def from_gates(width: int, gates: Iterable[Gate]) -> Circuit:
    return Circuit(width, tuple(gates))


def permutation_unitary(perm: Sequence[int]) -> np.ndarray:
    """Unitary sending qubit ``i`` to position ``perm[i]``."""
    n = len(perm)
    dim = 1 << n
    u = np.zeros((dim, dim), dtype=complex)
    for x in range(dim):
        y = 0
        for i in range(n):
            if (x >> i) & 1:
                y |= 1 << perm[i]
        u[y, x] = 1
    return u
