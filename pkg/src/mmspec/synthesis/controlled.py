"""Controlled Pauli rotations, Trotter steps and state-preparation circuits.

A controlled rotation here is ``|0><0| (x) I + |1><1| (x) exp(-i theta P / 2)``
with the pointer qubit as control. X and Y letters are rotated to Z with
single-qubit basis changes, the Z-string parity is collected on one
``rz_site`` by a CX ladder, and the controlled ``Rz`` on that site is
realized by one of three gate patterns (``SynthesisVariant``).
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

from ..circuit import CX, RZZ, Circuit, Gate, Rz, S, Sdg, T, Tdg
from ..circuit import H as hadamard
from ..operators import Hamiltonian, PauliString

Distance = Callable[[int, int], float]


class SynthesisVariant(str, Enum):
    TOFFOLI_BASED = "a"
    NESTED_RZZ = "b"
    HALF_ANGLE = "c"

    @classmethod
    def parse(cls, value) -> "SynthesisVariant":
        if isinstance(value, cls):
            return value
        s = str(value).strip()
        for v in cls:
            if s.lower() == v.value or s.upper() == v.name:
                return v
        raise ValueError(f"unknown synthesis variant {value!r}")


def toffoli_gates(c0: int, c1: int, target: int) -> list[Gate]:
    """Six-CX Clifford+T Toffoli, gate for gate as drawn in the reference figure."""
    return [
        hadamard(target),
        CX(c1, target), Tdg(target),
        CX(c0, target), T(target),
        CX(c1, target), T(c1), Tdg(target),
        CX(c0, target), CX(c0, c1), T(target),
        T(c0), Tdg(c1), hadamard(target),
        CX(c0, c1),
    ]


def _line_distance(a: int, b: int) -> float:
    return abs(a - b)


def choose_rz_site(support: Sequence[int], pointer: int, distance: Distance | None = None) -> int:
    """Support qubit closest to the pointer; ties go to the lower index."""
    dist = distance or _line_distance
    return min(support, key=lambda q: (dist(q, pointer), q))


def _basis_change(letter: str, q: int) -> tuple[list[Gate], list[Gate]]:
    if letter == "X":
        return [hadamard(q)], [hadamard(q)]
    if letter == "Y":
        return [Sdg(q), hadamard(q)], [hadamard(q), S(q)]
    return [], []


def _rzz(a: int, b: int, angle: float, native: bool) -> list[Gate]:
    if native:
        return [RZZ(a, b, angle)]
    return [CX(a, b), Rz(b, angle), CX(a, b)]


def _z_rotation(others: Sequence[int], site: int, angle: float, native: bool) -> list[Gate]:
    """Uncontrolled ``exp(-i angle Z...Z / 2)`` on ``others + [site]``."""
    if native and others:
        *ladder, last = others
        pre = [CX(o, site) for o in ladder]
        return pre + [RZZ(last, site, angle)] + pre[::-1]
    ladder = [CX(o, site) for o in others]
    return ladder + [Rz(site, angle)] + ladder[::-1]


def controlled_pauli_rotation(
    pauli,
    theta: float,
    variant,
    pointer: int,
    rz_site: int | None = None,
    qubits: Sequence[int] | None = None,
    width: int | None = None,
    native_rzz: bool = False,
    distance: Distance | None = None,
) -> Circuit:
    """Circuit for the pointer-controlled ``exp(-i theta P / 2)``.

    ``qubits[k]`` is the circuit qubit carrying letter ``k`` of ``pauli``
    (identity map by default). ``rz_site`` is a circuit qubit in the support;
    when omitted the support qubit nearest the pointer under ``distance`` is
    used. With ``native_rzz`` the two-qubit ZZ rotations are emitted as
    ``RZZ`` gates instead of CX-Rz-CX.
    """
    gates = controlled_pauli_gates(pauli, theta, variant, pointer, rz_site, qubits,
                                   native_rzz, distance)
    pauli = pauli if isinstance(pauli, PauliString) else PauliString(pauli)
    if width is None:
        qs = list(qubits) if qubits is not None else list(range(len(pauli)))
        width = max(qs + [pointer]) + 1
    return Circuit(width, tuple(gates))


def controlled_pauli_gates(pauli, theta, variant, pointer, rz_site=None, qubits=None,
                           native_rzz=False, distance=None) -> list[Gate]:
    pauli = pauli if isinstance(pauli, PauliString) else PauliString(pauli)
    variant = SynthesisVariant.parse(variant)
    if pauli.is_identity():
        raise ValueError("identity string has no controlled rotation (it is a pointer phase)")
    qmap = list(qubits) if qubits is not None else list(range(len(pauli)))
    if len(qmap) != len(pauli):
        raise ValueError("qubit map length differs from Pauli string length")
    if pointer in qmap:
        raise ValueError("pointer must be distinct from the system qubits")
    support = [qmap[k] for k in pauli.support]
    if rz_site is None:
        rz_site = choose_rz_site(support, pointer, distance)
    elif rz_site not in support:
        raise ValueError(f"rz_site {rz_site} is not in the support {support} of {pauli}")
    others = [q for q in support if q != rz_site]

    pre: list[Gate] = []
    post: list[Gate] = []
    for k in pauli.support:
        a, b = _basis_change(pauli[k], qmap[k])
        pre += a
        post = b + post

    p, r = pointer, rz_site
    if variant is SynthesisVariant.HALF_ANGLE:
        ladder = [CX(o, r) for o in others]
        core = ladder + [Rz(r, theta / 2)] + _rzz(p, r, -theta / 2, native_rzz) + ladder[::-1]
    elif variant is SynthesisVariant.NESTED_RZZ:
        # flip qubit: the pointer toggles the sign of the second half-rotation
        flip = choose_rz_site(others, p, distance) if others else r
        core = (_z_rotation(others, r, theta / 2, native_rzz) + [CX(p, flip)]
                + _z_rotation(others, r, -theta / 2, native_rzz) + [CX(p, flip)])
    else:
        ladder = [g for o in others for g in toffoli_gates(p, o, r)]
        undo = [g for o in reversed(others) for g in toffoli_gates(p, o, r)]
        core = ladder + [Rz(r, theta / 2), CX(p, r), Rz(r, -theta / 2), CX(p, r)] + undo
    return pre + core + post


def controlled_trotter_step(
    H: Hamiltonian,
    dt: float,
    variant,
    pointer: int,
    qubits: Sequence[int] | None = None,
    width: int | None = None,
    native_rzz: bool = False,
    distance: Distance | None = None,
) -> Circuit:
    """One first-order product-formula step of the controlled ``exp(-i H dt)``.

    Terms are applied in the Hamiltonian's own order, each as a controlled
    rotation with ``theta = 2 * coefficient * dt``. An all-identity term
    becomes a phase on the pointer.
    """
    qmap = list(qubits) if qubits is not None else list(range(H.num_qubits))
    if width is None:
        width = max(qmap + [pointer]) + 1
    gates: list[Gate] = []
    for term in H.terms:
        if term.string.is_identity():
            gates.append(Rz(pointer, -term.coefficient * dt))
            continue
        gates += controlled_pauli_gates(term.string, 2 * term.coefficient * dt, variant, pointer,
                                        None, qmap, native_rzz, distance)
    return Circuit(width, tuple(gates))


def controlled_evolution(H: Hamiltonian, t: float, n_steps: int, variant, pointer: int,
                         qubits=None, width=None, native_rzz=False, distance=None) -> Circuit:
    """``n_steps`` repetitions of :func:`controlled_trotter_step` with ``dt = t / n_steps``."""
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")
    step = controlled_trotter_step(H, t / n_steps, variant, pointer, qubits, width,
                                   native_rzz, distance)
    return Circuit(step.width, step.gates * n_steps)


@dataclass(frozen=True)
class ProtocolLayout:
    """Logical register assignment for the trace-estimation circuit.

    Computation qubits come first, then (when purified) their garbage
    partners, then the pointer.
    """

    n: int
    purified: bool = True

    @property
    def computation(self) -> tuple[int, ...]:
        return tuple(range(self.n))

    @property
    def garbage(self) -> tuple[int, ...]:
        return tuple(range(self.n, 2 * self.n)) if self.purified else ()

    @property
    def pointer(self) -> int:
        return 2 * self.n if self.purified else self.n

    @property
    def width(self) -> int:
        return self.pointer + 1


def mms_prep_circuit(n: int, computation: Sequence[int] | None = None,
                     garbage: Sequence[int] | None = None, width: int | None = None) -> Circuit:
    """Bell pair per computation qubit: H on its garbage partner, then CX garbage -> computation."""
    if n < 0:
        raise ValueError("n must be non-negative")
    comp = list(computation) if computation is not None else list(range(n))
    garb = list(garbage) if garbage is not None else list(range(n, 2 * n))
    if len(comp) != n or len(garb) != n:
        raise ValueError("register sizes must equal n")
    if width is None:
        width = max(comp + garb, default=-1) + 1
    gates: list[Gate] = []
    for c, g in zip(comp, garb):
        gates += [hadamard(g), CX(g, c)]
    return Circuit(width, tuple(gates))


def defer_pointer_preparation(gates: Sequence[Gate], pointer: int) -> list[Gate]:
    """Insert the pointer's Hadamard right before the first gate that touches it."""
    out = list(gates)
    for i, g in enumerate(out):
        if pointer in g.qubits:
            return out[:i] + [hadamard(pointer)] + out[i:]
    return out + [hadamard(pointer)]


def protocol_circuit(H: Hamiltonian, t: float, n_steps: int = 1, variant="c",
                     native_rzz: bool = True, measure: str | None = "X",
                     distance: Distance | None = None) -> tuple[Circuit, ProtocolLayout]:
    """Complete purified trace-estimation circuit: MMS prep, controlled evolution, pointer readout basis."""
    layout = ProtocolLayout(H.num_qubits, purified=True)
    prep = mms_prep_circuit(layout.n, layout.computation, layout.garbage, layout.width)
    evo = controlled_evolution(H, t, n_steps, variant, layout.pointer, layout.computation,
                               layout.width, native_rzz, distance)
    gates = list(prep.gates) + defer_pointer_preparation(evo.gates, layout.pointer)
    p = layout.pointer
    if measure == "X":
        gates.append(hadamard(p))
    elif measure == "Y":
        gates += [Sdg(p), hadamard(p)]
    elif measure is not None:
        raise ValueError(f"measure must be 'X', 'Y' or None, got {measure!r}")
    return Circuit(layout.width, tuple(gates)), layout
