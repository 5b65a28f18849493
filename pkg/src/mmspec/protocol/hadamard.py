"""Hadamard test on a maximally mixed register: ``<X> + i<Y>`` of the pointer is ``Tr(U)/d``."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..circuit import GateKind, unitary_of
from ..operators import Hamiltonian, PauliString, Spectrum, diagonalize
from ..simulator import (
    DensityMatrix,
    StateVector,
    apply_circuit,
    apply_unitary,
    depolarizing,
    expectation,
    sample_from_expectation,
    tensor,
)
from ..synthesis.controlled import ProtocolLayout, controlled_evolution, mms_prep_circuit
from .series import TimeSeries, derive_seed, uniform_grid

_PLUS = StateVector(np.array([1, 1]) / math.sqrt(2))


@dataclass(frozen=True)
class Shots:
    """Finite-shot readout: ``n`` shots for each of the X and Y settings."""

    n: int
    seed: int | None = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("shots must be at least 1")


@dataclass(frozen=True)
class Trotter:
    """First-order product-formula evolution built by the synthesis layer.

    Either a fixed ``n_steps`` per point or a target ``step`` size (then
    ``n_steps = max(1, round(t / step))``). ``gate_level`` simulates gate by
    gate instead of through the circuit's unitary; noise forces it.
    """

    n_steps: int = 1
    variant: str = "c"
    native_rzz: bool = False
    step: float | None = None
    gate_level: bool = False

    def steps_for(self, t: float) -> int:
        if self.step is not None:
            return max(1, int(round(abs(t) / self.step)))
        return self.n_steps


@dataclass(frozen=True)
class NoiseSchedule:
    """Depolarizing channels applied to the operands after each gate."""

    two_qubit: float = 0.0
    one_qubit: float = 0.0

    def __post_init__(self):
        for p in (self.two_qubit, self.one_qubit):
            if not 0 <= p <= 1:
                raise ValueError("depolarizing probabilities must lie in [0, 1]")

    def channels(self):
        ch2 = depolarizing(self.two_qubit) if self.two_qubit > 0 else None
        ch1 = depolarizing(self.one_qubit) if self.one_qubit > 0 else None

        def after(g):
            if g.kind is GateKind.RZ:
                return []
            ch = ch2 if g.kind.arity == 2 else ch1
            return [(ch, g.qubits)] if ch is not None else []
        return after


def _controlled_matrix(u: np.ndarray) -> np.ndarray:
    d = u.shape[0]
    c = np.eye(2 * d, dtype=complex)
    c[d:, d:] = u
    return c


def _local_order(layout: ProtocolLayout) -> list[int]:
    # pointer is the most significant local bit, then computation qubits high to low
    return [layout.pointer] + list(reversed(layout.computation))


def _initial_state(layout: ProtocolLayout, density: bool):
    n = layout.n
    if not layout.purified:
        rho = tensor(DensityMatrix.maximally_mixed(n), _PLUS)
        return rho
    prep = mms_prep_circuit(n, layout.computation, layout.garbage, layout.width)
    psi = apply_circuit(StateVector.zero(layout.width), prep)
    psi = apply_unitary(psi, np.array([[1, 1], [1, -1]]) / math.sqrt(2), [layout.pointer])
    return psi.to_density() if density else psi


def evolved_state(H: Hamiltonian, t: float, evolution="exact", noise: NoiseSchedule | None = None,
                  purified: bool = False, spectrum: Spectrum | None = None):
    """Register state after the controlled evolution, pointer last (before readout)."""
    layout = ProtocolLayout(H.num_qubits, purified)
    if evolution == "exact":
        if noise is not None:
            raise ValueError("noise schedules need a gate-level (Trotter) evolution")
        spec = spectrum if spectrum is not None else diagonalize(H)
        state = _initial_state(layout, density=not purified)
        cu = _controlled_matrix(spec.propagator(t))
        return apply_unitary(state, cu, _local_order(layout)), layout
    if not isinstance(evolution, Trotter):
        raise ValueError(f"evolution must be 'exact' or Trotter(...), got {evolution!r}")
    circ = controlled_evolution(H, t, evolution.steps_for(t), evolution.variant, layout.pointer,
                                layout.computation, layout.width, evolution.native_rzz)
    if noise is not None or evolution.gate_level:
        state = _initial_state(layout, density=noise is not None or not purified)
        hook = noise.channels() if noise is not None else None
        return apply_circuit(state, circ, hook), layout
    # the controlled block only touches pointer + computation qubits
    small = controlled_evolution(H, t, evolution.steps_for(t), evolution.variant, H.num_qubits,
                                 None, H.num_qubits + 1, evolution.native_rzz)
    state = _initial_state(layout, density=not purified)
    return apply_unitary(state, unitary_of(small), _local_order(layout)), layout


def pointer_expectations(state, layout: ProtocolLayout) -> tuple[float, float]:
    w = layout.width
    return (expectation(state, PauliString.single(w, layout.pointer, "X")),
            expectation(state, PauliString.single(w, layout.pointer, "Y")))


def hadamard_test_point(H: Hamiltonian, t: float, mode="exact", evolution="exact",
                        noise: NoiseSchedule | None = None, purified: bool = False,
                        spectrum: Spectrum | None = None) -> complex:
    """Estimate ``Tr(U(t))/d`` from the pointer's X and Y expectations.

    ``mode`` is ``"exact"`` or :class:`Shots`; ``evolution`` is ``"exact"``
    (oracle propagator) or :class:`Trotter`. ``purified`` selects the
    Bell-pair register instead of the direct ``I/d`` density matrix.
    Negative ``t`` is accepted for exact evolution only.
    """
    if t < 0 and evolution != "exact":
        raise ValueError("t must be non-negative for circuit evolution")
    state, layout = evolved_state(H, t, evolution, noise, purified, spectrum)
    ex, ey = pointer_expectations(state, layout)
    if mode == "exact":
        return complex(ex, ey)
    if not isinstance(mode, Shots):
        raise ValueError(f"mode must be 'exact' or Shots(...), got {mode!r}")
    root = derive_seed(mode.seed)
    return complex(sample_from_expectation(ex, mode.n, derive_seed(root, 0)),
                   sample_from_expectation(ey, mode.n, derive_seed(root, 1)))


def run_hadamard_series(H: Hamiltonian, T: float, dt: float, mode="exact", evolution="exact",
                        noise: NoiseSchedule | None = None, purified: bool = False,
                        times: Sequence[float] | None = None) -> TimeSeries:
    """One Hadamard-test point per grid time; shot seeds are keyed on the time index."""
    if times is None:
        grid, step = uniform_grid(T, dt)
    else:
        grid = np.asarray(times, dtype=float)
        step = float(grid[1] - grid[0])
    spec = diagonalize(H) if evolution == "exact" else None
    values = np.empty(grid.size, dtype=complex)
    errors = None
    for i, t in enumerate(grid):
        if isinstance(mode, Shots):
            point_mode = Shots(mode.n, derive_seed(mode.seed, i))
        else:
            point_mode = mode
        values[i] = hadamard_test_point(H, float(t), point_mode, evolution, noise, purified, spec)
    if isinstance(mode, Shots):
        clip = lambda x: np.sqrt(np.clip(1 - x ** 2, 0, None) / mode.n)  # noqa: E731
        errors = clip(values.real) + 1j * clip(values.imag)
    meta = {
        "dt": step,
        "T": float(grid[-1] - grid[0]),
        "mode": "exact" if mode == "exact" else "shots",
        "shots": mode.n if isinstance(mode, Shots) else None,
        "seed": mode.seed if isinstance(mode, Shots) else None,
        "evolution": "exact" if evolution == "exact" else "trotter",
        "trotter_steps": evolution.n_steps if isinstance(evolution, Trotter) and evolution.step is None else None,
        "trotter_step": evolution.step if isinstance(evolution, Trotter) else None,
        "variant": evolution.variant if isinstance(evolution, Trotter) else None,
        "purified": purified,
    }
    return TimeSeries(grid, values, meta, errors)
