"""Decay of the purified maximally mixed state under amplitude damping."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from ..simulator import (
    StateVector,
    amplitude_damping,
    apply_channel,
    apply_circuit,
    damping_strength,
    fidelity_with_mixed,
    partial_trace,
)
from ..synthesis.controlled import mms_prep_circuit


def mms_lifetime_experiment(n: int, t1: float, idle_times: Sequence[float]):
    """Idle ``n`` Bell pairs under uniform ``T1`` damping on all ``2n`` qubits.

    Returns ``(times, fidelity with I/d, probability of all zeros)`` for the
    reduced computation register.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not t1 > 0:
        raise ValueError("T1 must be positive")
    times = np.asarray(idle_times, dtype=float).reshape(-1)
    if np.any(times < 0):
        raise ValueError("idle times must be non-negative")
    rho0 = apply_circuit(StateVector.zero(2 * n), mms_prep_circuit(n)).to_density()
    fid = np.empty(times.size)
    p0 = np.empty(times.size)
    for i, t in enumerate(times):
        ch = amplitude_damping(damping_strength(float(t), t1))
        rho = apply_channel(rho0, ch, range(2 * n))
        rc = partial_trace(rho, range(n))
        fid[i] = fidelity_with_mixed(rc)
        p0[i] = float(rc.entries[0, 0].real)
    return times, fid, p0
