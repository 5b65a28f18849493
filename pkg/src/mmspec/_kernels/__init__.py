"""Hot loops, compiled with numba unless ``MMSPEC_DISABLE_NUMBA`` is set.

Set ``MMSPEC_DISABLE_NUMBA=1`` before import to force the numpy path; the
numpy path is also used when numba cannot be imported.
"""
import os

from . import numpy_impl

_disabled = os.environ.get("MMSPEC_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

if _disabled:
    impl = numpy_impl
    BACKEND = "numpy"
else:
    try:
        from . import numba_impl as impl
        BACKEND = "numba"
    except ImportError:  # pragma: no cover - numba is a declared dependency
        impl = numpy_impl
        BACKEND = "numpy"

pauli_accumulate = impl.pauli_accumulate
pauli_action_phase = impl.pauli_action_phase
apply_1q = impl.apply_1q
apply_2q = impl.apply_2q
apply_kq = impl.apply_kq
euler_autocorr = impl.euler_autocorr

__all__ = ["BACKEND", "apply_1q", "apply_2q", "apply_kq", "euler_autocorr",
           "pauli_accumulate", "pauli_action_phase"]
