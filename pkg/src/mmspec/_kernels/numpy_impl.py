"""Pure-numpy reference kernels.

Every function here has a twin in ``numba_impl`` with the same signature and
semantics. Arrays passed as ``state`` are modified in place.
"""
import numpy as np


def _parity(x, mask, nbits):
    out = np.zeros(x.shape, dtype=np.int64)
    v = x & mask
    for _ in range(nbits):
        out ^= v & 1
        v = v >> 1
    return out


def pauli_accumulate(out, xmask, zmask, n_y, coeff):
    """Add ``coeff * P`` to the dense matrix ``out`` for the Pauli with given masks."""
    dim = out.shape[0]
    nbits = max(int(dim - 1).bit_length(), 1)
    cols = np.arange(dim, dtype=np.int64)
    sign = 1 - 2 * _parity(cols, zmask, nbits)
    phase = coeff * (1j ** (n_y % 4))
    out[cols ^ xmask, cols] += phase * sign


def pauli_action_phase(dim, xmask, zmask, n_y):
    """Phases ``p`` such that ``P|x> = p[x] |x ^ xmask>``."""
    nbits = max(int(dim - 1).bit_length(), 1)
    cols = np.arange(dim, dtype=np.int64)
    sign = 1 - 2 * _parity(cols, zmask, nbits)
    return (1j ** (n_y % 4)) * sign.astype(np.complex128)


def _axes(n, qubits):
    # qubit 0 is the least significant bit -> last tensor axis
    return [n - 1 - q for q in qubits]


def apply_1q(state, mat, q):
    dim, m = state.shape
    n = dim.bit_length() - 1
    t = state.reshape((2,) * n + (m,))
    ax = n - 1 - q
    moved = np.moveaxis(t, ax, 0)
    res = np.tensordot(mat, moved, axes=([1], [0]))
    state[...] = np.moveaxis(res, 0, ax).reshape(dim, m)


def apply_2q(state, mat, q0, q1):
    # local basis index is 2*b(q0) + b(q1)
    dim, m = state.shape
    n = dim.bit_length() - 1
    t = state.reshape((2,) * n + (m,))
    a0, a1 = _axes(n, (q0, q1))
    moved = np.moveaxis(t, (a0, a1), (0, 1))
    res = np.tensordot(mat.reshape(2, 2, 2, 2), moved, axes=([2, 3], [0, 1]))
    state[...] = np.moveaxis(res, (0, 1), (a0, a1)).reshape(dim, m)


def apply_kq(state, mat, qubits):
    """Apply a ``2^k x 2^k`` matrix; the first listed qubit is the most significant local bit."""
    dim, m = state.shape
    n = dim.bit_length() - 1
    k = len(qubits)
    t = state.reshape((2,) * n + (m,))
    ax = _axes(n, qubits)
    moved = np.moveaxis(t, ax, list(range(k)))
    res = np.tensordot(mat.reshape((2,) * (2 * k)), moved,
                       axes=(list(range(k, 2 * k)), list(range(k))))
    state[...] = np.moveaxis(res, list(range(k)), ax).reshape(dim, m)


def euler_autocorr(h, psi0, n_steps, stride):
    """Propagate columns of ``psi0`` by ``psi <- h @ psi`` without renormalization.

    ``h`` is the one-step propagator ``I - i H dt``. Returns the overlaps
    ``<psi0|psi_m>`` and norms ``|psi_m|`` recorded every ``stride`` steps,
    starting with step 0; both have shape ``(K, n_steps // stride + 1)``.
    """
    d, k = psi0.shape
    n_rec = n_steps // stride + 1
    vals = np.empty((k, n_rec), dtype=np.complex128)
    norms = np.empty((k, n_rec), dtype=np.float64)
    bra = psi0.conj()
    psi = psi0.copy()
    vals[:, 0] = np.einsum("dk,dk->k", bra, psi)
    norms[:, 0] = np.sqrt(np.einsum("dk,dk->k", psi.conj(), psi).real)
    rec = 1
    for step in range(1, n_steps + 1):
        psi = h @ psi
        if step % stride == 0:
            vals[:, rec] = np.einsum("dk,dk->k", bra, psi)
            norms[:, rec] = np.sqrt(np.einsum("dk,dk->k", psi.conj(), psi).real)
            rec += 1
    return vals, norms
