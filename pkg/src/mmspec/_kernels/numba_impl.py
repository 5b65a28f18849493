"""Numba-compiled kernels mirroring ``numpy_impl``."""
import numpy as np
from numba import njit

_I_POW = np.array([1.0 + 0j, 1j, -1.0 + 0j, -1j])


@njit(cache=True)
def _popcount_parity(v):
    p = 0
    while v:
        p ^= v & 1
        v >>= 1
    return p


@njit(cache=True)
def _pauli_accumulate(out, xmask, zmask, phase):
    dim = out.shape[0]
    for x in range(dim):
        if _popcount_parity(x & zmask):
            out[x ^ xmask, x] -= phase
        else:
            out[x ^ xmask, x] += phase


def pauli_accumulate(out, xmask, zmask, n_y, coeff):
    _pauli_accumulate(out, xmask, zmask, complex(coeff) * _I_POW[n_y % 4])


@njit(cache=True)
def _pauli_phase(dim, zmask, base):
    res = np.empty(dim, dtype=np.complex128)
    for x in range(dim):
        res[x] = -base if _popcount_parity(x & zmask) else base
    return res


def pauli_action_phase(dim, xmask, zmask, n_y):
    return _pauli_phase(dim, zmask, _I_POW[n_y % 4])


@njit(cache=True)
def apply_1q(state, mat, q):
    dim, m = state.shape
    bit = 1 << q
    m00, m01, m10, m11 = mat[0, 0], mat[0, 1], mat[1, 0], mat[1, 1]
    for i in range(dim):
        if i & bit:
            continue
        j = i | bit
        for c in range(m):
            a = state[i, c]
            b = state[j, c]
            state[i, c] = m00 * a + m01 * b
            state[j, c] = m10 * a + m11 * b


@njit(cache=True)
def _offsets(qubits):
    # offset of each local basis index; qubits[0] is the most significant local bit
    k = qubits.shape[0]
    off = np.zeros(1 << k, dtype=np.int64)
    for loc in range(1 << k):
        g = 0
        for t in range(k):
            if (loc >> (k - 1 - t)) & 1:
                g |= 1 << qubits[t]
        off[loc] = g
    return off


@njit(cache=True)
def _base_index(g, sorted_bits):
    # spread g over the non-operand bits by inserting zeros, lowest position first
    i = g
    for t in range(sorted_bits.shape[0]):
        b = sorted_bits[t]
        i = ((i >> b) << (b + 1)) | (i & ((1 << b) - 1))
    return i


@njit(cache=True)
def _apply_offsets(state, mat, off, sorted_bits):
    dim, m = state.shape
    sub = off.shape[0]
    groups = dim >> sorted_bits.shape[0]
    if m < 16:
        # narrow blocks (state vectors): keep one amplitude group in registers
        v = np.empty(sub, dtype=np.complex128)
        for g in range(groups):
            i = _base_index(g, sorted_bits)
            for c in range(m):
                for s in range(sub):
                    v[s] = state[i + off[s], c]
                for r in range(sub):
                    acc = 0j
                    for s in range(sub):
                        acc += mat[r, s] * v[s]
                    state[i + off[r], c] = acc
        return
    # wide blocks (density matrices): stream whole rows so the column loop is contiguous
    buf = np.empty((sub, m), dtype=np.complex128)
    for g in range(groups):
        i = _base_index(g, sorted_bits)
        for r in range(sub):
            row = state[i + off[r]]
            for c in range(m):
                buf[r, c] = row[c]
        for r in range(sub):
            row = state[i + off[r]]
            for c in range(m):
                row[c] = 0j
            for s in range(sub):
                w = mat[r, s]
                if w == 0:
                    continue
                for c in range(m):
                    row[c] += w * buf[s, c]


@njit(cache=True)
def apply_2q(state, mat, q0, q1):
    qs = np.empty(2, dtype=np.int64)
    qs[0] = q0
    qs[1] = q1
    _apply_offsets(state, mat, _offsets(qs), np.sort(qs))


def apply_kq(state, mat, qubits):
    qs = np.asarray(qubits, dtype=np.int64)
    _apply_offsets(state, np.ascontiguousarray(mat, dtype=np.complex128), _offsets(qs), np.sort(qs))


@njit(cache=True)
def euler_autocorr(h, psi0, n_steps, stride):
    # all samples advance together through one BLAS product per step
    d, k = psi0.shape
    n_rec = n_steps // stride + 1
    vals = np.zeros((k, n_rec), dtype=np.complex128)
    norms = np.zeros((k, n_rec), dtype=np.float64)
    hc = np.ascontiguousarray(h)
    bra = np.conj(psi0)
    cur = np.ascontiguousarray(psi0).copy()
    nxt = np.empty((d, k), dtype=np.complex128)
    rec = 0
    for step in range(n_steps + 1):
        if step > 0:
            np.dot(hc, cur, nxt)
            cur, nxt = nxt, cur
        if step % stride == 0:
            for a in range(d):
                for s in range(k):
                    v = cur[a, s]
                    vals[s, rec] += bra[a, s] * v
                    norms[s, rec] += v.real * v.real + v.imag * v.imag
            rec += 1
    return vals, np.sqrt(norms)
