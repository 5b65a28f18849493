"""Wall-clock comparison of the numba and numpy kernel backends.

Run with ``python benchmarks/bench_kernels.py``. Shapes follow the simulator's
workloads: state vectors are ``(2^n, 1)`` blocks and density matrices are
conjugated as ``(2^n, 2^n)`` blocks. Each kernel is called once to trigger
compilation, then timed as the best of several repeats.
"""
import argparse
import timeit

import numpy as np

from mmspec._kernels import numba_impl, numpy_impl
from mmspec.operators import build_heisenberg, to_dense


def haar(rng, k):
    q, _ = np.linalg.qr(rng.normal(size=(1 << k, 1 << k)) + 1j * rng.normal(size=(1 << k, 1 << k)))
    return q


def cases(sv_qubits: int, dm_qubits: int, rng):
    sv = rng.normal(size=(1 << sv_qubits, 1)) + 0j
    dm = rng.normal(size=(1 << dm_qubits, 1 << dm_qubits)) + 0j
    u1, u2, u3 = haar(rng, 1), haar(rng, 2), haar(rng, 3)
    hi_sv, hi_dm = sv_qubits - 1, dm_qubits - 1
    step = np.eye(16, dtype=complex) - 1e-4j * to_dense(build_heisenberg(4))
    psi = (rng.normal(size=(16, 64)) + 1j * rng.normal(size=(16, 64))) / 4
    pauli_out = np.zeros((1 << 10, 1 << 10), dtype=complex)
    return {
        f"1q sv n={sv_qubits}": lambda impl: impl.apply_1q(sv, u1, hi_sv),
        f"2q sv n={sv_qubits}": lambda impl: impl.apply_2q(sv, u2, hi_sv, 0),
        f"3q sv n={sv_qubits}": lambda impl: impl.apply_kq(sv, u3, [hi_sv, 1, 0]),
        f"1q dm n={dm_qubits}": lambda impl: impl.apply_1q(dm, u1, hi_dm),
        f"2q dm n={dm_qubits}": lambda impl: impl.apply_2q(dm, u2, hi_dm, 0),
        f"3q dm n={dm_qubits}": lambda impl: impl.apply_kq(dm, u3, [hi_dm, 1, 0]),
        "pauli n=10": lambda impl: impl.pauli_accumulate(pauli_out, 0b1011, 0b0110, 1, 0.5),
        "euler d=16 K=64": lambda impl: impl.euler_autocorr(step, psi, 2000, 20),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sv-qubits", type=int, default=18)
    ap.add_argument("--dm-qubits", type=int, default=8)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'kernel':<20}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}")
    for name, fn in cases(args.sv_qubits, args.dm_qubits, rng).items():
        times = {}
        for label, impl in (("numpy", numpy_impl), ("numba", numba_impl)):
            fn(impl)
            times[label] = min(timeit.repeat(lambda: fn(impl), number=3, repeat=args.repeat)) / 3 * 1e3
        print(f"{name:<20}{times['numpy']:>12.3f}{times['numba']:>12.3f}"
              f"{times['numpy'] / times['numba']:>10.2f}")


if __name__ == "__main__":
    main()
