"""Numba vs numpy kernel timings.

Times each dense gate kernel on a random state, then a full solve run at
N=4 (21 qubits) and an N=4 determinant run with each kernel set.

    python benchmarks/bench_kernels.py [--qubits 20] [--repeat 5]
"""
import argparse
import statistics
import time

import numpy as np

from qdetlin import kernels, normalize_for_inverse, encode_rhs, run_determinant, run_solve
from qdetlin.ledger import normalize_for_det


def timed(fn, repeat, warmup=1):
    for _ in range(warmup):
        fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def kernel_cases(nq):
    # controls on the low qubits, targets higher up
    cmask, cval = 0b101, 0b001
    xmask = 0b11 << 4
    return {
        "xor_flip": lambda k, s: k["xor_flip"](s, cmask, cval, xmask),
        "phase_flip": lambda k, s: k["phase_flip"](s, cmask, cval, xmask),
        "swap_fields": lambda k, s: k["swap_fields"](s, cmask, cval, 4, 8, 3),
        "hadamard": lambda k, s: k["hadamard"](s, nq - 1),
    }


def bench_kernels(nq, repeat, rng):
    state = rng.normal(size=2 ** nq) + 1j * rng.normal(size=2 ** nq)
    state /= np.linalg.norm(state)
    rows = []
    for name, call in kernel_cases(nq).items():
        row = [name]
        for use in (True, False):
            ks = kernels.kernel_set(use)
            s = state.copy()
            row.append(timed(lambda: call(ks, s), repeat))
        rows.append(row)
    return rows


def bench_circuits(repeat, rng):
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    b = rng.normal(size=3) + 1j * rng.normal(size=3)
    scaled, lg = normalize_for_inverse(a)
    b_enc, _ = encode_rhs(b, lg)
    d = normalize_for_det(rng.normal(size=(4, 4)))[0]
    rows = []
    for label, fn in (
        ("det N=4 (14q)", lambda u: run_determinant(d, "dense", use_numba=u)),
        ("solve N=4 (21q)", lambda u: run_solve(scaled, b_enc, backend="dense", use_numba=u)),
    ):
        rows.append([label] + [timed(lambda: fn(u), repeat) for u in (True, False)])
    return rows


def report(title, rows):
    print(f"\n{title}")
    print(f"{'case':<20}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}")
    for name, t_nb, t_np in rows:
        print(f"{name:<20}{t_nb:>12.5f}{t_np:>12.5f}{t_np / t_nb:>9.1f}x")


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--qubits", type=int, default=20)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if not kernels.HAS_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    rng = np.random.default_rng(args.seed)
    report(f"single kernels, {args.qubits} qubits", bench_kernels(args.qubits, args.repeat, rng))
    report("full circuits, dense backend", bench_circuits(args.repeat, rng))


if __name__ == "__main__":
    main()
