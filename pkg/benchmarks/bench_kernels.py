"""Kernel backend benchmark: numba jit vs pure numpy.

Times the three hot kernels over realistic shapes (paragraph counts x
vocabulary sizes) and prints one table per kernel. The first numba call
per shape pays the jit compile; a warmup round keeps that out of the
timings. Run with:

    python3 benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from qir.qprob import _kernels_numpy as knp

try:
    from qir.qprob import _kernels_numba as knb
except ImportError:  # numba not installed; nothing to compare
    knb = None

SHAPES = [
    (30, 200, 10),     # small corpus, low-rank basis
    (100, 1000, 25),
    (400, 5000, 50),   # mid-size corpus
]


def _materials(rng, n_vecs, dim, rank):
    vecs = rng.normal(size=(n_vecs, dim)) + 1j * rng.normal(size=(n_vecs, dim))
    vecs = np.ascontiguousarray(vecs / np.linalg.norm(vecs, axis=1, keepdims=True))
    raw = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    q, _ = np.linalg.qr(raw)
    basis = np.ascontiguousarray(q.T)
    return basis, vecs


def _time(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(42)
    cases = {shape: _materials(rng, *shape) for shape in SHAPES}

    kernels = {
        "projected_norms_sq": lambda mod, basis, vecs: mod.projected_norms_sq(basis, vecs),
        "project_onto": lambda mod, basis, vecs: mod.project_onto(basis, vecs),
        "orthonormalize": lambda mod, basis, vecs: mod.orthonormalize(vecs, 1e-8),
    }

    backends = [("numpy", knp)]
    if knb is not None:
        backends.append(("numba", knb))
        for basis, vecs in cases.values():  # trigger jit compilation
            knb.projected_norms_sq(basis, vecs)
            knb.project_onto(basis, vecs)
            knb.orthonormalize(vecs, 1e-8)
    else:
        print("numba unavailable; timing numpy only")

    for kernel_name, call in kernels.items():
        print(f"\n{kernel_name}")
        header = f"  {'shape (n x dim, rank)':<28}" + "".join(
            f"{name:>12}" for name, _ in backends
        )
        if len(backends) == 2:
            header += f"{'speedup':>10}"
        print(header)
        for shape, (basis, vecs) in cases.items():
            n, dim, rank = shape
            times = [
                _time(lambda m=mod: call(m, basis, vecs), args.repeats)
                for _, mod in backends
            ]
            row = f"  {f'{n} x {dim}, r={rank}':<28}" + "".join(
                f"{t * 1e3:>10.2f}ms" for t in times
            )
            if len(times) == 2:
                row += f"{times[0] / times[1]:>9.2f}x"
            print(row)

    return 0


if __name__ == "__main__":
    raise SystemExit(main())
