"""Compare the compiled and pure-Python kernel backends.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from windcop import kernels


def cases(rng):
    a = rng.normal(size=100_000)
    X = rng.normal(size=(2_000, 20))
    y = X @ rng.normal(size=20) + rng.normal(size=2_000)
    y = y - y.mean()
    return {
        "count_inversions n=1e5": lambda: kernels.count_inversions(a),
        "lasso_cd 2000x20": lambda: kernels.lasso_cd(X, y, 0.05, 1e-8, 10_000, np.zeros(20)),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = kernels.available_backends()
    previous = kernels.backend()
    results = {}
    try:
        for b in backends:
            kernels.use_backend(b)
            for name, fn in cases(np.random.default_rng(0)).items():
                fn()  # warm up
                results[(name, b)] = min(timeit.repeat(fn, number=1, repeat=args.repeat))
    finally:
        kernels.use_backend(previous)
    names = sorted({n for n, _ in results})
    print(f"{'kernel':28s}" + "".join(f"{b:>12s}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for n in names:
        row = f"{n:28s}" + "".join(f"{results[(n, b)] * 1e3:10.2f}ms" for b in backends)
        if len(backends) > 1:
            row += f"{results[(n, 'python')] / results[(n, 'cython')]:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
