"""Time the compiled kernels against the NumPy fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Each row reports the best-of-N wall time per call for both backends and the
speedup. The end-to-end row runs a full Gamma interval on a random bilinear map.
"""

import argparse
import sys
import timeit

import numpy as np

from gamma_factor import _backend, euclidean, gamma_interval
from gamma_factor.operators import MultilinearOperator


def cases(rng):
    sym = rng.normal(size=(12, 12))
    sym = sym + sym.T
    rect = rng.normal(size=(12, 8))
    coeffs = rng.normal(size=(3, 3, 3, 2))
    shape = coeffs.shape
    exps = np.array([2.0, 3.0, 1.5, 2.0])
    x0 = rng.normal(size=sum(shape))
    T = MultilinearOperator([euclidean(3)] * 3, euclidean(2), rng.normal(size=(3, 3, 3, 2)))
    return {
        "jacobi_eigh 12x12": lambda k: k.jacobi_eigh(sym, 1e-15, 64),
        "jacobi_svd 12x8": lambda k: k.jacobi_svd(rect, 1e-15, 64),
        "form_value 3x3x3x2": lambda k: k.form_value(coeffs, shape, x0),
        "alt_max 3x3x3x2": lambda k: k.alt_max(coeffs, shape, exps, x0, 50, 1e-13),
        "gamma_interval n=3": lambda k: gamma_interval(T, 0, 16),
    }


def best_time(fn, repeat):
    number = 1
    while timeit.timeit(fn, number=number) < 0.05:
        number *= 2
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not _backend.compiled_available():
        print("compiled extension not built; run `pip install -e . --no-build-isolation`", file=sys.stderr)
        return 1
    rng = np.random.default_rng(0)
    print(f"{'case':<22}{'python':>12}{'cython':>12}{'speedup':>10}")
    for name, call in cases(rng).items():
        times = {}
        for backend in ("python", "cython"):
            _backend.use(backend)
            times[backend] = best_time(lambda: call(_backend.kernels), args.repeat)
        print(f"{name:<22}{times['python'] * 1e6:>10.1f}us{times['cython'] * 1e6:>10.1f}us{times['python'] / times['cython']:>9.1f}x")
    _backend.use("cython")
    return 0


if __name__ == "__main__":
    sys.exit(main())
