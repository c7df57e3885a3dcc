"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from clustercurve import _pykernels

try:
    from clustercurve import _ckernels
except ImportError:
    _ckernels = None


def _cases(rng):
    a = rng.standard_normal(3000) + 1j * rng.standard_normal(3000)
    b = np.exp(2j * np.pi * rng.random(2000))
    c = rng.standard_normal(2049) + 1j * rng.standard_normal(2049)
    x = np.cos(np.linspace(0, np.pi, 40001))
    return [
        ("directed_hausdorff 3000x2000", "directed_hausdorff", (a, b)),
        ("diameter 3000", "diameter", (a,)),
        ("chebval deg 2048 at 40001 pts", "chebval", (c, x)),
    ]


def best_time(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'kernel':34s} {'python':>10s} {'cython':>10s} {'speedup':>8s}")
    for label, name, fargs in _cases(rng):
        tp = best_time(getattr(_pykernels, name), fargs, args.repeat)
        if _ckernels is None:
            print(f"{label:34s} {tp:10.4f} {'n/a':>10s}")
            continue
        tc = best_time(getattr(_ckernels, name), fargs, args.repeat)
        print(f"{label:34s} {tp:10.4f} {tc:10.4f} {tp / tc:7.1f}x")


if __name__ == "__main__":
    main()
