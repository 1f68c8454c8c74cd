"""Compiled vs pure-Python Grassmann kernels on symbolic composition workloads.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import time

from grasspath import _backend
from grasspath.algebra import max_coefficient_deviation
from grasspath.models import JaynesCummingsModel, SinusoidField, SpinFieldModel, TimeGrid
from grasspath.recursion import compose_discrete

WORKLOADS = {
    "spin N=6": lambda: compose_discrete(SpinFieldModel(0.7, SinusoidField(0.8 + 0.3j, 1.1, 0.4)), TimeGrid(1.0, 6)),
    "spin N=8": lambda: compose_discrete(SpinFieldModel(0.7, SinusoidField(0.8 + 0.3j, 1.1, 0.4)), TimeGrid(1.0, 8)),
    "jc N=8": lambda: compose_discrete(JaynesCummingsModel(1.3, 0.8, 0.7), TimeGrid(1.0, 8), 0.6 + 0.2j, 0.4 - 0.3j),
}


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n", 1)[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    compiled = _backend._ckernels
    if compiled is None:
        raise SystemExit("compiled core not available; build with pip install -e . --no-build-isolation")
    print(f"{'workload':<10} {'terms':>6} {'compiled s':>11} {'python s':>10} {'speedup':>8} {'max dev':>9}")
    for name, fn in WORKLOADS.items():
        _backend._ckernels = compiled
        tc, kc = best_of(fn, args.repeat)
        _backend._ckernels = None
        try:
            tp, kp = best_of(fn, args.repeat)
        finally:
            _backend._ckernels = compiled
        dev = max_coefficient_deviation(kc, kp)
        print(f"{name:<10} {len(kc):>6} {tc:>11.4f} {tp:>10.4f} {tp / tc:>8.1f} {dev:>9.1e}")


if __name__ == "__main__":
    main()
