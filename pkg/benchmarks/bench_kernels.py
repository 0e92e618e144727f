#!/usr/bin/env python3
"""Time the weight-assembly kernels: numba @njit loops vs vectorized numpy.

Usage:
    python benchmarks/bench_kernels.py [--sizes 256,512,1024,2048] [--repeats 5]

The first numba call includes JIT compilation; a warmup run is excluded
from the timings. The package itself picks a backend at import time from
FRACHAM_BACKEND (auto | numba | numpy).
"""

import argparse
import time

from fracham import _kernels


def best_of(fn, args, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="256,512,1024,2048")
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--alpha", type=float, default=0.5)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    impls = _kernels.implementations()
    print(f"active package backend: {_kernels.active_backend()}")
    print(f"available for benchmark: {', '.join(impls)}")
    if "numba" in impls:
        impls["numba"][0](8, args.alpha, 1.0)  # JIT warmup
        impls["numba"][1](8, args.alpha, 1.0)

    header = f"{'kernel':<10} {'n':>6} " + "".join(f"{name:>12}" for name in impls)
    if len(impls) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))

    for label, idx in (("caputo-l1", 0), ("integral", 1)):
        for n in sizes:
            row = f"{label:<10} {n:>6} "
            times = {}
            for name, fns in impls.items():
                times[name] = best_of(fns[idx], (n, args.alpha, 1.0), args.repeats)
                row += f"{times[name] * 1e3:>10.2f}ms"
            if len(times) == 2:
                row += f"{times['numpy'] / times['numba']:>9.2f}x"
            print(row)


if __name__ == "__main__":
    main()
