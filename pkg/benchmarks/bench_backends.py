"""Timing comparison of the memory-convolution backends.

Runs the triangular lag convolution (the solver's only superlinear
kernel) at a few grid sizes through the compiled extension and through
the numpy fallback, and prints a small table.  Usage::

    python benchmarks/bench_backends.py [--steps 128 256 512] [--modes 32]
"""

import argparse
import time

import numpy as np

from fracsteer.backend import HAVE_COMPILED, _convolve_numpy
from fracsteer.fractional import convolution_kernel

if HAVE_COMPILED:
    from fracsteer import _memcore


def _time(fn, args, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, nargs="+",
                        default=[128, 256, 512, 1024])
    parser.add_argument("--modes", type=int, default=32)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(7)
    print(f"{'n_steps':>8} {'modes':>6} {'numpy [ms]':>12} "
          f"{'compiled [ms]':>14} {'speedup':>8}")
    for n in args.steps:
        kern = convolution_kernel(0.5, n, 1.0 / n)
        efac = rng.random((n + 1, args.modes))
        g = rng.standard_normal((n + 1, args.modes))
        call = (kern.first_node, kern.lag, kern.last_node, efac, g)
        t_np = _time(_convolve_numpy, call, args.repeats)
        if HAVE_COMPILED:
            t_c = _time(_memcore.memory_convolve, call, args.repeats)
            ref = _memcore.memory_convolve(*call)
            assert np.allclose(ref, _convolve_numpy(*call), atol=1e-12)
            print(f"{n:>8} {args.modes:>6} {1e3 * t_np:>12.3f} "
                  f"{1e3 * t_c:>14.3f} {t_np / t_c:>8.1f}x")
        else:
            print(f"{n:>8} {args.modes:>6} {1e3 * t_np:>12.3f} "
                  f"{'(unavailable)':>14} {'-':>8}")


if __name__ == "__main__":
    main()
