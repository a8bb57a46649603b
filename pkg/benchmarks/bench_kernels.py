"""Time the numba kernels against their numpy / pure-Python fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat N]

Both paths are imported side by side, so PMLOCK_BACKEND does not matter here.
Compilation is excluded (one warm-up call per kernel).
"""
import argparse
import math
import timeit

import numpy as np

from pmlock._backend import HAVE_NUMBA
from pmlock.lineshapes import _sums_numba, _sums_numpy
from pmlock.oracle import _propagate_numba, _propagate_py
from pmlock.special import _rows_numba, _rows_numpy


def cases():
    xs = np.linspace(0.0, 60.0, 400)
    rows = _rows_numpy(xs, 161)  # sums read J_{k_max + 1}
    period = 2 * math.pi / 0.764
    par = np.array([0.1, 0.764, 0.652, 1.0, 0.0])
    atol = np.array([1e-13, 1e-13])

    def prop(fn):
        return lambda: fn(0, np.zeros(2, np.complex128), 0.0, period / 512, 512, par, 1e-10, atol, 0.01, 0.5)

    return [
        ("bessel rows (400 x, k<=160)", lambda: _rows_numba(xs, 160), lambda: _rows_numpy(xs, 160)),
        ("lorentz sums (400 x, k<=160)", lambda: _sums_numba(rows, 160, 0.0, 0.764),
         lambda: _sums_numpy(rows, 160, 0.0, 0.764)),
        ("DP5 one period, 512 samples", prop(_propagate_numba), prop(_propagate_py)),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    print(f"{'kernel':32s} {'numba [ms]':>12s} {'numpy [ms]':>12s} {'speedup':>9s}")
    for name, fast, slow in cases():
        fast(), slow()
        t_fast = min(timeit.repeat(fast, number=1, repeat=args.repeat)) * 1e3
        t_slow = min(timeit.repeat(slow, number=1, repeat=args.repeat)) * 1e3
        print(f"{name:32s} {t_fast:12.3f} {t_slow:12.3f} {t_slow / t_fast:8.1f}x")


if __name__ == "__main__":
    main()
