"""Compare the numba and numpy backends of the annulus Laurent-series kernel.

Usage::

    python3 benchmarks/bench_series.py --points 1 64 4096 --repeat 5

The numba backend is compiled once before timing. Each row reports the best
wall time of ``--repeat`` runs, the speed-up and the largest disagreement
between the two backends relative to the absolute series scale.
"""

import argparse
import timeit

import numpy as np

from szego_lab import _accel
from szego_lab.kernels import annulus_cutoffs


def _case(points, r, radius, kind, rng):
    t = (radius**2) * np.exp(2j * np.pi * rng.uniform(size=points))
    n_pos, n_neg = annulus_cutoffs(r, radius**2, r * r / radius**2, kind)
    return t, r, kind == "bergman", n_pos, n_neg


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--points", type=int, nargs="+", default=[1, 64, 4096])
    parser.add_argument("--inner", type=float, default=0.5, help="inner radius r")
    parser.add_argument("--radius", type=float, default=0.9, help="|z| of the evaluation points")
    parser.add_argument("--kind", choices=["szego", "bergman"], default="szego")
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    if _accel.numba is None:
        parser.exit(1, "numba is not installed; nothing to compare\n")
    rng = np.random.default_rng(0)
    _accel.series_moments_numba(*_case(1, args.inner, args.radius, args.kind, rng))  # compile

    print(f"{'points':>8} {'terms':>7} {'numpy [s]':>11} {'numba [s]':>11} {'speed-up':>9} {'max diff':>9}")
    for points in args.points:
        case = _case(points, args.inner, args.radius, args.kind, rng)
        slow = min(timeit.repeat(lambda: _accel.series_moments_numpy(*case), number=1, repeat=args.repeat))
        fast = min(timeit.repeat(lambda: _accel.series_moments_numba(*case), number=1, repeat=args.repeat))
        a = _accel.series_moments_numpy(*case)
        b = _accel.series_moments_numba(*case)
        t, r, bergman, n_pos, n_neg = case
        scale = np.abs(_accel.series_moments_numpy(np.abs(t), r, bergman, n_pos, n_neg)).max(axis=1, keepdims=True)
        diff = float((np.abs(a - b) / scale).max())
        print(f"{points:>8} {n_pos + n_neg + 1:>7} {slow:>11.3e} {fast:>11.3e} {slow / fast:>9.1f} {diff:>9.1e}")


if __name__ == "__main__":
    main()
