"""Compare the compiled and pure-Python enumeration kernels.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--threads 1,2,4]

Each case counts integer points of T_eps(D) with both backends, checks that
the point sets are identical, and prints the best wall time of each.
"""

import argparse
import time
from fractions import Fraction

from anisolattice import build_subspace, parse_scalar
from anisolattice.counting import count_points
from anisolattice.domains import Ellipsoid, ball
from anisolattice.kernels import HAVE_COMPILED

CASES = [
    ("disk, F=(1,sqrt2), eps=1/1024", ball([0, 0], 1), build_subspace([[1, parse_scalar("sqrt(2)")]], 2), Fraction(1, 1024)),
    ("disk, F=(1,1/2), eps=1/1024", ball([0, 0], 1), build_subspace([[1, Fraction(1, 2)]], 2), Fraction(1, 1024)),
    ("3-d ellipsoid, p=2, eps=1/200", Ellipsoid((Fraction(1, 4), 0, 0), ((2, 1, 0), (1, 2, 0), (0, 0, 1))),
     build_subspace([[1, parse_scalar("sqrt(2)"), 0], [0, 0, 1]], 3), Fraction(1, 200)),
    ("3-d ball, F trivial, eps=1/40", ball([0, 0, 0], 1), build_subspace([], 3), Fraction(1, 40)),
]


def best_time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--threads", default="1")
    args = ap.parse_args()
    threads = [int(t) for t in args.threads.split(",")]
    if not HAVE_COMPILED:
        print("compiled kernel not available; only the Python backend will run")
    print(f"{'case':34s} {'points':>8s} {'python s':>10s} " + " ".join(f"{'C x' + str(t):>9s}" for t in threads)
          + f" {'speedup':>8s}")
    for name, D, S, eps in CASES:
        t_py, (res_py, pts_py) = best_time(
            lambda: count_points(D, S, eps, backend="python", return_points=True), args.repeat)
        cells = []
        best_c = None
        for t in threads:
            if not HAVE_COMPILED:
                cells.append(f"{'-':>9s}")
                continue
            t_c, (res_c, pts_c) = best_time(
                lambda: count_points(D, S, eps, backend="compiled", threads=t, return_points=True), args.repeat)
            assert res_c == res_py and (pts_c == pts_py).all(), name
            cells.append(f"{t_c:9.4f}")
            best_c = t_c if best_c is None else min(best_c, t_c)
        speed = f"{t_py / best_c:8.1f}" if best_c else f"{'-':>8s}"
        print(f"{name:34s} {res_py.total:8d} {t_py:10.4f} " + " ".join(cells) + f" {speed}")


if __name__ == "__main__":
    main()
