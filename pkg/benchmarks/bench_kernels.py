"""Compare the compiled BFS kernel with the pure-Python fallback.

Runs both backends on the subdivided T23 truncation (Z/2 * Z/3, s = 38) and
checks that they return identical distance rows.

    python3 benchmarks/bench_kernels.py --sources 20 --truncation 14
"""

import argparse
import time

import numpy as np

from projkit import _kernels_py
from projkit.metric import BassSerreSpace


def timed(fn, indptr, indices, sources, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(indptr, indices, sources)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sources", type=int, default=20)
    ap.add_argument("--truncation", type=int, default=14)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    space = BassSerreSpace(2, 3, 38, args.truncation)
    apices = space.apices()[: args.sources]
    sources = np.array([space.idx(a) for a in apices], dtype=np.int64)
    print(f"graph: {len(space)} points, {len(space.edges)} edges; {len(sources)} BFS sources")

    t_py, rows_py = timed(_kernels_py.bfs_many, space.indptr, space.indices, sources, args.repeat)
    print(f"python  : {t_py:8.4f} s")
    try:
        from projkit import _kernels
    except ImportError:
        print("cython  : not built (run `pip install -e . --no-build-isolation`)")
        return 0
    t_cy, rows_cy = timed(_kernels.bfs_many, space.indptr, space.indices, sources, args.repeat)
    print(f"cython  : {t_cy:8.4f} s")
    same = np.array_equal(rows_py, rows_cy)
    print(f"speedup : {t_py / t_cy:8.1f}x   identical rows: {same}")
    return 0 if same else 1


if __name__ == "__main__":
    raise SystemExit(main())
