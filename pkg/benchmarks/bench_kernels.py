"""Time the compiled kernels against their pure-Python fallbacks.

Run with ``python3 benchmarks/bench_kernels.py``. Both implementations get
identical inputs and their outputs are compared before timing.
"""

import argparse
import timeit

import numpy as np

from ctn_mbqc import _kernels
from ctn_mbqc import groups, percolation
from ctn_mbqc._kernels import _fallback


def _cases(n, seed):
    lat = percolation.sample(2, n, None, 0.6, seed)
    u, v = lat.edges()
    indptr, indices = lat.adjacency()
    allowed = np.ones(lat.num_sites, dtype=np.uint8)
    src, dst = 0, lat.num_sites - 1
    g = groups.build_group("clifford1")
    draws = np.random.default_rng(seed).integers(0, g.order, size=20_000).astype(np.int64)
    return {
        "label_components": ((lat.num_sites, u, v), {}),
        "bfs_path": ((indptr, indices, src, dst, allowed), {}),
        "walk_hits": ((g.cayley, draws, 0, -1), {}),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=120, help="lattice side")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    print(f"compiled backend: {_kernels.BACKEND}")
    cases = _cases(args.n, args.seed)
    print(f"{'kernel':<18}{'python ms':>12}{'active ms':>12}{'speedup':>10}")
    for name, (a, kw) in cases.items():
        slow = getattr(_fallback, name)
        fast = getattr(_kernels, name)
        r_slow, r_fast = slow(*a, **kw), fast(*a, **kw)
        if isinstance(r_slow, tuple):
            assert r_slow == tuple(r_fast), name
        else:
            assert np.array_equal(r_slow, r_fast), name
        t_slow = min(timeit.repeat(lambda: slow(*a, **kw), number=1, repeat=args.repeat))
        t_fast = min(timeit.repeat(lambda: fast(*a, **kw), number=1, repeat=args.repeat))
        print(f"{name:<18}{1e3 * t_slow:>12.3f}{1e3 * t_fast:>12.3f}{t_slow / t_fast:>10.1f}")


if __name__ == "__main__":
    main()
