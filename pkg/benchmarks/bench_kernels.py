"""Compiled vs pure-Python kernels on the graphs the audits actually build.

    python benchmarks/bench_kernels.py [--radius 4] [--repeat 3]

Each row reports the best of ``--repeat`` runs and checks that both
backends return identical results.
"""
import argparse
import time

import numpy as np

from relhyp import config, kernels
from relhyp.bicombing import ConeTree
from relhyp.graphs import barycentric_subdivision, coned_off_graph
from relhyp.groups import ball


def best_of(fn, repeat):
    out, best = None, float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return out, best


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    return a == b


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--radius", type=int, default=4)
    p.add_argument("--tree-radius", type=int, default=3, help="ball for the exhaustive area scan")
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)

    compiled = kernels.compiled_impl()
    if compiled is None:
        print("compiled kernels are not built; nothing to compare")
        return 1
    py = kernels.python_impl()

    fx = config.load("f2")
    Y = barycentric_subdivision(coned_off_graph(fx.mg, fx.fam, args.radius))
    ip, ix = Y.csr()
    tree = ConeTree(fx.fam)
    V = tree.vertices_within(ball(fx.mg, args.tree_radius))
    parent, depth, _ = tree.arrays(V)
    ids = np.arange(len(V), dtype=np.int32)

    cases = [
        (f"bfs_csr, subdivided coned-off graph r={args.radius} ({Y.n} vertices)",
         lambda impl: kernels.bfs_csr(ip, ix, 0, impl=impl)),
        ("articulation_points, same graph",
         lambda impl: kernels.articulation_points(ip, ix, impl=impl)),
        ("all_pairs_bfs, same graph",
         lambda impl: kernels.all_pairs_bfs(ip, ix, impl=impl)),
        (f"tree_area_scan, cone tree r={args.tree_radius} ({len(V)} vertices)",
         lambda impl: kernels.tree_area_scan(parent, depth, ids, impl=impl)),
        ("tree_distance_matrix, same tree",
         lambda impl: kernels.tree_distance_matrix(parent, depth, ids, impl=impl)),
    ]
    print(f"{'kernel':<62} {'python':>10} {'compiled':>10} {'speedup':>8}")
    for name, fn in cases:
        a, t_py = best_of(lambda: fn(py), args.repeat)
        b, t_c = best_of(lambda: fn(compiled), args.repeat)
        if not same(a, b):
            raise SystemExit(f"backends disagree on {name}")
        print(f"{name:<62} {t_py:>9.4f}s {t_c:>9.4f}s {t_py / max(t_c, 1e-9):>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
