"""Compare the compiled and pure-Python kernel backends.

    python3 benchmarks/bench_kernels.py [--points 100000] [--K 16384] [--repeat 3]

Times the chaos game and the one-sided d_eta Hausdorff distance on the sine
construction system, checks that both backends return identical arrays and
prints one line per (kernel, backend).
"""

import argparse
import time

import numpy as np

from fractalhisto import kernels
from fractalhisto.attractor import chaos_game, eta, graph_cloud, nearest_distances
from fractalhisto.core_model import (
    ContractionSpec,
    ModulusSpec,
    ScalingSpec,
    assemble_system,
    build_partition,
)
from fractalhisto.rb_solver import solve_on_grid


def sine_system():
    s = ContractionSpec("scaled-sine", 0.5, ModulusSpec("linear", 0.5))
    return assemble_system(build_partition([0.0, 0.5, 1.0]), (0.5, 0.25), (1 / 3, 1 / 6),
                           (ScalingSpec.linear(1.5), ScalingSpec.linear(1.75)), (s, s))


def best_of(fn, repeat):
    times, out = [], None
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=100_000)
    ap.add_argument("--K", type=int, default=2 ** 14)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    sys_ = sine_system()
    f, _ = solve_on_grid(sys_, args.K)
    graph = graph_cloud(f)
    e = eta(sys_)
    found = kernels.backends()
    print(f"backends: {', '.join(sorted(found))}; threads={kernels.thread_count()}")

    results = {}
    for name, mod in sorted(found.items()):
        t_cg, cloud = best_of(lambda: chaos_game(sys_, args.points, seed=7, backend=mod), args.repeat)
        t_hd, dist = best_of(lambda: nearest_distances(cloud, graph, e, backend=mod), args.repeat)
        results[name] = (cloud.points, dist)
        print(f"chaos_game  n={args.points:<8d} {name:7s} {t_cg * 1e3:10.2f} ms")
        print(f"hausdorff   {args.points}x{args.K + 1:<6d} {name:7s} {t_hd * 1e3:10.2f} ms")

    if len(results) == 2:
        (pa, da), (pb, db) = results.values()
        same = np.array_equal(pa, pb) and np.array_equal(da, db)
        print(f"identical results across backends: {same}")


if __name__ == "__main__":
    main()
