#!/usr/bin/env python3
"""Compare the compiled kernel backend against the pure-Python fallback.

Runs the same synthetic join with each available backend and reports phase
timings plus the speedup. Sizes default to something the Python backend can
finish in a few seconds; crank --n up when only measuring the compiled side.

    python benchmarks/backend_compare.py --n 30000 --threads 4 --reps 3
"""

import argparse

from sweepjoin import (
    JoinConfig,
    PartitionLayout,
    SyntheticSpec,
    available_backends,
    generate_synthetic,
    join,
    recommend_k,
)


def run(backend, r, s, k, threads, reps):
    cfg = JoinConfig(PartitionLayout("1d", k), threads=threads, backend=backend)
    join(r, s, cfg)  # warm-up
    reports = [join(r, s, cfg) for _ in range(reps)]
    return min(reports, key=lambda rep: rep.total_time)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=30_000, help="rectangles per side")
    parser.add_argument("--extent", type=float, default=0.002, help="mean extent")
    parser.add_argument("--k", type=int, default=None,
                        help="stripe count (default: rule of thumb)")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--reps", type=int, default=3)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    r = generate_synthetic(SyntheticSpec(args.n, args.extent, args.extent,
                                         seed=args.seed))
    s = generate_synthetic(SyntheticSpec(args.n, args.extent, args.extent,
                                         seed=args.seed + 1))
    k = args.k if args.k is not None else recommend_k(args.extent)
    print(f"workload: {args.n} x {args.n} rectangles, mean extent {args.extent}, "
          f"1d stripes K={k}, threads={args.threads}, best of {args.reps}")
    print(f"{'backend':<10} {'partition_s':>12} {'sort_s':>10} {'join_s':>10} "
          f"{'total_s':>10} {'result_count':>13}")
    totals = {}
    for backend in available_backends():
        rep = run(backend, r, s, k, args.threads, args.reps)
        totals[backend] = rep.total_time
        print(f"{backend:<10} {rep.partition_time:>12.4f} {rep.sort_time:>10.4f} "
              f"{rep.join_time:>10.4f} {rep.total_time:>10.4f} {rep.result_count:>13}")
    if "compiled" in totals and "python" in totals:
        print(f"\ncompiled speedup over python: "
              f"{totals['python'] / totals['compiled']:.1f}x")
    elif "compiled" not in totals:
        print("\ncompiled backend not built; only the Python fallback was measured")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
