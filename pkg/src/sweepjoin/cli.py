"""Command-line front end: run joins, sweep tuning grids, verify, generate data.

Subcommands:
  join      one join (or epsilon-distance join) with timings
  bench     a grid of configurations, one CSV row per run
  tune      dataset statistics and recommended layout/K/axis
  generate  synthetic datasets for benchmarking

CSV rows share the schema
  layout,k,axis,threads,rep,partition_s,join_s,total_s,result_count
with durations in seconds (6 decimals); sorting time is folded into join_s.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import backends, engine, io, oracle
from .errors import InvalidStatisticsError, SweepJoinError
from .geometry import Axis, RectBatch
from .partition import DEFAULT_K_MAX, PartitionLayout, recommend_k

VERIFY_LIMIT = 100_000
# Auto-selected grid resolutions are capped so K*K tile bookkeeping stays sane.
AUTO_K_MAX_2D = 2048

CSV_HEADER = "layout,k,axis,threads,rep,partition_s,join_s,total_s,result_count"


def _load_pair(left: str, right: str) -> tuple[RectBatch, RectBatch, io.DatasetStats, io.DatasetStats]:
    """Load both inputs; map them into a shared unit frame if needed."""
    a, stats_a = io.load_dataset(left)
    b, stats_b = io.load_dataset(right)
    if len(a) == 0 or len(b) == 0:
        return a, b, stats_a, stats_b
    xmin, ymin, xmax, ymax = io.union_bbox(a, b)
    if xmin < 0.0 or ymin < 0.0 or xmax > 1.0 or ymax > 1.0:
        print("note: data outside the unit square; normalizing both inputs "
              "by their combined bounding box", file=sys.stderr)
        a, b = io.normalize_pair(a, b)
        stats_a, stats_b = io.compute_stats(a), io.compute_stats(b)
    return a, b, stats_a, stats_b


def _combined_axis_extent(stats_a: io.DatasetStats, stats_b: io.DatasetStats,
                          axis: Axis) -> float:
    n = stats_a.cardinality + stats_b.cardinality
    if n == 0:
        return 0.0
    if axis is Axis.X:
        total = (stats_a.cardinality * stats_a.avg_x_extent
                 + stats_b.cardinality * stats_b.avg_x_extent)
    else:
        total = (stats_a.cardinality * stats_a.avg_y_extent
                 + stats_b.cardinality * stats_b.avg_y_extent)
    return total / n


def _auto_k(kind: str, stats_a: io.DatasetStats, stats_b: io.DatasetStats,
            epsilon: float | None) -> int:
    if epsilon is not None:
        avg = epsilon  # squares of side epsilon are the partitioned objects
    elif kind == "1d":
        avg = _combined_axis_extent(stats_a, stats_b, Axis.X)
    else:
        avg = (_combined_axis_extent(stats_a, stats_b, Axis.X)
               + _combined_axis_extent(stats_a, stats_b, Axis.Y)) / 2.0
    k_max = DEFAULT_K_MAX if kind == "1d" else AUTO_K_MAX_2D
    try:
        return recommend_k(avg, kind, k_max=k_max)
    except InvalidStatisticsError:
        print(f"warning: zero average extent (point data); capping K at {k_max}",
              file=sys.stderr)
        return k_max


def _resolve_k(value: str, kind: str, stats_a, stats_b, epsilon) -> int:
    if value == "auto":
        return _auto_k(kind, stats_a, stats_b, epsilon)
    k = int(value)
    if k < 1:
        raise SweepJoinError(f"k must be >= 1, got {k}")
    return k


def _default_axis(kind: str) -> str:
    return "auto" if kind == "1d" else "adaptive"


def _run(left: RectBatch, right: RectBatch, cfg: engine.JoinConfig,
         epsilon: float | None) -> engine.JoinReport:
    if epsilon is not None:
        return engine.epsilon_distance_join(left, right, epsilon, cfg)
    return engine.join(left, right, cfg)


def _csv_row(layout: PartitionLayout, axis: str, threads: int, rep: int,
             report: engine.JoinReport) -> str:
    join_s = report.sort_time + report.join_time
    return (f"{layout.kind},{layout.k},{axis},{threads},{rep},"
            f"{report.partition_time:.6f},{join_s:.6f},"
            f"{report.total_time:.6f},{report.result_count}")


def _verify(left: RectBatch, right: RectBatch, report: engine.JoinReport,
            epsilon: float | None) -> bool:
    if epsilon is not None:
        expected = oracle.nested_loop_distance(left, right, epsilon)
    else:
        expected = oracle.nested_loop_join(left, right)
    got = set(map(tuple, report.pairs.tolist()))
    if got == expected and report.result_count == len(expected):
        print(f"verify: OK ({len(expected)} pairs)", file=sys.stderr)
        return True
    missing = len(expected - got)
    extra = len(got - expected)
    print(f"verify: MISMATCH engine={report.result_count} oracle={len(expected)} "
          f"missing={missing} extra={extra}", file=sys.stderr)
    return False


def cmd_join(args: argparse.Namespace) -> int:
    left, right, stats_a, stats_b = _load_pair(args.left, args.right)
    if args.verify and (len(left) > VERIFY_LIMIT or len(right) > VERIFY_LIMIT):
        print(f"error: --verify allows at most {VERIFY_LIMIT} rectangles per input",
              file=sys.stderr)
        return 1
    k = _resolve_k(args.k, args.layout, stats_a, stats_b, args.epsilon)
    layout = PartitionLayout(args.layout, k)
    axis = args.axis or _default_axis(args.layout)
    cfg = engine.JoinConfig(
        layout=layout,
        axis_policy=axis,
        threads=args.threads,
        sink_mode="collect-pairs" if (args.collect or args.verify) else "count-only",
        backend=args.backend,
    )
    report = _run(left, right, cfg, args.epsilon)
    if args.format == "csv":
        print(CSV_HEADER)
        print(_csv_row(layout, axis, args.threads, 0, report))
    else:
        print(f"backend={cfg.backend or backends.default_backend()}")
        print(f"layout={layout.kind} k={layout.k} axis={axis} threads={args.threads}")
        print(f"result_count={report.result_count}")
        print(f"partition_s={report.partition_time:.6f}")
        print(f"sort_s={report.sort_time:.6f}")
        print(f"join_s={report.join_time:.6f}")
        print(f"total_s={report.total_time:.6f}")
    if args.verify and not _verify(left, right, report, args.epsilon):
        return 1
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    left, right, stats_a, stats_b = _load_pair(args.left, args.right)
    layouts = args.layout_list.split(",")
    k_values = args.k_list.split(",")
    axis_values = args.axis_list.split(",") if args.axis_list else None
    thread_values = [int(v) for v in args.threads_list.split(",")]
    if args.reps < 1:
        print("error: --reps must be >= 1", file=sys.stderr)
        return 1

    print(CSV_HEADER)
    counts: set[int] = set()
    for kind in layouts:
        if kind not in ("1d", "2d"):
            print(f"error: unknown layout {kind!r}", file=sys.stderr)
            return 1
        axes = axis_values if axis_values else [_default_axis(kind)]
        for k_arg in k_values:
            k = _resolve_k(k_arg, kind, stats_a, stats_b, args.epsilon)
            layout = PartitionLayout(kind, k)
            for axis in axes:
                if axis == "auto" and kind != "1d":
                    print(f"warning: skipping axis=auto for layout={kind} "
                          f"(stripes only)", file=sys.stderr)
                    continue
                for threads in thread_values:
                    cfg = engine.JoinConfig(layout=layout, axis_policy=axis,
                                            threads=threads, backend=args.backend)
                    for rep in range(args.reps):
                        report = _run(left, right, cfg, args.epsilon)
                        counts.add(report.result_count)
                        print(_csv_row(layout, axis, threads, rep, report))
    if len(counts) > 1:
        print(f"error: result_count varied across configurations: {sorted(counts)}",
              file=sys.stderr)
        return 1
    return 0


def cmd_tune(args: argparse.Namespace) -> int:
    left, right, stats_a, stats_b = _load_pair(args.left, args.right)
    rows = [
        (args.left, stats_a),
        (args.right, stats_b),
    ]
    print(f"{'dataset':<40} {'cardinality':>12} {'avg-x-extent':>14} {'avg-y-extent':>14}")
    for name, st in rows:
        print(f"{Path(name).name:<40} {st.cardinality:>12} "
              f"{st.avg_x_extent:>14.9f} {st.avg_y_extent:>14.9f}")
    if args.stats_only:
        return 0
    k = _auto_k("1d", stats_a, stats_b, None)
    print()
    print("recommended layout: 1d (x-stripes)")
    print(f"recommended K: {k}")
    print("recommended axis policy: auto (sweep y across x-stripes)")
    return 0


def cmd_generate(args: argparse.Namespace) -> int:
    spec = io.SyntheticSpec(
        n=args.n,
        x_extent_mean=0.0 if args.points else args.extent_x,
        y_extent_mean=0.0 if args.points else args.extent_y,
        distribution=args.dist,
        seed=args.seed,
        clusters=args.clusters,
    )
    batch = io.generate_synthetic(spec)
    fmt = args.format
    if fmt == "auto":
        fmt = "bin" if args.out.endswith(".bin") else "csv"
    if fmt == "bin":
        io.save_mbr_binary(batch, args.out)
    else:
        io.save_mbr_csv(batch, args.out)
    print(f"wrote {len(batch)} rectangles to {args.out} ({fmt})")
    return 0


def _add_input_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--left", required=True, help="left input path (CSV or SJB1 binary)")
    p.add_argument("--right", required=True, help="right input path")
    p.add_argument("--epsilon", type=float, default=None,
                   help="epsilon-distance join on point inputs (x_l=x_u, y_l=y_u)")
    p.add_argument("--backend", choices=("compiled", "python"), default=None,
                   help="kernel backend (default: compiled when built)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sweepjoin",
        description="Partitioned plane-sweep spatial joins with tuning tools.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_join = sub.add_parser("join", help="run one spatial join")
    _add_input_flags(p_join)
    p_join.add_argument("--layout", choices=("1d", "2d"), default="1d")
    p_join.add_argument("--k", default="auto",
                        help="divisions per split axis, or 'auto' for the rule of thumb")
    p_join.add_argument("--axis", choices=("x", "y", "adaptive", "auto"), default=None,
                        help="sweep axis policy (default: auto for 1d, adaptive for 2d)")
    p_join.add_argument("--threads", type=int, default=1)
    p_join.add_argument("--collect", action="store_true",
                        help="materialize result pairs instead of counting only")
    p_join.add_argument("--verify", action="store_true",
                        help="check the result against the brute-force oracle "
                             f"(inputs up to {VERIFY_LIMIT} rectangles)")
    p_join.add_argument("--format", choices=("text", "csv"), default="text")
    p_join.set_defaults(func=cmd_join)

    p_bench = sub.add_parser("bench", help="run a grid of configurations, emit CSV")
    _add_input_flags(p_bench)
    p_bench.add_argument("--layout-list", default="1d", help="comma list of 1d,2d")
    p_bench.add_argument("--k-list", default="auto", help="comma list of K values or 'auto'")
    p_bench.add_argument("--axis-list", default=None,
                         help="comma list of x,y,adaptive,auto (default per layout)")
    p_bench.add_argument("--threads-list", default="1", help="comma list of thread counts")
    p_bench.add_argument("--reps", type=int, default=1)
    p_bench.set_defaults(func=cmd_bench)

    p_tune = sub.add_parser("tune", help="dataset statistics and tuning recommendations")
    p_tune.add_argument("--left", required=True)
    p_tune.add_argument("--right", required=True)
    p_tune.add_argument("--stats-only", action="store_true",
                        help="print the statistics table only")
    p_tune.set_defaults(func=cmd_tune)

    p_gen = sub.add_parser("generate", help="write a synthetic dataset")
    p_gen.add_argument("--out", required=True)
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--extent-x", type=float, default=0.001)
    p_gen.add_argument("--extent-y", type=float, default=0.001)
    p_gen.add_argument("--dist", choices=("uniform", "gaussian-clustered"),
                       default="uniform")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--clusters", type=int, default=16)
    p_gen.add_argument("--points", action="store_true",
                       help="zero extents: degenerate rectangles usable as points")
    p_gen.add_argument("--format", choices=("auto", "csv", "bin"), default="auto")
    p_gen.set_defaults(func=cmd_generate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SweepJoinError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
