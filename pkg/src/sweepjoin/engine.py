"""The parallel join engine: partition, sort per tile, sweep per tile.

A join runs in two phases. The partitioning phase counts and then writes
both inputs into per-tile buffers (two passes, m writer threads over
disjoint ranges). The joining phase sorts each nonempty tile buffer by the
tile's sweep axis and forward-scans each tile that has rows from both
inputs, applying the reference-point duplicate test so replicated pairs are
reported exactly once. Workers pull tasks largest-first from a shared queue
and accumulate counts/pairs locally; nothing shared is mutated.
"""

from __future__ import annotations

from collections import deque
from concurrent.futures import Executor, ThreadPoolExecutor
from dataclasses import dataclass
from time import perf_counter
from typing import Literal, NamedTuple, Sequence

import numpy as np

from . import backends
from .axismodel import DEFAULT_PHI, MAX_BUCKETS, bucket_count_for_tile
from .errors import ConfigError
from .geometry import Axis, Rect, RectBatch, as_batch, tile_boundary
from .partition import HistogramSpec, PartitionLayout, PartitionedDataset, partition

AxisPolicyName = Literal["x", "y", "adaptive", "auto"]

# Cap on per-axis histogram entries across all tiles; adaptive mode on a huge
# grid would otherwise allocate per-thread bucket arrays beyond memory.
_HIST_ENTRY_BUDGET = 8_000_000


@dataclass
class JoinConfig:
    """Parameters of one join run.

    ``axis_policy``: "x"/"y" force the sweep axis, "adaptive" consults the
    per-tile histogram model, "auto" (stripes only) sweeps the axis opposite
    the partitioning axis. None picks "auto" for stripes, "adaptive" for
    grids. ``phi``/``k_buckets`` override the histogram sampling stride and
    resolution; ``backend`` picks the kernel implementation.
    """

    layout: PartitionLayout
    axis_policy: AxisPolicyName | None = None
    threads: int = 1
    sink_mode: Literal["count-only", "collect-pairs"] = "count-only"
    phi: int | None = None
    k_buckets: int | None = None
    backend: str | None = None


@dataclass
class JoinReport:
    """Outcome of a join: result size, optional pairs, and phase timings.

    Phase times are wall-clock; sorting is reported separately even though
    benchmark output folds it into the joining phase. ``pairs`` is an
    (n, 2) int64 array of (r_id, s_id), unordered, when collecting.
    """

    result_count: int
    pairs: np.ndarray | None
    partition_time: float
    sort_time: float
    join_time: float
    total_time: float
    task_sizes: np.ndarray | None = None


class SortTask(NamedTuple):
    which: int  # 0 = first input, 1 = second input
    tile: int
    size: int


class JoinTask(NamedTuple):
    tile: int
    size: int


def build_task_queue(partitioned_r: PartitionedDataset,
                     partitioned_s: PartitionedDataset,
                     ) -> tuple[list[SortTask], list[JoinTask]]:
    """Sorting and joining work lists, largest-first for load balance.

    One sort task per nonempty (tile, input) buffer; one join task per tile
    where both inputs are nonempty. The two lists are consumed in separate
    sub-phases: a tile may only be joined once both its buffers are sorted.
    """
    cr, cs = partitioned_r.counts, partitioned_s.counts
    sort_tasks = [SortTask(0, int(t), int(cr[t])) for t in np.nonzero(cr)[0]]
    sort_tasks += [SortTask(1, int(t), int(cs[t])) for t in np.nonzero(cs)[0]]
    sort_tasks.sort(key=lambda task: -task.size)
    both = np.nonzero((cr > 0) & (cs > 0))[0]
    join_tasks = [JoinTask(int(t), int(cr[t] + cs[t])) for t in both]
    join_tasks.sort(key=lambda task: -task.size)
    return sort_tasks, join_tasks


def _resolve_policy(cfg: JoinConfig) -> str:
    if cfg.threads < 1:
        raise ConfigError("threads must be >= 1")
    if cfg.sink_mode not in ("count-only", "collect-pairs"):
        raise ConfigError(f"unknown sink mode {cfg.sink_mode!r}")
    if cfg.phi is not None and cfg.phi < 1:
        raise ConfigError("phi must be >= 1")
    if cfg.k_buckets is not None and cfg.k_buckets < 1:
        raise ConfigError("k_buckets must be >= 1")
    policy = cfg.axis_policy
    if policy is None:
        policy = "auto" if cfg.layout.kind == "1d" else "adaptive"
    if policy not in ("x", "y", "adaptive", "auto"):
        raise ConfigError(f"unknown axis policy {policy!r}")
    if policy == "auto" and cfg.layout.kind != "1d":
        raise ConfigError("axis policy 'auto' applies to 1D stripes only; "
                          "use 'adaptive' for grids")
    return policy


def _combined_avg_extents(r: RectBatch, s: RectBatch) -> tuple[float, float]:
    n = len(r) + len(s)
    ax = (np.sum(r.xu - r.xl) + np.sum(s.xu - s.xl)) / n
    ay = (np.sum(r.yu - r.yl) + np.sum(s.yu - s.yl)) / n
    return float(ax), float(ay)


def _hist_spec(cfg: JoinConfig, r: RectBatch, s: RectBatch) -> HistogramSpec:
    layout = cfg.layout
    phi = cfg.phi if cfg.phi is not None else DEFAULT_PHI
    if cfg.k_buckets is not None:
        kb_x = kb_y = cfg.k_buckets
    else:
        avg_x, avg_y = _combined_avg_extents(r, s)
        if layout.kind == "2d":
            tile_x = tile_y = 1.0 / layout.k
        elif layout.partition_axis is Axis.X:
            tile_x, tile_y = 1.0 / layout.k, 1.0
        else:
            tile_x, tile_y = 1.0, 1.0 / layout.k
        kb_x = bucket_count_for_tile(tile_x, avg_x) if avg_x > 0 else MAX_BUCKETS
        kb_y = bucket_count_for_tile(tile_y, avg_y) if avg_y > 0 else MAX_BUCKETS
    cap = max(1, _HIST_ENTRY_BUDGET // layout.n_tiles)
    return HistogramSpec(phi=phi, kb_x=min(kb_x, cap), kb_y=min(kb_y, cap))


def _sweep_axes(layout: PartitionLayout, policy: str,
                pr: PartitionedDataset, ps: PartitionedDataset) -> np.ndarray:
    """Per-tile sweep axis codes (0 = x, 1 = y)."""
    n = layout.n_tiles
    if policy == "x":
        return np.zeros(n, dtype=np.int8)
    if policy == "y":
        return np.ones(n, dtype=np.int8)
    if policy == "auto":
        return np.full(n, int(layout.partition_axis.other), dtype=np.int8)
    i_x = np.einsum("ij,ij->i", pr.hist_x, ps.hist_x)
    i_y = np.einsum("ij,ij->i", pr.hist_y, ps.hist_y)
    return np.where(i_x <= i_y, 0, 1).astype(np.int8)


def _dup_params(layout: PartitionLayout, tile: int,
                axis_code: int) -> tuple[int, float, float]:
    """Duplicate-test mode and tile lower bounds in (sweep, other) order."""
    if layout.k == 1:
        return 0, 0.0, 0.0
    k = layout.k
    if layout.kind == "1d":
        lo = tile_boundary(tile, k)
        if layout.axis_code == axis_code:
            return 1, lo, 0.0
        return 2, 0.0, lo
    row, col = divmod(tile, k)
    x_lo, y_lo = tile_boundary(col, k), tile_boundary(row, k)
    if axis_code == 0:
        return 3, x_lo, y_lo
    return 3, y_lo, x_lo


def _sweep_views(pd: PartitionedDataset, tile: int, axis_code: int):
    lo, hi = pd.offsets[tile], pd.offsets[tile + 1]
    if axis_code == 0:
        return pd.xl[lo:hi], pd.xu[lo:hi], pd.yl[lo:hi], pd.yu[lo:hi]
    return pd.yl[lo:hi], pd.yu[lo:hi], pd.xl[lo:hi], pd.xu[lo:hi]


class _Refinement(NamedTuple):
    """Distance filter applied to candidate index pairs of a point join."""

    eps_sq: float
    r_x: np.ndarray
    r_y: np.ndarray
    s_x: np.ndarray
    s_y: np.ndarray
    r_ids: np.ndarray
    s_ids: np.ndarray


def _refine_pairs(ref: _Refinement, rr: np.ndarray,
                  ss: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    dx = ref.r_x[rr] - ref.s_x[ss]
    dy = ref.r_y[rr] - ref.s_y[ss]
    keep = dx * dx + dy * dy <= ref.eps_sq
    return rr[keep], ss[keep]


def _run_workers(executor: Executor | None, m: int, worker):
    if executor is None or m == 1:
        return [worker()]
    futures = [executor.submit(worker) for _ in range(m)]
    return [f.result() for f in futures]


def _pipeline(r: RectBatch, s: RectBatch, cfg: JoinConfig, policy: str,
              refine: _Refinement | None = None) -> JoinReport:
    t_start = perf_counter()
    collect_user = cfg.sink_mode == "collect-pairs"
    empty_pairs = np.empty((0, 2), dtype=np.int64)
    if len(r) == 0 or len(s) == 0:
        return JoinReport(0, empty_pairs if collect_user else None,
                          0.0, 0.0, 0.0, perf_counter() - t_start)

    kern = backends.get_kernels(cfg.backend)
    layout = cfg.layout
    m = cfg.threads
    executor = ThreadPoolExecutor(max_workers=m) if m > 1 else None
    try:
        hist = _hist_spec(cfg, r, s) if policy == "adaptive" else None
        pr = partition(r, layout, m, executor=executor, kernels=kern, hist=hist)
        ps = partition(s, layout, m, executor=executor, kernels=kern, hist=hist)
        axes = _sweep_axes(layout, policy, pr, ps)
        partition_time = perf_counter() - t_start

        sort_tasks, join_tasks = build_task_queue(pr, ps)
        t_sort = perf_counter()
        pending_sorts = deque(sort_tasks)

        def sort_worker() -> None:
            while True:
                try:
                    which, tile, _ = pending_sorts.popleft()
                except IndexError:
                    return
                pd = pr if which == 0 else ps
                lo, hi = pd.offsets[tile], pd.offsets[tile + 1]
                kern.sort_segment(pd.ids, pd.xl, pd.xu, pd.yl, pd.yu,
                                  lo, hi, int(axes[tile]))

        _run_workers(executor, m, sort_worker)
        sort_time = perf_counter() - t_sort

        t_join = perf_counter()
        pending_joins = deque(join_tasks)
        collect = collect_user or refine is not None

        def join_worker() -> tuple[int, list]:
            count = 0
            chunks = []
            while True:
                try:
                    tile, _ = pending_joins.popleft()
                except IndexError:
                    break
                axis = int(axes[tile])
                mode, t_alo, t_blo = _dup_params(layout, tile, axis)
                r_views = _sweep_views(pr, tile, axis)
                s_views = _sweep_views(ps, tile, axis)
                if collect:
                    lo_r, hi_r = pr.offsets[tile], pr.offsets[tile + 1]
                    lo_s, hi_s = ps.offsets[tile], ps.offsets[tile + 1]
                    rr, ss = kern.sweep_collect(
                        pr.ids[lo_r:hi_r], *r_views,
                        ps.ids[lo_s:hi_s], *s_views,
                        mode, t_alo, t_blo)
                    if refine is not None:
                        rr, ss = _refine_pairs(refine, rr, ss)
                    count += len(rr)
                    if collect_user and len(rr):
                        chunks.append(np.column_stack((rr, ss)))
                else:
                    count += kern.sweep_count(*r_views, *s_views,
                                              mode, t_alo, t_blo)
            return count, chunks

        results = _run_workers(executor, m, join_worker)
        join_time = perf_counter() - t_join
    finally:
        if executor is not None:
            executor.shutdown(wait=True)

    total = int(sum(count for count, _ in results))
    pairs = None
    if collect_user:
        all_chunks = [chunk for _, chunks in results for chunk in chunks]
        pairs = np.concatenate(all_chunks) if all_chunks else empty_pairs
        if refine is not None and len(pairs):
            pairs = np.column_stack((refine.r_ids[pairs[:, 0]],
                                     refine.s_ids[pairs[:, 1]]))
    return JoinReport(
        result_count=total,
        pairs=pairs,
        partition_time=partition_time,
        sort_time=sort_time,
        join_time=join_time,
        total_time=perf_counter() - t_start,
        task_sizes=np.asarray([task.size for task in join_tasks], dtype=np.int64),
    )


def join(r: RectBatch | Sequence[Rect], s: RectBatch | Sequence[Rect],
         cfg: JoinConfig) -> JoinReport:
    """Spatial intersection join of two normalized datasets.

    Emits every intersecting (r, s) pair of R x S exactly once, as a count
    or as collected id pairs depending on ``cfg.sink_mode``.
    """
    r, s = as_batch(r), as_batch(s)
    policy = _resolve_policy(cfg)
    r.validate()
    s.validate()
    return _pipeline(r, s, cfg, policy)


def epsilon_distance_join(p: RectBatch | Sequence[Rect],
                          q: RectBatch | Sequence[Rect],
                          eps: float, cfg: JoinConfig) -> JoinReport:
    """Point pairs within Euclidean distance ``eps``, exactly once.

    Each point becomes a square of side ``eps`` centered on it (clipped to
    the unit square for partitioning); intersecting squares are candidates,
    then the true distance check filters them. Inputs are read as points at
    the lower corners of the given rectangles.
    """
    if not eps > 0.0:
        raise ConfigError(f"epsilon must be positive, got {eps!r}")
    p, q = as_batch(p), as_batch(q)
    policy = _resolve_policy(cfg)
    p.validate()
    q.validate()
    half = eps / 2.0

    def squares(batch: RectBatch) -> RectBatch:
        # ids are row indices so the refinement can look coordinates back up
        return RectBatch(
            np.arange(len(batch), dtype=np.int64),
            np.clip(batch.xl - half, 0.0, 1.0), np.clip(batch.xl + half, 0.0, 1.0),
            np.clip(batch.yl - half, 0.0, 1.0), np.clip(batch.yl + half, 0.0, 1.0),
        )

    refine = _Refinement(eps * eps, p.xl, p.yl, q.xl, q.yl, p.ids, q.ids)
    return _pipeline(squares(p), squares(q), cfg, policy, refine=refine)
