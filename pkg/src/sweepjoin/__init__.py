"""sweepjoin: parallel in-memory spatial intersection joins.

Partitions two rectangle datasets over the unit square (1D stripes or a 2D
grid), plane-sweeps each partition along a tunable axis, and removes
replication duplicates with a reference-point test. Ships a brute-force
oracle, dataset tooling and a benchmarking CLI.
"""

from .axismodel import (
    DEFAULT_PHI,
    MAX_BUCKETS,
    AxisHistograms,
    bucket_count_for_tile,
    build_histograms,
    candidate_count,
    select_axis,
)
from .backends import available_backends, default_backend, get_kernels
from .engine import (
    JoinConfig,
    JoinReport,
    JoinTask,
    SortTask,
    build_task_queue,
    epsilon_distance_join,
    join,
)
from .errors import (
    ConfigError,
    DatasetError,
    InvalidHistogramError,
    InvalidStatisticsError,
    NormalizationError,
    SweepJoinError,
)
from .geometry import (
    Axis,
    Rect,
    RectBatch,
    TileExtent,
    axis_tile_index,
    duplicate_test_1d,
    duplicate_test_2d,
    intersects,
    tile_boundary,
)
from .io import (
    DatasetStats,
    SyntheticSpec,
    compute_stats,
    generate_synthetic,
    load_dataset,
    load_mbr_binary,
    load_mbr_csv,
    normalize,
    normalize_pair,
    save_mbr_binary,
    save_mbr_csv,
    union_bbox,
)
from .oracle import nested_loop_distance, nested_loop_join
from .partition import (
    DEFAULT_K_MAX,
    PartitionLayout,
    PartitionedDataset,
    count_pass,
    partition,
    recommend_k,
    tiles_overlapping,
    write_pass,
)
from .sweep import ResultSink, choose_and_sweep, choose_sweep_axis, forward_scan_join, sort_by_lower

__version__ = "0.1.0"
