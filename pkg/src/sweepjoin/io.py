"""Dataset loading, normalization, statistics and synthetic workloads.

Two on-disk formats:

  CSV     one record per line: ``id,x_l,y_l,x_u,y_u``; an optional header
          line is detected by a non-numeric first field.
  binary  magic ``SJB1``, record count as little-endian uint64, then packed
          records ``id:u64, x_l:f64, y_l:f64, x_u:f64, y_u:f64`` (all
          little-endian). Meant for inputs too large to parse from text.

Join inputs must live in the unit square; ``normalize`` maps raw data there.
When two datasets are joined, both must be normalized by their combined
bounding box so they share one frame (``normalize_pair``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import numpy as np

from .errors import DatasetError, NormalizationError
from .geometry import RectBatch

BINARY_MAGIC = b"SJB1"

_RECORD_DTYPE = np.dtype([
    ("id", "<u8"), ("xl", "<f8"), ("yl", "<f8"), ("xu", "<f8"), ("yu", "<f8"),
])


@dataclass
class DatasetStats:
    """Summary statistics of a loaded dataset, in its current frame.

    ``bbox`` is (xmin, ymin, xmax, ymax) of the data as loaded (None when
    empty). Average extents drive the partition-count rule of thumb.
    """

    cardinality: int
    avg_x_extent: float
    avg_y_extent: float
    bbox: tuple[float, float, float, float] | None


def compute_stats(batch: RectBatch) -> DatasetStats:
    n = len(batch)
    if n == 0:
        return DatasetStats(0, 0.0, 0.0, None)
    return DatasetStats(
        cardinality=n,
        avg_x_extent=float(np.mean(batch.xu - batch.xl)),
        avg_y_extent=float(np.mean(batch.yu - batch.yl)),
        bbox=(float(batch.xl.min()), float(batch.yl.min()),
              float(batch.xu.max()), float(batch.yu.max())),
    )


def load_mbr_csv(path: str | Path) -> tuple[RectBatch, DatasetStats]:
    """Parse a CSV of MBRs; malformed input raises DatasetError with the line."""
    ids: list[int] = []
    coords: list[tuple[float, float, float, float]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            fields = line.split(",")
            if lineno == 1 and len(fields) == 5:
                try:
                    float(fields[0])
                except ValueError:
                    continue  # header line
            if len(fields) != 5:
                raise DatasetError(
                    f"expected 5 fields id,x_l,y_l,x_u,y_u, got {len(fields)}",
                    path=str(path), line=lineno)
            try:
                rid = int(fields[0])
                xl, yl, xu, yu = (float(v) for v in fields[1:])
            except ValueError as exc:
                raise DatasetError(f"unparseable field: {exc}",
                                   path=str(path), line=lineno) from None
            if not all(map(math.isfinite, (xl, yl, xu, yu))):
                raise DatasetError("non-finite coordinate",
                                   path=str(path), line=lineno)
            if not (xl <= xu and yl <= yu):
                raise DatasetError("lower bound exceeds upper bound",
                                   path=str(path), line=lineno)
            ids.append(rid)
            coords.append((xl, xu, yl, yu))
    if not ids:
        return RectBatch.empty(), DatasetStats(0, 0.0, 0.0, None)
    arr = np.asarray(coords, dtype=np.float64)
    batch = RectBatch(np.asarray(ids, dtype=np.int64),
                      arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3])
    return batch, compute_stats(batch)


def save_mbr_csv(batch: RectBatch, path: str | Path) -> None:
    ids = batch.ids.tolist()
    xl, yl = batch.xl.tolist(), batch.yl.tolist()
    xu, yu = batch.xu.tolist(), batch.yu.tolist()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("id,x_l,y_l,x_u,y_u\n")
        for i in range(len(ids)):
            fh.write(f"{ids[i]},{xl[i]!r},{yl[i]!r},{xu[i]!r},{yu[i]!r}\n")


def load_mbr_binary(path: str | Path) -> tuple[RectBatch, DatasetStats]:
    raw = Path(path).read_bytes()
    if len(raw) < 12 or raw[:4] != BINARY_MAGIC:
        raise DatasetError("not a SJB1 binary dataset", path=str(path))
    count = int(np.frombuffer(raw, dtype="<u8", count=1, offset=4)[0])
    body = raw[12:]
    if len(body) != count * _RECORD_DTYPE.itemsize:
        raise DatasetError(
            f"truncated binary dataset: header says {count} records",
            path=str(path))
    rec = np.frombuffer(body, dtype=_RECORD_DTYPE)
    batch = RectBatch(rec["id"].astype(np.int64), rec["xl"], rec["xu"],
                      rec["yl"], rec["yu"])
    if len(batch) and not (np.all(batch.xl <= batch.xu)
                           and np.all(batch.yl <= batch.yu)):
        raise DatasetError("record with lower bound above upper bound",
                           path=str(path))
    return batch, compute_stats(batch)


def save_mbr_binary(batch: RectBatch, path: str | Path) -> None:
    rec = np.empty(len(batch), dtype=_RECORD_DTYPE)
    rec["id"] = batch.ids.astype(np.uint64)
    rec["xl"], rec["yl"] = batch.xl, batch.yl
    rec["xu"], rec["yu"] = batch.xu, batch.yu
    with open(path, "wb") as fh:
        fh.write(BINARY_MAGIC)
        fh.write(np.uint64(len(batch)).tobytes())
        fh.write(rec.tobytes())


def load_dataset(path: str | Path) -> tuple[RectBatch, DatasetStats]:
    """Load CSV or binary, sniffing the binary magic bytes."""
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == BINARY_MAGIC:
        return load_mbr_binary(path)
    return load_mbr_csv(path)


def union_bbox(*batches: RectBatch) -> tuple[float, float, float, float]:
    nonempty = [b for b in batches if len(b)]
    if not nonempty:
        raise NormalizationError("cannot take the bounding box of empty data")
    return (min(float(b.xl.min()) for b in nonempty),
            min(float(b.yl.min()) for b in nonempty),
            max(float(b.xu.max()) for b in nonempty),
            max(float(b.yu.max()) for b in nonempty))


def normalize(batch: RectBatch,
              global_bbox: tuple[float, float, float, float] | None = None) -> RectBatch:
    """Affinely map coordinates into [0, 1] per axis.

    Pass the union bounding box as ``global_bbox`` when several datasets
    must land in one shared frame.
    """
    if len(batch) == 0:
        return batch
    xmin, ymin, xmax, ymax = global_bbox if global_bbox else union_bbox(batch)
    w, h = xmax - xmin, ymax - ymin
    if not (w > 0.0 and h > 0.0):
        raise NormalizationError(
            f"bounding box {xmin, ymin, xmax, ymax} has a degenerate axis")
    return RectBatch(batch.ids,
                     (batch.xl - xmin) / w, (batch.xu - xmin) / w,
                     (batch.yl - ymin) / h, (batch.yu - ymin) / h)


def normalize_pair(a: RectBatch, b: RectBatch) -> tuple[RectBatch, RectBatch]:
    """Normalize two join inputs by their combined bounding box."""
    bbox = union_bbox(a, b)
    return normalize(a, bbox), normalize(b, bbox)


@dataclass(frozen=True)
class SyntheticSpec:
    """Deterministic synthetic rectangle workload.

    Extents are exponentially distributed around the per-axis means (zero
    mean gives point data); rectangles are clipped to the unit square.
    """

    n: int
    x_extent_mean: float = 0.0
    y_extent_mean: float = 0.0
    distribution: Literal["uniform", "gaussian-clustered"] = "uniform"
    seed: int = 0
    clusters: int = 16
    cluster_sigma: float = 0.05


def generate_synthetic(spec: SyntheticSpec) -> RectBatch:
    if spec.n < 0:
        raise ValueError("n must be >= 0")
    if spec.n == 0:
        return RectBatch.empty()
    rng = np.random.default_rng(spec.seed)
    if spec.distribution == "uniform":
        cx = rng.random(spec.n)
        cy = rng.random(spec.n)
    elif spec.distribution == "gaussian-clustered":
        centers = rng.random((max(1, spec.clusters), 2))
        pick = rng.integers(0, len(centers), spec.n)
        cx = np.clip(centers[pick, 0] + rng.normal(0.0, spec.cluster_sigma, spec.n), 0.0, 1.0)
        cy = np.clip(centers[pick, 1] + rng.normal(0.0, spec.cluster_sigma, spec.n), 0.0, 1.0)
    else:
        raise ValueError(f"unknown distribution {spec.distribution!r}")
    ex = rng.exponential(spec.x_extent_mean, spec.n) if spec.x_extent_mean > 0 else np.zeros(spec.n)
    ey = rng.exponential(spec.y_extent_mean, spec.n) if spec.y_extent_mean > 0 else np.zeros(spec.n)
    return RectBatch(
        np.arange(spec.n, dtype=np.int64),
        np.clip(cx - ex / 2, 0.0, 1.0), np.clip(cx + ex / 2, 0.0, 1.0),
        np.clip(cy - ey / 2, 0.0, 1.0), np.clip(cy + ey / 2, 0.0, 1.0),
    )
