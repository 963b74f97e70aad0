"""Tabular data handling: CSV loading, normalization, subsampling, outliers.

All randomness goes through numpy's default PCG64 generator seeded per
call, so every operation here is deterministic and platform independent.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist


class DataError(ValueError):
    """Malformed or unusable tabular input."""


@dataclass
class Dataset:
    names: list[str]
    values: np.ndarray  # (R, N) float64
    provenance: str = ""

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise DataError("values must be a 2D array")
        if self.values.shape[1] != len(self.names):
            raise DataError("column count does not match attribute names")
        if self.values.shape[1] < 2:
            raise DataError("need at least 2 columns")
        if not np.all(np.isfinite(self.values)):
            raise DataError("all values must be finite")

    @property
    def row_count(self) -> int:
        return self.values.shape[0]

    @property
    def column_count(self) -> int:
        return self.values.shape[1]


@dataclass
class LoadReport:
    rows_read: int = 0
    rows_dropped: int = 0


@dataclass
class NormalizedDataset:
    """Dataset with every column min-max scaled into [0, 1].

    Constant columns are mapped to 0.5 uniformly; the per-column original
    (min, max) are kept for round trips and reporting.
    """

    names: list[str]
    values: np.ndarray
    column_min: np.ndarray
    column_max: np.ndarray
    provenance: str = ""

    @property
    def row_count(self) -> int:
        return self.values.shape[0]

    @property
    def column_count(self) -> int:
        return self.values.shape[1]

    @property
    def pair_count(self) -> int:
        return self.values.shape[1] - 1


@dataclass(frozen=True)
class SubsampleConfig:
    rate: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.rate <= 1.0:
            raise ValueError("rate must be in (0, 1]")


@dataclass(frozen=True)
class OutlierConfig:
    k: int = 5
    sample_size: int = 20
    seed: int = 0

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be >= 0")
        if self.sample_size < 1:
            raise ValueError("sample_size must be >= 1")


def load_csv(path) -> tuple[Dataset, LoadReport]:
    """Read a comma-separated file with a header row.

    Rows with missing or non-numeric cells (including NaN/inf) are dropped
    and counted in the report.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        names = [h.strip() for h in header]
        if len(names) < 2:
            raise DataError(f"{path}: need at least 2 columns")
        if len(set(names)) != len(names):
            raise DataError(f"{path}: duplicate column names")
        rows = []
        report = LoadReport()
        for row in reader:
            if not row:
                continue
            report.rows_read += 1
            if len(row) != len(names):
                raise DataError(f"{path}: ragged row {report.rows_read}")
            try:
                parsed = [float(cell) for cell in row]
            except ValueError:
                report.rows_dropped += 1
                continue
            if not all(math.isfinite(x) for x in parsed):
                report.rows_dropped += 1
                continue
            rows.append(parsed)
    if not rows:
        raise DataError(f"{path}: no valid data rows")
    return Dataset(names, np.array(rows, dtype=float), provenance=str(path)), report


def write_csv(d: Dataset, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(d.names)
        for row in d.values:
            writer.writerow([repr(float(x)) for x in row])


def normalize(d: Dataset) -> NormalizedDataset:
    lo = d.values.min(axis=0)
    hi = d.values.max(axis=0)
    span = hi - lo
    out = np.empty_like(d.values)
    for j in range(d.column_count):
        if span[j] == 0.0:
            out[:, j] = 0.5
        else:
            out[:, j] = (d.values[:, j] - lo[j]) / span[j]
    return NormalizedDataset(list(d.names), out, lo, hi, provenance=d.provenance)


def reorder_axes(d: Dataset, permutation) -> Dataset:
    perm = list(permutation)
    if sorted(perm) != list(range(d.column_count)):
        raise DataError(f"invalid permutation {permutation}")
    return Dataset([d.names[j] for j in perm], d.values[:, perm].copy(),
                   provenance=d.provenance)


def outlier_scores(d: NormalizedDataset, oc: OutlierConfig) -> list[tuple[int, float]]:
    """Sampling-based distance outlier ranking.

    A record's score is its Euclidean distance (full normalized space) to
    the nearest member of a seeded random reference sample, the record
    itself excluded. Returned sorted by descending score.
    """
    r = d.row_count
    s = min(oc.sample_size, r)
    rng = np.random.default_rng(oc.seed)
    ref_idx = rng.choice(r, size=s, replace=False)
    dist = cdist(d.values, d.values[ref_idx])
    for col, i in enumerate(ref_idx):
        dist[i, col] = np.inf
    scores = dist.min(axis=1)
    scores[~np.isfinite(scores)] = 0.0  # record was the entire reference sample
    order = np.argsort(-scores, kind="stable")
    return [(int(i), float(scores[i])) for i in order]


def subsample(d: NormalizedDataset, sc: SubsampleConfig,
              oc: OutlierConfig) -> np.ndarray:
    """Seeded uniform subsample indices, unioned with the top-k outliers."""
    r = d.row_count
    n = int(round(sc.rate * r))
    rng = np.random.default_rng(sc.seed)
    chosen = rng.choice(r, size=min(n, r), replace=False)
    if oc.k > 0:
        ranked = outlier_scores(d, oc)
        top = [i for i, _ in ranked[:min(oc.k, r)]]
        chosen = np.union1d(chosen, top)
    return np.unique(chosen)


def top_outlier_indices(d: NormalizedDataset, oc: OutlierConfig) -> np.ndarray:
    if oc.k == 0:
        return np.empty(0, dtype=int)
    ranked = outlier_scores(d, oc)
    return np.array([i for i, _ in ranked[:min(oc.k, d.row_count)]], dtype=int)
