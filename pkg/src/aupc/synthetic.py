"""Synthetic benchmark generator: noisy line segments in the unit square.

Each segment is sampled uniformly along its length with truncated Gaussian
noise perpendicular to it, which is equivalent to sampling an elongated 2D
Gaussian oriented at the segment's angle. The default benchmark contains
twelve segments: single lines at -5, 15 and 56 degrees plus nine parallel
30-degree lines with evenly spaced intercepts; the 15-degree line is the
most densely sampled.

Two exact corner anchors at (0, 0) and (1, 1) pin the min-max
normalization to the identity so that the normalized geometry matches the
nominal segment angles exactly. Anchors carry label -1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset

NOISE_TRUNCATION_SIGMAS = 3.5


@dataclass(frozen=True)
class SegmentSpec:
    """One noisy line segment.

    angle_deg in (-90, 90]; center in data units; half_length along the
    segment direction; sigma is the perpendicular noise level.
    """

    angle_deg: float
    center: tuple[float, float]
    half_length: float
    count: int
    sigma: float = 0.004

    def __post_init__(self):
        if not -90.0 < self.angle_deg <= 90.0:
            raise ValueError("angle_deg must be in (-90, 90]")
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")

    @property
    def slope(self) -> float:
        return math.tan(math.radians(self.angle_deg))

    @property
    def intercept(self) -> float:
        return self.center[1] - self.slope * self.center[0]


@dataclass(frozen=True)
class SyntheticSpec:
    segments: tuple[SegmentSpec, ...]
    anchor_corners: bool = True

    def total_rows(self) -> int:
        n = sum(s.count for s in self.segments)
        return n + (2 if self.anchor_corners else 0)


def default_synthetic_spec() -> SyntheticSpec:
    """The benchmark layout: -5, 15, 56 degrees and nine parallel 30s.

    Intercepts are placed so that, in the deformed plane, each structure's
    intersection point is clear of the curve bands swept by the other
    structures, keeping brush selections around the peaks unambiguous.
    """
    segments = [
        SegmentSpec(15.0, (0.5, 0.83397), 0.2588, 1200),
        SegmentSpec(56.0, (0.16, 0.75722), 0.2146, 500),
        SegmentSpec(-5.0, (0.35, 0.03938), 0.2510, 500),
    ]
    for k in range(9):
        yc = 0.20 + 0.0625 * k
        segments.append(SegmentSpec(30.0, (0.5, yc), 0.2540, 300))
    return SyntheticSpec(tuple(segments))


def generate_synthetic(spec: SyntheticSpec, seed: int = 0
                       ) -> tuple[Dataset, np.ndarray]:
    """Sample the spec; returns the 2-column dataset and per-row labels.

    Labels are the segment index in spec order; anchor rows get -1.
    Deterministic for a given (spec, seed).
    """
    rng = np.random.default_rng(seed)
    xs, ys, labels = [], [], []
    for si, seg in enumerate(spec.segments):
        t = rng.uniform(-seg.half_length, seg.half_length, size=seg.count)
        if seg.sigma > 0:
            n = rng.normal(0.0, seg.sigma, size=seg.count)
            lim = NOISE_TRUNCATION_SIGMAS * seg.sigma
            n = np.clip(n, -lim, lim)
        else:
            n = np.zeros(seg.count)
        th = math.radians(seg.angle_deg)
        dx, dy = math.cos(th), math.sin(th)
        xs.append(seg.center[0] + t * dx - n * dy)
        ys.append(seg.center[1] + t * dy + n * dx)
        labels.append(np.full(seg.count, si, dtype=int))
    if spec.anchor_corners:
        xs.append(np.array([0.0, 1.0]))
        ys.append(np.array([0.0, 1.0]))
        labels.append(np.array([-1, -1]))
    values = np.column_stack([np.concatenate(xs), np.concatenate(ys)])
    d = Dataset(["x1", "x2"], values, provenance=f"synthetic(seed={seed})")
    return d, np.concatenate(labels)
