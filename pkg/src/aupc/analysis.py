"""Corner filtering of density images and density-plot brushing.

Corner filtering scores each pixel by the minimum eigenvalue of a
windowed structure tensor, then converts the thresholded score into a
soft mask of linear-falloff disks. Brushing selects records whose
transformed full-range curves intersect a rectangle or lasso region.

Note on the percentile prefilter: low pixels are lifted to their local
percentile (output = max(input, local percentile)) so that faint corners
survive subsequent thresholding; a removing variant would instead zero
them out.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from . import transform as tr
from .data import NormalizedDataset
from .render import LayerImage


class AnalysisError(ValueError):
    pass


@dataclass(frozen=True)
class CornerConfig:
    window: int = 5
    threshold: float = 0.5
    radius: int = 6
    percentile_window: int | None = None
    percentile: float = 50.0

    def __post_init__(self):
        if self.window < 3 or self.window % 2 == 0:
            raise AnalysisError("window must be an odd integer >= 3")
        if not 0.0 <= self.threshold <= 1.0:
            raise AnalysisError("threshold must be in [0, 1]")
        if self.radius < 1:
            raise AnalysisError("radius must be >= 1 px")
        if self.percentile_window is not None and (
                self.percentile_window < 3 or self.percentile_window % 2 == 0):
            raise AnalysisError("percentile window must be an odd integer >= 3")
        if not 0.0 <= self.percentile <= 100.0:
            raise AnalysisError("percentile must be in [0, 100]")


@dataclass
class MetricImage:
    values: np.ndarray  # single channel in [0, 1]


@dataclass
class MaskImage:
    values: np.ndarray  # single channel in [0, 1]


def corner_metric(density: np.ndarray, cfg: CornerConfig) -> MetricImage:
    """Minimum eigenvalue of the window-summed structure tensor, normalized.

    Gradients are central differences on a replicated border; the tensor is
    summed over the window; the smaller eigenvalue is
    (Gxx+Gyy)/2 - sqrt(((Gxx-Gyy)/2)^2 + Gxy^2), clamped at 0 and divided
    by its global maximum (an all-zero metric stays all-zero).
    """
    img = np.asarray(density, dtype=float)
    if img.ndim != 2:
        raise AnalysisError("density must be a single-channel image")
    if min(img.shape) < cfg.window:
        raise AnalysisError("image smaller than the metric window")
    p = np.pad(img, 1, mode="edge")
    gx = (p[1:-1, 2:] - p[1:-1, :-2]) / 2.0
    gy = (p[2:, 1:-1] - p[:-2, 1:-1]) / 2.0
    w = cfg.window
    # uniform_filter returns the window mean; scale back to the window sum
    gxx = ndimage.uniform_filter(gx * gx, size=w, mode="nearest") * w * w
    gyy = ndimage.uniform_filter(gy * gy, size=w, mode="nearest") * w * w
    gxy = ndimage.uniform_filter(gx * gy, size=w, mode="nearest") * w * w
    half_tr = (gxx + gyy) / 2.0
    metric = half_tr - np.sqrt(((gxx - gyy) / 2.0) ** 2 + gxy * gxy)
    metric = np.maximum(metric, 0.0)
    m = metric.max()
    if m > 0.0:
        metric /= m
    return MetricImage(metric)


def percentile_filter(img: np.ndarray, window: int, p: float) -> np.ndarray:
    """Lift each pixel to at least the nearest-rank p-th window percentile."""
    if window < 3 or window % 2 == 0:
        raise AnalysisError("window must be an odd integer >= 3")
    if not 0.0 <= p <= 100.0:
        raise AnalysisError("percentile must be in [0, 100]")
    img = np.asarray(img, dtype=float)
    n = window * window
    rank = max(int(np.ceil(p / 100.0 * n)), 1) - 1
    filtered = ndimage.rank_filter(img, rank, size=window, mode="nearest")
    return np.maximum(img, filtered)


def build_mask(metric: MetricImage, t: float, rho: int) -> MaskImage:
    """Linear-falloff disks of radius rho around every pixel with metric >= t.

    Max-accumulating unit-center disks with linear falloff equals
    1 - d/rho for d the Euclidean distance to the nearest source pixel,
    which the distance transform gives directly.
    """
    if not 0.0 <= t <= 1.0:
        raise AnalysisError("threshold must be in [0, 1]")
    if rho < 1:
        raise AnalysisError("radius must be >= 1 px")
    support = metric.values >= t
    if not support.any():
        return MaskImage(np.zeros_like(metric.values))
    d = ndimage.distance_transform_edt(~support)
    return MaskImage(np.clip(1.0 - d / rho, 0.0, 1.0))


def density_peak_u(field, alpha: float = 0.04) -> float:
    """Locate the u position of a density field's dominant concentration.

    Raw cell argmax is unstable here: a curve bundle thinner than one cell
    splits its mass across two rows or columns depending on its fractional
    position, which modulates single-cell maxima far more than the true
    peak contrast. Summing 2x2 blocks undoes the split, and the centroid
    of near-maximal blocks (within alpha of the top) resolves the
    remaining plateau to sub-cell accuracy.
    """
    grid = field.grid
    if grid.shape[0] < 2 or grid.shape[1] < 2:
        raise AnalysisError("density grid too small for peak location")
    block = grid[:-1] + grid[1:]
    block = block[:, :-1] + block[:, 1:]
    prof = block.max(axis=0)
    floor = (1.0 - alpha) * prof.max()
    cols = np.flatnonzero(prof >= floor)
    wts = prof[cols] - floor
    c = float((wts * cols).sum() / wts.sum())
    # block c covers grid columns c and c+1, centered on their shared edge
    return (c + 1.0) / field.layout.pair_width - 0.5


@dataclass(frozen=True)
class Rect:
    pair: int
    u0: float
    u1: float
    v0: float
    v1: float

    def __post_init__(self):
        if not (self.u0 < self.u1 and self.v0 < self.v1):
            raise AnalysisError("rect requires u0 < u1 and v0 < v1")


@dataclass(frozen=True)
class Lasso:
    pair: int
    vertices: tuple[tuple[float, float], ...]  # implicitly closed polygon

    def __post_init__(self):
        if len(self.vertices) < 3:
            raise AnalysisError("lasso needs at least 3 vertices")


BrushRegion = Rect | Lasso


@dataclass
class Selection:
    indices: np.ndarray  # sorted record indices
    region: BrushRegion


def _segments_hit_rect(x0, y0, x1, y1, rx0, rx1, ry0, ry1) -> np.ndarray:
    """Liang-Barsky clip test: does each segment meet the closed rect?"""
    dx = x1 - x0
    dy = y1 - y0
    t0 = np.zeros(x0.shape)
    t1 = np.ones(x0.shape)
    ok = np.ones(x0.shape, dtype=bool)
    for p, q in ((-dx, x0 - rx0), (dx, rx1 - x0),
                 (-dy, y0 - ry0), (dy, ry1 - y0)):
        para = p == 0
        ok &= ~(para & (q < 0))
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(para, 0.0, q / np.where(para, 1.0, p))
        t0 = np.where(~para & (p < 0), np.maximum(t0, r), t0)
        t1 = np.where(~para & (p > 0), np.minimum(t1, r), t1)
    return ok & (t0 <= t1)


def _points_in_polygon(x, y, verts) -> np.ndarray:
    """Even-odd rule point-in-polygon for arrays of points."""
    inside = np.zeros(x.shape, dtype=bool)
    n = len(verts)
    for i in range(n):
        xa, ya = verts[i]
        xb, yb = verts[(i + 1) % n]
        crosses = ((ya > y) != (yb > y))
        with np.errstate(divide="ignore", invalid="ignore"):
            xi = xa + (y - ya) / (yb - ya) * (xb - xa)
        inside ^= crosses & (x < np.where(crosses, xi, np.inf))
    return inside


def _segments_cross_edge(x0, y0, x1, y1, ax, ay, bx, by) -> np.ndarray:
    """Does each segment intersect the fixed edge (a, b), touching included?"""
    def cross(ox, oy, px, py, qx, qy):
        return (px - ox) * (qy - oy) - (py - oy) * (qx - ox)

    d1 = cross(ax, ay, bx, by, x0, y0)
    d2 = cross(ax, ay, bx, by, x1, y1)
    d3 = cross(x0, y0, x1, y1, ax, ay)
    d4 = cross(x0, y0, x1, y1, bx, by)
    general = (d1 * d2 <= 0) & (d3 * d4 <= 0)
    collinear = (d1 == 0) & (d2 == 0) & (d3 == 0) & (d4 == 0)
    overlap = (np.minimum(x0, x1) <= max(ax, bx)) \
        & (np.maximum(x0, x1) >= min(ax, bx)) \
        & (np.minimum(y0, y1) <= max(ay, by)) \
        & (np.maximum(y0, y1) >= min(ay, by))
    return np.where(collinear, overlap, general)


def brush_select(d: NormalizedDataset, region: BrushRegion,
                 cfg: tr.TransformConfig) -> Selection:
    """Select records whose full-range curve intersects the region."""
    if not 0 <= region.pair < d.pair_count:
        raise AnalysisError(f"pair {region.pair} out of range")
    u = tr.curve_u_grid(cfg)
    v = tr.curve_v_batch(d.values[:, region.pair], d.values[:, region.pair + 1],
                         u, cfg)
    uu = np.broadcast_to(u, v.shape)
    x0, x1 = uu[:, :-1], uu[:, 1:]
    y0, y1 = v[:, :-1], v[:, 1:]
    if isinstance(region, Rect):
        hit = _segments_hit_rect(x0, y0, x1, y1,
                                 region.u0, region.u1, region.v0, region.v1)
    else:
        verts = region.vertices
        hit = _points_in_polygon(uu, v, verts)[:, :-1]
        for i in range(len(verts)):
            ax, ay = verts[i]
            bx, by = verts[(i + 1) % len(verts)]
            hit |= _segments_cross_edge(x0, y0, x1, y1, ax, ay, bx, by)
    selected = np.flatnonzero(hit.any(axis=1))
    return Selection(indices=selected, region=region)


def apply_mask(layer: LayerImage, mask: MaskImage) -> LayerImage:
    """Multiply the layer's (premultiplied) alpha by the mask per pixel."""
    if mask.values.shape != layer.rgba.shape[:2]:
        raise AnalysisError("mask dimensions do not match layer")
    return LayerImage(layer.rgba * mask.values[..., None], origin=layer.origin)


def selection_to_json(sel: Selection) -> dict:
    region = sel.region
    if isinstance(region, Rect):
        rj = {"kind": "rect", "pair": region.pair, "u0": region.u0,
              "u1": region.u1, "v0": region.v0, "v1": region.v1}
    else:
        rj = {"kind": "lasso", "pair": region.pair,
              "vertices": [list(p) for p in region.vertices]}
    return {"pair": region.pair, "region": rj,
            "record_ids": [int(i) for i in sel.indices]}
