"""Combined subsampling and density rendering.

Whole-dataset curves are accumulated into per-attribute-pair density
fields, mapped through 1D transfer functions, and alpha-blended over a
curve layer drawn from a subsampled set of records.

Rasterization deposits are anti-aliased: each curve is splatted as a
finely subdivided polyline with bilinear weights, each sub-sample weighted
by its arc length, so a record's total deposit is proportional to its
covered path length and accumulation is order-free.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from . import transform as tr
from .data import NormalizedDataset

_SUBDIVISIONS = 8  # sub-samples per curve segment when splatting


class RenderError(ValueError):
    pass


@dataclass(frozen=True)
class CanvasLayout:
    """Pixel geometry of the plot.

    Each attribute pair occupies pair_width px for u in [0, 1]; half a pair
    width of overhang on each side of the canvas accommodates the
    u in [-0.5, 0] and [1, 1.5] extents of the outermost pairs.
    """

    pair_count: int
    pair_width: int = 600
    height: int = 400
    v_lo: float = -1.0
    v_hi: float = 1.5
    margin: int = 0

    def __post_init__(self):
        if self.pair_width < 16 or self.height < 16:
            raise RenderError("pair_width and height must be >= 16 px")
        if not self.v_lo < self.v_hi:
            raise RenderError("v_lo must be < v_hi")
        if self.pair_count < 1:
            raise RenderError("need at least one attribute pair")

    @property
    def canvas_width(self) -> int:
        return 2 * self.margin + self.pair_width * (self.pair_count + 1)

    @property
    def canvas_height(self) -> int:
        return 2 * self.margin + self.height

    def x_of_u(self, pair: int, u) -> np.ndarray:
        """Canvas x (pixel-edge coordinate) of u in the given pair."""
        return self.margin + (pair + 0.5 + np.asarray(u, dtype=float)) * self.pair_width

    def y_of_v(self, v) -> np.ndarray:
        return self.margin + (self.v_hi - np.asarray(v, dtype=float)) \
            / (self.v_hi - self.v_lo) * self.height

    def u_of_x(self, pair: int, x) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.margin) / self.pair_width \
            - pair - 0.5

    def v_of_y(self, y) -> np.ndarray:
        return self.v_hi - (np.asarray(y, dtype=float) - self.margin) \
            / self.height * (self.v_hi - self.v_lo)

    def density_origin(self, pair: int) -> tuple[int, int]:
        """Canvas (x, y) of a pair's density field top-left corner."""
        return self.margin + pair * self.pair_width, self.margin


@dataclass
class PairDensityField:
    """Additive accumulation grid of curve density for one attribute pair.

    The grid spans u in [-0.5, 1.5] horizontally (2 * pair_width cells by
    default, one cell per output pixel) and the layout's v-range vertically.
    """

    pair: int
    grid: np.ndarray  # (height, 2 * pair_width)
    layout: CanvasLayout

    def cell_of(self, u: float, v: float) -> tuple[int, int]:
        """(row, col) of the grid cell containing the plot location."""
        ny, nx = self.grid.shape
        col = int(np.clip(np.floor((u + 0.5) * self.layout.pair_width), 0, nx - 1))
        row = int(np.clip(np.floor((self.layout.v_hi - v)
                                   / (self.layout.v_hi - self.layout.v_lo) * ny),
                          0, ny - 1))
        return row, col


@dataclass(frozen=True)
class TransferFunction:
    """Per-pair 1D map from normalized density to color and opacity."""

    color_stops: tuple[tuple[float, tuple[float, float, float]], ...]
    opacity_stops: tuple[tuple[float, float], ...]
    mode: str = "linear"  # or "log"

    def __post_init__(self):
        for stops in (self.color_stops, self.opacity_stops):
            pos = [s[0] for s in stops]
            if pos != sorted(set(pos)) or pos[0] != 0.0 or pos[-1] != 1.0:
                raise RenderError(
                    "stop positions must be strictly increasing with endpoints 0 and 1")
        if self.mode not in ("linear", "log"):
            raise RenderError(f"unknown normalization mode {self.mode!r}")

    def normalize(self, grid: np.ndarray) -> np.ndarray:
        m = float(grid.max())
        if m <= 0.0:
            return np.zeros_like(grid)
        if self.mode == "log":
            return np.log1p(grid) / np.log1p(m)
        return grid / m

    def colors(self, t: np.ndarray) -> np.ndarray:
        pos = np.array([s[0] for s in self.color_stops])
        out = np.empty(t.shape + (3,))
        for ch in range(3):
            vals = np.array([s[1][ch] for s in self.color_stops])
            out[..., ch] = np.interp(t, pos, vals)
        return out

    def opacities(self, t: np.ndarray) -> np.ndarray:
        pos = np.array([s[0] for s in self.opacity_stops])
        vals = np.array([s[1] for s in self.opacity_stops])
        return np.interp(t, pos, vals)


def default_transfer() -> TransferFunction:
    """Blue-to-white ramp with a steep opacity ramp above sparse densities."""
    return TransferFunction(
        color_stops=((0.0, (0.03, 0.12, 0.38)), (0.55, (0.25, 0.55, 0.85)),
                     (1.0, (1.0, 1.0, 1.0))),
        opacity_stops=((0.0, 0.0), (0.15, 0.0), (0.55, 0.85), (1.0, 1.0)),
        mode="log",
    )


@dataclass
class LayerImage:
    """Premultiplied RGBA raster; origin places it on the canvas."""

    rgba: np.ndarray  # (h, w, 4) float, premultiplied alpha
    origin: tuple[int, int] = (0, 0)  # (x, y) on the canvas

    def __post_init__(self):
        if self.rgba.ndim != 3 or self.rgba.shape[2] != 4:
            raise RenderError("rgba must be (h, w, 4)")


def _splat(grid: np.ndarray, x: np.ndarray, y: np.ndarray,
           w: np.ndarray) -> None:
    """Accumulate bilinear deposits at edge-coordinate positions.

    Positions are clamped half a cell inside the grid so that the bounds
    u = -0.5, 1.5 (and the v-range edges) deposit fully into the border
    cells instead of losing weight off-grid.
    """
    ny, nx = grid.shape
    keep = (x >= -0.5) & (x <= nx + 0.5) & (y >= -0.5) & (y <= ny + 0.5)
    x = np.clip(x[keep] - 0.5, 0.0, nx - 1.0)
    y = np.clip(y[keep] - 0.5, 0.0, ny - 1.0)
    w = w[keep]
    x0 = np.floor(x).astype(np.int64)
    y0 = np.floor(y).astype(np.int64)
    fx = x - x0
    fy = y - y0
    x1 = np.minimum(x0 + 1, nx - 1)
    y1 = np.minimum(y0 + 1, ny - 1)
    for yy, xx, ww in ((y0, x0, (1 - fx) * (1 - fy)), (y0, x1, fx * (1 - fy)),
                       (y1, x0, (1 - fx) * fy), (y1, x1, fx * fy)):
        grid += np.bincount(yy * nx + xx, weights=w * ww,
                            minlength=grid.size).reshape(grid.shape)


def _splat_polyline_batch(grid: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> None:
    """Splat many polylines given as (R, M) x/y sample arrays.

    All curves share one x-lattice (the common u grid), so a careless
    sub-sample spacing beats coherently against the pixel grid and puts a
    percent-level ripple on every column's mass. Three or more sub-samples
    per pixel column keeps that ripple below the tent kernel's stopband.
    """
    dx = np.diff(xs, axis=1)
    dy = np.diff(ys, axis=1)
    seg_len = np.sqrt(dx * dx + dy * dy)
    # the 1e-6 slack keeps float jitter in the grid spacing from bumping the
    # count off an exact integer-per-column lattice
    s = int(min(max(_SUBDIVISIONS,
                    np.ceil(3.0 * np.abs(dx).max(initial=0.0) - 1e-6)), 64))
    for j in range(s):
        t = (j + 0.5) / s
        px = xs[:, :-1] + t * dx
        py = ys[:, :-1] + t * dy
        _splat(grid, px.ravel(), py.ravel(), (seg_len / s).ravel())


def accumulate_density(d: NormalizedDataset, pair: int, layout: CanvasLayout,
                       cfg: tr.TransformConfig) -> PairDensityField:
    """Rasterize every record's full transformed curve into the pair grid."""
    if not 0 <= pair < d.pair_count:
        raise RenderError(f"pair {pair} out of range")
    grid = np.zeros((layout.height, 2 * layout.pair_width))
    if d.row_count:
        u_grid = tr.curve_u_grid(cfg)
        v = tr.curve_v_batch(d.values[:, pair], d.values[:, pair + 1], u_grid, cfg)
        xs = np.broadcast_to((u_grid + 0.5) * layout.pair_width, v.shape)
        ys = (layout.v_hi - v) / (layout.v_hi - layout.v_lo) * layout.height
        _splat_polyline_batch(grid, np.ascontiguousarray(xs), ys)
    return PairDensityField(pair=pair, grid=grid, layout=layout)


def apply_transfer(f: PairDensityField, tf: TransferFunction) -> LayerImage:
    """Map a density field to a premultiplied RGBA layer at its canvas spot."""
    t = tf.normalize(f.grid)
    rgb = tf.colors(t)
    a = tf.opacities(t)
    rgba = np.empty(f.grid.shape + (4,))
    rgba[..., :3] = rgb * a[..., None]
    rgba[..., 3] = a
    return LayerImage(rgba, origin=f.layout.density_origin(f.pair))


@dataclass(frozen=True)
class CurveStyle:
    color: tuple[float, float, float] = (0.25, 0.25, 0.32)
    alpha: float = 0.8
    outlier_color: tuple[float, float, float] = (0.85, 0.15, 0.1)
    outlier_alpha: float = 1.0
    outlier_indices: frozenset[int] = frozenset()


def _coverage_to_layer(canvas_shape, coverage_groups) -> LayerImage:
    h, w = canvas_shape
    rgba = np.zeros((h, w, 4))
    for coverage, color, alpha in coverage_groups:
        a = np.clip(coverage, 0.0, 1.0) * alpha
        layer = np.empty((h, w, 4))
        for ch in range(3):
            layer[..., ch] = color[ch] * a
        layer[..., 3] = a
        rgba = layer + rgba * (1.0 - layer[..., 3:4])
    return LayerImage(rgba)


def render_curve_layer(d: NormalizedDataset, indices, layout: CanvasLayout,
                       cfg: tr.TransformConfig,
                       style: CurveStyle | None = None) -> LayerImage:
    """Draw the u in [0, 1] portion of selected records across all pairs.

    Outlier records named in the style are drawn over the rest in the
    highlight color. Curves of one record meet exactly at shared axes.
    """
    style = style or CurveStyle()
    indices = np.asarray(list(indices), dtype=int)
    h, w = layout.canvas_height, layout.canvas_width
    if len(indices) == 0:
        return LayerImage(np.zeros((h, w, 4)))
    is_outlier = np.isin(indices, list(style.outlier_indices))
    u_all = tr.curve_u_grid(cfg)
    inner = (u_all >= 0.0) & (u_all <= 1.0)
    u_grid = u_all[inner]
    cov_main = np.zeros((h, w))
    cov_out = np.zeros((h, w))
    for pair in range(d.pair_count):
        v = tr.curve_v_batch(d.values[indices, pair], d.values[indices, pair + 1],
                             u_grid, cfg)
        xs = np.broadcast_to(layout.x_of_u(pair, u_grid), v.shape)
        ys = layout.y_of_v(v)
        for grid, mask in ((cov_main, ~is_outlier), (cov_out, is_outlier)):
            if mask.any():
                _splat_polyline_batch(grid, np.ascontiguousarray(xs[mask]), ys[mask])
    return _coverage_to_layer(
        (h, w),
        [(cov_main, style.color, style.alpha),
         (cov_out, style.outlier_color, style.outlier_alpha)],
    )


def composite(curve: LayerImage, density_layers: list[LayerImage],
              masks: list[np.ndarray | None] | None = None) -> LayerImage:
    """Alpha-over the density layers (ascending pair order) on the curve layer.

    Optional masks multiply the matching density layer's alpha before
    blending; overhang overlap between adjacent pairs resolves in pair order
    (later pairs over earlier ones).
    """
    out = curve.rgba.copy()
    h, w = out.shape[:2]
    if masks is not None and len(masks) != len(density_layers):
        raise RenderError("masks must align with density layers")
    for i, layer in enumerate(density_layers):
        top = layer.rgba
        if masks is not None and masks[i] is not None:
            m = masks[i]
            if m.shape != top.shape[:2]:
                raise RenderError("mask dimensions do not match layer")
            top = top * m[..., None]
        x0, y0 = layer.origin
        lh, lw = top.shape[:2]
        if x0 < 0 or y0 < 0 or x0 + lw > w or y0 + lh > h:
            raise RenderError("density layer does not fit the canvas")
        region = out[y0:y0 + lh, x0:x0 + lw]
        out[y0:y0 + lh, x0:x0 + lw] = top + region * (1.0 - top[..., 3:4])
    return LayerImage(out)


def export_png(img: LayerImage, path) -> None:
    """Write an 8-bit RGBA PNG, un-premultiplying on the way out."""
    rgba = img.rgba
    a = rgba[..., 3:4]
    with np.errstate(divide="ignore", invalid="ignore"):
        rgb = np.where(a > 0, rgba[..., :3] / a, 0.0)
    out = np.concatenate([np.clip(rgb, 0, 1), np.clip(a, 0, 1)], axis=-1)
    data = (out * 255.0 + 0.5).astype(np.uint8)
    Image.fromarray(data, mode="RGBA").save(path, format="PNG")


def load_png(path) -> np.ndarray:
    return np.asarray(Image.open(path).convert("RGBA"))
