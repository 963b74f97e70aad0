"""End-to-end orchestration shared by the CLI and the HTTP service.

Keeping a single code path from spec to composited image is what makes
batch renders and service renders byte-identical for equivalent
parameters.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analysis as an
from . import render as rn
from . import transform as tr
from .data import (NormalizedDataset, OutlierConfig, SubsampleConfig, load_csv,
                   normalize, reorder_axes, subsample, top_outlier_indices)
from .specfile import RenderSpecFile


@dataclass
class Scene:
    """All layers of one composited view."""

    curve: rn.LayerImage
    fields: list[rn.PairDensityField]
    density_layers: list[rn.LayerImage]
    masks: list[an.MaskImage | None]
    final: rn.LayerImage
    subsample_indices: np.ndarray
    outlier_indices: np.ndarray


def load_normalized(spec: RenderSpecFile, base: Path) -> NormalizedDataset:
    path = Path(spec.input)
    if not path.is_absolute():
        path = base / path
    d, _ = load_csv(path)
    if spec.axis_order is not None:
        d = reorder_axes(d, spec.axis_order)
    return normalize(d)


def compute_density_fields(nd: NormalizedDataset, layout: rn.CanvasLayout,
                           cfg: tr.TransformConfig) -> list[rn.PairDensityField]:
    return [rn.accumulate_density(nd, pair, layout, cfg)
            for pair in range(nd.pair_count)]


def render_scene(nd: NormalizedDataset, layout: rn.CanvasLayout,
                 cfg: tr.TransformConfig,
                 transfers: dict[int, rn.TransferFunction] | None = None,
                 corner: an.CornerConfig | None = None,
                 sub_cfg: SubsampleConfig | None = None,
                 out_cfg: OutlierConfig | None = None,
                 style: rn.CurveStyle | None = None,
                 fields: list[rn.PairDensityField] | None = None) -> Scene:
    """Build every layer and the final composite for one view.

    Precomputed density fields may be passed in (the service snapshot does)
    as long as they match the layout and transform config.
    """
    transfers = transfers or {}
    sub_cfg = sub_cfg or SubsampleConfig()
    out_cfg = out_cfg or OutlierConfig()
    if fields is None:
        fields = compute_density_fields(nd, layout, cfg)
    sub_idx = subsample(nd, sub_cfg, out_cfg)
    out_idx = top_outlier_indices(nd, out_cfg)
    if style is None:
        style = rn.CurveStyle(outlier_indices=frozenset(int(i) for i in out_idx))
    curve = rn.render_curve_layer(nd, sub_idx, layout, cfg, style)
    density_layers = []
    masks: list[an.MaskImage | None] = []
    for f in fields:
        tf = transfers.get(f.pair, rn.default_transfer())
        density_layers.append(rn.apply_transfer(f, tf))
        if corner is not None:
            img = f.grid
            if corner.percentile_window is not None:
                img = an.percentile_filter(img, corner.percentile_window,
                                           corner.percentile)
            metric = an.corner_metric(img, corner)
            masks.append(an.build_mask(metric, corner.threshold, corner.radius))
        else:
            masks.append(None)
    final = rn.composite(curve, density_layers,
                         masks=[m.values if m is not None else None
                                for m in masks])
    return Scene(curve=curve, fields=fields, density_layers=density_layers,
                 masks=masks, final=final, subsample_indices=sub_idx,
                 outlier_indices=out_idx)


def scene_from_spec(spec: RenderSpecFile, base: Path,
                    nd: NormalizedDataset | None = None,
                    fields: list[rn.PairDensityField] | None = None) -> Scene:
    if nd is None:
        nd = load_normalized(spec, base)
    layout = spec.layout.to_layout(nd.pair_count)
    cfg = spec.transform.to_config()
    transfers = {p: m.to_transfer() for p, m in spec.transfers.items()}
    corner = spec.corner.to_config() if spec.corner is not None else None
    return render_scene(nd, layout, cfg, transfers=transfers, corner=corner,
                        sub_cfg=spec.subsample.to_config(),
                        out_cfg=spec.outliers.to_config(), fields=fields)


def write_scene(scene: Scene, image_path: Path,
                layers_dir: Path | None = None) -> list[Path]:
    """Write the final PNG plus optional per-layer PNGs; returns paths."""
    written = []
    image_path.parent.mkdir(parents=True, exist_ok=True)
    rn.export_png(scene.final, image_path)
    written.append(image_path)
    if layers_dir is not None:
        layers_dir.mkdir(parents=True, exist_ok=True)
        p = layers_dir / "curves.png"
        rn.export_png(scene.curve, p)
        written.append(p)
        for i, layer in enumerate(scene.density_layers):
            p = layers_dir / f"density_pair{i}.png"
            rn.export_png(layer, p)
            written.append(p)
        for i, mask in enumerate(scene.masks):
            if mask is None:
                continue
            p = layers_dir / f"mask_pair{i}.png"
            gray = np.repeat(mask.values[..., None], 3, axis=-1)
            rgba = np.concatenate([gray, np.ones_like(mask.values)[..., None]],
                                  axis=-1)
            rn.export_png(rn.LayerImage(rgba), p)
            written.append(p)
    return written
