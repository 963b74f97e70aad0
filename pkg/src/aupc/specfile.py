"""JSON spec files: schema validation and conversion to domain objects.

A render spec gathers the ~25 pipeline parameters in one validated
document. Unknown keys are rejected everywhere so that typos fail loudly
instead of silently falling back to defaults.
"""

from __future__ import annotations

import json
import math

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from . import analysis as an
from . import render as rn
from . import transform as tr
from .data import OutlierConfig, SubsampleConfig
from .synthetic import SegmentSpec, SyntheticSpec


class SpecError(ValueError):
    """Spec document failed schema or semantic validation."""


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class TransformModel(_Strict):
    epsilon: float = 1e-6
    delta_theta: float = math.pi / 360.0
    scaling: bool = False

    def to_config(self) -> tr.TransformConfig:
        return tr.TransformConfig(epsilon=self.epsilon,
                                  delta_theta=self.delta_theta,
                                  scaling_enabled=self.scaling)


class LayoutModel(_Strict):
    pair_width: int = 600
    height: int = 400
    v_lo: float = -1.0
    v_hi: float = 1.5
    margin: int = 0

    def to_layout(self, pair_count: int) -> rn.CanvasLayout:
        return rn.CanvasLayout(pair_count=pair_count, pair_width=self.pair_width,
                               height=self.height, v_lo=self.v_lo,
                               v_hi=self.v_hi, margin=self.margin)


class ColorStopModel(_Strict):
    position: float = Field(ge=0.0, le=1.0)
    rgb: tuple[float, float, float]


class OpacityStopModel(_Strict):
    position: float = Field(ge=0.0, le=1.0)
    alpha: float = Field(ge=0.0, le=1.0)


class TransferModel(_Strict):
    color_stops: list[ColorStopModel]
    opacity_stops: list[OpacityStopModel]
    mode: str = "linear"

    def to_transfer(self) -> rn.TransferFunction:
        return rn.TransferFunction(
            color_stops=tuple((s.position, s.rgb) for s in self.color_stops),
            opacity_stops=tuple((s.position, s.alpha) for s in self.opacity_stops),
            mode=self.mode,
        )


class SubsampleModel(_Strict):
    rate: float = 0.05
    seed: int = 0

    def to_config(self) -> SubsampleConfig:
        return SubsampleConfig(rate=self.rate, seed=self.seed)


class OutlierModel(_Strict):
    k: int = 5
    sample_size: int = 20
    seed: int = 0

    def to_config(self) -> OutlierConfig:
        return OutlierConfig(k=self.k, sample_size=self.sample_size,
                             seed=self.seed)


class CornerModel(_Strict):
    window: int = 5
    threshold: float = 0.5
    radius: int = 6
    percentile_window: int | None = None
    percentile: float = 50.0

    def to_config(self) -> an.CornerConfig:
        return an.CornerConfig(window=self.window, threshold=self.threshold,
                               radius=self.radius,
                               percentile_window=self.percentile_window,
                               percentile=self.percentile)


class RegionModel(_Strict):
    kind: str  # "rect" | "lasso"
    pair: int = 0
    u0: float | None = None
    u1: float | None = None
    v0: float | None = None
    v1: float | None = None
    vertices: list[tuple[float, float]] | None = None

    def to_region(self) -> an.BrushRegion:
        if self.kind == "rect":
            if None in (self.u0, self.u1, self.v0, self.v1):
                raise SpecError("rect region requires u0, u1, v0, v1")
            return an.Rect(self.pair, self.u0, self.u1, self.v0, self.v1)
        if self.kind == "lasso":
            if not self.vertices:
                raise SpecError("lasso region requires vertices")
            return an.Lasso(self.pair, tuple(tuple(p) for p in self.vertices))
        raise SpecError(f"unknown region kind {self.kind!r}")


class OutputModel(_Strict):
    image: str = "render.png"
    layers_dir: str | None = None
    selections: str = "selections.json"
    overlay: str = "overlay.png"


class RenderSpecFile(_Strict):
    input: str
    axis_order: list[int] | None = None
    subsample: SubsampleModel = SubsampleModel()
    outliers: OutlierModel = OutlierModel()
    transform: TransformModel = TransformModel()
    layout: LayoutModel = LayoutModel()
    transfers: dict[int, TransferModel] = {}
    corner: CornerModel | None = None
    regions: list[RegionModel] = []
    output: OutputModel = OutputModel()
    seed: int = 0


class SegmentModel(_Strict):
    angle_deg: float
    center: tuple[float, float]
    half_length: float = Field(gt=0.0)
    count: int = Field(ge=1)
    sigma: float = Field(default=0.004, ge=0.0)

    def to_spec(self) -> SegmentSpec:
        return SegmentSpec(angle_deg=self.angle_deg, center=self.center,
                           half_length=self.half_length, count=self.count,
                           sigma=self.sigma)


class SyntheticFileModel(_Strict):
    segments: list[SegmentModel] = Field(min_length=1)
    anchor_corners: bool = True

    def to_spec(self) -> SyntheticSpec:
        return SyntheticSpec(tuple(s.to_spec() for s in self.segments),
                             anchor_corners=self.anchor_corners)


def _load_model(path, model):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as e:
        raise SpecError(f"{path}: not valid JSON: {e}") from e
    try:
        return model.model_validate(doc)
    except ValidationError as e:
        raise SpecError(f"{path}: {e}") from e


def load_render_spec(path) -> RenderSpecFile:
    return _load_model(path, RenderSpecFile)


def load_synthetic_spec(path) -> SyntheticFileModel:
    return _load_model(path, SyntheticFileModel)
