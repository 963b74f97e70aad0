"""HTTP API over an immutable loaded dataset snapshot.

All interaction state travels with each request; the server only caches
derived artifacts (density fields per scaling flag, rendered PNG bytes by
body hash), so concurrent requests are trivially consistent.
"""

from __future__ import annotations

import hashlib
import io
import json
import threading
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Query, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import ValidationError

from . import analysis as an
from . import render as rn
from . import transform as tr
from .pipeline import compute_density_fields, scene_from_spec
from .specfile import (CornerModel, OutlierModel, RegionModel, RenderSpecFile,
                       SpecError, SubsampleModel, TransferModel, _Strict)

MAX_CURVE_IDS = 10_000


class RenderRequest(_Strict):
    transfers: dict[int, TransferModel] = {}
    scaling: bool = False
    corner: CornerModel | None = None
    subsample: SubsampleModel | None = None
    outliers: OutlierModel | None = None


class BrushRequest(_Strict):
    region: RegionModel


@dataclass
class SessionSnapshot:
    """Dataset plus derived per-pair density fields, immutable after load."""

    spec: RenderSpecFile
    base: Path
    nd: "object"
    layout: rn.CanvasLayout
    config_hash: str
    _fields: dict[bool, list[rn.PairDensityField]] = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock)

    def fields_for(self, scaling: bool) -> list[rn.PairDensityField]:
        with self._lock:
            cached = self._fields.get(scaling)
        if cached is not None:
            return cached
        cfg = self.spec.transform.model_copy(
            update={"scaling": scaling}).to_config()
        computed = compute_density_fields(self.nd, self.layout, cfg)
        with self._lock:
            return self._fields.setdefault(scaling, computed)


def load_snapshot(spec: RenderSpecFile, base: Path) -> SessionSnapshot:
    from .pipeline import load_normalized

    nd = load_normalized(spec, base)
    layout = spec.layout.to_layout(nd.pair_count)
    config_hash = hashlib.sha256(
        spec.model_dump_json().encode("utf-8")).hexdigest()
    return SessionSnapshot(spec=spec, base=base, nd=nd, layout=layout,
                           config_hash=config_hash)


def _png_bytes(img: rn.LayerImage) -> bytes:
    buf = io.BytesIO()
    rn.export_png(img, buf)
    return buf.getvalue()


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse({"error": message}, status_code=status)


def create_app(spec: RenderSpecFile | None = None,
               base: Path | None = None) -> FastAPI:
    """Build the app; with no spec the endpoints answer 503 until loaded."""
    app = FastAPI(title="aupc service")
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    app.state.snapshot = (load_snapshot(spec, base or Path.cwd())
                          if spec is not None else None)
    app.state.render_cache = {}
    app.state.cache_lock = threading.Lock()

    def snapshot() -> SessionSnapshot | None:
        return app.state.snapshot

    @app.get("/api/dataset/meta")
    def dataset_meta():
        snap = snapshot()
        if snap is None:
            return _error(503, "no dataset loaded")
        layout = snap.layout
        return {
            "attributes": list(snap.nd.names),
            "row_count": snap.nd.row_count,
            "pair_count": snap.nd.pair_count,
            "extents": {"u": [-0.5, 1.5], "v": [layout.v_lo, layout.v_hi],
                        "pair_width": layout.pair_width,
                        "height": layout.height,
                        "canvas_width": layout.canvas_width,
                        "canvas_height": layout.canvas_height,
                        "margin": layout.margin},
            "column_min": [float(x) for x in snap.nd.column_min],
            "column_max": [float(x) for x in snap.nd.column_max],
            "config_hash": snap.config_hash,
        }

    @app.post("/api/render")
    async def render_view(request: Request,
                          layer: str = Query(default="final")):
        snap = snapshot()
        if snap is None:
            return _error(503, "no dataset loaded")
        raw = await request.body()
        try:
            body = RenderRequest.model_validate_json(raw or b"{}")
        except ValidationError as e:
            return _error(400, str(e))
        key = hashlib.sha256(raw + b"\x00" + layer.encode("utf-8")).hexdigest()
        with app.state.cache_lock:
            cached = app.state.render_cache.get(key)
        if cached is not None:
            return Response(cached, media_type="image/png")
        spec2 = snap.spec.model_copy(update={
            "transform": snap.spec.transform.model_copy(
                update={"scaling": body.scaling}),
            "transfers": body.transfers,
            "corner": body.corner,
            "subsample": body.subsample or snap.spec.subsample,
            "outliers": body.outliers or snap.spec.outliers,
        })
        try:
            scene = scene_from_spec(spec2, snap.base, nd=snap.nd,
                                    fields=snap.fields_for(body.scaling))
            img = _select_layer(scene, layer)
        except (rn.RenderError, an.AnalysisError, SpecError) as e:
            return _error(422, str(e))
        data = _png_bytes(img)
        with app.state.cache_lock:
            app.state.render_cache.setdefault(key, data)
        return Response(data, media_type="image/png")

    @app.post("/api/brush")
    async def brush_view(request: Request):
        snap = snapshot()
        if snap is None:
            return _error(503, "no dataset loaded")
        try:
            body = BrushRequest.model_validate_json(await request.body())
        except ValidationError as e:
            return _error(400, str(e))
        try:
            region = body.region.to_region()
            sel = an.brush_select(snap.nd, region,
                                  snap.spec.transform.to_config())
        except (an.AnalysisError, SpecError) as e:
            return _error(400, str(e))
        return an.selection_to_json(sel)

    @app.get("/api/curves")
    def curves(pair: int, ids: str = ""):
        snap = snapshot()
        if snap is None:
            return _error(503, "no dataset loaded")
        if not 0 <= pair < snap.nd.pair_count:
            return _error(400, f"pair {pair} out of range")
        if not ids.strip():
            return {"pair": pair, "curves": []}
        try:
            id_list = [int(s) for s in ids.split(",") if s.strip()]
        except ValueError:
            return _error(400, "ids must be comma-separated integers")
        if len(id_list) > MAX_CURVE_IDS:
            return _error(413, f"at most {MAX_CURVE_IDS} ids per request")
        if any(i < 0 or i >= snap.nd.row_count for i in id_list):
            return _error(400, "record id out of range")
        cfg = snap.spec.transform.to_config()
        u = tr.curve_u_grid(cfg)
        v = tr.curve_v_batch(snap.nd.values[id_list, pair],
                             snap.nd.values[id_list, pair + 1], u, cfg)
        return {"pair": pair,
                "curves": [{"id": int(i), "u": [float(x) for x in u],
                            "v": [float(x) for x in row]}
                           for i, row in zip(id_list, v)]}

    return app


def _select_layer(scene, layer: str) -> rn.LayerImage:
    if layer == "final":
        return scene.final
    if layer == "curves":
        return scene.curve
    if layer.startswith("density-"):
        return scene.density_layers[_layer_index(layer, len(scene.density_layers))]
    if layer.startswith("mask-"):
        i = _layer_index(layer, len(scene.masks))
        mask = scene.masks[i]
        if mask is None:
            raise SpecError(f"no corner config, so no mask layer {i}")
        gray = np.repeat(mask.values[..., None], 3, axis=-1)
        rgba = np.concatenate(
            [gray, np.ones_like(mask.values)[..., None]], axis=-1)
        return rn.LayerImage(rgba)
    raise SpecError(f"unknown layer {layer!r}")


def _layer_index(layer: str, count: int) -> int:
    try:
        i = int(layer.rsplit("-", 1)[1])
    except ValueError:
        raise SpecError(f"bad layer name {layer!r}") from None
    if not 0 <= i < count:
        raise SpecError(f"layer index {i} out of range")
    return i
