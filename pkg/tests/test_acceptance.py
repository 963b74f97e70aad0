"""End-to-end acceptance checks for the rendering and analysis engine.

Each test exercises one headline property of the pipeline at its stated
tolerance; together they cover the numeric core (duality, limits, spline,
symmetry), the synthetic benchmark (density peaks, brushing), corner
filtering, and artifact determinism.
"""

import json
import math
import time

import numpy as np
import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from aupc import analysis as an
from aupc import render as rn
from aupc import transform as tr
from aupc.cli import main
from aupc.data import Dataset, NormalizedDataset, normalize, write_csv
from aupc.service import create_app
from aupc.specfile import load_render_spec
from aupc.synthetic import default_synthetic_spec, generate_synthetic

CFG = tr.TransformConfig()

STRUCTURES = {
    # name: (segment indices, label mask fn, analytic peak u)
    "15deg": ([0], lambda lab: lab == 0, 7.0 / 6.0),
    "56deg": ([1], lambda lab: lab == 1, 2 * math.radians(56) / math.pi - 1),
    "-5deg": ([2], lambda lab: lab == 2, 2 * math.radians(-5) / math.pi + 1),
    "30deg": (list(range(3, 12)), lambda lab: lab >= 3, 4.0 / 3.0),
}


def segment_peak(seg):
    """Analytic (u, v) of a segment's curve crossing point."""
    th = math.radians(seg.angle_deg)
    u = 2 * th / math.pi + (1.0 if th < math.pi / 4 else -1.0)
    v = 2 * seg.intercept * (u - 0.5) / (seg.slope + 1.0)
    return u, v


@pytest.fixture(scope="module")
def synthetic():
    d, labels = generate_synthetic(default_synthetic_spec(), seed=0)
    return normalize(d), labels


def test_01_duality_asymmetry_baseline():
    # mirrored slopes do not map to mirrored dual points
    p_neg = tr.dual_point_traditional(tr.line_from_slope_intercept(-0.5, 0.0))
    p_pos = tr.dual_point_traditional(tr.line_from_slope_intercept(0.5, 0.0))
    x1, y1 = p_neg.affine()
    x2, y2 = p_pos.affine()
    assert abs(x1 - 2.0 / 3.0) < 1e-12 and abs(y1) < 1e-12
    assert abs(x2 - 2.0) < 1e-12 and abs(y2) < 1e-12


def test_02_slope_one_bounding():
    # equal attribute pairs force every curve through (-0.5, 0) and (1.5, 0),
    # and those two cells dominate the density field
    rng = np.random.default_rng(0)
    c = rng.uniform(0.02, 0.98, 200)
    nd = NormalizedDataset(["x1", "x2"], np.column_stack([c, c]),
                           np.zeros(2), np.ones(2))
    t0 = time.perf_counter()
    v = tr.curve_v_batch(nd.values[:, 0], nd.values[:, 1],
                         np.array([-0.5, 1.5]), CFG)
    assert np.abs(v).max() < 1e-9
    layout = rn.CanvasLayout(pair_count=1, pair_width=128, height=256)
    f = rn.accumulate_density(nd, 0, layout, CFG)
    order = np.argsort(f.grid, axis=None)[::-1]
    top2 = {tuple(np.unravel_index(i, f.grid.shape)) for i in order[:2]}
    assert top2 == {f.cell_of(-0.5, 0.0), f.cell_of(1.5, 0.0)}
    assert time.perf_counter() - t0 < 1.0


def test_03_angle_linearity():
    rng = np.random.default_rng(1)
    for lo, hi in ((math.pi / 4, math.pi / 2), (-math.pi / 2, math.pi / 4)):
        th = rng.uniform(lo + 1e-6, hi - 1e-6, (1000, 2))
        du = np.array([tr.horizontal_u(a) - tr.horizontal_u(b) for a, b in th])
        assert np.abs(du - (2.0 / math.pi) * (th[:, 0] - th[:, 1])).max() < 1e-12


def test_04_synthetic_density_peaks(synthetic):
    nd, labels = synthetic
    layout = rn.CanvasLayout(pair_count=1, pair_width=600, height=400)
    t0 = time.perf_counter()
    for name, (_, mask_fn, u_star) in STRUCTURES.items():
        sub = NormalizedDataset(nd.names, nd.values[mask_fn(labels)],
                                nd.column_min, nd.column_max)
        f = rn.accumulate_density(sub, 0, layout, CFG)
        u_peak = an.density_peak_u(f)
        assert abs(u_peak - u_star) <= 1.0 / layout.pair_width + 1e-12, name
    assert time.perf_counter() - t0 < 5.0


def sweep_limit_oracle(p1, p2, target, epsilons=(1e-3, 1e-4, 1e-5)):
    """Epsilon-sweep limit evaluation with a Richardson convergence check."""

    def v_at(u):
        theta = (u + 1.0) * math.pi / 2 if u <= 0 else (u - 1.0) * math.pi / 2
        a = math.tan(theta)
        b = p2 - a * p1
        return 2.0 * b * (u - 0.5) / (a + 1.0)

    raw = []
    for eps in epsilons:
        if target == 0.5:
            raw.append(0.5 * (v_at(0.5 - eps) + v_at(0.5 + eps)))
        elif target == -0.5:
            raw.append(v_at(-0.5 + eps))
        else:
            raw.append(v_at(1.5 - eps))
    if target == 0.5:
        estimates = raw
    else:
        r = epsilons[0] / epsilons[1]
        estimates = [(r * raw[k + 1] - raw[k]) / (r - 1.0)
                     for k in range(len(raw) - 1)]
    assert abs(estimates[-1] - estimates[-2]) < 1e-6
    return estimates[-1]


def test_05_limit_oracle():
    rng = np.random.default_rng(2)
    for p1, p2 in rng.uniform(0.0, 1.0, (100, 2)):
        closed = {-0.5: p1 - p2, 0.5: 2 * (p1 + p2) / math.pi, 1.5: p2 - p1}
        for target, want in closed.items():
            assert abs(sweep_limit_oracle(p1, p2, target) - want) < 1e-6
            assert abs(tr.limit_v_at((p1, p2), target, CFG) - want) < 1e-6


def test_06_spline_conformance():
    control = [(-0.5, 1.306), (-0.25, 1.153), (0.0, 1.0), (0.1, 0.9312),
               (0.25, 0.8555), (0.5, 0.812), (0.75, 0.8555), (0.9, 0.9312),
               (1.0, 1.0), (1.25, 1.153), (1.5, 1.306)]
    s = tr.scaling_spline_build()
    for u, val in control:
        assert abs(s(u) - val) < 1e-12
    assert abs(s(0.0) - 1.0) < 1e-12 and abs(s(1.0) - 1.0) < 1e-12
    h = 1e-3
    grid = np.arange(-0.5, 1.5 + h / 2, h)
    d2 = np.diff(np.asarray(s(grid)), 2) / h ** 2
    jumps = np.abs(np.diff(d2))
    m3 = np.abs(np.asarray(s.derivative(grid, 3))).max()
    assert jumps.max() < 10.0 * h * m3  # discretization error of d2 is O(h*s''')


def test_07_mirror_symmetry():
    rng = np.random.default_rng(3)
    u = tr.curve_u_grid(CFG)
    for p1, p2 in rng.uniform(0.0, 1.0, (100, 2)):
        v_fwd = tr.curve_v_batch(np.array([p2]), np.array([p1]), u, CFG)
        v_rev = tr.curve_v_batch(np.array([p1]), np.array([p2]), 1.0 - u, CFG)
        assert np.abs(v_fwd - v_rev).max() < 1e-9


def test_08_corner_filtering():
    img = np.zeros((64, 64))
    img[32, :] = 1.0
    img[:, 20] = 1.0
    metric = an.corner_metric(img, an.CornerConfig()).values
    i, j = np.unravel_index(np.argmax(metric), metric.shape)
    assert abs(i - 32) <= 1 and abs(j - 20) <= 1
    line = np.zeros((64, 64))
    line[32, :] = 1.0
    line_metric = an.corner_metric(line, an.CornerConfig()).values
    assert line_metric[28:37, 8:56].max() < 0.01 * metric.max()


def test_09_brushing_precision(synthetic):
    nd, labels = synthetic
    spec = default_synthetic_spec()
    hw, hh = 0.012, 0.008
    for name, (seg_ids, mask_fn, _) in STRUCTURES.items():
        chosen = np.zeros(nd.row_count, dtype=bool)
        for si in seg_ids:
            u, v = segment_peak(spec.segments[si])
            sel = an.brush_select(
                nd, an.Rect(0, u - hw, u + hw, v - hh, v + hh), CFG)
            chosen[sel.indices] = True
        target = mask_fn(labels)
        tp = np.sum(chosen & target)
        assert tp / target.sum() >= 0.95, f"{name} recall"
        assert tp / chosen.sum() >= 0.95, f"{name} precision"


def test_10_determinism(tmp_path):
    rng = np.random.default_rng(4)
    write_csv(Dataset(["a", "b"], rng.uniform(0, 1, (40, 2))),
              tmp_path / "data.csv")
    spec_path = tmp_path / "s.json"
    spec_path.write_text(json.dumps({
        "input": "data.csv",
        "layout": {"pair_width": 48, "height": 48}}), encoding="utf-8")
    runner = CliRunner()
    for name in ("r1.png", "r2.png"):
        res = runner.invoke(main, ["render", "--spec", str(spec_path),
                                   "--out", str(tmp_path / name)])
        assert res.exit_code == 0, res.output
    cli_bytes = (tmp_path / "r1.png").read_bytes()
    assert cli_bytes == (tmp_path / "r2.png").read_bytes()
    client = TestClient(create_app(load_render_spec(spec_path), tmp_path))
    assert client.post("/api/render", json={}).content == cli_bytes
