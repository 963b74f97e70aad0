import json

import numpy as np
import pytest
from click.testing import CliRunner

from aupc import specfile as sf
from aupc.cli import EXIT_IO, EXIT_SCHEMA, main
from aupc.synthetic import default_synthetic_spec


def write_spec(path, **overrides):
    doc = {"input": "data.csv"}
    doc.update(overrides)
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


def write_csv(path, rows, header="a,b"):
    path.write_text(header + "\n" + "\n".join(rows) + "\n", encoding="utf-8")


@pytest.fixture
def runner():
    return CliRunner()


class TestSpecFile:
    def test_defaults(self, tmp_path):
        spec = sf.load_render_spec(write_spec(tmp_path / "s.json"))
        assert spec.layout.pair_width == 600
        assert spec.transform.scaling is False
        assert spec.corner is None and spec.regions == []

    def test_unknown_key_rejected(self, tmp_path):
        p = write_spec(tmp_path / "s.json", pear_width=600)
        with pytest.raises(sf.SpecError):
            sf.load_render_spec(p)

    def test_nested_unknown_key_rejected(self, tmp_path):
        p = write_spec(tmp_path / "s.json", layout={"pair_widht": 64})
        with pytest.raises(sf.SpecError):
            sf.load_render_spec(p)

    def test_invalid_json(self, tmp_path):
        p = tmp_path / "s.json"
        p.write_text("{not json", encoding="utf-8")
        with pytest.raises(sf.SpecError):
            sf.load_render_spec(p)

    def test_region_conversion(self, tmp_path):
        p = write_spec(tmp_path / "s.json", regions=[
            {"kind": "rect", "pair": 0, "u0": 0.0, "u1": 1.0,
             "v0": 0.0, "v1": 0.5},
            {"kind": "lasso", "pair": 0,
             "vertices": [[0, 0], [1, 0], [0.5, 1]]},
        ])
        spec = sf.load_render_spec(p)
        regions = [r.to_region() for r in spec.regions]
        assert regions[0].u1 == 1.0
        assert len(regions[1].vertices) == 3

    def test_incomplete_rect_region(self, tmp_path):
        p = write_spec(tmp_path / "s.json",
                       regions=[{"kind": "rect", "u0": 0.0}])
        spec = sf.load_render_spec(p)
        with pytest.raises(sf.SpecError):
            spec.regions[0].to_region()

    def test_transfer_round_trip(self, tmp_path):
        p = write_spec(tmp_path / "s.json", transfers={"0": {
            "color_stops": [{"position": 0, "rgb": [0, 0, 1]},
                            {"position": 1, "rgb": [1, 0, 0]}],
            "opacity_stops": [{"position": 0, "alpha": 0},
                              {"position": 1, "alpha": 1}],
            "mode": "log"}})
        tf = sf.load_render_spec(p).transfers[0].to_transfer()
        assert tf.mode == "log"
        assert tf.color_stops[1] == (1.0, (1.0, 0.0, 0.0))


class TestSynth:
    def test_default_row_count(self, runner, tmp_path):
        out = tmp_path / "d.csv"
        res = runner.invoke(main, ["synth", "--seed", "7", "--out", str(out)])
        assert res.exit_code == 0, res.output
        rows = out.read_text().strip().splitlines()
        assert len(rows) - 1 == default_synthetic_spec().total_rows()
        labels = (tmp_path / "d.labels.csv").read_text().strip().splitlines()
        assert len(labels) - 1 == len(rows) - 1

    def test_byte_identical_repeat(self, runner, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert runner.invoke(main, ["synth", "--seed", "3", "--out",
                                    str(a)]).exit_code == 0
        assert runner.invoke(main, ["synth", "--seed", "3", "--out",
                                    str(b)]).exit_code == 0
        assert a.read_bytes() == b.read_bytes()

    def test_custom_spec(self, runner, tmp_path):
        spec = tmp_path / "gen.json"
        spec.write_text(json.dumps({"segments": [
            {"angle_deg": 10, "center": [0.5, 0.5], "half_length": 0.2,
             "count": 25}]}), encoding="utf-8")
        out = tmp_path / "d.csv"
        res = runner.invoke(main, ["synth", "--spec", str(spec),
                                   "--out", str(out)])
        assert res.exit_code == 0, res.output
        assert len(out.read_text().strip().splitlines()) == 1 + 25 + 2

    def test_invalid_spec_schema_exit(self, runner, tmp_path):
        spec = tmp_path / "gen.json"
        spec.write_text(json.dumps({"segments": [], "bogus": 1}),
                        encoding="utf-8")
        res = runner.invoke(main, ["synth", "--spec", str(spec),
                                   "--out", str(tmp_path / "d.csv")])
        assert res.exit_code == EXIT_SCHEMA

    def test_report_figure(self, runner, tmp_path):
        out = tmp_path / "d.csv"
        spec = tmp_path / "gen.json"
        spec.write_text(json.dumps({"segments": [
            {"angle_deg": 45, "center": [0.5, 0.5], "half_length": 0.3,
             "count": 30}]}), encoding="utf-8")
        res = runner.invoke(main, ["synth", "--spec", str(spec),
                                   "--out", str(out), "--report"])
        assert res.exit_code == 0, res.output
        assert (tmp_path / "d.report.png").stat().st_size > 0


def small_layout():
    return {"pair_width": 32, "height": 32}


class TestRender:
    def _setup(self, tmp_path, **spec_overrides):
        rng = np.random.default_rng(0)
        rows = [f"{a},{b},{c}" for a, b, c in rng.uniform(0, 1, (30, 3))]
        write_csv(tmp_path / "data.csv", rows, header="a,b,c")
        return write_spec(tmp_path / "s.json", layout=small_layout(),
                          **spec_overrides)

    def test_minimal_produces_png(self, runner, tmp_path):
        spec = self._setup(tmp_path)
        res = runner.invoke(main, ["render", "--spec", str(spec)])
        assert res.exit_code == 0, res.output
        png = tmp_path / "render.png"
        assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_deterministic(self, runner, tmp_path):
        spec = self._setup(tmp_path)
        runner.invoke(main, ["render", "--spec", str(spec),
                             "--out", str(tmp_path / "r1.png")])
        runner.invoke(main, ["render", "--spec", str(spec),
                             "--out", str(tmp_path / "r2.png")])
        assert (tmp_path / "r1.png").read_bytes() \
            == (tmp_path / "r2.png").read_bytes()

    def test_corner_config_writes_mask_layer(self, runner, tmp_path):
        spec = self._setup(tmp_path, corner={"threshold": 0.5},
                           output={"image": "r.png", "layers_dir": "layers"})
        res = runner.invoke(main, ["render", "--spec", str(spec)])
        assert res.exit_code == 0, res.output
        assert (tmp_path / "layers" / "mask_pair0.png").exists()
        assert (tmp_path / "layers" / "mask_pair1.png").exists()
        assert (tmp_path / "layers" / "curves.png").exists()
        assert (tmp_path / "layers" / "density_pair0.png").exists()

    def test_missing_input_io_exit(self, runner, tmp_path):
        spec = write_spec(tmp_path / "s.json", layout=small_layout())
        res = runner.invoke(main, ["render", "--spec", str(spec)])
        assert res.exit_code == EXIT_IO

    def test_schema_error_exit(self, runner, tmp_path):
        spec = self._setup(tmp_path)
        doc = json.loads(spec.read_text())
        doc["not_a_key"] = 1
        spec.write_text(json.dumps(doc), encoding="utf-8")
        res = runner.invoke(main, ["render", "--spec", str(spec)])
        assert res.exit_code == EXIT_SCHEMA

    def test_seed_override_changes_subsample(self, runner, tmp_path):
        spec = self._setup(tmp_path, subsample={"rate": 0.3})
        runner.invoke(main, ["render", "--spec", str(spec),
                             "--seed", "1", "--out", str(tmp_path / "r1.png")])
        runner.invoke(main, ["render", "--spec", str(spec),
                             "--seed", "2", "--out", str(tmp_path / "r2.png")])
        assert (tmp_path / "r1.png").read_bytes() \
            != (tmp_path / "r2.png").read_bytes()


class TestBrush:
    def _setup(self, tmp_path, regions):
        rng = np.random.default_rng(1)
        rows = [f"{a},{b}" for a, b in rng.uniform(0, 1, (20, 2))]
        write_csv(tmp_path / "data.csv", rows)
        return write_spec(tmp_path / "s.json", layout=small_layout(),
                          regions=regions)

    def test_full_extent_selects_all(self, runner, tmp_path):
        spec = self._setup(tmp_path, [
            {"kind": "rect", "pair": 0, "u0": -0.5, "u1": 1.5,
             "v0": -1.0, "v1": 1.5}])
        res = runner.invoke(main, ["brush", "--spec", str(spec)])
        assert res.exit_code == 0, res.output
        sels = json.loads((tmp_path / "selections.json").read_text())
        assert sels[0]["record_ids"] == list(range(20))
        assert (tmp_path / "overlay.png").exists()

    def test_empty_space_rect(self, runner, tmp_path):
        spec = self._setup(tmp_path, [
            {"kind": "rect", "pair": 0, "u0": 0.4, "u1": 0.45,
             "v0": -0.99, "v1": -0.95}])
        res = runner.invoke(main, ["brush", "--spec", str(spec)])
        assert res.exit_code == 0, res.output
        sels = json.loads((tmp_path / "selections.json").read_text())
        assert sels[0]["record_ids"] == []

    def test_two_vertex_lasso_rejected(self, runner, tmp_path):
        spec = self._setup(tmp_path, [
            {"kind": "lasso", "pair": 0, "vertices": [[0, 0], [1, 1]]}])
        res = runner.invoke(main, ["brush", "--spec", str(spec)])
        assert res.exit_code == EXIT_SCHEMA

    def test_region_outside_extent_named(self, runner, tmp_path):
        spec = self._setup(tmp_path, [
            {"kind": "rect", "pair": 0, "u0": 1.4, "u1": 2.5,
             "v0": 0.0, "v1": 0.5}])
        res = runner.invoke(main, ["brush", "--spec", str(spec)])
        assert res.exit_code == EXIT_SCHEMA
        assert "region 0" in res.output

    def test_no_regions_is_schema_error(self, runner, tmp_path):
        spec = self._setup(tmp_path, [])
        res = runner.invoke(main, ["brush", "--spec", str(spec)])
        assert res.exit_code == EXIT_SCHEMA

    def test_report_figure(self, runner, tmp_path):
        spec = self._setup(tmp_path, [
            {"kind": "rect", "pair": 0, "u0": -0.5, "u1": 1.5,
             "v0": -1.0, "v1": 1.5}])
        res = runner.invoke(main, ["brush", "--spec", str(spec), "--report"])
        assert res.exit_code == 0, res.output
        assert (tmp_path / "selections.report.png").stat().st_size > 0
