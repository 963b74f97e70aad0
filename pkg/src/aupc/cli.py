"""Command-line front end: synth, render, brush, serve.

Exit codes: 0 success, 2 spec/schema errors, 3 I/O errors, 4 numeric
failures.
"""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path

import click
import numpy as np

from . import analysis as an
from . import render as rn
from .data import DataError, write_csv
from .pipeline import load_normalized, scene_from_spec, write_scene
from .specfile import (SpecError, load_render_spec, load_synthetic_spec)
from .synthetic import default_synthetic_spec, generate_synthetic

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_IO = 3
EXIT_NUMERIC = 4

log = logging.getLogger("aupc")


class CliError(click.ClickException):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.exit_code = code


def _wrap_errors(fn):
    """Translate library exceptions into the documented exit codes."""
    def run(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (SpecError, rn.RenderError, an.AnalysisError, ValueError) as e:
            if isinstance(e, DataError):
                raise CliError(str(e), EXIT_IO) from e
            raise CliError(str(e), EXIT_SCHEMA) from e
        except ArithmeticError as e:
            raise CliError(str(e), EXIT_NUMERIC) from e
        except OSError as e:
            raise CliError(str(e), EXIT_IO) from e
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


@click.group()
@click.option("--verbose", is_flag=True, help="Enable debug logging.")
def main(verbose: bool):
    """Angle-uniform parallel coordinates toolkit."""
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")


@main.command()
@click.option("--spec", "spec_path", type=click.Path(), default=None,
              help="Synthetic spec JSON; omit for the default benchmark.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", type=click.Path(), default="synthetic.csv",
              show_default=True)
@click.option("--report", is_flag=True,
              help="Also write a scatter figure next to the CSV.")
@_wrap_errors
def synth(spec_path, seed, out_path, report):
    """Generate the synthetic benchmark CSV (plus labels column file)."""
    spec = (load_synthetic_spec(spec_path).to_spec() if spec_path
            else default_synthetic_spec())
    d, labels = generate_synthetic(spec, seed=seed)
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(d, out)
    labels_path = out.with_suffix(".labels.csv")
    labels_path.write_text("label\n" + "\n".join(str(int(v)) for v in labels)
                           + "\n", encoding="utf-8")
    log.debug("wrote %s (%d rows) and %s", out, d.row_count, labels_path)
    if report:
        _synth_report(d, labels, out.with_suffix(".report.png"))
    click.echo(str(out))


def _synth_report(d, labels, path: Path) -> None:
    """Scatter figure of the generated points, colored by segment label."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 6), dpi=100)
    for lab in np.unique(labels):
        m = labels == lab
        name = "anchors" if lab == -1 else f"segment {lab}"
        ax.scatter(d.values[m, 0], d.values[m, 1], s=3, label=name)
    ax.set_xlabel(d.names[0])
    ax.set_ylabel(d.names[1])
    ax.set_title("synthetic benchmark")
    ax.legend(fontsize=6, markerscale=2)
    fig.savefig(path)
    plt.close(fig)
    log.debug("wrote %s", path)


@main.command()
@click.option("--spec", "spec_path", type=click.Path(), required=True)
@click.option("--seed", type=int, default=None,
              help="Override the spec's subsample seed.")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Override the spec's output image path.")
@_wrap_errors
def render(spec_path, seed, out_path):
    """Render the composited plot (and optional per-layer PNGs)."""
    spec = load_render_spec(spec_path)
    if seed is not None:
        spec = spec.model_copy(update={
            "subsample": spec.subsample.model_copy(update={"seed": seed})})
    base = Path(spec_path).resolve().parent
    scene = scene_from_spec(spec, base)
    image = Path(out_path) if out_path else base / spec.output.image
    layers_dir = (base / spec.output.layers_dir
                  if spec.output.layers_dir else None)
    for p in write_scene(scene, image, layers_dir):
        click.echo(str(p))


@main.command()
@click.option("--spec", "spec_path", type=click.Path(), required=True)
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Override the spec's selections JSON path.")
@click.option("--report", is_flag=True,
              help="Also write a selection-size figure next to the JSON.")
@_wrap_errors
def brush(spec_path, out_path, report):
    """Evaluate the spec's brush regions; write selections and an overlay."""
    spec = load_render_spec(spec_path)
    if not spec.regions:
        raise SpecError(f"{spec_path}: no brush regions in spec")
    base = Path(spec_path).resolve().parent
    nd = load_normalized(spec, base)
    cfg = spec.transform.to_config()
    layout = spec.layout.to_layout(nd.pair_count)
    selections = []
    highlight = set()
    for k, region_model in enumerate(spec.regions):
        try:
            region = region_model.to_region()
            _check_extent(region, layout)
            sel = an.brush_select(nd, region, cfg)
        except (an.AnalysisError, SpecError) as e:
            raise SpecError(f"region {k}: {e}") from e
        selections.append(an.selection_to_json(sel))
        highlight.update(int(i) for i in sel.indices)
    sel_path = Path(out_path) if out_path else base / spec.output.selections
    sel_path.parent.mkdir(parents=True, exist_ok=True)
    sel_path.write_text(json.dumps(selections, indent=2) + "\n",
                        encoding="utf-8")
    overlay = rn.render_curve_layer(
        nd, sorted(highlight), layout, cfg,
        rn.CurveStyle(color=(0.95, 0.55, 0.05), alpha=1.0))
    rn.export_png(overlay, base / spec.output.overlay)
    if report:
        _brush_report(selections, sel_path.with_suffix(".report.png"))
    click.echo(str(sel_path))
    click.echo(str(base / spec.output.overlay))


def _check_extent(region, layout) -> None:
    if isinstance(region, an.Rect):
        pts = [(region.u0, region.v0), (region.u1, region.v1)]
    else:
        pts = region.vertices
    for u, v in pts:
        if not (-0.5 <= u <= 1.5 and layout.v_lo <= v <= layout.v_hi):
            raise SpecError(f"({u}, {v}) is outside the plotted extent")


def _brush_report(selections, path: Path) -> None:
    """Bar figure of how many records each brush region selected."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 3), dpi=100)
    ax.bar(range(len(selections)),
           [len(s["record_ids"]) for s in selections])
    ax.set_xlabel("region")
    ax.set_ylabel("selected records")
    ax.set_title("brush selection sizes")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    log.debug("wrote %s", path)


@main.command()
@click.option("--spec", "spec_path", type=click.Path(), required=True)
@click.option("--port", type=int, default=8400, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@_wrap_errors
def serve(spec_path, port, host):
    """Load the dataset snapshot and serve the HTTP API until terminated."""
    import uvicorn

    from .service import create_app

    spec = load_render_spec(spec_path)
    base = Path(spec_path).resolve().parent
    app = create_app(spec, base)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    sys.exit(main())
