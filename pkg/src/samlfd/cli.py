"""Command-line entry points.

Subcommands::

    samlfd reproduce   best reproduction at one boundary point
    samlfd region      similarity-region session over a meshgrid (+ heatmap)
    samlfd bias-study  metric-bias table over a shape corpus (+ winner maps)
    samlfd serve       local HTTP service backing the browser UI

Exit codes: 0 on success, 2 on validation errors, 3 on computation failures.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bias import (
    DEFAULT_TIE_MARGIN,
    bias_table_csv,
    bias_table_markdown,
    run_bias_suite,
)
from .datasets import ingest_corpus_csv, load_trajectory, save_trajectory
from .engine import (
    DEFAULT_EXTENT_FRACTION,
    DEFAULT_RESOLUTION,
    best_reproduction,
    build_meshgrid,
    canonical_session_json,
    default_extent,
    evaluate_grid,
    session_document,
)
from .errors import ComputationError, SamlfdError, ValidationError
from .metrics import METRIC_IDS, coerce_metric
from .representations import DMPConfig, REPRESENTATION_ORDER, RepresentationConfig
from .shapes import BUNDLED_SHAPE_NAMES, bundled_shape, bundled_shapes
from .trajectory import DEFAULT_RESAMPLE_LEN, DEFAULT_SMOOTH_WINDOW, preprocess

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_COMPUTATION = 3

DEFAULT_PORT = 8453


def _parse_point(text: str) -> np.ndarray:
    try:
        values = [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise ValidationError(f"could not parse point {text!r}; expected e.g. '0.1,0.2'") from None
    if not values:
        raise ValidationError(f"empty point {text!r}")
    return np.array(values)


def _add_demo_args(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--demo", help="trajectory file (.json or .csv)")
    source.add_argument("--bundled", choices=BUNDLED_SHAPE_NAMES, help="bundled demonstration")
    parser.add_argument("--no-preprocess", action="store_true", help="skip smoothing/resampling on load")
    parser.add_argument("--smooth-window", type=int, default=DEFAULT_SMOOTH_WINDOW)
    parser.add_argument("--resample-len", type=int, default=DEFAULT_RESAMPLE_LEN)


def _add_rep_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--reps",
        default=",".join(REPRESENTATION_ORDER),
        help=f"comma-separated representation labels (default: {','.join(REPRESENTATION_ORDER)})",
    )
    parser.add_argument("--metric", default="frechet", help=f"one of: {', '.join(METRIC_IDS)}")
    parser.add_argument("--ja-lambda", type=float, default=20.0, help="jerk-accuracy trade-off weight")
    parser.add_argument("--dmp-stiffness", type=float, default=100.0)
    parser.add_argument("--dmp-decay", type=float, default=6.0, help="canonical phase decay rate")
    parser.add_argument("--dmp-basis", type=int, default=50)


def _load_demo(args):
    if args.bundled:
        return bundled_shape(args.bundled), args.bundled
    demo = load_trajectory(args.demo)
    if not args.no_preprocess:
        demo = preprocess(demo, args.smooth_window, args.resample_len)
    return demo, Path(args.demo).stem


def _rep_config(args) -> RepresentationConfig:
    return RepresentationConfig(
        ja_accuracy_weight=args.ja_lambda,
        dmp=DMPConfig(
            stiffness=args.dmp_stiffness,
            canonical_decay=args.dmp_decay,
            num_basis=args.dmp_basis,
        ),
    )


def _labels(args) -> list[str]:
    return [label.strip() for label in args.reps.split(",") if label.strip()]


def _cmd_reproduce(args) -> int:
    if args.init is None and args.goal is None:
        raise ValidationError("provide --init and/or --goal")
    demo, name = _load_demo(args)
    metric = coerce_metric(args.metric)
    if args.init is not None and args.goal is not None:
        raise ValidationError("pinning both endpoints at once is not supported here; pick one")
    point = _parse_point(args.init if args.init is not None else args.goal)
    kind = "initial" if args.init is not None else "final"
    result = best_reproduction(
        demo, point, kind, _labels(args), metric, config=_rep_config(args)
    )
    out = Path(args.out)
    save_trajectory(result.trajectory, out, name=f"{name}-reproduction", provenance=f"samlfd reproduce ({result.representation})")
    print(
        f"winner: {result.representation}  similarity: {result.similarity:.4f}  "
        f"raw {metric.value} distance: {result.raw_distance:.6g}"
    )
    print(f"wrote {out}")
    if args.plot:
        from .plotting import save_reproduction_plot

        save_reproduction_plot(demo, result, args.plot)
        print(f"wrote {args.plot}")
    return EXIT_OK


def _cmd_region(args) -> int:
    demo, name = _load_demo(args)
    metric = coerce_metric(args.metric)
    center = _parse_point(args.point) if args.point else (demo.initial if args.kind == "initial" else demo.final)
    extent = args.extent if args.extent is not None else default_extent(demo, args.extent_fraction)
    grid = build_meshgrid(center, extent, args.resolution)
    smap = evaluate_grid(
        demo,
        grid,
        _labels(args),
        metric,
        args.kind,
        config=_rep_config(args),
        workers=args.workers,
    )
    doc = session_document(demo, smap, demo_name=name, robust_threshold=args.robust)
    out = Path(args.out)
    out.write_text(canonical_session_json(doc))
    print(f"wrote {out} ({len(smap.labels)} representations x {len(grid.points)} points)")
    if args.heatmap:
        from .plotting import save_region_heatmap

        save_region_heatmap(smap, demo, args.heatmap, robust_threshold=args.robust)
        print(f"wrote {args.heatmap}")
    return EXIT_OK


def _cmd_bias_study(args) -> int:
    if args.bundled:
        corpus = bundled_shapes()
    else:
        corpus = ingest_corpus_csv(args.corpus)
        if not corpus:
            raise ValidationError(f"no usable shapes in {args.corpus}")
    metric_names = [m.strip() for m in (args.metrics or "").split(",") if m.strip()]
    metrics = [coerce_metric(m) for m in metric_names] if metric_names else list(METRIC_IDS)
    records = run_bias_suite(
        corpus,
        metrics,
        grid_resolution=args.resolution,
        tie_margin=args.tie_margin,
        extent_fraction=args.extent_fraction,
        config=_rep_config(args),
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "bias_table.csv").write_text(bias_table_csv(records))
    (out_dir / "bias_table.md").write_text(bias_table_markdown(records))
    if not args.no_figures:
        from .plotting import save_bias_maps

        for record in records:
            save_bias_maps(record, corpus, out_dir / f"bias_{record.metric.value}.png", args.resolution)
    print(bias_table_markdown(records))
    print(f"wrote reports to {out_dir}/")
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(persist_dir=args.persist)
    port = args.port if args.port is not None else int(os.environ.get("SAMLFD_PORT", DEFAULT_PORT))
    uvicorn.run(app, host=args.host, port=port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="samlfd", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"samlfd {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_repro = sub.add_parser("reproduce", help="best reproduction at one boundary point")
    _add_demo_args(p_repro)
    _add_rep_args(p_repro)
    p_repro.add_argument("--init", help="initial point, e.g. '0.1,0.2'")
    p_repro.add_argument("--goal", help="final point, e.g. '1.0,0.0'")
    p_repro.add_argument("--out", default="reproduction.json")
    p_repro.add_argument("--plot", help="optional overlay figure (PNG)")
    p_repro.set_defaults(func=_cmd_reproduce)

    p_region = sub.add_parser("region", help="similarity-region session over a meshgrid")
    _add_demo_args(p_region)
    _add_rep_args(p_region)
    p_region.add_argument("--kind", choices=("initial", "final"), default="initial")
    p_region.add_argument("--point", help="grid center (defaults to the demo's endpoint of --kind)")
    p_region.add_argument("--resolution", type=int, default=DEFAULT_RESOLUTION)
    p_region.add_argument("--extent", type=float, help="grid half-width (workspace units)")
    p_region.add_argument(
        "--extent-fraction",
        type=float,
        default=DEFAULT_EXTENT_FRACTION,
        help="half-width as a fraction of the demo bounding-box diagonal",
    )
    p_region.add_argument("--robust", type=float, help="similarity threshold for the robust mask")
    p_region.add_argument("--workers", type=int, help="parallel grid evaluation workers")
    p_region.add_argument("--out", default="session.json")
    p_region.add_argument("--heatmap", help="optional region heatmap (PNG)")
    p_region.set_defaults(func=_cmd_region)

    p_bias = sub.add_parser("bias-study", help="metric-bias table over a shape corpus")
    source = p_bias.add_mutually_exclusive_group(required=True)
    source.add_argument("--corpus", help="directory of per-shape CSV files")
    source.add_argument("--bundled", action="store_true", help="use the bundled shapes")
    p_bias.add_argument("--metrics", help="comma-separated metric ids (default: all)")
    p_bias.add_argument("--resolution", type=int, default=DEFAULT_RESOLUTION)
    p_bias.add_argument("--tie-margin", type=float, default=DEFAULT_TIE_MARGIN)
    p_bias.add_argument("--extent-fraction", type=float, default=DEFAULT_EXTENT_FRACTION)
    p_bias.add_argument("--ja-lambda", type=float, default=20.0)
    p_bias.add_argument("--dmp-stiffness", type=float, default=100.0)
    p_bias.add_argument("--dmp-decay", type=float, default=6.0)
    p_bias.add_argument("--dmp-basis", type=int, default=50)
    p_bias.add_argument("--out-dir", default="reports")
    p_bias.add_argument("--no-figures", action="store_true")
    p_bias.set_defaults(func=_cmd_bias_study)

    p_serve = sub.add_parser("serve", help="run the local HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, help=f"default: $SAMLFD_PORT or {DEFAULT_PORT}")
    p_serve.add_argument("--persist", help="directory to flush session JSON into")
    p_serve.set_defaults(func=_cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ComputationError as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTATION
    except SamlfdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
