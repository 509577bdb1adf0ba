"""Command-line interface: fit, name, extend and eval workflows.

Exit codes: 0 success, 1 usage error, 2 data/format error, 3 numerical
failure. Commands never leave partial output files behind.
"""

from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path

from . import __version__
from .adaptation import AdaptationConfig, adapt_model
from .datasets import dataset_terms, discover_dataset, load_example
from .errors import DataError, NumericsError
from .evaluation import evaluate_chart, evaluate_dataset, load_chart, load_reference, render_chart_segmentation
from .fitting import FitConfig, LabelledExample, build_ground_truth, extend_model, fit_model
from .images import load_image, load_mask, save_grey_png, save_label_png, save_rgb_png
from .model import name_image
from .modelio import read_model, write_model
from .reports import (
    chart_report_pairs,
    dataset_report_pairs,
    fmt,
    report_lines,
    write_chart_report,
    write_dataset_report,
)
from .resources import bundled_chart_path, model_palette

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

_EPILOG = """exit codes:
  0  success
  1  usage error
  2  data or format error
  3  numerical failure
"""


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fit_config(args) -> FitConfig:
    return FitConfig(
        max_iterations=args.iterations,
        tolerance=args.tolerance,
        bin_size=args.bin_size,
        seed=args.seed,
    )


def _add_fit_flags(p) -> None:
    p.add_argument("--bin-size", type=float, default=1.0, help="Lab bin size (default 1.0)")
    p.add_argument("--iterations", type=int, default=1000, help="optimiser iteration cap")
    p.add_argument("--tolerance", type=float, default=1e-3, help="objective improvement tolerance")
    p.add_argument("--seed", type=int, default=0, help="seed for stochastic restarts (unused by the default optimiser)")


def cmd_fit(args) -> int:
    items = discover_dataset(args.gt_dir)
    examples = [load_example(item) for item in items]
    config = _fit_config(args)
    gt = build_ground_truth(examples, config.bin_size, term_names=dataset_terms(items))
    result = fit_model(gt.term_names, gt, config)
    write_model(result.model, args.output)
    for fit in result.fits:
        flag = "\tfallback" if fit.fell_back else ""
        print(f"objective\t{fit.term.name}\t{fmt(fit.final_objective)}{flag}")
    print(f"model\t{args.output}")
    return EXIT_OK


def _safe_filename(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", name)


def cmd_name(args) -> int:
    model = read_model(args.model)
    image = load_image(args.image)
    if args.adapt is not None:
        model = adapt_model(model, image, AdaptationConfig(gain=args.adapt))
    labels, maps = name_image(model, image, return_maps=True)
    save_label_png(labels, model_palette(model), args.output)
    print(f"labels\t{args.output}")
    if args.maps:
        maps_dir = Path(args.maps)
        for term_name, term_map in zip(model.term_names, maps):
            out = maps_dir / f"{_safe_filename(term_name)}.png"
            save_grey_png(term_map, out)
            print(f"map\t{term_name}\t{out}")
    return EXIT_OK


def cmd_extend(args) -> int:
    model = read_model(args.model)
    examples = []
    for img_path in args.images:
        img_path = Path(img_path)
        mask_path = img_path.parent / "masks" / img_path.name
        mask = load_mask(mask_path) if mask_path.is_file() else None
        examples.append(LabelledExample(load_image(img_path), args.name, mask))
    extended = extend_model(model, args.name, examples, _fit_config(args))
    write_model(extended, args.output)
    print(f"terms\t{len(extended.terms)}")
    print(f"model\t{args.output}")
    return EXIT_OK


def cmd_eval(args) -> int:
    model = read_model(args.model)
    if args.munsell is not None:
        if args.reference is None:
            raise DataError("--munsell requires --reference")
        chart_path = bundled_chart_path() if args.munsell == "bundled" else args.munsell
        chart = load_chart(chart_path)
        reference = load_reference(args.reference)
        ev = evaluate_chart(model, chart, reference)
        for line in report_lines(chart_report_pairs(ev)):
            print(line)
        if args.render:
            save_rgb_png(render_chart_segmentation(model, chart), args.render)
        if args.report_dir:
            for path in write_chart_report(ev, model, chart, args.report_dir):
                print(f"wrote\t{path}")
    else:
        items = discover_dataset(args.dataset)
        report = evaluate_dataset(model, items, allow_errors=args.allow_errors)
        for line in report_lines(dataset_report_pairs(report)):
            print(line)
        for path, message in report.errors:
            print(f"item_error\t{path}\t{message}")
        if args.report_dir:
            for path in write_dataset_report(report, args.report_dir):
                print(f"wrote\t{path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="chromaterm",
        description="Fuzzy colour naming with ellipsoidal categories in CIELAB.",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"chromaterm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="learn a colour model from a segmented dataset")
    p_fit.add_argument("gt_dir", help="dataset directory: <term>/<image> with optional <term>/masks/")
    p_fit.add_argument("-o", "--output", required=True, help="model file to write")
    _add_fit_flags(p_fit)
    p_fit.set_defaults(func=cmd_fit)

    p_name = sub.add_parser("name", help="name every pixel of an image")
    p_name.add_argument("model", help="model file")
    p_name.add_argument("image", help="input image (PNG or PPM)")
    p_name.add_argument("-o", "--output", required=True, help="indexed label PNG to write")
    p_name.add_argument("--maps", metavar="DIR", help="also write one greyscale membership map per term")
    p_name.add_argument(
        "--adapt",
        metavar="K",
        nargs="?",
        const=1.0,
        type=float,
        help="adapt achromatic ellipsoids to the image cast first (gain K, default 1.0)",
    )
    p_name.set_defaults(func=cmd_name)

    p_ext = sub.add_parser("extend", help="learn one extra colour term from example images")
    p_ext.add_argument("model", help="model file to extend")
    p_ext.add_argument("name", help="new term name")
    p_ext.add_argument("images", nargs="+", help="example images (masks under sibling masks/)")
    p_ext.add_argument("-o", "--output", required=True, help="extended model file to write")
    _add_fit_flags(p_ext)
    p_ext.set_defaults(func=cmd_extend)

    p_eval = sub.add_parser("eval", help="run an evaluation protocol")
    p_eval.add_argument("model", help="model file")
    target = p_eval.add_mutually_exclusive_group(required=True)
    target.add_argument(
        "--munsell",
        metavar="CHART_CSV",
        nargs="?",
        const="bundled",
        help="chart protocol; omit the value to use the bundled chart",
    )
    target.add_argument("--dataset", metavar="DIR", help="dataset protocol on a directory")
    p_eval.add_argument("--reference", metavar="REF_CSV", help="reference naming for the chart protocol")
    p_eval.add_argument("--render", metavar="PNG", help="write the chart segmentation image")
    p_eval.add_argument("--allow-errors", action="store_true", help="tolerate failing dataset items")
    p_eval.add_argument("--report-dir", metavar="DIR", help="write report files and figures here")
    p_eval.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (DataError, FileNotFoundError) as exc:
        print(f"chromaterm: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericsError as exc:
        print(f"chromaterm: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
