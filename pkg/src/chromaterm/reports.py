"""Evaluation report output: delimited text, CSV tables and figures.

Reports are written as tab-delimited key/value lines plus CSV tables so
they diff cleanly as golden files; a matplotlib figure accompanies each
report directory for quick visual inspection.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .evaluation import ChartEvaluation, DatasetReport, MunsellChart, render_chart_segmentation
from .images import atomic_path
from .model import ColourModel

_PNG_METADATA = {"Software": "chromaterm"}


def fmt(value) -> str:
    """Stable cell formatting: floats at six decimals, the rest via str."""
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def report_lines(pairs) -> list[str]:
    return [f"{key}\t{fmt(value)}" for key, value in pairs]


def chart_report_pairs(ev: ChartEvaluation) -> list[tuple[str, object]]:
    pairs: list[tuple[str, object]] = [
        ("protocol", "munsell"),
        ("chips", len(ev.results)),
        ("labelled", ev.n_labelled),
        ("matched", ev.n_matched),
        ("accuracy", ev.accuracy),
    ]
    by_term: dict[str, list[bool]] = {}
    for r in ev.results:
        if r.expected is not None:
            by_term.setdefault(r.expected, []).append(bool(r.matched))
    for term, hits in sorted(by_term.items()):
        pairs.append((f"term_accuracy\t{term}", sum(hits) / len(hits)))
    return pairs


def dataset_report_pairs(report: DatasetReport) -> list[tuple[str, object]]:
    pairs: list[tuple[str, object]] = [
        ("protocol", "dataset"),
        ("images", len(report.per_image)),
        ("errors", len(report.errors)),
        ("mean_tpr", report.mean_tpr),
    ]
    for term, value in report.per_term().items():
        pairs.append((f"term_tpr\t{term}", value))
    return pairs


def confusion_rows(ev: ChartEvaluation, term_names) -> list[list[str]]:
    """Confusion matrix rows: reference terms down, predicted across."""
    counts = ev.confusion()
    rows = [["reference\\predicted", *term_names]]
    for expected in term_names:
        rows.append(
            [expected, *(str(counts.get((expected, p), 0)) for p in term_names)]
        )
    return rows


def per_image_rows(report: DatasetReport) -> list[list[str]]:
    rows = [["path", "term", "pixels", "tpr"]]
    for r in report.per_image:
        rows.append([str(r.path), r.term, str(r.n_pixels), fmt(r.ratio)])
    return rows


def write_lines(path, lines) -> None:
    with atomic_path(path) as tmp:
        tmp.write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def write_csv(path, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    with atomic_path(path) as tmp:
        tmp.write_text(buf.getvalue(), encoding="utf-8")


def _save_figure(fig, path) -> None:
    with atomic_path(path) as tmp:
        fig.savefig(tmp, format="png", dpi=120, metadata=_PNG_METADATA)
    plt.close(fig)


def chart_figure(model: ColourModel, chart: MunsellChart, path) -> None:
    """Chart segmentation rendered as a figure."""
    img = render_chart_segmentation(model, chart)
    fig, ax = plt.subplots(figsize=(8.2, 2.4))
    ax.imshow(img, interpolation="nearest")
    ax.set_xticks([])
    ax.set_yticks([])
    ax.set_title("chart segmentation")
    fig.tight_layout()
    _save_figure(fig, path)


def term_bar_figure(per_term: dict[str, float], path, *, ylabel: str) -> None:
    """Per-term score bars for a dataset or chart report."""
    terms = list(per_term)
    values = [per_term[t] for t in terms]
    fig, ax = plt.subplots(figsize=(max(4.0, 0.6 * len(terms) + 1.5), 3.2))
    ax.bar(np.arange(len(terms)), values, color="#4878a8")
    ax.set_xticks(np.arange(len(terms)))
    ax.set_xticklabels(terms, rotation=45, ha="right")
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel(ylabel)
    fig.tight_layout()
    _save_figure(fig, path)


def write_chart_report(
    ev: ChartEvaluation, model: ColourModel, chart: MunsellChart, out_dir
) -> list[Path]:
    """Write report.tsv, confusion.csv and figures for a chart run."""
    out_dir = Path(out_dir)
    report = out_dir / "report.tsv"
    confusion = out_dir / "confusion.csv"
    seg_fig = out_dir / "chart_naming.png"
    acc_fig = out_dir / "term_accuracy.png"
    write_lines(report, report_lines(chart_report_pairs(ev)))
    write_csv(confusion, confusion_rows(ev, model.term_names))
    chart_figure(model, chart, seg_fig)
    by_term: dict[str, list[bool]] = {}
    for r in ev.results:
        if r.expected is not None:
            by_term.setdefault(r.expected, []).append(bool(r.matched))
    term_bar_figure(
        {t: sum(v) / len(v) for t, v in sorted(by_term.items())},
        acc_fig,
        ylabel="chart accuracy",
    )
    return [report, confusion, seg_fig, acc_fig]


def write_dataset_report(report: DatasetReport, out_dir) -> list[Path]:
    """Write report.tsv, per_image.csv and a per-term figure."""
    out_dir = Path(out_dir)
    report_path = out_dir / "report.tsv"
    per_image = out_dir / "per_image.csv"
    fig = out_dir / "term_tpr.png"
    write_lines(report_path, report_lines(dataset_report_pairs(report)))
    write_csv(per_image, per_image_rows(report))
    term_bar_figure(report.per_term(), fig, ylabel="true positive ratio")
    return [report_path, per_image, fig]
