"""Analysis report: JSON summary, smoothed CSV and two SVG overlay charts.

Every writer is byte-deterministic for identical input.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field
from html import escape
from pathlib import Path

import numpy as np

from .errors import DegenerateRange, IoFailure
from .mic import MicResult
from .series import AlignedSeries, Series, min_max_normalize, write_smoothed
from .stats import SeriesStats

log = logging.getLogger(__name__)

REPORT_FILES = ("report.json", "aligned.csv", "fig_raw.svg", "fig_smoothed.svg")


@dataclass
class AnalysisReport:
    mic_result: MicResult
    series_stats: dict[str, SeriesStats]
    aligned: AlignedSeries
    avg_sentiment: Series
    avg_price: Series
    config: dict = field(default_factory=dict)
    inputs: dict = field(default_factory=dict)
    partial_outputs: bool = False

    def to_dict(self) -> dict:
        return {
            "mic": self.mic_result.to_dict(),
            "stats": {name: s.to_dict() for name, s in self.series_stats.items()},
            "config": self.config,
            "inputs": self.inputs,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"


# --- SVG -----------------------------------------------------------------

WIDTH, HEIGHT = 800, 360
LEFT, RIGHT, TOP, BOTTOM = 60, 20, 40, 50
COLORS = {"sentiment": "#1f77b4", "price": "#d62728"}


def _scaled(series: Series) -> np.ndarray:
    try:
        return min_max_normalize(series).values
    except DegenerateRange:
        return np.full(len(series), 0.5)


def _polyline(values: np.ndarray, color: str) -> str:
    plot_w = WIDTH - LEFT - RIGHT
    plot_h = HEIGHT - TOP - BOTTOM
    step = plot_w / max(len(values) - 1, 1)
    pts = " ".join(f"{LEFT + i * step:.2f},{TOP + (1.0 - v) * plot_h:.2f}" for i, v in enumerate(values))
    return f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>'


def render_overlay_svg(title: str, sentiment: Series, price: Series) -> str:
    """Both series min-max scaled onto one [0, 1] axis, x by observation index."""
    plot_h = HEIGHT - TOP - BOTTOM
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.2f}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
    ]
    for tick in (0.0, 0.5, 1.0):
        y = TOP + (1.0 - tick) * plot_h
        parts.append(f'<line x1="{LEFT}" y1="{y:.2f}" x2="{WIDTH - RIGHT}" y2="{y:.2f}" stroke="#dddddd"/>')
        parts.append(f'<text x="{LEFT - 8}" y="{y + 4:.2f}" text-anchor="end">{tick:.1f}</text>')
    parts.append(f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{TOP + plot_h}" stroke="black"/>')
    parts.append(f'<line x1="{LEFT}" y1="{TOP + plot_h}" x2="{WIDTH - RIGHT}" y2="{TOP + plot_h}" stroke="black"/>')
    if len(sentiment):
        base = TOP + plot_h + 18
        parts.append(f'<text x="{LEFT}" y="{base}" text-anchor="start">{sentiment.dates[0].isoformat()}</text>')
        parts.append(f'<text x="{WIDTH - RIGHT}" y="{base}" text-anchor="end">{sentiment.dates[-1].isoformat()}</text>')
    parts.append(_polyline(_scaled(sentiment), COLORS["sentiment"]))
    parts.append(_polyline(_scaled(price), COLORS["price"]))
    for i, (label, color) in enumerate((("Sentiment", COLORS["sentiment"]), ("Price", COLORS["price"]))):
        x = LEFT + 10 + i * 110
        y = HEIGHT - 10
        parts.append(f'<line x1="{x}" y1="{y - 4}" x2="{x + 20}" y2="{y - 4}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{x + 26}" y="{y}">{label}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _write(path: Path, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailure(path, exc.strerror or str(exc)) from exc


def emit_report(report: AnalysisReport, out_dir) -> list[Path]:
    """Write report.json, aligned.csv and the two charts into ``out_dir``.

    A chart failure is logged and flagged on ``report.partial_outputs``;
    the JSON and CSV are still written.
    """
    out_dir = Path(out_dir)
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise IoFailure(out_dir, exc.strerror or str(exc)) from exc
    written = []
    path = out_dir / "report.json"
    _write(path, report.to_json())
    written.append(path)

    path = out_dir / "aligned.csv"
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            write_smoothed(report.avg_sentiment, report.avg_price, fh)
    except OSError as exc:
        raise IoFailure(path, exc.strerror or str(exc)) from exc
    written.append(path)

    window = report.config.get("window", 30)
    charts = (
        ("fig_raw.svg", "Sentiment vs price (normalized)", report.aligned.sentiment_series(), report.aligned.price_series()),
        ("fig_smoothed.svg", f"{window}-day mean sentiment vs price (normalized)", report.avg_sentiment, report.avg_price),
    )
    for name, title, s, p in charts:
        try:
            svg = render_overlay_svg(title, s, p)
            _write(out_dir / name, svg)
            written.append(out_dir / name)
        except Exception as exc:  # noqa: BLE001 - charts are best effort
            log.warning("chart %s not written: %s", name, exc)
            report.partial_outputs = True
    return written
