import datetime as dt
import json
import re

import numpy as np
import pytest

from sentmic.errors import IoFailure
from sentmic.pipeline import analyze
from sentmic.report import REPORT_FILES, emit_report, render_overlay_svg
from sentmic.series import AlignedSeries, Series


def aligned(n, seed=0):
    rng = np.random.default_rng(seed)
    dates = tuple(dt.date(2021, 1, 4) + dt.timedelta(days=i) for i in range(n))
    return AlignedSeries(dates, rng.uniform(-1, 1, n), 100 + rng.normal(size=n).cumsum())


def test_same_report_twice_is_byte_identical(tmp_path):
    report = analyze(aligned(60), window=5)
    emit_report(report, tmp_path / "a")
    emit_report(report, tmp_path / "b")
    for name in REPORT_FILES:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_report_schema(tmp_path):
    report = analyze(aligned(40), inputs={"posts_sha256": "x", "prices_sha256": "y"})
    emit_report(report, tmp_path)
    data = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))
    assert set(data) == {"mic", "stats", "config", "inputs"}
    assert set(data["mic"]) >= {"mic", "best_x", "best_y", "n", "alpha", "matrix"}
    for s in data["stats"].values():
        assert set(s) == {"count", "mean", "sd", "min", "max", "skewness"}
    assert data["stats"]["sentiment"]["count"] == 40
    lines = (tmp_path / "aligned.csv").read_text().splitlines()
    assert lines[0] == "date,avg_sentiment,avg_price" and len(lines) == 41


def test_two_point_report(tmp_path):
    report = analyze(aligned(2))
    emit_report(report, tmp_path)
    svg = (tmp_path / "fig_raw.svg").read_text()
    polylines = re.findall(r'points="([^"]*)"', svg)
    assert len(polylines) == 2
    assert all(len(p.split()) == 2 for p in polylines)
    assert report.mic_result.degenerate and report.mic_result.mic == 0.0


def test_unwritable_dir(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(IoFailure) as err:
        emit_report(analyze(aligned(10)), blocker / "sub")
    assert "file" in str(err.value)


def test_constant_series_chart_is_flat():
    d = tuple(dt.date(2021, 1, 1) + dt.timedelta(days=i) for i in range(3))
    svg = render_overlay_svg("t", Series("s", d, np.zeros(3)), Series("p", d, np.arange(3.0)))
    assert "<svg" in svg and svg.endswith("</svg>\n")
