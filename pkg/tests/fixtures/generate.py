"""Regenerate the bundled synthetic fixtures.

    python tests/fixtures/generate.py

``small/``: 200 trading days, lexicon scorer; sentiment follows the price
three trading days later, plus noise, and the raw dump carries markup,
emoji, duplicates and over-long messages for the corpus filters to remove.

``long_run/``: 487 trading days, externally supplied class
probabilities; the daily sentiment target is the normalized 30-day mean
price plus AR(1) noise; seed, amplitude and persistence were tuned
once so the pipeline MIC lands near 0.4.
"""

from __future__ import annotations

import csv
import datetime as dt
from pathlib import Path

import numpy as np

HERE = Path(__file__).parent

BULL = ["大涨", "牛市", "抄底", "利好", "反弹", "涨停", "加仓"]
BEAR = ["大跌", "熊市", "割肉", "利空", "跳水", "跌停", "清仓"]
FILLER = ["今天", "大盘", "指数", "感觉", "明天", "还是", "深成指", "散户", "机构", "行情", "看看", "周末"]

LONG_RUN_NOISE = 1.5
LONG_RUN_PHI = 0.9


def trading_days(start: dt.date, count: int) -> list[dt.date]:
    days, d = [], start
    while len(days) < count:
        if d.weekday() < 5:
            days.append(d)
        d += dt.timedelta(days=1)
    return days


def price_bars(rng, days, start_price=10000.0):
    rows = []
    prev = round(start_price, 2)
    for d in days:
        close = round(prev * float(np.exp(rng.normal(0.0003, 0.013))), 2)
        open_ = round(prev * float(np.exp(rng.normal(0, 0.004))), 2)
        high = round(max(open_, close) * (1 + abs(float(rng.normal(0, 0.004)))), 2)
        low = round(min(open_, close) * (1 - abs(float(rng.normal(0, 0.004)))), 2)
        change = round(close - prev, 4)
        pct = round(change / prev * 100, 4)
        volume = f"{float(rng.uniform(3.0, 4.0)):.2f}E+08"
        turnover = f"{float(rng.uniform(4.0, 5.5)):.2f}E+08"
        rows.append([d.strftime("%Y%m%d"), f"{close:.2f}", f"{open_:.2f}", f"{high:.2f}", f"{low:.2f}",
                     f"{prev:.2f}", f"{change:.4f}", f"{pct:.4f}", volume, turnover])
        prev = close
    return rows


def write_csv(path: Path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


PRICE_HEADER = ["date", "close", "open", "high", "low", "prev_close", "change", "pct_change", "volume", "turnover"]
POSTS_HEADER = ["date", "text", "reads", "replies", "url"]


def _norm(x):
    x = np.asarray(x, dtype=float)
    return (x - x.min()) / (x.max() - x.min())


def _calendar_target(days, values):
    """Spread a trading-day signal over every calendar day (weekends take the next trading day's value)."""
    out = {}
    d = days[0] - dt.timedelta(days=2)
    j = 0
    while d <= days[-1]:
        while days[j] < d:
            j += 1
        out[d] = float(values[j])
        d += dt.timedelta(days=1)
    return out


def _post_text(rng, lean: float) -> str:
    n_terms = int(rng.integers(1, 4))
    words = list(rng.choice(FILLER, size=int(rng.integers(2, 5))))
    for _ in range(n_terms):
        words.append(str(rng.choice(BULL if rng.random() < lean else BEAR)))
    rng.shuffle(words)
    return "".join(words)


def make_small(out: Path, seed: int = 20200909):
    rng = np.random.default_rng(seed)
    days = trading_days(dt.date(2020, 3, 2), 200)
    prices = price_bars(rng, days)
    closes = np.array([float(r[1]) for r in prices])
    lag = 3
    lagged = np.r_[np.full(lag, closes[0]), closes[:-lag]]
    signal = np.clip(0.15 + 0.7 * _norm(lagged) + rng.normal(0, 0.12, len(days)), 0.02, 0.98)
    target = _calendar_target(days, signal)

    rows = []
    for d, lean in target.items():
        for k in range(int(rng.integers(3, 7))):
            text = _post_text(rng, lean)
            reads = int(rng.integers(20, 2000))
            url = f"http://guba.example/news,zssz399001,{d:%Y%m%d}{k:02d}.html"
            if rng.random() < 0.08:
                text = f"<b>{text}</b>🚀"
            rows.append([d.isoformat(), text, reads, int(rng.integers(0, 30)), url])
            if rng.random() < 0.05:  # reposted copy with markup noise
                rows.append([d.isoformat(), f" {text}<br> ", reads // 2, 0, url])
        if rng.random() < 0.1:  # pasted news article, too long to keep
            rows.append([d.isoformat(), "转载" + "深证成指收盘上涨" * 20, 5000, 3, ""])
    write_csv(out / "posts.csv", POSTS_HEADER, rows)
    write_csv(out / "prices.csv", PRICE_HEADER, prices)
    with open(out / "lexicon.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write("# neutral_bias = 0.5\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["term", "weight"])
        for t in BULL:
            w.writerow([t, "1.0"])
        for t in BEAR:
            w.writerow([t, "-1.0"])
        w.writerow(["涨停板", "2.0"])
    (out / "pipeline.cfg").write_text(
        "# small synthetic fixture\n"
        "posts_path = posts.csv\n"
        "prices_path = prices.csv\n"
        "lexicon_path = lexicon.csv\n"
        "output_dir = out\n"
        "window = 30\n"
        "min_obs = 1\n"
        "align_policy = next\n"
        "mic.alpha = 0.6\n",
        encoding="utf-8",
    )


def make_long_run(out: Path, seed: int = 20191241, noise: float = LONG_RUN_NOISE, phi: float = LONG_RUN_PHI):
    rng = np.random.default_rng(seed)
    days = trading_days(dt.date(2019, 1, 2), 487)
    prices = price_bars(rng, days)
    closes = np.array([float(r[1]) for r in prices])
    smooth = np.array([closes[max(0, i - 29): i + 1].mean() for i in range(len(closes))])
    persistent = np.zeros(len(days))
    for i in range(1, len(days)):
        persistent[i] = phi * persistent[i - 1] + rng.normal(0, 1)
    persistent /= persistent.std()
    signal = _norm(smooth) + noise * persistent
    signal = 2 * _norm(signal) - 1  # daily sentiment target in [-1, 1]
    target = _calendar_target(days, signal)

    posts, probs = [], []
    ordinal = 0
    for d, s in target.items():
        for k in range(3):
            ordinal += 1
            v = float(np.clip(s + rng.normal(0, 0.05), -0.98, 0.98))
            p_neu = float(rng.uniform(0.0, 0.02))
            p_pos = (1 - p_neu) * (1 + v) / 2
            p_neg = 1 - p_neu - p_pos
            posts.append([d.isoformat(), f"{_post_text(rng, (1 + v) / 2)}{ordinal}", int(rng.integers(10, 900)),
                          int(rng.integers(0, 9)), ""])
            probs.append([str(ordinal), f"{p_neg:.9f}", f"{p_neu:.9f}", f"{p_pos:.9f}"])
    write_csv(out / "posts.csv", POSTS_HEADER, posts)
    write_csv(out / "prices.csv", PRICE_HEADER, prices)
    write_csv(out / "probs.csv", ["post_id", "p_neg", "p_neu", "p_pos"], probs)
    (out / "pipeline.cfg").write_text(
        "# 487 trading days, externally supplied class probabilities\n"
        "posts_path = posts.csv\n"
        "prices_path = prices.csv\n"
        "probs_path = probs.csv\n"
        "output_dir = out\n"
        "window = 30\n"
        "min_obs = 1\n"
        "align_policy = next\n",
        encoding="utf-8",
    )


def make_corpus_rules(out: Path):
    """Raw posts plus the exact cleaned set they must reduce to.

    The expected file is assembled from the rules directly (it never calls
    the library): dedup on (date, cleaned text) keeping the first copy, then
    strictly fewer than 150 characters, then per date the 50 most-read with
    input order breaking ties.
    """
    day1, day2 = "2020-09-09", "2020-09-10"
    raw = []  # (date, text, reads, keep?) in input order
    # day 1: 60 distinct short posts, reads 1..60, listed in a scrambled order
    order = [(i * 37) % 60 for i in range(60)]
    for i in order:
        raw.append([day1, f"帖子{i:02d}今天", i + 1])
    # reposts of the top two posts, more-read than anything else; dedup must drop them
    raw.append([day1, "<p>帖子59今天</p>", 500])
    raw.append([day1, " 帖子58今天🚀 ", 400])
    # exactly 150 characters, very popular, dropped by the strict bound; 149 is kept
    raw.append([day1, "长" * 150, 1000])
    raw.append([day1, "短" * 149, 999])
    # day 2: 55 posts all read 7 times; the first 50 in input order survive
    for i in range(55):
        raw.append([day2, f"平手{i:02d}", 7])
    # a same-text post on another date is not a duplicate
    raw.append([day2, "帖子59今天", 1])

    rows = [[d, t, r, 0, ""] for d, t, r in raw]
    write_csv(out / "posts.csv", POSTS_HEADER, rows)

    # expected, built by hand from the construction above
    ordinal = {(d, t): k for k, (d, t, _) in enumerate(raw, 1)}
    day1_pool = [(day1, "短" * 149, 999)] + [(day1, f"帖子{i:02d}今天", i + 1) for i in range(59, -1, -1)]
    expected = day1_pool[:50]
    expected += [(day2, f"平手{i:02d}", 7) for i in range(50)]
    expected_rows = [[str(ordinal[(d, t)]), d, t, r, 0, ""] for d, t, r in expected]
    # the day-2 copy of 帖子59 is read once, below every 7-read post
    write_csv(out / "expected_clean.csv", ["post_id"] + POSTS_HEADER, expected_rows)


if __name__ == "__main__":
    make_small(HERE / "small")
    make_long_run(HERE / "long_run")
    make_corpus_rules(HERE / "corpus_rules")
