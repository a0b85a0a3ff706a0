"""Price bars, dated series, normalization, smoothing and calendar alignment."""

from __future__ import annotations

import bisect
import csv
import math
from collections import OrderedDict
from dataclasses import dataclass
from datetime import date, datetime
from enum import Enum
from typing import IO, Iterable, Sequence

import numpy as np

from .corpus import _as_text
from .errors import DegenerateRange, EmptyInput, InsufficientOverlap, InvariantViolation, MalformedRow

PRICE_HEADER = ["date", "close", "open", "high", "low", "prev_close", "change", "pct_change", "volume", "turnover"]
PAIRS_HEADER = ["date", "sentiment", "price", "n_posts"]
ALIGNED_HEADER = ["date", "avg_sentiment", "avg_price"]

# close and prev_close are quoted to 2 decimals while change carries 4, so
# their difference can be off by up to one cent.
CHANGE_TOL = 0.01 + 1e-9


@dataclass(frozen=True)
class PriceBar:
    date: date
    close: float
    open: float
    high: float
    low: float
    prev_close: float
    change: float
    pct_change: float
    volume: float
    turnover: float

    def violations(self) -> list[str]:
        found = []
        if self.low > min(self.open, self.close):
            found.append("low above min(open, close)")
        if self.high < max(self.open, self.close):
            found.append("high below max(open, close)")
        if self.high < self.low:
            found.append("high < low")
        if abs(self.change - (self.close - self.prev_close)) > CHANGE_TOL:
            found.append("change != close - prev_close")
        if self.volume < 0:
            found.append("negative volume")
        if self.turnover < 0:
            found.append("negative turnover")
        return found


def load_price_bars(stream, source: str | None = None) -> list[PriceBar]:
    reader = csv.reader(_as_text(stream))
    header = next(reader, None)
    if header is None:
        raise EmptyInput(f"{source or 'prices input'}: no header")
    if [h.strip() for h in header] != PRICE_HEADER:
        raise MalformedRow(1, f"unexpected header {header!r}", source)
    bars = []
    for row in reader:
        line = reader.line_num
        if not row:
            continue
        if len(row) != len(PRICE_HEADER):
            raise MalformedRow(line, f"expected {len(PRICE_HEADER)} columns, got {len(row)}", source)
        try:
            day = datetime.strptime(row[0].strip(), "%Y%m%d").date()
        except ValueError:
            raise MalformedRow(line, f"bad date {row[0]!r}", source) from None
        try:
            nums = [float(v) for v in row[1:]]
        except ValueError:
            raise MalformedRow(line, "non-numeric field", source) from None
        if not all(math.isfinite(v) for v in nums):
            raise MalformedRow(line, "non-finite field", source)
        bar = PriceBar(day, *nums)
        bad = bar.violations()
        if bad:
            raise InvariantViolation(day, "; ".join(bad), source, line)
        bars.append(bar)
    if not bars:
        raise EmptyInput(f"{source or 'prices input'}: no data rows")
    bars.sort(key=lambda b: b.date)
    for a, b in zip(bars, bars[1:]):
        if a.date == b.date:
            raise InvariantViolation(b.date, "duplicate date", source)
    return bars


@dataclass(frozen=True)
class Series:
    name: str
    dates: tuple[date, ...]
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "dates", tuple(self.dates))
        if len(self.dates) != len(values):
            raise ValueError("dates and values differ in length")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise ValueError(f"{self.name}: dates must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise ValueError(f"{self.name}: non-finite values")

    def __len__(self):
        return len(self.dates)

    @classmethod
    def from_pairs(cls, name: str, pairs: Iterable[tuple[date, float]]) -> "Series":
        pairs = list(pairs)
        return cls(name, tuple(d for d, _ in pairs), np.array([v for _, v in pairs], dtype=float))


def close_series(bars: Sequence[PriceBar]) -> Series:
    return Series("price", tuple(b.date for b in bars), np.array([b.close for b in bars]))


def min_max_normalize(series: Series) -> Series:
    """Rescale onto [0, 1]: (x - min) / (max - min)."""
    if len(series) < 2:
        raise DegenerateRange(f"{series.name}: need at least 2 points")
    x = series.values
    lo, hi = float(x.min()), float(x.max())
    if hi == lo:
        raise DegenerateRange(f"{series.name}: constant series")
    out = (x - lo) / (hi - lo)
    return Series(series.name, series.dates, np.clip(out, 0.0, 1.0))


def rolling_mean(series: Series, window: int = 30, min_obs: int = 1) -> Series:
    """Trailing mean over the last ``window`` observations.

    Positions with fewer than ``min_obs`` observations are dropped. Each
    mean is clamped to its window's range so constant windows come back
    bit-exact.
    """
    if window < 1 or min_obs < 1 or min_obs > window:
        raise ValueError("require 1 <= min_obs <= window")
    x = series.values
    dates, values = [], []
    for i in range(len(x)):
        chunk = x[max(0, i - window + 1): i + 1]
        if len(chunk) < min_obs:
            continue
        mean = math.fsum(chunk) / len(chunk)
        values.append(min(max(mean, chunk.min()), chunk.max()))
        dates.append(series.dates[i])
    return Series(series.name, tuple(dates), np.array(values, dtype=float))


class AlignPolicy(str, Enum):
    NEXT_TRADING_DAY = "next"
    DROP = "drop"


@dataclass(frozen=True)
class AlignedSeries:
    dates: tuple[date, ...]
    sentiment: np.ndarray
    price: np.ndarray
    n_posts: tuple[int, ...] | None = None

    def __post_init__(self):
        if not (len(self.dates) == len(self.sentiment) == len(self.price)):
            raise ValueError("aligned columns differ in length")
        if len(self.dates) < 2:
            raise InsufficientOverlap("fewer than 2 aligned dates")

    def __len__(self):
        return len(self.dates)

    def sentiment_series(self) -> Series:
        return Series("sentiment", self.dates, self.sentiment)

    def price_series(self) -> Series:
        return Series("price", self.dates, self.price)


def align_series(sentiment: Series, price: Series, policy: AlignPolicy | str = AlignPolicy.NEXT_TRADING_DAY,
                 weights: Sequence[int] | None = None) -> AlignedSeries:
    """Pair sentiment with prices on the price calendar.

    ``next``: a sentiment date missing from the price calendar moves to the
    next trading date; several sources landing on one trading date are
    averaged, weighted by ``weights`` (post counts) when given. Dates after
    the last trading date are dropped. ``drop``: missing dates are discarded.
    """
    policy = AlignPolicy(policy)
    if len(sentiment) == 0 or len(price) == 0:
        raise InsufficientOverlap("empty input series")
    if weights is not None and len(weights) != len(sentiment):
        raise ValueError("weights must match sentiment length")
    calendar = price.dates
    price_at = dict(zip(calendar, price.values))
    buckets: OrderedDict[date, list[tuple[float, int]]] = OrderedDict()
    for i, (d, v) in enumerate(zip(sentiment.dates, sentiment.values)):
        w = 1 if weights is None else int(weights[i])
        if d in price_at:
            target = d
        elif policy is AlignPolicy.DROP:
            continue
        else:
            j = bisect.bisect_left(calendar, d)
            if j >= len(calendar):
                continue
            target = calendar[j]
        buckets.setdefault(target, []).append((float(v), w))

    dates = sorted(buckets)
    if len(dates) < 2:
        raise InsufficientOverlap(f"only {len(dates)} common date(s) after alignment ({policy.value})")
    sent_vals, counts = [], []
    for d in dates:
        items = buckets[d]
        total_w = sum(w for _, w in items)
        if len(items) == 1:
            sent_vals.append(items[0][0])
        else:
            vals = [v for v, _ in items]
            mean = math.fsum(v * w for v, w in items) / total_w
            sent_vals.append(min(max(mean, min(vals)), max(vals)))
        counts.append(total_w)
    return AlignedSeries(
        tuple(dates),
        np.array(sent_vals, dtype=float),
        np.array([price_at[d] for d in dates], dtype=float),
        tuple(counts) if weights is not None else None,
    )


def write_pairs(aligned: AlignedSeries, out: IO[str]) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(PAIRS_HEADER)
    counts = aligned.n_posts or ("",) * len(aligned)
    for d, s, p, c in zip(aligned.dates, aligned.sentiment, aligned.price, counts):
        w.writerow([d.isoformat(), repr(float(s)), repr(float(p)), c])


def read_pairs(stream, source: str | None = None) -> AlignedSeries:
    reader = csv.reader(_as_text(stream))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != PAIRS_HEADER:
        raise MalformedRow(1, f"expected header {','.join(PAIRS_HEADER)}", source)
    dates, sent, price, counts = [], [], [], []
    for row in reader:
        if not row:
            continue
        try:
            dates.append(datetime.strptime(row[0], "%Y-%m-%d").date())
            sent.append(float(row[1]))
            price.append(float(row[2]))
            counts.append(int(row[3]) if row[3] else None)
        except (ValueError, IndexError) as exc:
            raise MalformedRow(reader.line_num, str(exc), source) from None
    n_posts = tuple(counts) if counts and all(c is not None for c in counts) else None
    return AlignedSeries(tuple(dates), np.array(sent), np.array(price), n_posts)


def write_smoothed(sentiment: Series, price: Series, out: IO[str]) -> None:
    if sentiment.dates != price.dates:
        raise ValueError("smoothed series are not on the same dates")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(ALIGNED_HEADER)
    for d, s, p in zip(sentiment.dates, sentiment.values, price.values):
        w.writerow([d.isoformat(), repr(float(s)), repr(float(p))])
