"""Descriptive statistics in the layout of a corpus summary table."""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np
from scipy import stats as sps


class SeriesStats(NamedTuple):
    count: int
    mean: float
    sd: float
    min: float
    max: float
    skewness: float

    def to_dict(self) -> dict:
        return self._asdict()


def compute_series_stats(values: Sequence[float]) -> SeriesStats:
    """Sample mean, sample SD (n-1), adjusted Fisher-Pearson skewness, extremes.

    SD is 0 below two observations and skewness 0 below three or for a
    constant sample.
    """
    x = np.asarray(values, dtype=float)
    n = len(x)
    if n < 1:
        raise ValueError("need at least one value")
    mean = math.fsum(x) / n
    sd = float(np.std(x, ddof=1)) if n >= 2 else 0.0
    if n >= 3 and np.ptp(x) > 0:
        skew = float(sps.skew(x, bias=False))
    else:
        skew = 0.0
    return SeriesStats(n, mean, sd, float(x.min()), float(x.max()), skew)
