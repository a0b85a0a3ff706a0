"""Maximal information coefficient by grid-partition MI maximization.

For every grid shape (x columns, y rows) with ``x * y <= B(n)`` the best
achievable mutual information is approximated by fixing one axis to an
equipartition and optimizing the other with a dynamic program over clumped
candidate boundaries. Both orientations are run and the larger value kept,
so the statistic is exactly symmetric in its arguments.

All work happens on dense value ranks, which makes the result invariant to
strictly increasing transforms of either variable. Tied values always
share a cell.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import DegenerateAxis, InvalidPoints, LengthMismatch
from . import _backend

LN2 = math.log(2.0)
NORM_TOL = 1e-12


@dataclass(frozen=True)
class MicConfig:
    alpha: float = 0.6
    min_b: int = 4
    clumping_factor: int = 15

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must be in (0, 1]")
        if self.min_b < 4:
            raise ValueError("min_b must be >= 4")
        if self.clumping_factor < 1:
            raise ValueError("clumping_factor must be >= 1")


@dataclass(frozen=True)
class PointSet:
    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float).ravel()
        ys = np.asarray(self.ys, dtype=float).ravel()
        if len(xs) != len(ys):
            raise LengthMismatch(f"x has {len(xs)} values, y has {len(ys)}")
        if len(xs) < 4:
            raise InvalidPoints(f"need at least 4 points, got {len(xs)}")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
            raise InvalidPoints("coordinates must be finite")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @property
    def n(self) -> int:
        return len(self.xs)

    @classmethod
    def from_pairs(cls, pairs) -> "PointSet":
        arr = np.asarray(pairs, dtype=float).reshape(-1, 2)
        return cls(arr[:, 0], arr[:, 1])


@dataclass(frozen=True)
class GridHistogram:
    """Counts of points per (column, row) cell.

    Boundaries are inclusive upper edges: a value ``v`` falls in the first
    group whose edge is ``>= v``; values above every edge go to the last group.
    """

    x_boundaries: np.ndarray
    y_boundaries: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 2 or counts.shape[0] < 2 or counts.shape[1] < 2:
            raise ValueError("grid needs at least 2 columns and 2 rows")
        if np.any(counts < 0):
            raise ValueError("negative cell count")
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_points(cls, points: PointSet, x_boundaries, y_boundaries) -> "GridHistogram":
        xb = np.asarray(x_boundaries, dtype=float)
        yb = np.asarray(y_boundaries, dtype=float)
        cols = np.searchsorted(xb, points.xs, side="left")
        rows = np.searchsorted(yb, points.ys, side="left")
        counts = np.zeros((len(xb) + 1, len(yb) + 1), dtype=np.int64)
        np.add.at(counts, (cols, rows), 1)
        return cls(xb, yb, counts)


@dataclass(frozen=True)
class CharacteristicMatrix:
    values: dict = field(default_factory=dict)  # (x, y) -> normalized MI

    def __getitem__(self, key):
        return self.values[key]

    def max_cell(self) -> tuple[float, int, int]:
        """Largest entry and the lexicographically smallest cell attaining it."""
        top = max(self.values.values())
        x, y = min(k for k, v in self.values.items() if v == top)
        return top, x, y

    def as_rows(self) -> list[list]:
        return [[x, y, m] for (x, y), m in sorted(self.values.items())]


@dataclass(frozen=True)
class MicResult:
    mic: float
    best_x: int
    best_y: int
    matrix: CharacteristicMatrix
    n: int
    alpha: float
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "mic": self.mic,
            "best_x": self.best_x,
            "best_y": self.best_y,
            "n": self.n,
            "alpha": self.alpha,
            "degenerate": self.degenerate,
            "matrix": self.matrix.as_rows(),
        }


def grid_limit(n: int, cfg: MicConfig = MicConfig()) -> int:
    """B(n) = max(floor(n ** alpha), min_b)."""
    # n**alpha lands a hair below exact integers (32**0.6 -> 7.999...)
    return max(int(math.floor(n ** cfg.alpha + 1e-9)), cfg.min_b)


def mutual_information(grid) -> float:
    """Empirical mutual information in bits of a count matrix or GridHistogram."""
    counts = np.asarray(grid.counts if isinstance(grid, GridHistogram) else grid, dtype=np.int64)
    n = int(counts.sum())
    if n < 1:
        raise ValueError("empty grid")
    rows = counts.sum(axis=1)
    cols = counts.sum(axis=0)
    terms = []
    for (i, j), c in np.ndenumerate(counts):
        if c:
            terms.append(c / n * math.log2(c * n / (rows[i] * cols[j])))
    return max(0.0, math.fsum(terms))


# --- equipartitions ---------------------------------------------------------

def _dense_ranks(values: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    uniq, inverse, sizes = np.unique(values, return_inverse=True, return_counts=True)
    return uniq, inverse.astype(np.int64), sizes.astype(np.int64)


def _greedy_groups(sizes: np.ndarray, k: int) -> np.ndarray:
    """Assign consecutive units (tie groups or clumps) of the given masses to
    at most ``k`` groups of near-equal total mass. Returns a group id per unit.

    A unit joins the open group unless that moves the group's mass further
    from the current target than closing it would; the target is then reset
    to the remaining mass over the remaining groups.
    """
    return _backend.greedy_groups(sizes, k)


def equipartition_axis(values: Sequence[float], k: int) -> np.ndarray:
    """Upper edges splitting ``values`` into at most ``k`` near-equal-mass groups.

    Equal values are never separated, so fewer than ``k`` groups come back
    when ties force it. The returned array has (groups - 1) entries.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("values must be nonempty")
    uniq, _, sizes = _dense_ranks(values)
    groups = _greedy_groups(sizes, k)
    last_of_group = np.flatnonzero(np.r_[groups[1:] != groups[:-1], True])
    return uniq[last_of_group[:-1]]


def _xlogx_table(n: int) -> np.ndarray:
    i = np.arange(n + 1, dtype=np.float64)
    out = np.zeros(n + 1)
    out[1:] = i[1:] * np.log(i[1:])
    return out


def _grid_mi(col_labels: np.ndarray, row_labels: np.ndarray, xlogx: np.ndarray) -> float:
    """MI in bits of the grid given per-point labels.

    A single correctly rounded sum over every term, so the value does not
    depend on which axis is called the column axis.
    """
    n = len(col_labels)
    nc = int(col_labels.max()) + 1
    nr = int(row_labels.max()) + 1
    counts = np.bincount(col_labels * nr + row_labels, minlength=nc * nr)
    table = counts.reshape(nc, nr)
    terms = list(xlogx[counts])
    terms += list(-xlogx[table.sum(axis=1)])
    terms += list(-xlogx[table.sum(axis=0)])
    terms.append(xlogx[n])
    return max(0.0, math.fsum(terms) / (n * LN2))


def _clumps(opt_rank: np.ndarray, n_units: int, fixed: np.ndarray, q: int) -> np.ndarray:
    """Per-row counts of the lossless clumps along the optimized axis.

    Consecutive tie groups whose points all sit in the same fixed row merge:
    a boundary inside such a run can always be moved to one of its ends
    without lowering MI, so only run ends are useful candidates.
    """
    table = np.bincount(opt_rank * q + fixed, minlength=n_units * q).reshape(n_units, q)
    occupied = table > 0
    pure = np.where(occupied.sum(axis=1) == 1, occupied.argmax(axis=1), -1)
    starts = np.flatnonzero(np.r_[True, (pure[1:] != pure[:-1]) | (pure[1:] == -1)])
    return np.add.reduceat(table, starts, axis=0)


def _optimize_axis(opt_rank, n_units, fixed, max_cols, clumping_factor, xlogx):
    """Best MI (bits) for at most l columns along ``opt_rank``, rows fixed.

    Returns ``(mi, superclumped)`` where ``mi[l]`` is defined for 1 <= l <= max_cols.
    """
    n = len(opt_rank)
    q = int(fixed.max()) + 1
    clumps = _clumps(opt_rank, n_units, fixed, q)
    cap = clumping_factor * max_cols
    superclumped = len(clumps) > cap
    if superclumped:
        grp = _greedy_groups(clumps.sum(axis=1), cap)
        clumps = np.add.reduceat(clumps, np.flatnonzero(np.r_[True, grp[1:] != grp[:-1]]), axis=0)
    cum = np.zeros((len(clumps) + 1, q), dtype=np.int64)
    np.cumsum(clumps, axis=0, out=cum[1:])
    best = _backend.dp_best(cum, xlogx, max_cols)
    row_totals = cum[-1]
    base = xlogx[n] - math.fsum(xlogx[row_totals])
    mi = (np.asarray(best) + base) / (n * LN2)
    mi[1:] = np.maximum(mi[1:], 0.0)
    return mi, superclumped


def optimize_columns(points: PointSet, row_boundaries, max_cols: int,
                     cfg: MicConfig = MicConfig()) -> list[tuple[int, float]]:
    """For l = 2..max_cols, the best MI over column partitions with rows fixed
    by ``row_boundaries`` (inclusive upper edges on y)."""
    if max_cols < 2:
        raise ValueError("max_cols must be >= 2")
    _, xr, xsizes = _dense_ranks(points.xs)
    rows = np.searchsorted(np.asarray(row_boundaries, dtype=float), points.ys, side="left")
    _, rows = np.unique(rows, return_inverse=True)  # drop empty rows
    rows = rows.astype(np.int64)
    xlogx = _xlogx_table(points.n)
    mi, superclumped = _optimize_axis(xr, len(xsizes), rows, max_cols, cfg.clumping_factor, xlogx)
    out = []
    for l in range(2, max_cols + 1):
        value = float(mi[l])
        if superclumped:
            cols = _greedy_groups(xsizes, l)[xr]
            value = max(value, _grid_mi(cols, rows, xlogx))
        out.append((l, value))
    return out


class _Axis:
    """Dense ranks of one variable plus cached equipartition labels."""

    def __init__(self, values: np.ndarray):
        _, self.rank, self.sizes = _dense_ranks(values)
        self.n_units = len(self.sizes)
        self._labels: dict[int, np.ndarray] = {}

    def labels(self, k: int) -> np.ndarray:
        if k not in self._labels:
            self._labels[k] = _greedy_groups(self.sizes, k)[self.rank]
        return self._labels[k]


def characteristic_matrix(points: PointSet, cfg: MicConfig = MicConfig(), threads: int = 1) -> CharacteristicMatrix:
    """Normalized best MI for every grid with x, y >= 2 and x * y <= B(n).

    Raises ``DegenerateAxis`` when either coordinate is constant.
    """
    n = points.n
    ax, ay = _Axis(points.xs), _Axis(points.ys)
    if ax.n_units == 1 or ay.n_units == 1:
        raise DegenerateAxis("a coordinate is constant across all points")
    B = grid_limit(n, cfg)
    xlogx = _xlogx_table(n)
    half = B // 2
    for k in range(2, half + 1):  # fill caches before threads share them
        ax.labels(k)
        ay.labels(k)

    def run(task):
        opt, fixed, k = task
        limit = B // k
        mi, superclumped = _optimize_axis(opt.rank, opt.n_units, fixed.labels(k), limit,
                                          cfg.clumping_factor, xlogx)
        values = {}
        for l in range(2, limit + 1):
            v = float(mi[l])
            if superclumped:
                v = max(v, _grid_mi(opt.labels(l), fixed.labels(k), xlogx))
            values[l] = v
        return values

    # (optimized axis, equipartitioned axis, parts on the equipartitioned axis)
    tasks = [(ax, ay, k) for k in range(2, half + 1)] + [(ay, ax, k) for k in range(2, half + 1)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, tasks))
    else:
        results = [run(t) for t in tasks]

    best: dict[tuple[int, int], float] = {}
    for (opt, _, k), values in zip(tasks, results):
        for l, v in values.items():
            cell = (l, k) if opt is ax else (k, l)
            best[cell] = max(best.get(cell, 0.0), v)

    out = {}
    for (x, y), v in best.items():
        m = v / math.log2(min(x, y))
        if m > 1.0 + NORM_TOL:
            raise ArithmeticError(f"normalized MI {m!r} exceeds 1 at {(x, y)}")
        out[(x, y)] = min(max(m, 0.0), 1.0)
    return CharacteristicMatrix(out)


def _degenerate_matrix(n: int, cfg: MicConfig) -> CharacteristicMatrix:
    B = grid_limit(n, cfg)
    return CharacteristicMatrix({(x, y): 0.0 for x in range(2, B // 2 + 1) for y in range(2, B // x + 1)})


def mic(x_series, y_series, cfg: MicConfig = MicConfig(), threads: int = 1) -> MicResult:
    """Maximal information coefficient of two equal-length samples.

    A constant input yields ``mic = 0`` with ``degenerate=True``.
    """
    points = PointSet(x_series, y_series)
    try:
        matrix = characteristic_matrix(points, cfg, threads=threads)
        degenerate = False
    except DegenerateAxis:
        matrix = _degenerate_matrix(points.n, cfg)
        degenerate = True
    top, bx, by = matrix.max_cell()
    return MicResult(top, bx, by, matrix, points.n, cfg.alpha, degenerate)
