"""Brute-force MIC for tiny samples, used to check the fast path.

Every placement of column and row boundaries between consecutive distinct
values is enumerated, both axes free at once. A cell (x, y) of the
characteristic matrix takes the best grid with at most x columns and at
most y rows.
"""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np

from ..errors import TooLarge
from .core import CharacteristicMatrix, MicConfig, MicResult, PointSet, grid_limit

MAX_N = 14


def _mi_bits(cols: np.ndarray, rows: np.ndarray) -> float:
    n = len(cols)
    joint = np.zeros((cols.max() + 1, rows.max() + 1))
    np.add.at(joint, (cols, rows), 1.0)
    p = joint / n
    px = p.sum(axis=1, keepdims=True)
    py = p.sum(axis=0, keepdims=True)
    nz = p > 0
    return float(np.sum(p[nz] * np.log2(p[nz] / (px @ py)[nz])))


def _labelings(values: np.ndarray, max_parts: int):
    """(parts, labels) for every way to cut the distinct values into <= max_parts groups."""
    _, rank = np.unique(values, return_inverse=True)
    gaps = range(1, rank.max() + 1)
    for n_cuts in range(0, max_parts):
        for cuts in combinations(gaps, n_cuts):
            yield n_cuts + 1, np.searchsorted(np.array(cuts, dtype=np.int64), rank, side="right")


def mic_exhaustive_oracle(points: PointSet, cfg: MicConfig = MicConfig()) -> MicResult:
    n = points.n
    if n > MAX_N:
        raise TooLarge(f"oracle is limited to n <= {MAX_N}, got {n}")
    B = grid_limit(n, cfg)
    cells = [(x, y) for x in range(2, B // 2 + 1) for y in range(2, B // x + 1)]
    degenerate = len(np.unique(points.xs)) == 1 or len(np.unique(points.ys)) == 1

    # best[c][r] = max MI over grids with exactly c columns and r rows
    max_parts = B // 2
    best = np.zeros((max_parts + 1, max_parts + 1))
    if not degenerate:
        row_choices = list(_labelings(points.ys, max_parts))
        for c, cols in _labelings(points.xs, max_parts):
            for r, rows in row_choices:
                if c * r > B:
                    continue
                best[c, r] = max(best[c, r], _mi_bits(cols, rows))

    values = {}
    for x, y in cells:
        m = best[: x + 1, : y + 1].max() / math.log2(min(x, y))
        values[(x, y)] = min(max(m, 0.0), 1.0)
    matrix = CharacteristicMatrix(values)
    top, bx, by = matrix.max_cell()
    return MicResult(top, bx, by, matrix, n, cfg.alpha, degenerate)
