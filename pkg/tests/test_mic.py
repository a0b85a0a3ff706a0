import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sentmic.errors import InvalidPoints, LengthMismatch, TooLarge
from sentmic.mic import (
    GridHistogram,
    MicConfig,
    PointSet,
    available_backends,
    characteristic_matrix,
    equipartition_axis,
    grid_limit,
    mic,
    mic_exhaustive_oracle,
    mutual_information,
    optimize_columns,
    use_backend,
)
from sentmic.mic import _kernel_py

COLLINEAR = PointSet([1, 2, 3, 4], [1, 2, 3, 4])
SQUARE = PointSet([0, 0, 1, 1], [0, 1, 0, 1])


@pytest.mark.parametrize("n, b", [(100, 15), (4, 4), (487, 40), (32, 8), (1024, 64)])
def test_grid_limit(n, b):
    assert grid_limit(n) == b


@pytest.mark.parametrize("counts, bits", [
    ([[2, 0], [0, 2]], 1.0),
    ([[1, 1], [1, 1]], 0.0),
    ([[3, 1], [1, 3]], 2 - 0.75 * math.log2(3) - 0.25 * math.log2(1 / 0.25) - 0.75 * math.log2(4 / 3) + 0.75 * math.log2(3) - 1),
])
def test_mutual_information(counts, bits):
    assert mutual_information(counts) == pytest.approx(bits, abs=1e-12)


def test_mutual_information_value():
    assert mutual_information([[3, 1], [1, 3]]) == pytest.approx(0.188722, abs=1e-6)


def test_grid_histogram_inclusive_edges():
    g = GridHistogram.from_points(COLLINEAR, [2.0], [2.0])
    assert g.counts.tolist() == [[2, 0], [0, 2]]
    assert mutual_information(g) == 1.0


def test_equipartition_examples():
    assert equipartition_axis([1, 2, 3, 4], 2).tolist() == [2.0]
    assert equipartition_axis([1, 1, 1, 2], 2).tolist() == [1.0]
    assert equipartition_axis([5, 5, 5], 4).tolist() == []


@given(st.lists(st.integers(0, 6), min_size=1, max_size=60), st.integers(2, 8))
def test_equipartition_never_splits_ties(values, k):
    edges = equipartition_axis(values, k)
    assert len(edges) <= k - 1
    assert np.all(np.diff(edges) > 0)
    assert set(edges) <= set(values)


def test_optimize_columns_examples(backend):
    assert optimize_columns(COLLINEAR, [2.5], 2) == [(2, 1.0)]
    assert optimize_columns(SQUARE, [0.5], 2) == [(2, 0.0)]
    assert optimize_columns(COLLINEAR, [10.0], 3) == [(2, 0.0), (3, 0.0)]


def _brute_columns(xs, rows, l):
    _, rank = np.unique(xs, return_inverse=True)
    best = 0.0
    for c in range(0, l):
        for cuts in combinations(range(1, rank.max() + 1), c):
            cols = np.searchsorted(np.array(cuts, dtype=np.int64), rank, side="right")
            counts = np.zeros((cols.max() + 1, rows.max() + 1), dtype=np.int64)
            np.add.at(counts, (cols, rows), 1)
            best = max(best, mutual_information(counts))
    return best


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 6), st.integers(0, 3)), min_size=4, max_size=11), st.integers(2, 4))
def test_column_dp_is_exact(pairs, max_cols):
    """With the rows fixed the column search is exhaustive, not heuristic."""
    pts = PointSet.from_pairs(pairs)
    edges = [0.5, 1.5, 2.5]
    _, rows = np.unique(np.searchsorted(edges, pts.ys), return_inverse=True)
    for l, value in optimize_columns(pts, edges, max_cols):
        assert value == pytest.approx(_brute_columns(pts.xs, rows, l), abs=1e-12)


def test_mic_examples(backend):
    r = mic(np.arange(10), np.arange(10))
    assert (r.mic, r.best_x, r.best_y, r.degenerate) == (1.0, 2, 2, False)
    assert mic(SQUARE.xs, SQUARE.ys).mic == 0.0
    r = mic([3, 3, 3, 3, 3], [1, 2, 3, 4, 5])
    assert r.mic == 0.0 and r.degenerate


def test_characteristic_matrix_examples():
    assert characteristic_matrix(COLLINEAR)[2, 2] == 1.0
    assert set(characteristic_matrix(SQUARE).values.values()) == {0.0}


def test_matrix_cells_respect_budget():
    m = characteristic_matrix(PointSet(np.arange(100), np.sin(np.arange(100))))
    assert all(x >= 2 and y >= 2 and x * y <= 15 for x, y in m.values)
    assert (2, 7) in m.values and (7, 2) in m.values


def test_oracle_examples():
    assert mic_exhaustive_oracle(COLLINEAR).mic == 1.0
    assert mic_exhaustive_oracle(SQUARE).mic == 0.0
    with pytest.raises(TooLarge):
        mic_exhaustive_oracle(PointSet(np.arange(15), np.arange(15)))


def test_point_set_validation():
    with pytest.raises(LengthMismatch):
        PointSet([1, 2, 3, 4], [1, 2, 3])
    with pytest.raises(InvalidPoints):
        PointSet([1, 2, 3], [1, 2, 3])
    with pytest.raises(InvalidPoints):
        PointSet([1, 2, 3, np.nan], [1, 2, 3, 4])


points = st.integers(4, 12).flatmap(lambda n: st.tuples(
    st.lists(st.integers(0, 5), min_size=n, max_size=n),
    st.lists(st.integers(0, 5), min_size=n, max_size=n),
))


@settings(max_examples=200, deadline=None)
@given(points, st.sampled_from([0.6, 0.8, 1.0]))
def test_never_exceeds_oracle(xy, alpha):
    pts = PointSet(*xy)
    cfg = MicConfig(alpha=alpha)
    fast = mic(pts.xs, pts.ys, cfg)
    slow = mic_exhaustive_oracle(pts, cfg)
    assert fast.mic <= slow.mic + 1e-12
    for cell, v in fast.matrix.values.items():
        assert v <= slow.matrix[cell] + 1e-12


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-100, 100), min_size=4, max_size=40), st.integers(0, 2 ** 32 - 1))
def test_symmetry_and_monotone_invariance(xs, seed):
    rng = np.random.default_rng(seed)
    x = np.asarray(xs, dtype=float)
    y = rng.normal(size=len(x)) + x
    base = mic(x, y).mic
    assert 0.0 <= base <= 1.0
    assert mic(y, x).mic == base
    assert mic(np.exp(x / 50), y).mic == base
    assert mic(x, y ** 3 + 7).mic == base


def test_threads_do_not_change_result():
    rng = np.random.default_rng(3)
    x = rng.normal(size=300)
    y = x ** 2 + rng.normal(scale=0.3, size=300)
    assert mic(x, y, threads=4) == mic(x, y, threads=1)


@pytest.mark.skipif(len(available_backends()) < 2, reason="compiled kernel not built")
def test_backends_bit_identical():
    rng = np.random.default_rng(11)
    for n in (20, 150, 400):
        x = rng.integers(0, n // 3, size=n).astype(float)
        y = np.sin(x) + rng.normal(scale=0.5, size=n)
        results = []
        for name in available_backends():
            prev = use_backend(name)
            try:
                results.append(mic(x, y).to_dict())
            finally:
                use_backend(prev)
        assert all(r == results[0] for r in results)


@pytest.mark.skipif(len(available_backends()) < 2, reason="compiled kernel not built")
def test_greedy_groups_kernels_agree():
    from sentmic.mic import _kernel

    rng = np.random.default_rng(5)
    for _ in range(300):
        sizes = rng.integers(1, 9, size=int(rng.integers(1, 40))).astype(np.int64)
        k = int(rng.integers(2, 12))
        assert np.array_equal(_kernel.greedy_groups(sizes, k), _kernel_py.greedy_groups(sizes, k))


def test_unknown_backend():
    with pytest.raises(ValueError):
        use_backend("fortran")


def test_environment_forces_fallback():
    import os
    import subprocess
    import sys

    env = dict(os.environ, SENTMIC_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import sentmic.mic as m; print(m.active_backend())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
