"""NumPy implementation of the column-optimization DP.

Must stay operation-for-operation identical to ``_kernel.pyx`` so both
backends return bit-identical results: the cost matrix accumulates rows in
ascending order and each DP candidate is one addition.
"""

import numpy as np


def dp_best(cum, xlogx, max_cols):
    """Best partition objective for 1..max_cols columns.

    ``cum`` is (k+1, q) int64 cumulative row counts over k clumps. The
    objective of a partition is sum over columns of
    ``sum_r xlogx[n_cr] - xlogx[n_c]``. Returns a float64 array ``best`` of
    length max_cols + 1 where ``best[l]`` is the maximum over partitions
    into at most ``l`` columns (``best[0]`` is -inf).
    """
    cum = np.ascontiguousarray(cum, dtype=np.int64)
    k = cum.shape[0] - 1
    q = cum.shape[1]
    tot = cum.sum(axis=1)

    cost = np.zeros((k + 1, k + 1))
    for r in range(q):
        col = cum[:, r]
        cost = cost + xlogx[np.abs(col[None, :] - col[:, None])]
    cost = cost - xlogx[np.abs(tot[None, :] - tot[:, None])]
    s_idx, t_idx = np.indices((k + 1, k + 1))
    cost[s_idx >= t_idx] = -np.inf

    best = np.full(max_cols + 1, -np.inf)
    prev = cost[0].copy()  # exactly one column covering clumps [0, t)
    prev[0] = -np.inf
    if max_cols >= 1:
        best[1] = prev[k]
    for l in range(2, max_cols + 1):
        cur = (prev[:, None] + cost).max(axis=0)
        best[l] = max(best[l - 1], cur[k])
        prev = cur
    return best


def greedy_groups(sizes, k):
    """Assign consecutive units of the given masses to at most ``k`` groups
    of near-equal total mass; returns a group id per unit."""
    sizes = np.asarray(sizes, dtype=np.int64).tolist()
    groups = np.empty(len(sizes), dtype=np.int64)
    remaining = float(sum(sizes))
    desired = remaining / k
    g = 0
    current = 0
    for i, s in enumerate(sizes):
        if current > 0 and g < k - 1 and abs(float(current + s) - desired) >= abs(float(current) - desired):
            g += 1
            remaining -= current
            desired = remaining / (k - g)
            current = 0
        groups[i] = g
        current += s
    return groups
