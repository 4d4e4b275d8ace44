"""Agglomerative clustering with Ward linkage.

Uses the nearest-neighbor-chain algorithm with Lance-Williams cost
updates.  Merge costs are the increase in within-cluster sum of squares;
the reported dendrogram is the merge list sorted by cost (valid for Ward
because the linkage is reducible), with ties broken by smallest pair
indices.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from tacbench import numerics
from tacbench.cluster.assignment import ClusterAssignment


@njit(cache=True)
def _nn_chain(d: np.ndarray) -> np.ndarray:
    """NN-chain merge loop on a Ward cost matrix (modified in place).

    Returns an (n-1, 3) array of (lo, hi, cost) rows in discovery order.
    """
    n = d.shape[0]
    sizes = np.ones(n)
    active = np.ones(n, dtype=np.bool_)
    merges = np.empty((n - 1, 3))
    n_merges = 0
    chain = np.empty(n + 1, dtype=np.int64)
    chain_len = 0
    while n_merges < n - 1:
        if chain_len == 0:
            for i in range(n):
                if active[i]:
                    chain[0] = i
                    chain_len = 1
                    break
        a = chain[chain_len - 1]
        # nearest active neighbor, ties to the lowest index
        b = -1
        best = np.inf
        row = d[a]
        for j in range(n):
            if active[j] and j != a and row[j] < best:
                best = row[j]
                b = j
        if chain_len > 1 and b == chain[chain_len - 2]:
            chain_len -= 2
            lo, hi = (a, b) if a < b else (b, a)
            cost = d[lo, hi]
            sa = sizes[lo]
            sb = sizes[hi]
            # Lance-Williams update of the SSE-increase cost
            for j in range(n):
                if active[j] and j != lo and j != hi:
                    val = ((sa + sizes[j]) * d[lo, j]
                           + (sb + sizes[j]) * d[hi, j]
                           - sizes[j] * cost) / (sa + sb + sizes[j])
                    d[lo, j] = val
                    d[j, lo] = val
            sizes[lo] = sa + sb
            active[hi] = False
            merges[n_merges, 0] = lo
            merges[n_merges, 1] = hi
            merges[n_merges, 2] = cost
            n_merges += 1
        else:
            chain[chain_len] = b
            chain_len += 1
    return merges


def ward_linkage(x: np.ndarray):
    """Full merge hierarchy.

    Returns a list of (i, j, cost) with i < j current-representative
    indices at merge time, sorted by cost; after merging, the new cluster
    is represented by index i.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    if n <= 1:
        return []
    d = numerics.pairwise_sq_dist(x) / 2.0  # singleton Ward cost
    np.fill_diagonal(d, np.inf)
    raw = _nn_chain(d)
    merges = [(int(lo), int(hi), float(cost)) for lo, hi, cost in raw]
    merges.sort(key=lambda t: (t[2], t[0], t[1]))
    return merges


def cut_linkage(merges, n: int, k: int) -> np.ndarray:
    """Labels from applying the first n-k merges of the sorted hierarchy."""
    parent = np.arange(n)

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for lo, hi, _ in merges[: n - k]:
        ra, rb = find(lo), find(hi)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    roots = np.array([find(i) for i in range(n)])
    _, labels = np.unique(roots, return_inverse=True)
    return labels


def ward_agglomerative(x: np.ndarray, k: int) -> ClusterAssignment:
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    if n < k:
        raise ValueError(f"need at least k={k} points, got {n}")
    merges = ward_linkage(x)
    labels = cut_linkage(merges, n, k)
    return ClusterAssignment(
        labels=labels, k_found=int(len(np.unique(labels))),
        extra={"merge_costs": [c for _, _, c in merges]},
    )
