"""Flat-kernel mean shift with quantile-based bandwidth estimation."""

from __future__ import annotations

import numpy as np

from tacbench import numerics
from tacbench.cluster.assignment import ClusterAssignment


def estimate_bandwidth(x: np.ndarray, quantile: float = 0.3) -> float:
    """Mean distance to each point's ceil(quantile * n)-th nearest neighbor."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    kth = min(max(int(np.ceil(quantile * n)), 1), n - 1)
    if n < 2:
        return 0.0
    d = np.sqrt(numerics.pairwise_sq_dist(x))
    nn = np.partition(d, kth, axis=1)[:, kth]
    return float(nn.mean())


def mean_shift(x: np.ndarray, bandwidth: float | None = None,
               max_iter: int = 300) -> ClusterAssignment:
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    if bandwidth is not None and bandwidth <= 0:
        raise ValueError("bandwidth must be > 0")
    if bandwidth is None:
        bandwidth = estimate_bandwidth(x)
    if bandwidth <= 0.0:
        # all points identical: a single trivial cluster
        return ClusterAssignment(labels=np.zeros(n, dtype=int), k_found=1,
                                 extra={"modes": x[:1].copy(),
                                        "bandwidth": 0.0})

    bw2 = bandwidth * bandwidth
    tol = 1e-3 * bandwidth
    seeds = x.copy()
    active = np.ones(n, dtype=bool)
    for _ in range(max_iter):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        d2 = numerics.cross_sq_dist(seeds[idx], x)
        within = d2 <= bw2
        counts = within.sum(axis=1)
        counts[counts == 0] = 1
        new_pos = (within @ x) / counts[:, None]
        shift = np.linalg.norm(new_pos - seeds[idx], axis=1)
        seeds[idx] = new_pos
        active[idx] = shift >= tol

    # merge modes within one bandwidth, strongest (most populated) first
    d2 = numerics.cross_sq_dist(seeds, x)
    intensity = (d2 <= bw2).sum(axis=1)
    order = np.lexsort((np.arange(n), -intensity))
    modes = []
    for i in order:
        candidate = seeds[i]
        if all(((candidate - m) ** 2).sum() > bw2 for m in modes):
            modes.append(candidate)
    modes = np.array(modes)
    labels = np.argmin(numerics.cross_sq_dist(x, modes), axis=1)
    k_found = int(len(np.unique(labels)))
    # drop empty modes so labels stay compact
    used = np.unique(labels)
    remap = np.full(len(modes), -1, dtype=int)
    remap[used] = np.arange(len(used))
    labels = remap[labels]
    return ClusterAssignment(
        labels=labels, k_found=k_found,
        extra={"modes": modes[used], "bandwidth": bandwidth},
    )
