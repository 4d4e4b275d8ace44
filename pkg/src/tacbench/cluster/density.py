"""Density-based clustering: DBSCAN and OPTICS with xi extraction."""

from __future__ import annotations

import numpy as np
from numba import njit

from tacbench import numerics
from tacbench.cluster.assignment import ClusterAssignment


def dbscan(x: np.ndarray, eps: float = 0.5, min_pts: int = 5) -> ClusterAssignment:
    if eps <= 0:
        raise ValueError("eps must be > 0")
    if min_pts < 1:
        raise ValueError("min_pts must be >= 1")
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    eps2 = eps * eps
    adj = numerics.pairwise_sq_dist(x) <= eps2  # includes self
    core = adj.sum(axis=1) >= min_pts

    labels = np.full(n, -1, dtype=int)
    cluster = 0
    for i in range(n):
        if labels[i] != -1 or not core[i]:
            continue
        # expand a new cluster from this core point
        frontier = np.zeros(n, dtype=bool)
        frontier[i] = True
        member = np.zeros(n, dtype=bool)
        while frontier.any():
            member |= frontier
            reach = adj[frontier & core].any(axis=0)
            frontier = reach & ~member
        member &= labels == -1  # border points keep their first cluster
        labels[member] = cluster
        cluster += 1
    noise = labels == -1
    return ClusterAssignment(
        labels=labels, k_found=cluster, noise_mask=noise,
    )


def optics_order(x: np.ndarray, min_pts: int):
    """OPTICS ordering with unbounded max-eps.

    Returns (ordering, reachability[ordering], core_dist[ordering]).
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    d = numerics.pairwise_sq_dist(x)
    np.sqrt(d, out=d)
    if n >= min_pts:
        core = _row_kth_smallest(d, min_pts - 1)
    else:
        core = np.full(n, np.inf)
    ordering, reach = _order_loop(d, core)
    return ordering, reach[ordering], core[ordering]


@njit(cache=True)
def _row_kth_smallest(d: np.ndarray, kth: int) -> np.ndarray:
    """Per-row kth-smallest entry (0-based), without a full matrix copy."""
    n = d.shape[0]
    out = np.empty(n)
    buf = np.empty(kth + 1)
    for i in range(n):
        size = 0
        for j in range(n):
            v = d[i, j]
            if size <= kth:
                # insertion sort into the not-yet-full buffer
                pos = size
                while pos > 0 and buf[pos - 1] > v:
                    buf[pos] = buf[pos - 1]
                    pos -= 1
                buf[pos] = v
                size += 1
            elif v < buf[kth]:
                pos = kth
                while pos > 0 and buf[pos - 1] > v:
                    buf[pos] = buf[pos - 1]
                    pos -= 1
                buf[pos] = v
        out[i] = buf[kth]
    return out


@njit(cache=True)
def _order_loop(d: np.ndarray, core: np.ndarray):
    """Reachability-priority traversal; returns (ordering, reachability)."""
    n = d.shape[0]
    reach = np.full(n, np.inf)
    processed = np.zeros(n, dtype=np.bool_)
    ordering = np.empty(n, dtype=np.int64)
    for step in range(n):
        # unprocessed point with smallest reachability, ties to lowest index;
        # all-inf falls back to the first unprocessed point
        i = -1
        best = np.inf
        for j in range(n):
            if not processed[j]:
                if i == -1 or reach[j] < best:
                    if i == -1 or np.isfinite(reach[j]):
                        i = j
                        best = reach[j]
        processed[i] = True
        ordering[step] = i
        if np.isfinite(core[i]):
            for j in range(n):
                if not processed[j]:
                    new_reach = d[i, j] if d[i, j] > core[i] else core[i]
                    if new_reach < reach[j]:
                        reach[j] = new_reach
    return ordering, reach


def _extend_region(steep: np.ndarray, reverse: np.ndarray, start: int,
                   min_pts: int) -> int:
    """Extend a steep area from its first steep point.

    The area may contain up to min_pts consecutive non-steep points and
    ends before the plot turns in the opposite direction.
    """
    n = len(steep)
    non_steep = 0
    index = start
    end = start
    while index < n:
        if steep[index]:
            non_steep = 0
            end = index
        elif not reverse[index]:
            non_steep += 1
            if non_steep > min_pts:
                break
        else:
            break
        index += 1
    return end


def _filter_sdas(sdas, mib, one_minus, r):
    if np.isinf(mib):
        return []
    kept = [a for a in sdas if mib <= r[a["start"]] * one_minus]
    for a in kept:
        a["mib"] = max(a["mib"], mib)
    return kept


def _xi_clusters(reach: np.ndarray, xi: float, min_cluster_size: int):
    """Steep-area cluster extraction from a reachability plot.

    Returns (start, end) inclusive index ranges within the ordering.
    """
    r = np.hstack((reach, [np.inf]))
    one_minus = 1.0 - xi
    with np.errstate(invalid="ignore"):
        steep_up = r[:-1] * one_minus <= r[1:]
        steep_down = r[:-1] >= r[1:] * one_minus
        up = r[:-1] < r[1:]
        down = r[:-1] > r[1:]

    sdas = []  # open steep-down areas
    clusters = []
    index = 0
    mib = 0.0
    for steep_index in np.flatnonzero(steep_up | steep_down):
        if steep_index < index:
            continue  # inside an already-consumed steep area
        mib = max(mib, float(np.max(r[index:steep_index + 1])))
        if steep_down[steep_index]:
            sdas = _filter_sdas(sdas, mib, one_minus, r)
            d_start = int(steep_index)
            d_end = _extend_region(steep_down, up, d_start, min_cluster_size)
            sdas.append({"start": d_start, "end": d_end, "mib": 0.0})
            index = d_end + 1
            mib = float(r[index])
        else:
            sdas = _filter_sdas(sdas, mib, one_minus, r)
            u_start = int(steep_index)
            u_end = _extend_region(steep_up, down, u_start, min_cluster_size)
            index = u_end + 1
            mib = float(r[index])
            for area in sdas:
                c_start = area["start"]
                c_end = u_end
                end_val = r[c_end + 1]
                if end_val * one_minus < area["mib"]:
                    continue
                d_max = r[area["start"]]
                if d_max * one_minus >= end_val:
                    while (c_start < area["end"]
                           and r[c_start + 1] > end_val):
                        c_start += 1
                elif end_val * one_minus >= d_max:
                    while c_end > u_start and r[c_end - 1] > d_max:
                        c_end -= 1
                if c_end - c_start + 1 < min_cluster_size:
                    continue
                if c_start > area["end"] or c_end < u_start:
                    continue
                clusters.append((c_start, c_end))
    return clusters


def optics(x: np.ndarray, min_pts: int = 5, xi: float = 0.05) -> ClusterAssignment:
    if min_pts < 2:
        raise ValueError("min_pts must be >= 2")
    if not 0.0 < xi < 1.0:
        raise ValueError("xi must lie in (0, 1)")
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    if n < min_pts:
        labels = np.full(n, -1, dtype=int)
        return ClusterAssignment(labels=labels, k_found=0,
                                 noise_mask=np.ones(n, dtype=bool))
    ordering, reach, core = optics_order(x, min_pts)
    clusters = _xi_clusters(reach, xi, min_pts)
    # assign each position to its smallest containing cluster
    labels_in_order = np.full(n, -1, dtype=int)
    for idx, (s, e) in enumerate(sorted(clusters, key=lambda c: c[1] - c[0],
                                        reverse=True)):
        labels_in_order[s:e + 1] = idx
    # compact label ids
    used = np.unique(labels_in_order[labels_in_order >= 0])
    remap = {old: new for new, old in enumerate(used)}
    labels = np.full(n, -1, dtype=int)
    for pos, point in enumerate(ordering):
        lab = labels_in_order[pos]
        labels[point] = remap[lab] if lab >= 0 else -1
    noise = labels == -1
    return ClusterAssignment(
        labels=labels, k_found=int(len(used)), noise_mask=noise,
        extra={"ordering": ordering, "reachability": reach,
               "core_distances": core},
    )
