"""Fuzzy c-means with the standard alternating Bezdek updates."""

from __future__ import annotations

import numpy as np

from tacbench import numerics
from tacbench.cluster.assignment import ClusterAssignment


def fcm(x: np.ndarray, k: int, seed: int = 0, m: float = 2.0,
        tol: float = 1e-4, max_iter: int = 300) -> ClusterAssignment:
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    if n < k:
        raise ValueError(f"need at least k={k} points, got {n}")
    rng = numerics.seeded_rng(seed)
    u = rng.random((n, k)) + 1e-9
    u /= u.sum(axis=1, keepdims=True)

    objective_history = []
    power = 2.0 / (m - 1.0)
    for _ in range(max_iter):
        um = u ** m
        centers = (um.T @ x) / um.sum(axis=0)[:, None]
        d2 = numerics.cross_sq_dist(x, centers)
        objective_history.append(float((um * d2).sum()))

        zero = d2 <= 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = d2 ** (-power / 2.0)
            u_new = inv / inv.sum(axis=1, keepdims=True)
        # a point sitting exactly on a centroid belongs fully to it
        coincident = zero.any(axis=1)
        if coincident.any():
            u_new[coincident] = 0.0
            rows = np.flatnonzero(coincident)
            first = np.argmax(zero[rows], axis=1)
            u_new[rows, first] = 1.0
        delta = float(np.max(np.abs(u_new - u)))
        u = u_new
        if delta < tol:
            break

    um = u ** m
    centers = (um.T @ x) / um.sum(axis=0)[:, None]
    d2 = numerics.cross_sq_dist(x, centers)
    objective_history.append(float((um * d2).sum()))
    labels = np.argmax(u, axis=1)
    k_found = int(len(np.unique(labels)))
    return ClusterAssignment(
        labels=labels, k_found=k_found, memberships=u,
        extra={"centers": centers, "objective_history": objective_history},
    )
