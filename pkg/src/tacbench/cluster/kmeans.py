"""K-means (Lloyd + k-means++) and mini-batch K-means."""

from __future__ import annotations

import numpy as np

from tacbench import numerics
from tacbench.cluster.assignment import ClusterAssignment


def kmeans_pp_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    centers = np.empty((k, x.shape[1]))
    first = int(rng.integers(n))
    centers[0] = x[first]
    closest = numerics.cross_sq_dist(x, centers[:1])[:, 0]
    for j in range(1, k):
        total = closest.sum()
        if total <= 0.0:
            idx = int(rng.integers(n))
        else:
            r = rng.random() * total
            idx = int(np.searchsorted(np.cumsum(closest), r))
            idx = min(idx, n - 1)
        centers[j] = x[idx]
        closest = np.minimum(closest, numerics.cross_sq_dist(x, centers[j:j + 1])[:, 0])
    return centers


def _assign(x: np.ndarray, centers: np.ndarray):
    d = numerics.cross_sq_dist(x, centers)
    labels = np.argmin(d, axis=1)  # ties: lowest index
    return labels, d


def lloyd(x: np.ndarray, centers: np.ndarray, max_iter: int = 300,
          tol: float = 1e-4):
    """Lloyd iterations from given centers.

    Returns (centers, labels, inertia, inertia_history).  The shift
    tolerance is relative to the data's total variance.
    """
    x = np.asarray(x, dtype=float)
    centers = centers.copy()
    k = centers.shape[0]
    scale = float(np.var(x) * x.shape[1]) or 1.0
    history = []
    labels = None
    for _ in range(max_iter):
        labels, d = _assign(x, centers)
        inertia = float(d[np.arange(x.shape[0]), labels].sum())
        history.append(inertia)
        new_centers = np.empty_like(centers)
        for j in range(k):
            mask = labels == j
            if mask.any():
                new_centers[j] = x[mask].mean(axis=0)
            else:
                # reseed an empty cluster at the point farthest from its centroid
                dists = d[np.arange(x.shape[0]), labels]
                far = int(np.argmax(dists))
                new_centers[j] = x[far]
        shift = float(((new_centers - centers) ** 2).sum())
        centers = new_centers
        if shift <= tol * tol * scale:
            break
    labels, d = _assign(x, centers)
    inertia = float(d[np.arange(x.shape[0]), labels].sum())
    history.append(inertia)
    return centers, labels, inertia, history


def _ensure_nonempty(x: np.ndarray, centers: np.ndarray):
    """Reseed empty clusters at far points until every cluster is populated."""
    k = centers.shape[0]
    for _ in range(k + 1):
        labels, d = _assign(x, centers)
        present = np.bincount(labels, minlength=k) > 0
        if present.all():
            return centers, labels, d
        dists = d[np.arange(x.shape[0]), labels]
        order = np.argsort(dists)[::-1]
        cursor = 0
        for j in np.flatnonzero(~present):
            centers[j] = x[order[cursor]]
            cursor += 1
    labels, d = _assign(x, centers)
    return centers, labels, d


def kmeans(x: np.ndarray, k: int, seed: int = 0, n_init: int = 10,
           max_iter: int = 300, tol: float = 1e-4) -> ClusterAssignment:
    x = np.asarray(x, dtype=float)
    if x.shape[0] < k:
        raise ValueError(f"need at least k={k} points, got {x.shape[0]}")
    rng = numerics.seeded_rng(seed)
    best = None
    for _ in range(n_init):
        init = kmeans_pp_init(x, k, rng)
        centers, labels, inertia, history = lloyd(x, init, max_iter, tol)
        if best is None or inertia < best[2]:
            best = (centers, labels, inertia, history)
    centers, labels, inertia, history = best
    if x.shape[0] >= k and len(np.unique(labels)) < k:
        centers, labels, d = _ensure_nonempty(x, centers)
        inertia = float(d[np.arange(x.shape[0]), labels].sum())
    k_found = int(len(np.unique(labels)))
    return ClusterAssignment(
        labels=labels, k_found=k_found,
        extra={"centers": centers, "inertia": inertia,
               "inertia_history": history},
    )


def mini_batch_kmeans(x: np.ndarray, k: int, seed: int = 0,
                      batch_size: int = 1024, max_iter: int = 100,
                      tol: float = 1e-4, n_init: int = 8) -> ClusterAssignment:
    """Streaming centroid updates with per-center learning rate 1/countSeen.

    Runs n_init restarts and keeps the one with the lowest full-data
    inertia, like the batch K-means driver.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[0] < k:
        raise ValueError(f"need at least k={k} points, got {x.shape[0]}")
    rng = numerics.seeded_rng(seed)
    best = None
    for _ in range(n_init):
        a = _mini_batch_once(x, k, rng, batch_size, max_iter, tol)
        if best is None or a.extra["inertia"] < best.extra["inertia"]:
            best = a
    return best


def _mini_batch_once(x: np.ndarray, k: int, rng: np.random.Generator,
                     batch_size: int, max_iter: int,
                     tol: float) -> ClusterAssignment:
    n = x.shape[0]
    centers = kmeans_pp_init(x, k, rng)
    counts = np.zeros(k)
    scale = float(np.var(x) * x.shape[1]) or 1.0
    full_batch = batch_size >= n
    for _ in range(max_iter):
        if full_batch:
            batch = x
        else:
            batch = x[rng.choice(n, size=batch_size, replace=False)]
        labels, _ = _assign(batch, centers)
        new_centers = centers.copy()
        for j in range(k):
            mask = labels == j
            b = int(mask.sum())
            if b == 0:
                continue
            total = counts[j] + b
            new_centers[j] = (centers[j] * counts[j] + batch[mask].sum(axis=0)) / total
            counts[j] = total
        shift = float(((new_centers - centers) ** 2).sum())
        centers = new_centers
        if shift <= tol * tol * scale:
            break
    labels, d = _assign(x, centers)
    if len(np.unique(labels)) < k:
        centers, labels, d = _ensure_nonempty(x, centers)
    inertia = float(d[np.arange(n), labels].sum())
    k_found = int(len(np.unique(labels)))
    return ClusterAssignment(
        labels=labels, k_found=k_found,
        extra={"centers": centers, "inertia": inertia},
    )
