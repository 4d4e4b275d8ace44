"""Affinity propagation via responsibility/availability message passing."""

from __future__ import annotations

import numpy as np

from tacbench import numerics
from tacbench.cluster.assignment import ClusterAssignment


def affinity_propagation(x: np.ndarray, damping: float = 0.5,
                         max_iter: int = 200, seed: int = 0,
                         convergence_iter: int = 15,
                         preference: float | None = None) -> ClusterAssignment:
    if not 0.5 <= damping < 1.0:
        raise ValueError("damping must lie in [0.5, 1)")
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    if n == 1:
        return ClusterAssignment(labels=np.zeros(1, dtype=int), k_found=1,
                                 extra={"exemplars": np.array([0])})

    s = -numerics.pairwise_sq_dist(x)
    if preference is None:
        preference = float(np.median(s[~np.eye(n, dtype=bool)]))
    np.fill_diagonal(s, preference)
    # tiny seeded perturbation breaks symmetry-induced oscillations
    rng = numerics.seeded_rng(seed)
    s = s + 1e-12 * (np.max(np.abs(s)) + 1.0) * rng.standard_normal((n, n))

    r = np.zeros((n, n))
    a = np.zeros((n, n))
    idx = np.arange(n)
    stable = 0
    prev_exemplars = None
    converged = False
    for _ in range(max_iter):
        # responsibilities
        as_ = a + s
        first = np.argmax(as_, axis=1)
        max1 = as_[idx, first]
        as_[idx, first] = -np.inf
        max2 = as_.max(axis=1)
        r_new = s - max1[:, None]
        r_new[idx, first] = s[idx, first] - max2
        r = damping * r + (1.0 - damping) * r_new

        # availabilities
        rp = np.maximum(r, 0.0)
        rp[idx, idx] = r[idx, idx]
        col = rp.sum(axis=0)
        a_new = np.minimum(0.0, col[None, :] - rp)
        # self-availability sums positive responsibilities from other points
        a_new[idx, idx] = col - rp[idx, idx]
        a = damping * a + (1.0 - damping) * a_new

        exemplars = np.flatnonzero(np.diag(r + a) > 0.0)
        if prev_exemplars is not None and np.array_equal(exemplars, prev_exemplars):
            stable += 1
            if stable >= convergence_iter and len(exemplars) > 0:
                converged = True
                break
        else:
            stable = 0
        prev_exemplars = exemplars

    exemplars = np.flatnonzero(np.diag(r + a) > 0.0)
    if len(exemplars) == 0:
        exemplars = np.array([int(np.argmax(np.diag(r + a)))])
    labels = np.argmax(s[:, exemplars], axis=1)
    labels[exemplars] = np.arange(len(exemplars))
    k_found = int(len(exemplars))
    return ClusterAssignment(
        labels=labels, k_found=k_found, converged=converged,
        extra={"exemplars": exemplars, "preference": preference},
    )
