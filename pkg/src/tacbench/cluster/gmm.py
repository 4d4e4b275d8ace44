"""Gaussian mixture model with full covariances, fitted by EM."""

from __future__ import annotations

import numpy as np

from tacbench import numerics
from tacbench.cluster import kmeans as km
from tacbench.cluster.assignment import ClusterAssignment

_LOG_2PI = float(np.log(2.0 * np.pi))


class DegenerateComponentError(numerics.DegenerateCovarianceError):
    """A mixture component collapsed to a singular covariance."""


def _log_gaussian(x: np.ndarray, mean: np.ndarray, cov: np.ndarray,
                  jitter: float) -> np.ndarray:
    d = x.shape[1]
    try:
        chol = numerics.cholesky_with_jitter(cov, jitter)
    except numerics.DegenerateCovarianceError as exc:
        raise DegenerateComponentError(str(exc)) from None
    diff = x - mean
    sol = np.linalg.solve(chol, diff.T)  # (d, n)
    maha = np.einsum("ij,ij->j", sol, sol)
    log_det = 2.0 * np.sum(np.log(np.diag(chol)))
    return -0.5 * (d * _LOG_2PI + log_det + maha)


def gmm_fit(x: np.ndarray, k: int, seed: int = 0, tol: float = 1e-3,
            max_iter: int = 100, jitter: float = 1e-6) -> ClusterAssignment:
    x = np.asarray(x, dtype=float)
    n, d = x.shape
    if n < k:
        raise ValueError(f"need at least k={k} points, got {n}")

    init = km.kmeans(x, k, seed=seed, n_init=10)
    resp = np.zeros((n, k))
    resp[np.arange(n), init.labels] = 1.0

    weights = np.empty(k)
    means = np.empty((k, d))
    covs = np.empty((k, d, d))
    log_lik_history = []
    prev_mean_ll = None
    for _ in range(max_iter):
        # M-step from current responsibilities
        nk = resp.sum(axis=0) + 1e-12
        weights = nk / n
        means = (resp.T @ x) / nk[:, None]
        for j in range(k):
            diff = x - means[j]
            covs[j] = (resp[:, j][:, None] * diff).T @ diff / nk[j]
            covs[j][np.diag_indices(d)] += jitter

        # E-step
        log_prob = np.empty((n, k))
        for j in range(k):
            log_prob[:, j] = np.log(weights[j] + 1e-300) + _log_gaussian(
                x, means[j], covs[j], 0.0)
        max_lp = log_prob.max(axis=1, keepdims=True)
        log_norm = max_lp[:, 0] + np.log(np.exp(log_prob - max_lp).sum(axis=1))
        resp = np.exp(log_prob - log_norm[:, None])
        mean_ll = float(log_norm.mean())
        log_lik_history.append(mean_ll)
        if prev_mean_ll is not None and abs(mean_ll - prev_mean_ll) < tol:
            break
        prev_mean_ll = mean_ll

    labels = np.argmax(resp, axis=1)
    k_found = int(len(np.unique(labels)))
    return ClusterAssignment(
        labels=labels, k_found=k_found, memberships=resp,
        extra={"weights": weights, "means": means, "covariances": covs,
               "log_likelihood_history": log_lik_history},
    )
