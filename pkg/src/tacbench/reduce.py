"""PCA and FastICA projections to a small number of components.

Both transforms center the data but do not rescale it; the component
count defaults to 5.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from tacbench import numerics


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray
    components: np.ndarray  # (k, T) orthonormal rows
    explained_variance: np.ndarray  # descending


@dataclass(frozen=True)
class IcaModel:
    mean: np.ndarray
    whitening: np.ndarray  # (k, T)
    unmixing: np.ndarray  # (k, k)
    components: np.ndarray  # (k, T) = unmixing @ whitening
    converged: bool


def fit_pca(x: np.ndarray, k: int = 5) -> PcaModel:
    x = np.asarray(x, dtype=float)
    n, t = x.shape
    if n < k:
        raise ValueError(f"need at least {k} samples, got {n}")
    if t < k:
        raise ValueError(f"need at least {k} features, got {t}")
    mean = x.mean(axis=0)
    decomp = numerics.svd(x - mean)
    components = decomp.vt[:k]
    explained = decomp.singular_values[:k] ** 2 / (n - 1)
    return PcaModel(mean, components, explained)


def transform_pca(model: PcaModel, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[1] != model.mean.shape[0]:
        raise ValueError("feature count does not match fitted model")
    return (x - model.mean) @ model.components.T


def inverse_transform_pca(model: PcaModel, z: np.ndarray) -> np.ndarray:
    return np.asarray(z, dtype=float) @ model.components + model.mean


def fit_ica(x: np.ndarray, k: int = 5, seed: int = 0,
            tol: float = 1e-4, max_iter: int = 200) -> IcaModel:
    """FastICA with logcosh contrast and symmetric decorrelation."""
    x = np.asarray(x, dtype=float)
    n, t = x.shape
    if n < k:
        raise ValueError(f"need at least {k} samples, got {n}")
    mean = x.mean(axis=0)
    xc = x - mean

    cov = (xc.T @ xc) / n
    eig = numerics.symmetric_eigen(cov)
    vals = np.maximum(eig.values[:k], 1e-12 * max(eig.values[0], 1e-300))
    whitening = (eig.vectors[:, :k] / np.sqrt(vals)[None, :]).T  # (k, T)
    z = xc @ whitening.T  # (n, k), identity covariance

    rng = numerics.seeded_rng(seed)
    w = _sym_decorrelate(rng.standard_normal((k, k)))
    converged = False
    for _ in range(max_iter):
        y = z @ w.T  # (n, k) current source estimates
        g = np.tanh(y)
        g_prime = 1.0 - g ** 2
        w_new = (g.T @ z) / n - np.diag(g_prime.mean(axis=0)) @ w
        w_new = _sym_decorrelate(w_new)
        delta = np.max(np.abs(np.abs(np.einsum("ij,ij->i", w_new, w)) - 1.0))
        w = w_new
        if delta < tol:
            converged = True
            break
    return IcaModel(mean, whitening, w, w @ whitening, converged)


def _sym_decorrelate(w: np.ndarray) -> np.ndarray:
    eig = numerics.symmetric_eigen(w @ w.T)
    inv_sqrt = (eig.vectors / np.sqrt(np.maximum(eig.values, 1e-18))[None, :]) @ eig.vectors.T
    return inv_sqrt @ w


def transform_ica(model: IcaModel, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[1] != model.mean.shape[0]:
        raise ValueError("feature count does not match fitted model")
    return (x - model.mean) @ model.components.T
