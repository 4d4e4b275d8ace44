"""Dense linear-algebra and distance kernels shared by the pipelines.

Backed by numpy's LAPACK bindings with a fixed sign convention so that
eigen/singular vectors are reproducible across runs.  The RNG is numpy's
PCG64, a 64-bit counter-based generator with cross-platform streams.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit


class DegenerateCovarianceError(ValueError):
    """Covariance not positive definite even after jitter."""


@dataclass(frozen=True)
class SymEigen:
    values: np.ndarray  # descending
    vectors: np.ndarray  # orthonormal columns


@dataclass(frozen=True)
class Svd:
    u: np.ndarray
    singular_values: np.ndarray  # descending, >= 0
    vt: np.ndarray


def _fix_vector_signs(vectors_cols: np.ndarray) -> np.ndarray:
    """Flip each column so its largest-magnitude entry is positive."""
    idx = np.argmax(np.abs(vectors_cols), axis=0)
    signs = np.sign(vectors_cols[idx, np.arange(vectors_cols.shape[1])])
    signs[signs == 0] = 1.0
    return vectors_cols * signs[None, :]


def symmetric_eigen(a: np.ndarray) -> SymEigen:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    scale = max(1.0, float(np.max(np.abs(a))) if a.size else 1.0)
    if np.max(np.abs(a - a.T)) > 1e-10 * scale:
        raise ValueError("matrix is not symmetric")
    values, vectors = np.linalg.eigh((a + a.T) / 2.0)
    order = np.argsort(values)[::-1]
    return SymEigen(values[order], _fix_vector_signs(vectors[:, order]))


def svd(a: np.ndarray) -> Svd:
    a = np.asarray(a, dtype=float)
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix must be finite")
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    v_fixed = _fix_vector_signs(vt.T)
    signs = np.einsum("ij,ij->j", vt.T, v_fixed)  # +-1 per vector
    signs = np.sign(signs)
    signs[signs == 0] = 1.0
    return Svd(u * signs[None, :], s, v_fixed.T)


def pairwise_sq_dist(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    sq = np.einsum("ij,ij->i", x, x)
    d = x @ x.T
    d *= -2.0
    d += sq[:, None]
    d += sq[None, :]
    np.maximum(d, 0.0, out=d)
    _symmetrize_inplace(d)
    np.fill_diagonal(d, 0.0)
    return d


@njit(cache=True)
def _symmetrize_inplace(d: np.ndarray) -> None:
    """Average d with its transpose, tiled for cache locality."""
    n = d.shape[0]
    tile = 64
    for bi in range(0, n, tile):
        for bj in range(bi, n, tile):
            for i in range(bi, min(bi + tile, n)):
                lo = max(i + 1, bj)
                for j in range(lo, min(bj + tile, n)):
                    v = (d[i, j] + d[j, i]) / 2.0
                    d[i, j] = v
                    d[j, i] = v


def cross_sq_dist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances between rows of a and rows of b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    sa = np.einsum("ij,ij->i", a, a)
    sb = np.einsum("ij,ij->i", b, b)
    return np.maximum(sa[:, None] + sb[None, :] - 2.0 * (a @ b.T), 0.0)


def cholesky_with_jitter(a: np.ndarray, jitter: float) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    try:
        return np.linalg.cholesky(a + jitter * np.eye(a.shape[0]))
    except np.linalg.LinAlgError:
        raise DegenerateCovarianceError(
            f"matrix not positive definite with jitter {jitter}"
        ) from None


def seeded_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))
