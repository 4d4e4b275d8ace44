"""Dispatch layer exposing the 15 named clustering pipelines."""

from __future__ import annotations

import time

import numpy as np

from tacbench import reduce as dimreduce
from tacbench.cluster.affinity import affinity_propagation
from tacbench.cluster.assignment import ClusterAssignment, MethodSpec
from tacbench.cluster.birch import birch
from tacbench.cluster.density import dbscan, optics
from tacbench.cluster.fcm import fcm
from tacbench.cluster.gmm import gmm_fit
from tacbench.cluster.hierarchy import ward_agglomerative
from tacbench.cluster.kmeans import kmeans, mini_batch_kmeans
from tacbench.cluster.meanshift import mean_shift
from tacbench.cluster.spectral import spectral

DEFAULT_HYPERPARAMETERS = {
    "KMeans": {"n_init": 10, "max_iter": 300, "tol": 1e-4},
    "MBK": {"batch_size": 1024, "max_iter": 100, "tol": 1e-4, "n_init": 8},
    "PcaKMeans": {"n_components": 5, "n_init": 10, "max_iter": 300, "tol": 1e-4},
    "PcaMBK": {"n_components": 5, "batch_size": 1024, "max_iter": 100,
               "tol": 1e-4, "n_init": 8},
    "IcaKMeans": {"n_components": 5, "n_init": 10, "max_iter": 300, "tol": 1e-4},
    "IcaMBK": {"n_components": 5, "batch_size": 1024, "max_iter": 100,
               "tol": 1e-4, "n_init": 8},
    "GMM": {"tol": 1e-3, "max_iter": 100, "jitter": 1e-6},
    "AC": {},
    "Spectral": {"gamma": 1.0},
    "Birch": {"threshold": 0.5, "branching": 50},
    "AP": {"damping": 0.5, "max_iter": 200, "convergence_iter": 15},
    "MeanShift": {"bandwidth": None},
    "DBSCAN": {"eps": 0.5, "min_pts": 5},
    "OPTICS": {"min_pts": 5, "xi": 0.05},
    "FCM": {"m": 2.0, "tol": 1e-4, "max_iter": 300},
}


class MethodError(RuntimeError):
    """A clustering pipeline failed; carries the method id."""

    def __init__(self, method_id: str, cause: Exception):
        super().__init__(f"{method_id}: {cause}")
        self.method_id = method_id
        self.cause = cause


def _params(spec: MethodSpec) -> dict:
    params = dict(DEFAULT_HYPERPARAMETERS[spec.id])
    params.update(spec.hyperparameters)
    return params


def run_method(spec: MethodSpec, x: np.ndarray,
               standardize: bool = False) -> ClusterAssignment:
    """Run one of the 15 pipelines on a (n, T) curve matrix."""
    x = np.asarray(x, dtype=float)
    if standardize:
        sd = x.std(axis=0)
        sd[sd == 0.0] = 1.0
        x = (x - x.mean(axis=0)) / sd
    p = _params(spec)
    try:
        return _run(spec, x, p)
    except MethodError:
        raise
    except Exception as exc:
        raise MethodError(spec.id, exc) from exc


def _run(spec: MethodSpec, x: np.ndarray, p: dict) -> ClusterAssignment:
    mid = spec.id
    if mid in ("PcaKMeans", "PcaMBK", "IcaKMeans", "IcaMBK"):
        k_red = p.pop("n_components")
        t0 = time.perf_counter()
        if mid.startswith("Pca"):
            model = dimreduce.fit_pca(x, k=k_red)
            z = dimreduce.transform_pca(model, x)
        else:
            model = dimreduce.fit_ica(x, k=k_red, seed=spec.seed)
            z = dimreduce.transform_ica(model, x)
        reduce_seconds = time.perf_counter() - t0
        t0 = time.perf_counter()
        if mid.endswith("MBK"):
            result = mini_batch_kmeans(z, spec.k, seed=spec.seed, **p)
        else:
            result = kmeans(z, spec.k, seed=spec.seed, **p)
        result.fit_seconds = time.perf_counter() - t0
        result.reduce_seconds = reduce_seconds
        return result

    t0 = time.perf_counter()
    if mid == "KMeans":
        result = kmeans(x, spec.k, seed=spec.seed, **p)
    elif mid == "MBK":
        result = mini_batch_kmeans(x, spec.k, seed=spec.seed, **p)
    elif mid == "GMM":
        result = gmm_fit(x, spec.k, seed=spec.seed, **p)
    elif mid == "FCM":
        result = fcm(x, spec.k, seed=spec.seed, **p)
    elif mid == "AC":
        result = ward_agglomerative(x, spec.k, **p)
    elif mid == "Spectral":
        result = spectral(x, spec.k, seed=spec.seed, **p)
    elif mid == "Birch":
        result = birch(x, spec.k, **p)
    elif mid == "AP":
        result = affinity_propagation(x, seed=spec.seed, **p)
    elif mid == "MeanShift":
        result = mean_shift(x, **p)
    elif mid == "DBSCAN":
        result = dbscan(x, **p)
    elif mid == "OPTICS":
        result = optics(x, **p)
    else:
        raise ValueError(f"unknown method id {mid!r}")
    result.fit_seconds = time.perf_counter() - t0
    return result
