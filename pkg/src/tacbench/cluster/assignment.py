"""Shared result and method-spec types for the clustering pipelines."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

METHOD_IDS = (
    "KMeans", "MBK", "PcaKMeans", "PcaMBK", "IcaKMeans", "IcaMBK",
    "GMM", "AC", "Spectral", "Birch", "AP", "MeanShift",
    "DBSCAN", "OPTICS", "FCM",
)

# Methods where the cluster count is specified up front (k = 5).
K_SPECIFIED_IDS = tuple(m for m in METHOD_IDS
                        if m not in ("OPTICS", "AP", "MeanShift", "DBSCAN"))


@dataclass
class ClusterAssignment:
    labels: np.ndarray  # n cluster indices in [0, k_found); -1 for noise
    k_found: int
    memberships: np.ndarray | None = None
    noise_mask: np.ndarray | None = None
    fit_seconds: float = 0.0
    reduce_seconds: float | None = None
    converged: bool = True
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class MethodSpec:
    id: str
    k: int | None = 5
    hyperparameters: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.id not in METHOD_IDS:
            raise ValueError(f"unknown method id {self.id!r}")
        if self.id in K_SPECIFIED_IDS:
            if self.k is None or self.k < 1:
                raise ValueError(f"method {self.id} requires k >= 1")
