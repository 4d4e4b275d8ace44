from tacbench.cluster.affinity import affinity_propagation
from tacbench.cluster.assignment import (
    ClusterAssignment,
    K_SPECIFIED_IDS,
    METHOD_IDS,
    MethodSpec,
)
from tacbench.cluster.birch import birch
from tacbench.cluster.density import dbscan, optics
from tacbench.cluster.dispatch import DEFAULT_HYPERPARAMETERS, MethodError, run_method
from tacbench.cluster.fcm import fcm
from tacbench.cluster.gmm import DegenerateComponentError, gmm_fit
from tacbench.cluster.hierarchy import cut_linkage, ward_agglomerative, ward_linkage
from tacbench.cluster.kmeans import kmeans, mini_batch_kmeans
from tacbench.cluster.meanshift import estimate_bandwidth, mean_shift
from tacbench.cluster.spectral import normalized_laplacian, spectral, spectral_from_affinity

__all__ = [
    "ClusterAssignment",
    "MethodSpec",
    "METHOD_IDS",
    "K_SPECIFIED_IDS",
    "DEFAULT_HYPERPARAMETERS",
    "MethodError",
    "run_method",
    "kmeans",
    "mini_batch_kmeans",
    "gmm_fit",
    "DegenerateComponentError",
    "fcm",
    "ward_agglomerative",
    "ward_linkage",
    "cut_linkage",
    "birch",
    "spectral",
    "spectral_from_affinity",
    "normalized_laplacian",
    "dbscan",
    "optics",
    "mean_shift",
    "estimate_bandwidth",
    "affinity_propagation",
]
