"""Synthetic five-organ TAC clustering benchmark toolkit."""

from tacbench.tacgen import (
    ORGANS,
    FrameSchedule,
    OrganKineticTemplate,
    SyntheticConfig,
    TacDataset,
    default_frame_schedule,
    generate_dataset,
    load_dataset,
    organ_template,
    save_dataset,
)
from tacbench.cluster import ClusterAssignment, MethodSpec, METHOD_IDS, run_method
from tacbench.evaluate import CanonicalClustering, EvalReport, best_matching, canonicalize

__all__ = [
    "ORGANS",
    "FrameSchedule",
    "OrganKineticTemplate",
    "SyntheticConfig",
    "TacDataset",
    "default_frame_schedule",
    "generate_dataset",
    "load_dataset",
    "organ_template",
    "save_dataset",
    "ClusterAssignment",
    "MethodSpec",
    "METHOD_IDS",
    "run_method",
    "CanonicalClustering",
    "EvalReport",
    "best_matching",
    "canonicalize",
]
