"""Canonicalization to five clusters, label matching, and metrics.

Raw clusterings with more than five clusters keep their four largest
clusters and merge the rest (plus any noise points) into a fifth one;
clusterings with at most five clusters keep their identity, with noise
points joining the least-populated canonical cluster.  Cluster ids are
matched to organs by the permutation maximizing accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from tacbench.cluster.assignment import ClusterAssignment
from tacbench.tacgen import ORGANS

TARGET_K = 5


@dataclass
class CanonicalClustering:
    labels: np.ndarray  # n indices in [0, 5)
    provenance: dict  # original cluster id (or -1 for noise) -> canonical id


@dataclass
class EvalReport:
    accuracy: float
    confusion: np.ndarray  # (5, 5): rows true organ, cols matched cluster
    per_organ: dict  # organ -> {"precision": float, "recall": float}
    matching: tuple  # canonical cluster id -> organ index


def canonicalize(a: ClusterAssignment, target_k: int = TARGET_K) -> CanonicalClustering:
    labels = np.asarray(a.labels)
    noise = labels < 0
    clustered = labels[~noise]
    ids, counts = (np.unique(clustered, return_counts=True) if clustered.size
                   else (np.array([], dtype=int), np.array([], dtype=int)))
    k_found = len(ids)

    provenance = {}
    if k_found > target_k:
        order = np.lexsort((ids, -counts))  # largest first, ties: lower id
        kept = sorted(ids[order[: target_k - 1]])
        for canon, orig in enumerate(kept):
            provenance[int(orig)] = canon
        for orig in ids:
            if int(orig) not in provenance:
                provenance[int(orig)] = target_k - 1
        provenance[-1] = target_k - 1
    else:
        for canon, orig in enumerate(sorted(ids)):
            provenance[int(orig)] = canon
        if noise.any():
            pops = np.zeros(target_k, dtype=int)
            for orig, canon in provenance.items():
                pops[canon] += int(counts[np.searchsorted(ids, orig)])
            provenance[-1] = int(np.argmin(pops))  # ties: lowest id

    canon_labels = np.empty(len(labels), dtype=int)
    for orig, canon in provenance.items():
        canon_labels[labels == orig] = canon
    return CanonicalClustering(canon_labels, provenance)


def _count_matrix(canonical_labels: np.ndarray, truth, organs) -> np.ndarray:
    organ_index = {o: i for i, o in enumerate(organs)}
    truth_idx = np.array([organ_index[t] for t in truth])
    counts = np.zeros((len(organs), TARGET_K), dtype=np.int64)
    np.add.at(counts, (truth_idx, canonical_labels), 1)
    return counts


def best_matching(c: CanonicalClustering, truth, organs=ORGANS) -> EvalReport:
    if len(c.labels) != len(truth):
        raise ValueError("label vectors have different lengths")
    distinct = set(truth)
    if not distinct.issubset(set(organs)) or len(distinct) > TARGET_K:
        raise ValueError("truth labels must be at most five known organs")
    counts = _count_matrix(c.labels, truth, organs)
    n = int(counts.sum())

    best_perm = None
    best_correct = -1
    for perm in permutations(range(TARGET_K)):  # perm: cluster -> organ
        correct = int(sum(counts[perm[j], j] for j in range(TARGET_K)))
        if correct > best_correct:
            best_correct = correct
            best_perm = perm

    inv = [0] * TARGET_K  # organ -> cluster
    for j, o in enumerate(best_perm):
        inv[o] = j
    confusion = counts[:, inv]
    per_organ = {}
    for i, organ in enumerate(organs):
        col = int(confusion[:, i].sum())
        row = int(confusion[i, :].sum())
        per_organ[organ] = {
            "precision": float(confusion[i, i] / col) if col else 0.0,
            "recall": float(confusion[i, i] / row) if row else 0.0,
        }
    return EvalReport(
        accuracy=float(best_correct / n) if n else 0.0,
        confusion=confusion,
        per_organ=per_organ,
        matching=best_perm,
    )


def accuracy(report: EvalReport) -> float:
    return report.accuracy


def precision(report: EvalReport, organ: str) -> float:
    if organ not in report.per_organ:
        raise ValueError(f"unknown organ {organ!r}")
    return report.per_organ[organ]["precision"]


def recall(report: EvalReport, organ: str) -> float:
    if organ not in report.per_organ:
        raise ValueError(f"unknown organ {organ!r}")
    return report.per_organ[organ]["recall"]


def summarize_over_patients(reports, organs=ORGANS) -> dict:
    """Medians and population standard deviations across patients."""
    if not reports:
        raise ValueError("need at least one report")
    summary = {"accuracy": _med_sd([r.accuracy for r in reports])}
    for organ in organs:
        summary[f"precision_{organ}"] = _med_sd(
            [r.per_organ[organ]["precision"] for r in reports])
        summary[f"recall_{organ}"] = _med_sd(
            [r.per_organ[organ]["recall"] for r in reports])
    return summary


def _med_sd(values) -> dict:
    arr = np.asarray(values, dtype=float)
    sd = 0.0 if np.all(arr == arr[0]) else float(arr.std(ddof=0))
    return {"median": float(np.median(arr)), "sd": sd}
