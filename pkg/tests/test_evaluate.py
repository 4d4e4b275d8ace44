from itertools import permutations

import numpy as np
import pytest

from tacbench import evaluate
from tacbench.cluster.assignment import ClusterAssignment
from tacbench.evaluate import best_matching, canonicalize, summarize_over_patients
from tacbench.tacgen import ORGANS


def assignment(labels, noise=None):
    labels = np.asarray(labels)
    k = int(len(np.unique(labels[labels >= 0])))
    return ClusterAssignment(labels=labels, k_found=k,
                             noise_mask=(labels < 0) if noise is None else noise)


class TestCanonicalize:
    def test_identity_when_five_clusters(self):
        labels = np.array([0, 1, 2, 3, 4] * 3)
        c = canonicalize(assignment(labels))
        np.testing.assert_array_equal(c.labels, labels)
        assert c.provenance == {i: i for i in range(5)}

    def test_single_cluster(self):
        c = canonicalize(assignment(np.zeros(10, dtype=int)))
        np.testing.assert_array_equal(c.labels, 0)

    def test_merge_rule_sizes(self):
        sizes = [100, 90, 80, 70, 30, 20, 10]
        labels = np.concatenate([np.full(s, i) for i, s in enumerate(sizes)])
        c = canonicalize(assignment(labels))
        counts = np.bincount(c.labels, minlength=5)
        np.testing.assert_array_equal(sorted(counts, reverse=True),
                                      [100, 90, 80, 70, 60])

    def test_ties_broken_by_lower_id(self):
        sizes = [10, 10, 10, 10, 10, 10]  # six equal clusters
        labels = np.concatenate([np.full(s, i) for i, s in enumerate(sizes)])
        c = canonicalize(assignment(labels))
        assert c.provenance[0] == 0 and c.provenance[3] == 3
        assert c.provenance[4] == 4 and c.provenance[5] == 4

    def test_noise_joins_fifth_when_many_clusters(self):
        labels = np.concatenate([np.full(10, i) for i in range(7)]
                                + [np.full(3, -1)])
        c = canonicalize(assignment(labels))
        assert c.provenance[-1] == 4

    def test_noise_joins_smallest_when_few_clusters(self):
        labels = np.array([0] * 8 + [1] * 4 + [-1] * 2)
        c = canonicalize(assignment(labels))
        assert c.provenance[-1] == 2  # an empty canonical cluster
        assert np.all(c.labels[-2:] == 2)

    def test_all_noise(self):
        labels = np.full(6, -1)
        c = canonicalize(assignment(labels))
        np.testing.assert_array_equal(c.labels, 0)

    def test_preserves_n_and_caps_ids(self):
        rng = np.random.default_rng(0)
        for k in (1, 2, 7, 94, 179):
            labels = rng.integers(0, k, size=400)
            c = canonicalize(assignment(labels))
            assert len(c.labels) == 400
            assert set(np.unique(c.labels)).issubset(set(range(5)))


def matching_oracle(canon_labels, truth):
    """Independent exhaustive search over all 120 permutations."""
    best = -1.0
    for perm in permutations(range(5)):
        correct = sum(1 for c, t in zip(canon_labels, truth)
                      if ORGANS[perm[c]] == t)
        best = max(best, correct / len(truth))
    return best


class TestBestMatching:
    def test_perfect_clustering(self):
        truth = [o for o in ORGANS for _ in range(4)]
        labels = np.repeat([4, 3, 2, 1, 0], 4)  # permuted naming
        report = best_matching(canonicalize(assignment(labels)), truth)
        assert report.accuracy == 1.0
        for organ in ORGANS:
            assert report.per_organ[organ]["precision"] == 1.0
            assert report.per_organ[organ]["recall"] == 1.0

    def test_single_cluster_balanced(self):
        truth = [o for o in ORGANS for _ in range(10)]
        report = best_matching(canonicalize(assignment(np.zeros(50, dtype=int))),
                               truth)
        assert report.accuracy == pytest.approx(0.2, abs=0)
        matched = ORGANS[report.matching[0]]
        assert report.per_organ[matched]["precision"] == pytest.approx(0.2, abs=0)
        assert report.per_organ[matched]["recall"] == 1.0
        for organ in ORGANS:
            if organ != matched:
                assert report.per_organ[organ]["precision"] == 0.0
                assert report.per_organ[organ]["recall"] == 0.0

    def test_matches_exhaustive_oracle(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            n = int(rng.integers(5, 13))
            labels = rng.integers(0, 5, size=n)
            truth = [ORGANS[i] for i in rng.integers(0, 5, size=n)]
            c = canonicalize(assignment(labels))
            report = best_matching(c, truth)
            assert report.accuracy == pytest.approx(
                matching_oracle(c.labels, truth), abs=0)

    def test_confusion_sums_and_accuracy(self):
        rng = np.random.default_rng(2)
        labels = rng.integers(0, 5, size=60)
        truth = [ORGANS[i] for i in rng.integers(0, 5, size=60)]
        report = best_matching(canonicalize(assignment(labels)), truth)
        assert report.confusion.sum() == 60
        assert report.accuracy == pytest.approx(np.trace(report.confusion) / 60)

    def test_accuracy_equals_recall_weighted_sum(self):
        rng = np.random.default_rng(3)
        labels = rng.integers(0, 5, size=80)
        truth = [ORGANS[i] for i in rng.integers(0, 5, size=80)]
        report = best_matching(canonicalize(assignment(labels)), truth)
        total = sum(report.per_organ[o]["recall"] * report.confusion[i, :].sum() / 80
                    for i, o in enumerate(ORGANS))
        assert report.accuracy == pytest.approx(total, abs=1e-12)

    def test_invariant_under_cluster_relabeling(self):
        rng = np.random.default_rng(4)
        labels = rng.integers(0, 5, size=40)
        truth = [ORGANS[i] for i in rng.integers(0, 5, size=40)]
        base = best_matching(canonicalize(assignment(labels)), truth).accuracy
        perm = np.array([3, 0, 4, 1, 2])
        relabeled = perm[labels]
        assert best_matching(canonicalize(assignment(relabeled)),
                             truth).accuracy == base

    def test_hand_confusion(self):
        # true organ 0: 3 in cluster 0, 1 in cluster 1; organ 1: 4 in cluster 1
        labels = np.array([0, 0, 0, 1, 1, 1, 1, 1])
        truth = [ORGANS[0]] * 4 + [ORGANS[1]] * 4
        report = best_matching(canonicalize(assignment(labels)), truth)
        assert report.accuracy == pytest.approx(7 / 8)
        assert report.per_organ[ORGANS[0]]["precision"] == 1.0
        assert report.per_organ[ORGANS[0]]["recall"] == pytest.approx(0.75)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            best_matching(canonicalize(assignment(np.zeros(3, dtype=int))),
                          [ORGANS[0]] * 4)

    def test_metric_accessors(self):
        truth = [o for o in ORGANS for _ in range(2)]
        labels = np.repeat(np.arange(5), 2)
        report = best_matching(canonicalize(assignment(labels)), truth)
        assert evaluate.accuracy(report) == 1.0
        assert evaluate.precision(report, "heart") == 1.0
        assert evaluate.recall(report, "bladder") == 1.0
        with pytest.raises(ValueError):
            evaluate.precision(report, "liver")


class TestSummarize:
    def _report(self, acc):
        truth = [o for o in ORGANS for _ in range(2)]
        labels = np.repeat(np.arange(5), 2)
        report = best_matching(canonicalize(assignment(labels)), truth)
        report.accuracy = acc
        return report

    def test_single_report(self):
        summary = summarize_over_patients([self._report(0.7)])
        assert summary["accuracy"]["median"] == 0.7
        assert summary["accuracy"]["sd"] == 0.0

    def test_constant_accuracies(self):
        summary = summarize_over_patients([self._report(0.2)] * 3)
        assert summary["accuracy"]["median"] == 0.2
        assert summary["accuracy"]["sd"] == 0.0

    def test_even_count_median(self):
        reports = [self._report(a) for a in (0.1, 0.2, 0.4, 0.8)]
        summary = summarize_over_patients(reports)
        assert summary["accuracy"]["median"] == pytest.approx(0.3)

    def test_empty_list_rejected(self):
        with pytest.raises(ValueError):
            summarize_over_patients([])
