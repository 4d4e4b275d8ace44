"""Birch: CF-tree condensation followed by Ward on subcluster centroids."""

from __future__ import annotations

import numpy as np

from tacbench.cluster.assignment import ClusterAssignment
from tacbench.cluster.hierarchy import ward_agglomerative


class _Subcluster:
    """Leaf CF entry: (count, linear sum, squared norm sum) + member rows."""

    __slots__ = ("n", "ls", "ss", "members")

    def __init__(self, point: np.ndarray, index: int):
        self.n = 1
        self.ls = point.copy()
        self.ss = float(point @ point)
        self.members = [index]

    @property
    def centroid(self) -> np.ndarray:
        return self.ls / self.n

    def radius_with(self, point: np.ndarray) -> float:
        n = self.n + 1
        ls = self.ls + point
        ss = self.ss + float(point @ point)
        var = ss / n - float(ls @ ls) / n ** 2
        return float(np.sqrt(max(var, 0.0)))

    def absorb(self, point: np.ndarray, index: int):
        self.n += 1
        self.ls += point
        self.ss += float(point @ point)
        self.members.append(index)


class _Node:
    """Tree node caching its children's centroids in a dense block."""

    __slots__ = ("is_leaf", "children", "cents", "n", "ls")

    def __init__(self, is_leaf: bool, branching: int, dim: int):
        self.is_leaf = is_leaf
        self.children = []  # subclusters (leaf) or nodes (internal)
        self.cents = np.empty((branching + 1, dim))
        self.n = 0
        self.ls = np.zeros(dim)

    @property
    def centroid(self) -> np.ndarray:
        return self.ls / self.n

    def nearest(self, point: np.ndarray) -> int:
        block = self.cents[: len(self.children)]
        return int(np.argmin(((block - point) ** 2).sum(axis=1)))

    def append(self, child):
        self.cents[len(self.children)] = child.centroid
        self.children.append(child)

    def refresh(self, pos: int):
        self.cents[pos] = self.children[pos].centroid


def _split(node: _Node, branching: int, dim: int):
    """Split an overfull node into two around its farthest child pair."""
    cents = node.cents[: len(node.children)]
    d = ((cents[:, None, :] - cents[None, :, :]) ** 2).sum(axis=2)
    i, j = np.unravel_index(np.argmax(d), d.shape)
    left = _Node(node.is_leaf, branching, dim)
    right = _Node(node.is_leaf, branching, dim)
    di = ((cents - cents[i]) ** 2).sum(axis=1)
    dj = ((cents - cents[j]) ** 2).sum(axis=1)
    for idx, child in enumerate(node.children):
        target = left if di[idx] <= dj[idx] else right
        target.append(child)
        target.n += child.n
        target.ls = target.ls + child.ls
    return left, right


def _insert(node: _Node, point: np.ndarray, index: int, threshold: float,
            branching: int, leaves: list):
    """Insert a point; returns (left, right) if the node split."""
    dim = point.shape[0]
    node.n += 1
    node.ls += point
    if node.is_leaf:
        if node.children:
            pos = node.nearest(point)
            sub = node.children[pos]
            if sub.radius_with(point) <= threshold:
                sub.absorb(point, index)
                node.refresh(pos)
                return None
        sub = _Subcluster(point, index)
        leaves.append(sub)
        node.append(sub)
        if len(node.children) > branching:
            return _split(node, branching, dim)
        return None

    pos = node.nearest(point)
    child = node.children[pos]
    result = _insert(child, point, index, threshold, branching, leaves)
    if result is None:
        node.refresh(pos)
        return None
    left, right = result
    node.children[pos] = left
    node.cents[pos] = left.centroid
    node.append(right)
    if len(node.children) > branching:
        return _split(node, branching, dim)
    return None


def birch(x: np.ndarray, k: int, threshold: float = 0.5,
          branching: int = 50) -> ClusterAssignment:
    x = np.asarray(x, dtype=float)
    n, dim = x.shape
    if n < k:
        raise ValueError(f"need at least k={k} points, got {n}")
    root = _Node(True, branching, dim)
    leaves: list[_Subcluster] = []
    for i in range(n):
        result = _insert(root, x[i], i, threshold, branching, leaves)
        if result is not None:
            new_root = _Node(False, branching, dim)
            for part in result:
                new_root.append(part)
                new_root.n += part.n
                new_root.ls = new_root.ls + part.ls
            root = new_root

    centroids = np.array([s.centroid for s in leaves])
    if len(leaves) <= k:
        sub_labels = np.arange(len(leaves))
        k_found = len(leaves)
    else:
        global_step = ward_agglomerative(centroids, k)
        sub_labels = global_step.labels
        k_found = global_step.k_found
    labels = np.empty(n, dtype=int)
    for sub, lab in zip(leaves, sub_labels):
        labels[sub.members] = lab
    return ClusterAssignment(
        labels=labels, k_found=int(k_found),
        extra={"n_subclusters": len(leaves)},
    )
