"""Depth-truncated combinatorial horoballs over a finite metric base."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .graph import Graph, distances
from .groups import BudgetError


class MetricError(ValueError):
    pass


@dataclass
class HoroballGraph:
    """Vertex (i, n) -- base point i at level n -- has id ``n * len(base) + i``."""

    graph: Graph
    base: list[str]
    metric: np.ndarray
    depth: int

    def vertex(self, i: int, level: int) -> int:
        return level * len(self.base) + i

    def level(self, v: int) -> int:
        return v // len(self.base)


def horizontal_pairs(metric: np.ndarray, level: int) -> np.ndarray:
    """Index pairs (i < j) joined at ``level``: 0 < d(i, j) <= 2**level (level >= 1)."""
    if level < 1:
        return np.zeros((0, 2), dtype=np.int64)
    i, j = np.nonzero(np.triu((metric > 0) & (metric <= 2 ** level), k=1))
    return np.stack([i, j], axis=1)


def validate_metric(metric: np.ndarray) -> None:
    """Reject non-metrics, citing a violating pair or triple."""
    d = np.asarray(metric)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise MetricError("metric must be a square matrix")
    if (np.diag(d) != 0).any():
        i = int(np.nonzero(np.diag(d))[0][0])
        raise MetricError(f"d({i},{i}) != 0")
    bad = np.argwhere(d != d.T)
    if len(bad):
        i, j = bad[0]
        raise MetricError(f"asymmetric: d({i},{j}) != d({j},{i})")
    off = ~np.eye(len(d), dtype=bool)
    if (d[off] <= 0).any():
        i, j = np.argwhere((d <= 0) & off)[0]
        raise MetricError(f"distinct points at distance <= 0: ({i},{j})")
    for k in range(len(d)):
        viol = d > d[:, [k]] + d[[k], :]
        if viol.any():
            i, j = np.argwhere(viol)[0]
            raise MetricError(f"triangle inequality fails for ({i},{j},{k})")


def build_horoball(base: Sequence[str], metric: np.ndarray | Callable[[int, int], int],
                   depth: int, budget: int = 1_000_000) -> HoroballGraph:
    """Combinatorial horoball on ``base`` truncated at ``depth``.

    Vertical edges (x, n)-(x, n+1); horizontal edges (x, n)-(y, n) exactly when
    n >= 1 and 0 < d(x, y) <= 2**n.  Labels are ``"(x, n)"``.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    k = len(base)
    if k * (depth + 1) > budget:
        raise BudgetError("horoball", k * (depth + 1), budget)
    if callable(metric):
        metric = np.array([[metric(i, j) for j in range(k)] for i in range(k)], dtype=np.int64)
    metric = np.asarray(metric, dtype=np.int64)
    validate_metric(metric)
    edges = [np.stack([np.arange(k) + n * k, np.arange(k) + (n + 1) * k], axis=1) for n in range(depth)]
    for n in range(1, depth + 1):
        edges.append(horizontal_pairs(metric, n) + n * k)
    labels = [f"({b}, {n})" for n in range(depth + 1) for b in base]
    g = Graph(k * (depth + 1), np.concatenate(edges) if edges else np.zeros((0, 2)), labels)
    return HoroballGraph(g, list(base), metric, depth)


def horoball_distance_profile(h: HoroballGraph) -> dict[int, tuple[int, int]]:
    """Base distance s -> (min, max) graph distance between level-0 points at distance s."""
    k = len(h.base)
    prof: dict[int, tuple[int, int]] = {}
    for i in range(k):
        row = distances(h.graph, [i])[:k]
        for j in range(k):
            s = int(h.metric[i, j])
            d = int(row[j])
            lo, hi = prof.get(s, (d, d))
            prof[s] = (min(lo, d), max(hi, d))
    return dict(sorted(prof.items()))


def segment_horoball(length: int, depth: int) -> HoroballGraph:
    """Horoball over the integer segment {0..length} with |x - y|."""
    pts = np.arange(length + 1)
    return build_horoball([str(p) for p in pts], np.abs(pts[:, None] - pts[None, :]), depth)
