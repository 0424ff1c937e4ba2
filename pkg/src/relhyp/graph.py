"""Finite unit-length graphs: BFS distances, geodesics, geodesic DAGs, Gromov products."""

from __future__ import annotations

import random
from collections import OrderedDict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

COUNT_CAP = 2 ** 63 - 1


class UnreachableError(ValueError):
    def __init__(self, u: int, v: int):
        super().__init__(f"vertex {v} is not reachable from {u}")
        self.u, self.v = u, v


class Graph:
    """Undirected simple graph in CSR form with sorted adjacency.

    Distance rows from single sources are memoised (the graph itself never
    changes after construction).
    """

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] | np.ndarray,
                 labels: Sequence[str] | None = None, cache_bytes: int = 400 << 20):
        self.n = int(n)
        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        e = e.reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= self.n):
            raise ValueError("edge endpoint out of range")
        e = e[e[:, 0] != e[:, 1]]
        both = np.concatenate([e, e[:, ::-1]])
        if both.size:
            keys = np.unique(both[:, 0] * self.n + both[:, 1])
            src, dst = keys // self.n, keys % self.n
        else:
            src = dst = np.zeros(0, dtype=np.int64)
        self.indices = dst.astype(np.int32)
        self.indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=self.n), out=self.indptr[1:])
        self.m = len(self.indices) // 2
        self.labels = list(labels) if labels is not None else [str(i) for i in range(self.n)]
        if len(self.labels) != self.n:
            raise ValueError("label count does not match vertex count")
        self._cache: OrderedDict[int, np.ndarray] = OrderedDict()
        self._cache_rows = max(8, cache_bytes // max(4 * self.n, 1))

    def __len__(self):
        return self.n

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def edges(self) -> np.ndarray:
        """Edge array (u < v), sorted lexicographically."""
        src = np.repeat(np.arange(self.n), np.diff(self.indptr))
        keep = src < self.indices
        return np.stack([src[keep], self.indices[keep]], axis=1)

    def dist_from(self, source: int) -> np.ndarray:
        """Memoised single-source distance row (do not mutate)."""
        row = self._cache.get(source)
        if row is not None:
            self._cache.move_to_end(source)
            return row
        row = distances(self, [source])
        row.setflags(write=False)
        self._cache[source] = row
        if len(self._cache) > self._cache_rows:
            self._cache.popitem(last=False)
        return row

    def dist(self, u: int, v: int) -> int:
        d = int(self.dist_from(u)[v])
        if d < 0:
            raise UnreachableError(u, v)
        return d

    def induced(self, vertices: Sequence[int]) -> "Graph":
        """Induced subgraph on ``vertices`` (renumbered in the given order)."""
        vs = np.asarray(vertices, dtype=np.int64)
        pos = np.full(self.n, -1, dtype=np.int64)
        pos[vs] = np.arange(len(vs))
        starts, ends = self.indptr[vs], self.indptr[vs + 1]
        counts = ends - starts
        total = int(counts.sum())
        offs = np.repeat(starts - np.cumsum(counts) + counts, counts) + np.arange(total)
        u = np.repeat(np.arange(len(vs)), counts)
        w = pos[self.indices[offs]]
        keep = (w >= 0) & (u < w)
        return Graph(len(vs), np.stack([u[keep], w[keep]], axis=1), [self.labels[v] for v in vs])


def distances(g: Graph, sources: Iterable[int], limit: int | None = None,
              until: int | None = None) -> np.ndarray:
    """Multi-source BFS; -1 marks unreachable (or beyond ``limit``).

    With ``until`` the search stops after the layer containing that vertex.
    """
    dist = np.full(g.n, -1, dtype=np.int32)
    frontier = np.unique(np.asarray(list(sources), dtype=np.int64))
    if frontier.size == 0:
        return dist
    dist[frontier] = 0
    d = 0
    indptr, indices = g.indptr, g.indices
    while frontier.size and (limit is None or d < limit):
        starts = indptr[frontier]
        counts = indptr[frontier + 1] - starts
        total = int(counts.sum())
        if total == 0:
            break
        offs = np.repeat(starts - np.cumsum(counts) + counts, counts) + np.arange(total)
        nb = indices[offs]
        nb = np.unique(nb[dist[nb] < 0])
        d += 1
        dist[nb] = d
        frontier = nb.astype(np.int64)
        if until is not None and dist[until] >= 0:
            break
    return dist


def bfs_distances(g: Graph, source: int) -> dict[int, int]:
    """Exact unit-weight distances from ``source``; unreachable vertices are absent."""
    row = g.dist_from(source)
    reach = np.nonzero(row >= 0)[0]
    return {int(v): int(row[v]) for v in reach}


def one_geodesic(g: Graph, u: int, v: int) -> list[int]:
    """Shortest path u..v; walking back from v, always step to the least-id predecessor."""
    du = g._cache.get(u)
    if du is None:
        du = distances(g, [u], until=v)
    if du[v] < 0:
        raise UnreachableError(u, v)
    path = [v]
    x = v
    while x != u:
        nb = g.neighbors(x)
        x = int(nb[du[nb] == du[x] - 1][0])
        path.append(x)
    path.reverse()
    return path


@dataclass(frozen=True)
class GeodesicDag:
    source: int
    target: int
    length: int
    preds: dict[int, tuple[int, ...]]
    count: int
    saturated: bool

    @property
    def vertices(self) -> list[int]:
        return sorted(self.preds)

    def paths(self, limit: int | None = None) -> Iterator[list[int]]:
        """Enumerate all geodesics source..target (depth-first, least ids first)."""
        emitted = 0
        stack: list[tuple[int, list[int]]] = [(self.target, [self.target])]
        while stack:
            x, suffix = stack.pop()
            if x == self.source:
                yield suffix[::-1]
                emitted += 1
                if limit is not None and emitted >= limit:
                    return
                continue
            for w in sorted(self.preds[x], reverse=True):
                stack.append((w, suffix + [w]))


def geodesic_dag(g: Graph, u: int, v: int) -> GeodesicDag:
    du, dv = g.dist_from(u), g.dist_from(v)
    L = int(du[v])
    if L < 0:
        raise UnreachableError(u, v)
    on = np.nonzero((du >= 0) & (dv >= 0) & (du + dv == L))[0]
    on_set = np.zeros(g.n, dtype=bool)
    on_set[on] = True
    preds: dict[int, tuple[int, ...]] = {}
    for x in on[np.argsort(du[on], kind="stable")]:
        nb = g.neighbors(x)
        preds[int(x)] = tuple(int(w) for w in nb[on_set[nb] & (du[nb] == du[x] - 1)])
    count: dict[int, int] = {u: 1}
    saturated = False
    for x in sorted(preds, key=lambda y: du[y]):
        if x == u:
            continue
        c = sum(count[w] for w in preds[x])
        if c > COUNT_CAP:
            c, saturated = COUNT_CAP, True
        count[x] = c
    return GeodesicDag(u, v, L, preds, count[v], saturated)


def gromov_product(g: Graph, a: int, b: int, w: int) -> Fraction:
    """(a, b)_w = (d(a,w) + d(b,w) - d(a,b)) / 2, exactly."""
    dw = g.dist_from(w)
    if dw[a] < 0:
        raise UnreachableError(w, a)
    if dw[b] < 0:
        raise UnreachableError(w, b)
    return Fraction(int(dw[a]) + int(dw[b]) - g.dist(a, b), 2)


def dist_to_segment(g: Graph, w: int, path: Sequence[int]) -> int:
    if not path:
        raise ValueError("path must be nonempty")
    dw = g.dist_from(w)
    vals = dw[np.asarray(path)]
    if (vals < 0).any():
        raise UnreachableError(w, int(np.asarray(path)[vals < 0][0]))
    return int(vals.min())


def product_gap(g: Graph, samples: int, seed: int = 0,
                pool: Sequence[int] | None = None) -> tuple[Fraction, tuple[int, int, int] | None]:
    """C2-hat: max |(a,b)_w - d(w, one_geodesic(a,b))| over sampled triples, with the argmax."""
    rng = random.Random(seed)
    verts = list(pool) if pool is not None else list(range(g.n))
    best, wit = Fraction(0), None
    for _ in range(samples):
        a, b, w = (rng.choice(verts) for _ in range(3))
        gap = abs(gromov_product(g, a, b, w) - dist_to_segment(g, w, one_geodesic(g, a, b)))
        if wit is None or gap > best:
            best, wit = gap, (a, b, w)
    return best, wit


def hausdorff(g: Graph, A: Sequence[int], B: Sequence[int]) -> int:
    dA = distances(g, A)
    dB = distances(g, B)
    return int(max(dB[np.asarray(A)].max(), dA[np.asarray(B)].max()))


# -- dump format ---------------------------------------------------------------
#
#   <n> <m>
#   <id> <label>        n lines, ascending id
#   <u> <v>             m lines, u < v, ascending (u, v)

def dump_graph(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines += [f"{i} {lab}" for i, lab in enumerate(g.labels)]
    lines += [f"{u} {v}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


def load_graph(text: str) -> Graph:
    rows = text.splitlines()
    try:
        n, m = (int(x) for x in rows[0].split())
    except (IndexError, ValueError):
        raise ValueError("line 1: expected '<vertex count> <edge count>'") from None
    labels = []
    for i in range(n):
        vid, _, lab = rows[1 + i].partition(" ")
        if int(vid) != i:
            raise ValueError(f"line {i + 2}: expected vertex id {i}")
        labels.append(lab)
    edges = []
    for k in range(m):
        u, v = rows[1 + n + k].split()
        edges.append((int(u), int(v)))
    g = Graph(n, edges, labels)
    if g.m != m:
        raise ValueError("edge list contains duplicates or self-loops")
    return g
