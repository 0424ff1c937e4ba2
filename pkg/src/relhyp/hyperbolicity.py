"""Slim-triangle hyperbolicity estimates, quasigeodesic stability and
triangle-side overlap diameters."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graph import Graph, distances, geodesic_dag, hausdorff, one_geodesic

EXHAUSTIVE_LIMIT = 200


class QuasiGeodesicError(ValueError):
    def __init__(self, i: int, j: int, d: int, lam: float, K: float):
        super().__init__(f"path is not a ({lam}, {K})-quasigeodesic: indices ({i}, {j}) at distance {d}")
        self.pair = (i, j)


@dataclass
class TriangleSample:
    vertices: tuple[int, int, int]
    sides: tuple[list[int], list[int], list[int]]  # [a,b], [b,c], [c,a]
    defect: int


@dataclass
class DeltaEstimate:
    delta: int
    witness: TriangleSample | None
    mode: str
    triangles: int


def side(g: Graph, u: int, v: int) -> list[int]:
    """Least-id geodesic between u and v, always computed from the smaller id."""
    if u <= v:
        return one_geodesic(g, u, v)
    return one_geodesic(g, v, u)[::-1]


def triangle(g: Graph, a: int, b: int, c: int) -> tuple[list[int], list[int], list[int]]:
    return side(g, a, b), side(g, b, c), side(g, c, a)


def _check_sides(sides) -> None:
    p, q, r = sides
    if not (p and q and r):
        raise ValueError("triangle sides must be nonempty")
    if p[-1] != q[0] or q[-1] != r[0] or r[-1] != p[0]:
        raise ValueError(f"triangle sides do not share endpoints: [{p[0]},{p[-1]}], [{q[0]},{q[-1]}], [{r[0]},{r[-1]}]")


def slimness(g: Graph, sides: Sequence[Sequence[int]]) -> int:
    """Largest distance from a vertex of one side to the union of the other two."""
    sides = [list(s) for s in sides]
    _check_sides(sides)
    worst = 0
    for i in range(3):
        others = sides[(i + 1) % 3] + sides[(i + 2) % 3]
        # both endpoints of side i lie on the other sides, so half its length bounds the search
        d = distances(g, others, limit=len(sides[i]) // 2 + 1)
        worst = max(worst, int(d[np.asarray(sides[i])].max()))
    return worst


def _exhaustive(g: Graph, all_geodesics: bool) -> DeltaEstimate:
    n = g.n
    if all_geodesics:
        best, wit, count = 0, None, 0
        paths = {}
        for u, v in itertools.combinations_with_replacement(range(n), 2):
            paths[u, v] = list(geodesic_dag(g, u, v).paths(limit=64))
        def sides_of(u, v):
            return paths[u, v] if u <= v else [p[::-1] for p in paths[v, u]]
        for a, b, c in itertools.combinations(range(n), 3):
            for s in itertools.product(sides_of(a, b), sides_of(b, c), sides_of(c, a)):
                count += 1
                d = slimness(g, s)
                if d > best or wit is None:
                    best, wit = d, TriangleSample((a, b, c), s, d)
        return DeltaEstimate(best, wit, "exhaustive-all", count)
    D = np.stack([g.dist_from(v) for v in range(n)]).astype(np.int16)
    if (D < 0).any():
        raise ValueError("graph is disconnected")
    # T[u][w, v]: distance from v to side(u, w); M[u][w, v]: v lies on side(u, w)
    T = np.empty((n, n, n), dtype=np.int16)
    M = np.zeros((n, n, n), dtype=bool)
    for u in range(n):
        for w in range(u, n):
            p = side(g, u, w)
            row = D[p].min(axis=0)
            T[u, w] = T[w, u] = row
            M[u, w, p] = M[w, u, p] = True
    best, wit = 0, None
    for a in range(n):
        for b in range(a + 1, n):
            pab = M[a, b]
            # side [a,b] against [b,c] u [c,a], for every c at once
            d1 = np.where(pab[None, :], np.minimum(T[b], T[a]), -1).max(axis=1)
            # side [b,c] against [a,b] u [c,a]
            d2 = np.where(M[b], np.minimum(T[a, b][None, :], T[a]), -1).max(axis=1)
            # side [c,a] against [a,b] u [b,c]
            d3 = np.where(M[a], np.minimum(T[a, b][None, :], T[b]), -1).max(axis=1)
            tot = np.maximum(np.maximum(d1, d2), d3)
            tot[[a, b]] = -1
            c = int(tot.argmax())
            if tot[c] > best or wit is None and tot[c] >= 0:
                best = int(tot[c])
                wit = TriangleSample((a, b, c), triangle(g, a, b, c), best)
    count = n * (n - 1) * (n - 2) // 6
    return DeltaEstimate(best, wit, "exhaustive", count)


def estimate_delta(g: Graph, mode: str = "exhaustive", samples: int = 1000, seed: int = 0,
                   pool: Sequence[int] | None = None, all_geodesics: bool = False) -> DeltaEstimate:
    """delta-hat = max slimness defect over all triples (exhaustive) or ``samples`` random ones.

    ``pool`` restricts sampled corners (e.g. to non-rim vertices of a cusped ball).
    """
    if g.n == 0:
        raise ValueError("empty graph")
    if mode == "exhaustive":
        if g.n > EXHAUSTIVE_LIMIT:
            raise ValueError(f"exhaustive mode is limited to {EXHAUSTIVE_LIMIT} vertices (got {g.n})")
        if g.n < 3:
            return DeltaEstimate(0, None, mode, 0)
        return _exhaustive(g, all_geodesics)
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    rng = random.Random(seed)
    verts = list(pool) if pool is not None else list(range(g.n))
    best, wit = 0, None
    for _ in range(samples):
        a, b, c = (rng.choice(verts) for _ in range(3))
        s = triangle(g, a, b, c)
        d = slimness(g, s)
        if wit is None or d > best:
            best, wit = d, TriangleSample((a, b, c), s, d)
    return DeltaEstimate(best, wit, mode, samples)


def four_point_delta(g: Graph) -> float:
    """Gromov four-point constant: max over w,x,y,z of min((x,z)_w,(y,z)_w) - (x,y)_w.

    Comparable to the slim-triangle constant only up to a bounded factor.
    """
    if g.n > EXHAUSTIVE_LIMIT:
        raise ValueError(f"four-point check is limited to {EXHAUSTIVE_LIMIT} vertices")
    D = np.stack([g.dist_from(v) for v in range(g.n)]).astype(np.int32)
    best = 0
    for w in range(g.n):
        dw = D[w]
        gp = dw[:, None] + dw[None, :] - D  # twice the Gromov product based at w
        lhs = np.minimum(gp[:, None, :], gp[None, :, :])  # [x, y, z] -> min((x,z), (y,z))
        best = max(best, int((lhs - gp[:, :, None]).max()))
    return best / 2


def quasigeodesic_stability(g: Graph, path: Sequence[int], lam: float, K: float) -> int:
    """Hausdorff distance between a validated (lam, K)-quasigeodesic and a geodesic on its endpoints."""
    path = list(path)
    if not path:
        raise ValueError("path must be nonempty")
    idx = np.arange(len(path))
    D = np.stack([g.dist_from(v)[path] for v in path]).astype(np.float64)
    gap = np.abs(idx[:, None] - idx[None, :])
    bad = (D > lam * gap + K + 1e-9) | (D < gap / lam - K - 1e-9)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise QuasiGeodesicError(int(i), int(j), int(D[i, j]), lam, K)
    return hausdorff(g, path, one_geodesic(g, path[0], path[-1]))


def overlap_diameter(g: Graph, sides: Sequence[Sequence[int]], r: int) -> int:
    """Diameter of {p on [a,c] : d(p,[a,b]) <= r and d(p,[c,b]) <= r}.

    ``sides`` = ([a,b], [b,c], [c,a]) as returned by :func:`triangle`.
    """
    ab, bc, ca = (list(s) for s in sides)
    _check_sides((ab, bc, ca))
    d_ab = distances(g, ab)
    d_bc = distances(g, bc)
    pts = [p for p in ca if d_ab[p] <= r and d_bc[p] <= r]
    if len(pts) < 2:
        return 0
    arr = np.asarray(pts)
    return int(max(g.dist_from(p)[arr].max() for p in pts))
