"""Truncated cusped spaces: a Cayley ball with a combinatorial horoball glued on
every peripheral coset piece that has at least two elements in the ball."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, distances, one_geodesic
from .groups import (
    BudgetError,
    CosetId,
    Element,
    GroupSpec,
    coset_key,
    coset_rep_word,
    enumerate_ball,
    invert_word,
    normal_form,
    word_length,
)
from .horoball import horizontal_pairs

RIM_MARGIN = 2


@dataclass
class Horoball:
    coset: CosetId
    levels: np.ndarray  # (depth + 1, k) vertex ids; row 0 are the glued group vertices
    metric: np.ndarray  # intrinsic peripheral metric on the base
    apex: int  # depth-D vertex over the canonical representative

    @property
    def base(self) -> np.ndarray:
        return self.levels[0]

    @property
    def vertices(self) -> np.ndarray:
        return self.levels.ravel()


@dataclass
class CuspedBall:
    spec: GroupSpec
    radius: int
    depth: int
    graph: Graph
    elements: list[Element]
    index: dict[tuple[str, ...], int]
    horoballs: list[Horoball]
    level: np.ndarray  # 0 for group vertices
    horoball_of: np.ndarray  # horoball index of vertices at level >= 1, else -1
    base_of: np.ndarray  # group vertex under each vertex
    rim: np.ndarray
    coset_index: dict[CosetId, int] = field(default_factory=dict)
    identity: int = 0

    @property
    def n_group(self) -> int:
        return len(self.elements)

    def is_group(self, v: int) -> bool:
        return v < len(self.elements)

    def non_rim(self) -> np.ndarray:
        return np.nonzero(~self.rim)[0]

    def horoball(self, coset: CosetId | int) -> Horoball:
        if isinstance(coset, int):
            return self.horoballs[coset]
        return self.horoballs[self.coset_index[coset]]

    def vertex_of(self, word: tuple[str, ...] | str, level: int = 0, coset: CosetId | None = None) -> int:
        """Vertex id of group element ``word`` or of (word, level) in ``coset``'s horoball."""
        if isinstance(word, str):
            word = tuple(word.split()) if word not in ("", "e") else ()
        g = self.index[word]
        if level == 0:
            return g
        hs = [h for h in self.horoballs if g in h.base and (coset is None or h.coset == coset)]
        if not hs:
            raise KeyError(f"no horoball over {word} at level {level}")
        h = hs[0]
        col = int(np.nonzero(h.base == g)[0][0])
        return int(h.levels[level, col])

    def horoball_mask(self, hi: int) -> np.ndarray:
        m = np.zeros(self.graph.n, dtype=bool)
        m[self.horoballs[hi].vertices] = True
        return m


def _piece_metric(spec: GroupSpec, rep: tuple[str, ...], members: list[tuple[str, ...]], pindex: int) -> np.ndarray:
    per = spec.peripherals[pindex]
    if spec.kind in ("free", "free-product-of-cyclics") and len(per) == 1:
        order = 0 if spec.kind == "free" else spec.orders[spec.generators.index(per[0])]
        ex = np.array([sum(1 if s == per[0] else -1 for s in w[len(rep):]) for w in members])
        diff = np.abs(ex[:, None] - ex[None, :])
        return np.minimum(diff, order - diff) if order else diff
    suffix = [normal_form(spec, invert_word(rep) + w) for w in members]
    k = len(members)
    d = np.zeros((k, k), dtype=np.int64)
    for i in range(k):
        inv = invert_word(suffix[i])
        for j in range(i + 1, k):
            d[i, j] = d[j, i] = len(normal_form(spec, inv + suffix[j]))
    return d


def build_cusped_ball(spec: GroupSpec, radius: int, depth: int, budget: int = 400_000) -> CuspedBall:
    """Cayley ball of ``radius`` plus depth-``depth`` horoballs.

    Vertex numbering: group vertices first in (length, lex) order, then each
    horoball (ordered by CosetId) level by level.
    """
    ball = enumerate_ball(spec, radius, budget=budget)
    index = {el.word: i for i, el in enumerate(ball)}
    gens = spec.cayley_generators
    edges = []
    for i, el in enumerate(ball):
        for s in gens:
            j = index.get(normal_form(spec, el.word + s))
            if j is not None and j != i:
                edges.append((i, j))
    pieces: dict[CosetId, list[int]] = {}
    for p in range(len(spec.peripherals)):
        groups: dict[tuple[str, ...], list[int]] = {}
        for i, el in enumerate(ball):
            groups.setdefault(coset_rep_word(spec, el.word, p), []).append(i)
        for rep, members in groups.items():
            if len(members) < 2:
                continue
            length = ball[index[rep]].length if rep in index else word_length(spec, rep)
            pieces[CosetId(p, Element(rep, length))] = members
    order = sorted(pieces, key=lambda c: coset_key(spec, c))
    projected = len(ball) + depth * sum(len(m) for m in pieces.values())
    if projected > budget:
        raise BudgetError(f"cusped ball (R={radius}, D={depth})", projected, budget)

    n = len(ball)
    labels = [f"({el}, 0)" for el in ball]
    level = [0] * n
    horo_of = [-1] * n
    base_of = list(range(n))
    horoballs = []
    for hi, cid in enumerate(order):
        members = sorted(pieces[cid])
        k = len(members)
        metric = _piece_metric(spec, cid.rep.word, [ball[m].word for m in members], cid.peripheral)
        levels = np.empty((depth + 1, k), dtype=np.int64)
        levels[0] = members
        for lev in range(1, depth + 1):
            levels[lev] = np.arange(n, n + k)
            n += k
            for m in members:
                labels.append(f"({ball[m]}, {lev}) in {cid}")
                level.append(lev)
                horo_of.append(hi)
                base_of.append(m)
        for lev in range(depth):
            edges.extend(zip(levels[lev].tolist(), levels[lev + 1].tolist()))
        for lev in range(1, depth + 1):
            pairs = horizontal_pairs(metric, lev)
            edges.extend(zip(levels[lev][pairs[:, 0]].tolist(), levels[lev][pairs[:, 1]].tolist()))
        rep_col = members.index(index[cid.rep.word]) if cid.rep.word in index and index[cid.rep.word] in members else 0
        horoballs.append(Horoball(cid, levels, metric, int(levels[depth, rep_col])))

    graph = Graph(n, np.asarray(edges, dtype=np.int64).reshape(-1, 2), labels)
    sphere = [i for i, el in enumerate(ball) if el.length == radius]
    rim = distances(graph, sphere, limit=RIM_MARGIN) >= 0 if sphere else np.zeros(n, dtype=bool)
    return CuspedBall(
        spec, radius, depth, graph, ball, index, horoballs,
        np.asarray(level), np.asarray(horo_of), np.asarray(base_of), rim,
        {h.coset: i for i, h in enumerate(horoballs)},
    )


def cayley_subgraph(cb: CuspedBall) -> Graph:
    return cb.graph.induced(range(cb.n_group))


# -- visual boundedness --------------------------------------------------------

def _distances_blocked(g: Graph, source: int, blocked: np.ndarray) -> np.ndarray:
    """BFS that labels but never expands through ``blocked`` vertices."""
    dist = np.full(g.n, -1, dtype=np.int32)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    d = 0
    while frontier.size:
        frontier = frontier[~blocked[frontier]]
        if not frontier.size:
            break
        starts = g.indptr[frontier]
        counts = g.indptr[frontier + 1] - starts
        total = int(counts.sum())
        offs = np.repeat(starts - np.cumsum(counts) + counts, counts) + np.arange(total)
        nb = g.indices[offs]
        nb = np.unique(nb[dist[nb] < 0])
        d += 1
        dist[nb] = d
        frontier = nb.astype(np.int64)
    return dist


def set_diameter(g: Graph, vertices) -> int:
    vs = [int(v) for v in vertices]
    if len(vs) < 2:
        return 0
    arr = np.asarray(vs)
    return int(max(g.dist_from(v)[arr].max() for v in vs))


@dataclass
class EntrySet:
    vertices: list[int]
    diameter: int


def first_entry_points(cb: CuspedBall, source: int, coset: CosetId | int) -> EntrySet:
    """First horoball vertices on all geodesics from ``source`` into the horoball."""
    h = cb.horoball(coset)
    mask = np.zeros(cb.graph.n, dtype=bool)
    mask[h.vertices] = True
    if mask[source]:
        raise ValueError(f"vertex {source} lies inside the horoball of {h.coset}")
    du = cb.graph.dist_from(source)
    dr = _distances_blocked(cb.graph, source, mask)
    vs = h.vertices
    entry = sorted(int(v) for v in vs[(dr[vs] >= 0) & (dr[vs] == du[vs])])
    return EntrySet(entry, set_diameter(cb.graph, entry))


def nearest_points(cb: CuspedBall, x: int, target: np.ndarray) -> list[int]:
    dx = cb.graph.dist_from(x)
    vals = dx[target]
    return sorted(int(v) for v in target[vals == vals.min()])


@dataclass
class C4Report:
    entry: int
    projection: int
    per_horoball: dict[int, int]
    samples: int
    witness: tuple

    @property
    def value(self) -> int:
        return max(self.entry, self.projection)


def measure_c4(cb: CuspedBall, samples: int, seed: int = 0) -> C4Report:
    """Sampled first-entry diameters and projection-image diameters of disjoint geodesics."""
    if samples <= 0:
        raise ValueError("sample count must be positive")
    if not cb.horoballs:
        raise ValueError("no horoballs to measure")
    rng = random.Random(seed)
    pool = [int(v) for v in cb.non_rim()]
    masks = {}
    entry_max = proj_max = 0
    per: dict[int, int] = {}
    witness: tuple = ()
    done = 0
    attempts = 0
    while done < samples and attempts < 20 * samples:
        attempts += 1
        hi = rng.randrange(len(cb.horoballs))
        if hi not in masks:
            masks[hi] = cb.horoball_mask(hi)
        mask = masks[hi]
        x, y = rng.choice(pool), rng.choice(pool)
        if mask[x] or mask[y]:
            continue
        es = first_entry_points(cb, x, hi)
        if es.diameter > entry_max:
            entry_max, witness = es.diameter, ("entry", x, hi)
        path = one_geodesic(cb.graph, x, y)
        if not mask[path].any():
            target = cb.horoballs[hi].vertices
            image = set()
            for p in path:
                image.update(nearest_points(cb, p, target))
            diam = set_diameter(cb.graph, image)
            if diam > proj_max:
                proj_max, witness = diam, ("projection", x, y, hi)
            per[hi] = max(per.get(hi, 0), es.diameter, diam)
        else:
            per[hi] = max(per.get(hi, 0), es.diameter)
        done += 1
    if done == 0:
        raise ValueError("no admissible (vertex, horoball) samples")
    return C4Report(entry_max, proj_max, per, done, witness)


# -- uniformly properly embedded -------------------------------------------------

@dataclass
class EmbeddedModulus:
    r: int
    group: int
    level: int
    witness: tuple


def embedded_modulus(cb: CuspedBall, r: int) -> EmbeddedModulus:
    """max d_G over non-rim group pairs with d_{X^h} <= r, and the per-level analogue."""
    return embedded_moduli(cb, [r])[r]


def embedded_moduli(cb: CuspedBall, radii, levels: bool = True) -> dict[int, EmbeddedModulus]:
    """embedded_modulus for several radii from one bounded search per vertex.

    With ``levels=False`` the per-level horoball modulus is skipped (reported as 0).
    """
    radii = sorted(set(int(r) for r in radii))
    if not radii or radii[0] < 0:
        raise ValueError("r must be >= 0")
    top = radii[-1]
    cay = cayley_subgraph(cb)
    ng = cb.n_group
    best = {r: (0, ()) for r in radii}
    for x in range(ng):
        if cb.rim[x]:
            continue
        near = distances(cb.graph, [x], limit=top)[:ng]
        ys = np.nonzero((near >= 0) & ~cb.rim[:ng])[0]
        ys = ys[ys > x]
        if not ys.size:
            continue
        dx, dg = near[ys], cay.dist_from(x)[ys]
        for r in radii:
            sel = dx <= r
            if sel.any():
                k = int(np.argmax(np.where(sel, dg, -1)))
                if dg[k] > best[r][0]:
                    best[r] = (int(dg[k]), (x, int(ys[k])))
    lev = {r: 0 for r in radii}
    for h in cb.horoballs if levels else ():
        for level in range(1, cb.depth + 1):
            row = h.levels[level]
            if cb.rim[row].all():
                continue
            sub = cb.graph.induced(row.tolist())
            for a in range(len(row)):
                if cb.rim[row[a]]:
                    continue
                near = distances(cb.graph, [int(row[a])], limit=top)[row]
                ok = np.nonzero((near >= 0) & ~cb.rim[row])[0]
                if not ok.size:
                    continue
                dsub = sub.dist_from(a)[ok]
                for r in radii:
                    sel = near[ok] <= r
                    if sel.any():
                        lev[r] = max(lev[r], int(dsub[sel].max()))
    return {r: EmbeddedModulus(r, best[r][0], lev[r], best[r][1]) for r in radii}
