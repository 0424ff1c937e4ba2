"""Finite boundary atlases: horizon classes, shadows, rings and horoball shadows.

Boundary points are classes of deep ("horizon") vertices glued by Gromov
product.  Shadows are stored as packed bitsets over class ids, one row per
vertex, so set algebra on shadows is vectorised.
"""

from __future__ import annotations

import math
import random
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .cusped import RIM_MARGIN, CuspedBall
from .graph import distances
from .groups import CosetId


class AtlasError(ValueError):
    pass


class RingContainmentError(ValueError):
    def __init__(self, witness: int, s1: int, s2: int):
        super().__init__(f"inner shadow at {s1} is not contained in outer shadow at {s2}: class {witness}")
        self.witness = witness


@dataclass(frozen=True)
class Anchor:
    kind: str  # "parabolic" or "horizon"
    coset: CosetId | None = None
    vertex: int | None = None

    def __str__(self):
        return f"parabolic {self.coset}" if self.kind == "parabolic" else f"horizon vertex {self.vertex}"


@dataclass
class BoundaryAtlas:
    cb: CuspedBall
    anchor: Anchor
    proxy: int
    rho: int
    tau: float
    horizon: np.ndarray
    vclass: np.ndarray  # class id per vertex, -1 off the horizon
    reps: list[int]  # least-id member per class
    targets: list[int]  # designated-geodesic target: the apex for parabolic classes, else rep
    parabolic: dict[int, list[CosetId]]
    xi_horoball: int
    dp: np.ndarray
    parent: np.ndarray  # least-id predecessor towards the proxy
    reach: np.ndarray  # packed class bitsets of forward-reachable horizon vertices
    induced: bool = False  # classes seeded from given targets instead of glued
    _shadows: dict[int, np.ndarray] = field(default_factory=dict, repr=False)
    _geodesics: dict[int, list[int]] = field(default_factory=dict, repr=False)

    @property
    def n_classes(self) -> int:
        return len(self.reps)

    @property
    def nbytes(self) -> int:
        return self.reach.shape[1]

    def class_of_coset(self, coset: CosetId) -> int:
        for c, tags in self.parabolic.items():
            if coset in tags:
                return c
        raise KeyError(f"{coset} has no parabolic class in this atlas")

    def coset_of_class(self, c: int) -> CosetId | None:
        """The coset whose apex is the class target (else the first tagged coset)."""
        tags = self.parabolic.get(c)
        if not tags:
            return None
        hi = int(self.cb.horoball_of[self.targets[c]])
        if hi >= 0 and self.cb.horoballs[hi].apex == self.targets[c]:
            return self.cb.horoballs[hi].coset
        return tags[0]

    def members(self, c: int) -> np.ndarray:
        return np.nonzero(self.vclass == c)[0]

    # -- bitset helpers -----------------------------------------------------

    def pack(self, ids) -> np.ndarray:
        bits = np.zeros(self.nbytes * 8, dtype=bool)
        bits[list(ids)] = True
        return np.packbits(bits)

    def unpack(self, row: np.ndarray) -> frozenset[int]:
        bits = np.unpackbits(row)[: self.n_classes]
        return frozenset(int(i) for i in np.nonzero(bits)[0])

    def full(self) -> np.ndarray:
        return self.pack(range(self.n_classes))

    def shadow_rows(self, R: int) -> np.ndarray:
        """Packed shadow of B(x, R) for every vertex x (cached per R)."""
        if R < 0:
            raise ValueError("radius must be >= 0")
        if R not in self._shadows:
            g = self.cb.graph
            S = self.reach
            r0 = max((r for r in self._shadows if r < R), default=None)
            start = 0
            if r0 is not None:
                S, start = self._shadows[r0], r0
            deg = np.diff(g.indptr)
            has = deg > 0
            for _ in range(start, R):
                gathered = S[g.indices]
                nb = np.zeros_like(S)
                nb[has] = np.bitwise_or.reduceat(gathered, g.indptr[:-1][has], axis=0)
                S = S | nb
            S.setflags(write=False)
            self._shadows[R] = S
        return self._shadows[R]

    def set_shadow(self, vertices) -> np.ndarray:
        vs = np.asarray(list(vertices), dtype=np.int64)
        if not vs.size:
            return np.zeros(self.nbytes, dtype=np.uint8)
        return np.bitwise_or.reduce(self.reach[vs], axis=0)

    def designated_geodesic(self, c: int) -> list[int]:
        """Least-id geodesic from the proxy to the class target."""
        if c not in self._geodesics:
            v = self.targets[c]
            path = [v]
            while v != self.proxy:
                v = int(self.parent[v])
                path.append(v)
            self._geodesics[c] = path[::-1]
        return self._geodesics[c]

    def ancestor(self, vs: np.ndarray, k: int) -> np.ndarray:
        """Vertex k steps closer to the proxy along the least-id geodesic (clamped at the proxy)."""
        out = np.asarray(vs, dtype=np.int64)
        for _ in range(k):
            out = self.parent[out]
        return out


def subset(a: np.ndarray, b: np.ndarray) -> bool | np.ndarray:
    """Row-wise a <= b for packed bitsets (broadcasts)."""
    return ~np.any(a & ~b, axis=-1)


def _anchor_proxy(cb: CuspedBall, anchor: Anchor) -> tuple[int, int]:
    if anchor.kind == "parabolic":
        if anchor.coset not in cb.coset_index:
            raise AtlasError(f"anchor coset {anchor.coset} has no horoball in the ball")
        hi = cb.coset_index[anchor.coset]
        return cb.horoballs[hi].apex, hi
    if anchor.kind == "horizon":
        if anchor.vertex is None or not 0 <= anchor.vertex < cb.graph.n:
            raise AtlasError("horizon anchor needs a vertex id")
        return int(anchor.vertex), -1
    raise AtlasError(f"unknown anchor kind {anchor.kind!r}")


def default_tau(rho: int, delta: int) -> int:
    return rho - 2 * delta - 2


_NONE = -(1 << 30)


def _glue_components(g, horizon: np.ndarray, D0: np.ndarray, twice: int) -> np.ndarray:
    """Component label per horizon index for the closure of (u|v) >= twice/2.

    (u|v) >= tau iff some vertex w has (D0[u] - d(u,w)) + (D0[v] - d(v,w)) >= 2 tau.
    Each round propagates, for every w, the two best scores coming from distinct
    current components, merges the pairs that reach 2 tau, and repeats until stable.
    Any cross-component glued pair shows up in the top two at its witness w, so the
    fixed point is the exact closure.
    """
    n, k = g.n, len(horizon)
    comp = np.arange(k)
    src = np.repeat(np.arange(n), np.diff(g.indptr))
    dst = g.indices.astype(np.int64)
    floor = twice - int(D0[horizon].max())
    everyone = np.arange(n)
    while True:
        init_v = np.full(n, _NONE, dtype=np.int64)
        init_c = np.full(n, -1, dtype=np.int64)
        init_v[horizon] = D0[horizon]
        init_c[horizon] = comp
        v1, c1 = init_v, init_c
        v2, c2 = np.full(n, _NONE, dtype=np.int64), np.full(n, -1, dtype=np.int64)
        while True:
            cv = np.concatenate([init_v, v1[src] - 1, v2[src] - 1])
            cc = np.concatenate([init_c, c1[src], c2[src]])
            cd = np.concatenate([everyone, dst, dst])
            keep = (cc >= 0) & (cv >= floor)
            cv, cc, cd = cv[keep], cc[keep], cd[keep]
            # best score per (vertex, component), then the top two per vertex
            o = np.lexsort((-cv, cc, cd))
            cv, cc, cd = cv[o], cc[o], cd[o]
            first = np.ones(len(cd), dtype=bool)
            first[1:] = (cd[1:] != cd[:-1]) | (cc[1:] != cc[:-1])
            cv, cc, cd = cv[first], cc[first], cd[first]
            o = np.lexsort((cc, -cv, cd))
            cv, cc, cd = cv[o], cc[o], cd[o]
            idx = np.arange(len(cd))
            start = np.ones(len(cd), dtype=bool)
            start[1:] = cd[1:] != cd[:-1]
            rank = idx - np.maximum.accumulate(np.where(start, idx, 0))
            n1, m1 = np.full(n, _NONE, dtype=np.int64), np.full(n, -1, dtype=np.int64)
            n2, m2 = np.full(n, _NONE, dtype=np.int64), np.full(n, -1, dtype=np.int64)
            s = rank == 0
            n1[cd[s]], m1[cd[s]] = cv[s], cc[s]
            s = rank == 1
            n2[cd[s]], m2[cd[s]] = cv[s], cc[s]
            if all(np.array_equal(a, b) for a, b in ((n1, v1), (m1, c1), (n2, v2), (m2, c2))):
                break
            v1, c1, v2, c2 = n1, m1, n2, m2
        hit = (c2 >= 0) & (v1 + v2 >= twice)
        if not hit.any():
            return comp
        _, lab = connected_components(coo_matrix((np.ones(int(hit.sum())), (c1[hit], c2[hit])), shape=(k, k)),
                                      directed=False)
        comp = lab[comp]



def _horizon(cb: CuspedBall, anchor: Anchor, rho: int, tau: float):
    if rho >= cb.radius - RIM_MARGIN:
        raise AtlasError(f"horizon radius {rho} must be < R_cay - {RIM_MARGIN} = {cb.radius - RIM_MARGIN}")
    if tau < 1 or 2 * tau != int(2 * tau):
        raise AtlasError("glue threshold must be a half-integer >= 1")
    proxy, xi_h = _anchor_proxy(cb, anchor)
    D0 = cb.graph.dist_from(cb.identity)
    ok = (~cb.rim) & (D0 >= rho)
    if xi_h >= 0:
        ok[cb.horoballs[xi_h].vertices] = False
    return proxy, xi_h, D0, ok


def build_atlas(cb: CuspedBall, anchor: Anchor, rho: int, tau: float) -> BoundaryAtlas:
    """Horizon = non-rim vertices at distance >= rho from the identity, outside xi's horoball.

    Two horizon vertices are glued when their Gromov product at the identity is
    >= tau; classes are the transitive closure, numbered by least member id.
    """
    g = cb.graph
    proxy, xi_h, D0, ok = _horizon(cb, anchor, rho, tau)
    horizon = np.nonzero(ok)[0]
    if not horizon.size:
        raise AtlasError(f"empty horizon at rho={rho}; increase R_cay")

    lab = _glue_components(g, horizon, D0, int(round(2 * tau)))
    # renumber classes by least member id (horizon is sorted)
    first = {}
    for l in lab:
        first.setdefault(int(l), len(first))
    cls = np.array([first[int(l)] for l in lab], dtype=np.int64)
    vclass = np.full(g.n, -1, dtype=np.int64)
    vclass[horizon] = cls
    n_cls = len(first)
    reps = [0] * n_cls
    for v, cl in zip(horizon[::-1], cls[::-1]):
        reps[cl] = int(v)

    # a proxy on the horizon is the base point, not a boundary point
    if anchor.kind == "horizon" and vclass[proxy] >= 0:
        drop = vclass[proxy]
        horizon = horizon[vclass[horizon] != drop]
        vclass[vclass == drop] = -1
        vclass[vclass > drop] -= 1
        reps.pop(drop)
        n_cls -= 1
        if n_cls == 0:
            raise AtlasError("every horizon vertex is glued to the anchor")

    parabolic: dict[int, list[CosetId]] = {}
    targets = list(reps)
    for h in cb.horoballs:
        cl = int(vclass[h.apex])
        if cl >= 0:
            parabolic.setdefault(cl, []).append(h.coset)
            if len(parabolic[cl]) == 1:
                targets[cl] = h.apex
    return _assemble(cb, anchor, proxy, xi_h, rho, tau, horizon, vclass, reps, targets, parabolic)


def build_induced_atlas(cb: CuspedBall, anchor: Anchor, rho: int, tau: float,
                        targets: list[int]) -> BoundaryAtlas:
    """Atlas whose classes are seeded by the given target vertices.

    Class c holds target c plus every horizon vertex y whose Gromov product with
    target c is >= tau and strictly larger than with any other target; ties and
    vertices below tau stay off the horizon.  Used on the codomain side, with the
    images of the domain targets, so both atlases resolve the same boundary points.
    """
    g = cb.graph
    proxy, xi_h, D0, ok = _horizon(cb, anchor, rho, tau)
    targets = [int(t) for t in targets]
    if len(set(targets)) != len(targets):
        raise AtlasError("induced atlas targets must be distinct")
    if xi_h >= 0 and any(cb.horoball_of[t] == xi_h for t in targets):
        raise AtlasError("an induced atlas target lies in the anchor horoball")
    cand = np.nonzero(ok)[0]
    prod = np.stack([(D0[cand] + D0[t] - g.dist_from(t)[cand]) for t in targets])  # twice the product
    order = np.sort(prod, axis=0)
    best = np.argmax(prod, axis=0)  # least class on ties, dropped below anyway
    top = order[-1]
    unique = top > order[-2] if len(targets) > 1 else np.ones(len(cand), dtype=bool)
    keep = unique & (top >= int(round(2 * tau)))
    vclass = np.full(g.n, -1, dtype=np.int64)
    vclass[cand[keep]] = best[keep]
    vclass[targets] = np.arange(len(targets))
    horizon = np.nonzero(vclass >= 0)[0]
    reps = [int(np.nonzero(vclass == c)[0][0]) for c in range(len(targets))]
    parabolic: dict[int, list[CosetId]] = {}
    for h in cb.horoballs:
        cl = int(vclass[h.apex])
        if cl >= 0:
            parabolic.setdefault(cl, []).append(h.coset)
    return _assemble(cb, anchor, proxy, xi_h, rho, tau, horizon, vclass, reps, targets, parabolic,
                     induced=True)


def _assemble(cb, anchor, proxy, xi_h, rho, tau, horizon, vclass, reps, targets, parabolic,
              induced=False) -> BoundaryAtlas:
    g = cb.graph
    n_cls = len(reps)
    dp = g.dist_from(proxy)
    src = np.repeat(np.arange(g.n), np.diff(g.indptr))
    dst = g.indices.astype(np.int64)
    parent = np.arange(g.n, dtype=np.int64)
    back = (dp[src] > 0) & (dp[dst] == dp[src] - 1)
    best = np.full(g.n, g.n, dtype=np.int64)
    np.minimum.at(best, src[back], dst[back])
    has = best < g.n
    parent[has] = best[has]

    nbytes = max(1, (n_cls + 7) // 8)
    bits = np.zeros((g.n, nbytes * 8), dtype=bool)
    bits[horizon, vclass[horizon]] = True
    reach = np.packbits(bits, axis=1)
    # propagate backwards along the geodesic DAG out of the proxy
    fwd = (dp[src] >= 0) & (dp[dst] == dp[src] + 1)
    src, dst = src[fwd], dst[fwd]
    level = dp[src]
    for L in range(int(dp.max()) - 1, -1, -1):
        sel = level == L
        if sel.any():
            np.bitwise_or.at(reach, src[sel], reach[dst[sel]])
    reach.setflags(write=False)
    return BoundaryAtlas(cb, anchor, proxy, rho, tau, horizon, vclass, reps, targets, parabolic,
                         xi_h, dp, parent, reach, induced)


# -- shadows -------------------------------------------------------------------

@dataclass(frozen=True)
class Shadow:
    anchor: Anchor
    center: int
    radius: int
    members: frozenset[int]


def shadow(atlas: BoundaryAtlas, x: int, R: int, delta: int | None = None) -> Shadow:
    """Boundary classes b such that some geodesic from the proxy to some member of b meets B(x, R)."""
    if x == atlas.proxy:
        raise AtlasError("the shadow of the base point proxy is undefined")
    if atlas.cb.rim[x]:
        warnings.warn(f"vertex {x} is in the rim", stacklevel=2)
    if delta is not None and R <= 2 * delta:
        warnings.warn(f"shadow radius {R} is not > 2*delta = {2 * delta}", stacklevel=2)
    return Shadow(atlas.anchor, x, R, atlas.unpack(atlas.shadow_rows(R)[x]))


# -- rings ---------------------------------------------------------------------

@dataclass(frozen=True)
class Ring:
    anchor: Anchor
    center: int  # boundary class the ring is centered at
    s1: int
    s2: int
    x1: int
    x2: int
    radius: int

    @property
    def ln_t(self) -> int:
        return self.s1 - self.s2

    @property
    def t(self) -> float:
        return math.exp(self.ln_t)


def make_ring(atlas: BoundaryAtlas, a: int, s1: int, s2: int, R: int) -> Ring:
    path = atlas.designated_geodesic(a)
    if not (0 <= s2 <= s1 < len(path)):
        raise ValueError(f"positions must satisfy 0 <= s2 <= s1 < {len(path)} (got s1={s1}, s2={s2})")
    S = atlas.shadow_rows(R)
    x1, x2 = path[s1], path[s2]
    bad = S[x1] & ~S[x2]
    if bad.any():
        raise RingContainmentError(min(atlas.unpack(bad)), s1, s2)
    return Ring(atlas.anchor, a, s1, s2, x1, x2, R)


def ring_sets(atlas: BoundaryAtlas, ring: Ring) -> tuple[np.ndarray, np.ndarray]:
    S = atlas.shadow_rows(ring.radius)
    return S[ring.x1], S[ring.x2]


def tightest_ring(atlas: BoundaryAtlas, R: int, inner: np.ndarray, outer: np.ndarray,
                  max_ln: int | None = None) -> tuple[int, int, int] | None:
    """Smallest ln t' of a ring B' <= t'B' in R(xi, R) with B' <= inner and outer <= t'B'.

    Inner centers range over non-rim vertices with nonempty shadow; the outer
    center is found by walking the least-id geodesic back towards the proxy.
    Returns (ln t', y1, y2) with the least y1 among minimisers, or None.
    """
    S = atlas.shadow_rows(R)
    ok = (~atlas.cb.rim) & (atlas.dp > 0) & S.any(axis=1)
    cand = np.nonzero(ok)[0]
    cand = cand[subset(S[cand], inner)]
    if not cand.size:
        return None
    top = int(atlas.dp[cand].max()) if max_ln is None else max_ln
    anc = cand.copy()
    for k in range(top + 1):
        hit = subset(outer, S[anc])
        if hit.any():
            i = int(np.nonzero(hit)[0][0])
            return k, int(cand[i]), int(anc[i])
        anc = atlas.parent[anc]
    return None


@dataclass
class RingLemmaReport:
    checked: int
    failures: list[tuple]
    hypothesis: bool
    separation: int

    @property
    def passed(self) -> bool:
        return not self.failures


def _positions(atlas: BoundaryAtlas, path: list[int]) -> list[int]:
    return [i for i, v in enumerate(path) if i > 0 and not atlas.cb.rim[v]]


def check_ring_lemma(atlas: BoundaryAtlas, samples: int, R: int, delta: int, seed: int = 0,
                     separation: int | None = None) -> RingLemmaReport:
    """Sample (a, x, x1, x2) on designated geodesics and test both containments.

    With separation >= R + delta every failure is a finding; below it the
    hypothesis is violated and failures are only counterexamples.
    """
    need = math.ceil(R + delta)
    sep = need if separation is None else separation
    rng = random.Random(seed)
    S = atlas.shadow_rows(R)
    fails = []
    checked = 0
    attempts = 0
    while checked < samples and attempts < 50 * samples:
        attempts += 1
        a = rng.randrange(atlas.n_classes)
        path = atlas.designated_geodesic(a)
        d1 = sep + rng.randrange(3)
        d2 = sep + rng.randrange(3)
        ok = [s for s in _positions(atlas, path) if s + d1 < len(path)]
        if not ok:
            continue
        s = rng.choice(ok)
        x, x1 = path[s], path[s + d1]
        x2 = path[max(0, s - d2)]
        checked += 1
        if not subset(S[x1], S[x]):
            fails.append(("i", a, x, x1))
        if not subset(S[x], S[x2]):
            fails.append(("ii", a, x, x2))
    return RingLemmaReport(checked, fails, sep >= R + delta, sep)


def sample_rings(atlas: BoundaryAtlas, R: int, count: int, seed: int, min_ln: int = 0,
                 max_ln: int | None = None) -> list[Ring]:
    """Random valid rings on designated geodesics (containment-failing draws are skipped)."""
    rng = random.Random(seed)
    rings = []
    attempts = 0
    while len(rings) < count and attempts < 50 * count:
        attempts += 1
        a = rng.randrange(atlas.n_classes)
        path = atlas.designated_geodesic(a)
        pos = _positions(atlas, path)
        if not pos:
            continue
        s1 = rng.choice(pos)
        hi = s1 if max_ln is None else min(s1, max_ln)
        if hi < min_ln:
            continue
        s2 = s1 - rng.randint(min_ln, hi)
        try:
            rings.append(make_ring(atlas, a, s1, s2, R))
        except RingContainmentError:
            continue
    return rings


@dataclass
class EquivalenceReport:
    R: int
    R2: int
    samples: int
    skipped: int
    ln_c5: int  # max over samples of ln t' - ln t
    ln_bound: float

    @property
    def skip_rate(self) -> float:
        return self.skipped / max(1, self.samples)

    @property
    def passed(self) -> bool:
        return self.ln_c5 <= self.ln_bound


def equivalence_constant(atlas: BoundaryAtlas, R: int, R2: int, samples: int, delta: int,
                         seed: int = 0) -> EquivalenceReport:
    """max t'/t over sampled rings of R(xi,R), each sandwiched by the tightest ring of R(xi,R2)."""
    rings = sample_rings(atlas, R, samples, seed)
    best, skipped = 0, 0
    for ring in rings:
        inner, outer = ring_sets(atlas, ring)
        hit = tightest_ring(atlas, R2, inner, outer)
        if hit is None:
            skipped += 1
            continue
        best = max(best, hit[0] - ring.ln_t)
    return EquivalenceReport(R, R2, len(rings), skipped, best, R + R2 + 2 * delta)


# -- shadows of horoballs ----------------------------------------------------------

@dataclass
class HoroballRing:
    coset: CosetId
    entry: int  # first entry vertex e_H of the designated geodesic
    p: int
    x2: int
    ln_t1: int
    dist_to_horoball: int
    inner_ok: bool
    outer_ok: bool

    @property
    def passed(self) -> bool:
        return self.inner_ok and self.outer_ok


def horoball_shadow_ring(atlas: BoundaryAtlas, coset: CosetId, R: int, delta: int, c4: int) -> HoroballRing:
    """The T1-ring at p, R + delta past the first entry into H along [xi, a_H]."""
    cb = atlas.cb
    hi = cb.coset_index[coset]
    if hi == atlas.xi_horoball:
        raise AtlasError(f"{coset} is the base point's own horoball")
    a = atlas.class_of_coset(coset)
    path = atlas.designated_geodesic(a)
    inside = cb.horoball_mask(hi)
    hits = [i for i, v in enumerate(path) if inside[v]]
    if not hits:
        raise AtlasError(f"designated geodesic to {coset} misses its horoball")
    e = hits[0]
    sp = min(e + math.ceil(R + delta), len(path) - 1)
    ln_t1 = math.ceil(c4 + R + 2 * delta)
    s2 = max(0, sp - ln_t1)
    S = atlas.shadow_rows(R)
    horo = atlas.set_shadow(cb.horoballs[hi].vertices)
    p, x2 = path[sp], path[s2]
    dH = int(distances(cb.graph, cb.horoballs[hi].vertices.tolist())[p])
    return HoroballRing(coset, path[e], p, x2, ln_t1, dH,
                        bool(subset(S[p], horo)), bool(subset(horo, S[x2])))


def admissible_horoballs(atlas: BoundaryAtlas) -> list[CosetId]:
    """Horoballs with a parabolic class of their own, other than the base point's."""
    out = []
    for c, tags in sorted(atlas.parabolic.items()):
        h = atlas.cb.coset_index[tags[0]]
        if h != atlas.xi_horoball and not atlas.cb.rim[atlas.cb.horoballs[h].apex]:
            out.append(tags[0])
    return out


# -- serialisation and drawing ----------------------------------------------------

def dump_atlas(atlas: BoundaryAtlas) -> str:
    """Class table: id, representative id, representative label, parabolic tag, size."""
    lines = [f"# anchor: {atlas.anchor}; proxy {atlas.proxy}; rho {atlas.rho}; tau {atlas.tau}"]
    sizes = np.bincount(atlas.vclass[atlas.vclass >= 0], minlength=atlas.n_classes)
    for c, r in enumerate(atlas.reps):
        tag = atlas.coset_of_class(c)
        lines.append(f"{c}\t{r}\t{atlas.cb.graph.labels[r]}\t{tag if tag else '-'}\t{sizes[c]}")
    return "\n".join(lines) + "\n"


def atlas_svg(atlas: BoundaryAtlas, shadows: list[np.ndarray] = (), size: int = 400) -> str:
    """Classes placed on a circle in id order; each shadow drawn as arcs over its members.

    Diagnostic only: parabolic classes are filled, shadows are concentric arc rings.
    """
    n = atlas.n_classes
    cx = cy = size / 2
    r0 = size * 0.35
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">',
           f'<circle cx="{cx}" cy="{cy}" r="{r0}" fill="none" stroke="#999"/>']
    for c in range(n):
        ang = 2 * math.pi * c / n
        x, y = cx + r0 * math.cos(ang), cy + r0 * math.sin(ang)
        fill = "#c33" if c in atlas.parabolic else "#333"
        out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="2" fill="{fill}"/>')
    for k, row in enumerate(shadows):
        rr = r0 + 8 * (k + 1)
        for c in sorted(atlas.unpack(row)):
            a0, a1 = 2 * math.pi * (c - 0.5) / n, 2 * math.pi * (c + 0.5) / n
            x0, y0 = cx + rr * math.cos(a0), cy + rr * math.sin(a0)
            x1, y1 = cx + rr * math.cos(a1), cy + rr * math.sin(a1)
            out.append(f'<path d="M{x0:.2f},{y0:.2f} A{rr:.2f},{rr:.2f} 0 0 1 {x1:.2f},{y1:.2f}" '
                       f'fill="none" stroke="hsl({(47 * k) % 360},70%,45%)" stroke-width="3"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
