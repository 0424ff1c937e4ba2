"""Quasi-isometry and quasiconformal measurements between two cusped balls.

Forward direction: a vertex map is measured as a quasi-isometry, extended to
a class bijection of boundary atlases, and its ring distortion is fitted to
ln t' = A ln t + B.  Reverse direction: from a class bijection and a fitted
distortion law, E-sets are computed and their least-id members define the
reconstruction Phi f.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np

from .boundary import (
    Anchor,
    BoundaryAtlas,
    HoroballRing,
    horoball_shadow_ring,
    admissible_horoballs,
    build_induced_atlas,
    ring_sets,
    sample_rings,
    subset,
    tightest_ring,
)
from .cusped import CuspedBall, cayley_subgraph, embedded_moduli
from .graph import distances
from .groups import CosetId, normal_form, peripheral_distance, shortlex_key
from .hyperbolicity import triangle

LAMBDA_STEP = 0.25


class BoundaryMapError(ValueError):
    pass


# -- vertex maps ---------------------------------------------------------------

@dataclass
class VertexMap:
    domain: CuspedBall
    codomain: CuspedBall
    images: np.ndarray  # image vertex per domain vertex
    inverse: "VertexMap | None" = None
    name: str = ""

    def __post_init__(self):
        self.images = np.asarray(self.images, dtype=np.int64)
        if len(self.images) != self.domain.graph.n:
            raise ValueError("vertex map must assign an image to every domain vertex")
        if self.images.min() < 0 or self.images.max() >= self.codomain.graph.n:
            raise ValueError("image vertex outside the codomain")

    def __call__(self, v):
        return self.images[v]


def _coset_lookup(cb: CuspedBall) -> dict[tuple[int, tuple[str, ...]], int]:
    return {(h.coset.peripheral, h.coset.rep.word): i for i, h in enumerate(cb.horoballs)}


def _nearest_element(cb: CuspedBall, word: tuple[str, ...]) -> int:
    """Group vertex of ``word``, or of its longest normal-form prefix inside the ball."""
    w = normal_form(cb.spec, word)
    while w not in cb.index:
        w = w[:-1]
    return cb.index[w]


def canonical_map(src: CuspedBall, dst: CuspedBall, name: str = "") -> VertexMap:
    """Label identity between two cusped balls of the same group.

    Group elements map to themselves (clamped to the longest normal-form prefix
    in ``dst``).  A horoball vertex (g, n) over coset gH maps to the vertex over
    the same coset at level min(n, D'), with g clamped to the nearest element of
    the coset piece in the peripheral metric; a coset with no horoball in
    ``dst`` falls back to the image of g.
    """
    lookup = _coset_lookup(dst)
    img = np.empty(src.graph.n, dtype=np.int64)
    for i, el in enumerate(src.elements):
        img[i] = _nearest_element(dst, el.word)
    col_cache: dict[tuple[int, int], int] = {}
    for hi, h in enumerate(src.horoballs):
        hj = lookup.get((h.coset.peripheral, h.coset.rep.word))
        for col, g in enumerate(h.base.tolist()):
            gword = src.elements[g].word
            if hj is None:
                target = int(img[g])
                for lev in range(1, src.depth + 1):
                    img[h.levels[lev, col]] = target
                continue
            h2 = dst.horoballs[hj]
            key = (hj, g)
            if key not in col_cache:
                base2 = h2.base.tolist()
                if gword in dst.index and dst.index[gword] in base2:
                    col_cache[key] = base2.index(dst.index[gword])
                else:
                    col_cache[key] = _closest_column(dst, h2, gword)
            c2 = col_cache[key]
            for lev in range(1, src.depth + 1):
                img[h.levels[lev, col]] = h2.levels[min(lev, dst.depth), c2]
    return VertexMap(src, dst, img, name=name)


def _closest_column(cb: CuspedBall, h, gword) -> int:
    best = None
    for col, v in enumerate(h.base.tolist()):
        d = peripheral_distance(cb.spec, gword, cb.elements[v].word)
        key = (d, shortlex_key(cb.spec, cb.elements[v].word))
        if best is None or key < best[0]:
            best = (key, col)
    return best[1]


def identity_map(cb: CuspedBall) -> VertexMap:
    m = VertexMap(cb, cb, np.arange(cb.graph.n), name="identity")
    m.inverse = m
    return m


# -- quasi-isometry constants ----------------------------------------------------

@dataclass
class QIReport:
    lam: float
    K: int
    ok: bool
    witness: tuple[int, int] | None
    surjectivity: int
    pairs: int
    k_cap: int


def _sample_sources(cb: CuspedBall, count: int, rng: random.Random, group_only: bool = False) -> list[int]:
    pool = [int(v) for v in cb.non_rim() if not group_only or v < cb.n_group]
    if count >= len(pool):
        return pool
    return sorted(rng.sample(pool, count))


def measure_qi(m: VertexMap, samples: int, seed: int = 0, lam_max: float = 4.0,
               k_cap: int | None = None, group_metric: bool = False) -> QIReport:
    """Least (lambda, K) on the grid 1 + 0.25 N (lambda <= lam_max, K <= k_cap) fitting sampled pairs.

    ``samples`` source vertices are drawn from the non-rim domain; each is
    paired with every non-rim domain vertex.  With ``group_metric`` distances
    are word metrics (Cayley subgraphs) on group vertices only.
    """
    rng = random.Random(seed)
    X, Y = m.domain, m.codomain
    gx = cayley_subgraph(X) if group_metric else X.graph
    gy = cayley_subgraph(Y) if group_metric else Y.graph
    pool = np.asarray([v for v in X.non_rim() if not group_metric or v < X.n_group])
    if group_metric and (m.images[pool] >= Y.n_group).any():
        raise ValueError("group-metric QI needs a group-to-group map")
    srcs = _sample_sources(X, samples, rng, group_only=group_metric)
    d1s, d2s, pairs = [], [], []
    for x in srcs:
        d1 = gx.dist_from(x)[pool]
        d2 = gy.dist_from(int(m.images[x]))[m.images[pool]]
        keep = pool != x
        d1s.append(d1[keep])
        d2s.append(d2[keep])
        pairs.append(np.stack([np.full(keep.sum(), x), pool[keep]], axis=1))
    d1 = np.concatenate(d1s).astype(np.float64)
    d2 = np.concatenate(d2s).astype(np.float64)
    pr = np.concatenate(pairs)
    if (d2 < 0).any():
        raise ValueError("codomain images are disconnected")
    if k_cap is None:
        k_cap = max(2, int(d1.max()) // 5)
    best = None
    lam = 1.0
    while lam <= lam_max + 1e-9:
        need = np.maximum(d2 - lam * d1, d1 / lam - d2)
        K = max(0, math.ceil(need.max() - 1e-9))
        if K <= k_cap:
            best = (lam, K)
            break
        lam += LAMBDA_STEP
    dy = distances(gy, np.unique(m.images[pool]).tolist())
    ynr = np.asarray([v for v in Y.non_rim() if not group_metric or v < Y.n_group])
    surj = int(dy[ynr].max()) if ynr.size else 0
    if best is None:
        need = np.maximum(d2 - lam_max * d1, d1 / lam_max - d2)
        i = int(need.argmax())
        return QIReport(lam_max, math.ceil(need[i]), False, (int(pr[i, 0]), int(pr[i, 1])), surj, len(d1), k_cap)
    lam, K = best
    need = np.maximum(d2 - lam * d1, d1 / lam - d2)
    i = int(need.argmax())
    return QIReport(lam, K, True, (int(pr[i, 0]), int(pr[i, 1])), surj, len(d1), k_cap)


@dataclass
class CuspReport:
    C: int
    forward: int
    backward: int | None
    pairing: dict[CosetId, CosetId]
    flagged: bool  # no inverse: only the forward direction was measured


def _horosphere_distance(m: VertexMap) -> tuple[int, dict[CosetId, CosetId]]:
    X, Y = m.domain, m.codomain
    worst = 0
    pairing = {}
    dist_cache: dict[int, np.ndarray] = {}
    owner = {}
    for j, h in enumerate(Y.horoballs):
        for v in h.base.tolist():
            owner.setdefault(v, []).append(j)
    for h in X.horoballs:
        pts = [v for v in h.base.tolist() if not X.rim[v]]
        if not pts:
            continue
        imgs = m.images[pts]
        cands = sorted({j for v in Y.base_of[imgs].tolist() for j in owner.get(v, [])})
        if not cands:
            cands = list(range(len(Y.horoballs)))
        best = None
        for j in cands:
            if j not in dist_cache:
                dist_cache[j] = distances(Y.graph, Y.horoballs[j].base.tolist())
            c = int(dist_cache[j][imgs].max())
            if best is None or c < best[0]:
                best = (c, j)
        if best is None:
            continue
        worst = max(worst, best[0])
        pairing[h.coset] = Y.horoballs[best[1]].coset
    return worst, pairing


def measure_cusp_preserving(m: VertexMap) -> CuspReport:
    """Least C with every (non-rim part of a) horosphere mapped into the C-neighbourhood of one horosphere."""
    if not m.domain.horoballs or not m.codomain.horoballs:
        raise ValueError("both spaces need horoballs")
    fwd, pairing = _horosphere_distance(m)
    if m.inverse is None:
        return CuspReport(fwd, fwd, None, pairing, True)
    bwd, _ = _horosphere_distance(m.inverse)
    return CuspReport(max(fwd, bwd), fwd, bwd, pairing, False)


# -- boundary maps ---------------------------------------------------------------

@dataclass
class BoundaryMap:
    domain: BoundaryAtlas
    codomain: BoundaryAtlas
    forward: np.ndarray
    tags_preserved: bool
    source: VertexMap | None = None

    def __post_init__(self):
        self.forward = np.asarray(self.forward, dtype=np.int64)
        n1, n2 = self.domain.n_classes, self.codomain.n_classes
        if n1 != n2 or sorted(self.forward.tolist()) != list(range(n2)):
            raise BoundaryMapError(f"not a bijection on classes ({n1} -> {n2})")
        self.backward = np.argsort(self.forward)

    def image(self, row: np.ndarray) -> np.ndarray:
        """Image of a packed domain class set, packed over codomain classes."""
        bits = np.unpackbits(row)[: self.domain.n_classes].astype(bool)
        out = np.zeros(self.codomain.nbytes * 8, dtype=bool)
        out[self.forward[bits]] = True
        return np.packbits(out)

    def inverse(self) -> "BoundaryMap":
        inv = None
        if self.source is not None and self.source.inverse is not None:
            inv = self.source.inverse
        return BoundaryMap(self.codomain, self.domain, self.backward, self.tags_preserved, inv)


def identity_boundary_map(atlas: BoundaryAtlas) -> BoundaryMap:
    return BoundaryMap(atlas, atlas, np.arange(atlas.n_classes), True, identity_map(atlas.cb))


def assign_classes(atlas: BoundaryAtlas, vertices: np.ndarray) -> np.ndarray:
    """Class maximising the Gromov product (v . u)_e over its members u; least class on ties."""
    g = atlas.cb.graph
    D0 = g.dist_from(atlas.cb.identity)
    mem = atlas.horizon
    cls = atlas.vclass[mem]
    out = []
    for v in np.asarray(vertices).tolist():
        dv = g.dist_from(v)
        gp = D0[v] + D0[mem] - dv[mem]
        best = np.full(atlas.n_classes, -10 ** 9, dtype=np.int64)
        np.maximum.at(best, cls, gp)
        out.append(int(best.argmax()))
    return np.asarray(out, dtype=np.int64)


def induced_codomain_atlas(m: VertexMap, at1: BoundaryAtlas, anchor: Anchor, rho: int,
                           tau: float) -> BoundaryAtlas:
    """Codomain atlas seeded by the images of the domain class targets."""
    return build_induced_atlas(m.codomain, anchor, rho, tau, m.images[np.asarray(at1.targets)].tolist())


def extend_to_boundary(m: VertexMap, at1: BoundaryAtlas, at2: BoundaryAtlas,
                       cusp: CuspReport | None = None) -> BoundaryMap:
    """Send each class through the image of its designated target vertex."""
    if at1.cb is not m.domain or at2.cb is not m.codomain:
        raise ValueError("atlases must be built on the map's domain and codomain")
    imgs = m.images[np.asarray(at1.targets)]
    fwd = assign_classes(at2, imgs)
    seen: dict[int, int] = {}
    for a, b in enumerate(fwd.tolist()):
        if b in seen:
            raise BoundaryMapError(f"classes {seen[b]} and {a} both map to codomain class {b}; "
                                   "the truncation is too coarse")
        seen[b] = a
    if at1.n_classes != at2.n_classes:
        missing = sorted(set(range(at2.n_classes)) - set(seen))
        raise BoundaryMapError(f"codomain classes {missing[:10]} are not hit "
                               f"({at1.n_classes} -> {at2.n_classes})")
    pairing = cusp.pairing if cusp is not None else None
    ok = True
    for a in range(at1.n_classes):
        tags1, tags2 = at1.parabolic.get(a, []), at2.parabolic.get(int(fwd[a]), [])
        if bool(tags1) != bool(tags2):
            ok = False
        elif tags1 and pairing is not None:
            # the class's own coset (its target apex) must pair into the image class
            p = pairing.get(at1.coset_of_class(a))
            if p is not None and (p.peripheral, p.rep.word) not in {(t.peripheral, t.rep.word) for t in tags2}:
                ok = False
    return BoundaryMap(at1, at2, fwd, ok, m)


# -- distortion ------------------------------------------------------------------

@dataclass
class DistortionReport:
    samples: list[tuple[int, int]]  # (ln t, ln t')
    skipped: int
    A: float
    B: float
    residual: float
    ln_slope_ls: float
    R: int
    delta: int
    constants: dict = field(default_factory=dict)

    @property
    def skip_rate(self) -> float:
        total = len(self.samples) + self.skipped
        return self.skipped / max(1, total)

    @property
    def inadequate(self) -> bool:
        return self.skip_rate > 0.2

    def ln_eta(self, ln_t: float) -> float:
        return self.A * ln_t + self.B

    def max_excess(self) -> float:
        """max over samples of ln t' - (A ln t + B); <= 0.5 is the distortion law."""
        return max((b - self.ln_eta(a) for a, b in self.samples), default=0.0)


def fit_distortion(samples: list[tuple[int, int]]) -> tuple[float, float, float, float]:
    """Least-squares slope clamped to A >= 1, then B lifted to the upper envelope.

    Returns (A, B, max residual, raw least-squares slope).
    """
    if not samples:
        return 1.0, 0.0, 0.0, 1.0
    x = np.asarray([s[0] for s in samples], dtype=np.float64)
    y = np.asarray([s[1] for s in samples], dtype=np.float64)
    if np.ptp(x) > 0:
        slope = float(np.polyfit(x, y, 1)[0])
    else:
        slope = 1.0
    A = max(1.0, slope)
    B = float(np.max(y - A * x))
    B = max(B, 0.0)
    resid = float(np.max(np.abs(y - (A * x + B))))
    return A, B, resid, slope


def measure_distortion(f: BoundaryMap, R: int, samples: int, delta: int, seed: int = 0,
                       qi: QIReport | None = None, c1: int | None = None) -> DistortionReport:
    """Fit ln t' = A ln t + B over sampled rings of R(xi, R) and their tightest image rings."""
    at1, at2 = f.domain, f.codomain
    rings = sample_rings(at1, R, samples, seed)
    data, skipped = [], 0
    for ring in rings:
        inner, outer = ring_sets(at1, ring)
        hit = tightest_ring(at2, R, f.image(inner), f.image(outer))
        if hit is None:
            skipped += 1
            continue
        data.append((ring.ln_t, hit[0]))
    A, B, resid, slope = fit_distortion(data)
    consts = {}
    if qi is not None and c1 is not None:
        lam, K = qi.lam, qi.K
        consts["R1"] = (R - (lam * c1 + c1 + 2 * K)) / lam
        consts["R2"] = 2 * c1 + lam * R + K
    return DistortionReport(data, skipped, A, B, resid, slope, R, delta, consts)


@dataclass
class ShadowPreservation:
    ln_L: int
    per_horoball: dict[CosetId, int]
    rings: dict[CosetId, tuple[HoroballRing, HoroballRing]]


def measure_shadow_horoball_preservation(f: BoundaryMap, R: int, delta: int,
                                         c4: int, c4_codomain: int | None = None) -> ShadowPreservation:
    """Least ln L with (1/L) q-ring <= f(p-ring inner) and f(T1 p-ring) <= L q-ring, max over horoballs."""
    at1, at2 = f.domain, f.codomain
    c4b = c4 if c4_codomain is None else c4_codomain
    S1, S2 = at1.shadow_rows(R), at2.shadow_rows(R)
    per, rings = {}, {}
    for coset in admissible_horoballs(at1):
        a = at1.class_of_coset(coset)
        b = int(f.forward[a])
        tag = at2.coset_of_class(b)
        if tag is None:
            raise BoundaryMapError(f"parabolic class of {coset} maps to a non-parabolic class")
        if at2.cb.coset_index[tag] == at2.xi_horoball:
            raise BoundaryMapError(f"{coset} maps to the base point")
        hp = horoball_shadow_ring(at1, coset, R, delta, c4)
        hq = horoball_shadow_ring(at2, tag, R, delta, c4b)
        path = at2.designated_geodesic(b)
        sq = path.index(hq.p)
        fin = f.image(S1[hp.p])
        fout = f.image(S1[hp.x2])
        k1 = None
        for k in range(0, len(path) - sq):
            if subset(S2[path[sq + k]], fin):
                k1 = k
                break
        if k1 is None:
            k1 = len(path) + 2 * R  # no inner ring fits within the truncation
        k2 = 0
        while not subset(fout, S2[path[max(0, sq - k2)]]):
            k2 += 1
        per[coset] = max(k1, k2)
        rings[coset] = (hp, hq)
    return ShadowPreservation(max(per.values(), default=0), per, rings)


# -- E-sets and the reconstruction -------------------------------------------------

@dataclass
class ESet:
    center: int
    ln_t: int
    members: np.ndarray
    witnesses: list[tuple[int, int]]  # (x1, x2) of the witness rings used
    diameter: int | None
    exact: bool


class RingTable:
    """Rings of scale ln t on geodesics out of the domain proxy, with their E-sets.

    A ring is centred at every non-rim vertex x1 lying on some geodesic from the
    proxy to the horizon; its outer centre x2 sits ln t steps back along the
    least-id geodesic (clamped at the proxy).  Rings with equal (inner, outer)
    shadows have equal E-sets, so they are stored once, keyed by the least x1.
    """

    def __init__(self, f: BoundaryMap, R: int, ln_t: int, ln_eta: int):
        self.f, self.R, self.ln_t, self.ln_eta = f, R, ln_t, ln_eta
        at1, at2 = f.domain, f.codomain
        x1 = np.nonzero((~at1.cb.rim) & (at1.dp > 0) & at1.reach.any(axis=1))[0]
        x2 = at1.ancestor(x1, ln_t)
        S1 = at1.shadow_rows(R)
        both = np.concatenate([S1[x1], S1[x2]], axis=1)
        keys, first = np.unique(both, axis=0, return_index=True)
        order = np.argsort(first)  # number distinct rings by their least centre
        keys, first = keys[order], first[order]
        nb = at1.nbytes
        inner, outer = keys[:, :nb], keys[:, nb:]
        valid = subset(inner, outer)
        self.pairs = [(int(x1[i]), int(x2[i])) for i in first[valid]]
        self.inner, self.outer = inner[valid], outer[valid]
        S2 = at2.shadow_rows(R)
        cand = np.nonzero((~at2.cb.rim) & (at2.dp > 0) & S2.any(axis=1))[0]
        self.cand = cand
        self.S_cand = S2[cand]
        self.S_anc = S2[at2.ancestor(cand, ln_eta)]
        self._e: dict[int, np.ndarray] = {}

    def e_ring(self, i: int) -> np.ndarray:
        """E(x, t, B) for witness ring i, as sorted codomain vertex ids."""
        if i not in self._e:
            fB = self.f.image(self.inner[i])
            ftB = self.f.image(self.outer[i])
            ok = subset(self.S_cand, fB) & subset(ftB, self.S_anc)
            self._e[i] = self.cand[ok]
        return self._e[i]

    def witnesses(self, x: int) -> np.ndarray:
        """Indices of rings B <= tB with B <= O B(x,R) <= tB."""
        sx = self.f.domain.shadow_rows(self.R)[x]
        return np.nonzero(subset(self.inner, sx) & subset(sx[None, :], self.outer))[0]

    def least_member(self, x: int) -> int | None:
        best = None
        for i in self.witnesses(x).tolist():
            e = self.e_ring(i)
            if e.size and (best is None or e[0] < best):
                best = int(e[0])
        return best


def t0_ln(R: int, delta: int) -> int:
    """ln t0 = 3R + 2 delta: the separation of the two ring centers in the reconstruction."""
    return math.ceil(3 * R + 2 * delta)


def e_set(table: RingTable, x: int, diameter_limit: int = 400) -> ESet:
    """E(x, t) = union of E(x, t, B) over witness rings; diameter exact up to ``diameter_limit`` members."""
    if table.ln_t < table.R:
        raise ValueError("e_set needs ln t >= R + delta")
    wit = table.witnesses(x).tolist()
    parts = [table.e_ring(i) for i in wit]
    members = np.unique(np.concatenate(parts)) if parts else np.zeros(0, dtype=np.int64)
    g = table.f.codomain.cb.graph
    if members.size <= 1:
        diam, exact = 0, True
    elif members.size <= diameter_limit:
        diam = int(max(g.dist_from(int(v))[members].max() for v in members))
        exact = True
    else:
        diam = 2 * int(g.dist_from(int(members[0]))[members].max())
        exact = False
    return ESet(x, table.ln_t, members, [table.pairs[i] for i in wit], diam, exact)


@dataclass
class PhiF:
    vmap: VertexMap
    ln_t0: int
    ln_eta_t0: int
    empty: list[int]
    table: RingTable


def phi_f(f: BoundaryMap, R: int, delta: int, report: DistortionReport) -> PhiF:
    """Phi f(x) = least-id member of E(x, t0) for every non-rim domain vertex."""
    L0 = t0_ln(R, delta)
    ln_eta = math.ceil(report.ln_eta(L0))
    table = RingTable(f, R, L0, ln_eta)
    X = f.domain.cb
    img = np.asarray(f.codomain.cb.identity).repeat(X.graph.n).astype(np.int64)
    empty = []
    for x in X.non_rim().tolist():
        y = table.least_member(x)
        if y is None:
            empty.append(x)
        else:
            img[x] = y
    # rim vertices follow their nearest non-rim vertex so the map is total
    nr = X.non_rim()
    near = np.full(X.graph.n, -1, dtype=np.int64)
    near[nr] = nr
    frontier = list(nr.tolist())
    seen = np.zeros(X.graph.n, dtype=bool)
    seen[nr] = True
    while frontier:
        nxt = []
        for v in frontier:
            for w in X.graph.neighbors(v).tolist():
                if not seen[w]:
                    seen[w] = True
                    near[w] = near[v]
                    nxt.append(w)
        frontier = nxt
    rim = np.nonzero(X.rim)[0]
    img[rim] = img[near[rim]]
    vm = VertexMap(X, f.codomain.cb, img, name="phi_f")
    return PhiF(vm, L0, ln_eta, empty, table)


@dataclass
class Coincidence:
    deviation: int
    bound: float
    per_class: list[int]

    @property
    def passed(self) -> bool:
        return self.deviation <= self.bound


def boundary_coincidence(f: BoundaryMap, phi: PhiF, R: int, delta: int) -> Coincidence:
    """max over classes a and x on [xi, a] of d(Phi f(x), [xi', f(a)])."""
    at1, at2 = f.domain, f.codomain
    per = []
    for a in range(at1.n_classes):
        path = [v for v in at1.designated_geodesic(a) if not at1.cb.rim[v]]
        target = at2.designated_geodesic(int(f.forward[a]))
        d = distances(at2.cb.graph, target)
        per.append(int(d[phi.vmap.images[path]].max()) if path else 0)
    return Coincidence(max(per, default=0), phi.ln_eta_t0 + R + 2 * delta, per)


def map_deviation(m1: VertexMap, m2: VertexMap, vertices=None) -> int:
    """sup_x d(m1(x), m2(x)) over ``vertices`` (default: non-rim domain vertices)."""
    Y = m1.codomain
    vs = m1.domain.non_rim() if vertices is None else np.asarray(vertices)
    worst = 0
    by_target: dict[int, list[int]] = {}
    for x in vs.tolist():
        by_target.setdefault(int(m1.images[x]), []).append(int(m2.images[x]))
    for y, others in by_target.items():
        worst = max(worst, int(Y.graph.dist_from(y)[others].max()))
    return worst


@dataclass
class Projection:
    group_map: VertexMap
    extension: VertexMap
    qi: QIReport
    modulus: dict[int, int]
    extension_gap: int


def project_to_group(phi: VertexMap, samples: int = 40, seed: int = 0,
                     radii: tuple[int, ...] = (1, 2, 3)) -> Projection:
    """phi = nearest group vertex of Phi f on group vertices; phi^h = phi there, Phi f elsewhere."""
    X, Y = phi.domain, phi.codomain
    proj = Y.base_of[phi.images]  # a level-n horoball vertex is n from its base, strictly nearest
    ext = phi.images.copy()
    ext[: X.n_group] = proj[: X.n_group]
    group = VertexMap(X, Y, proj, name="project")
    qi = measure_qi(group, samples, seed, group_metric=True)
    modulus = {r: em.group for r, em in embedded_moduli(Y, radii, levels=False).items()}
    extension = VertexMap(X, Y, ext, name="phi_h")
    gap = map_deviation(extension, phi)
    return Projection(group, extension, qi, modulus, gap)


# -- quasi-projections ---------------------------------------------------------------

def quasi_projection(g, a: int, b: int, c: int) -> tuple[int, int]:
    """Vertex minimising the max distance to the three least-id sides; returns (vertex, radius)."""
    if len({a, b, c}) < 3:
        raise ValueError("quasi-projection needs three distinct points")
    sides = triangle(g, a, b, c)
    d = np.max(np.stack([distances(g, s) for s in sides]), axis=0)
    v = int(d.argmin())
    return v, int(d[v])
