"""Workflows behind the CLI subcommands.

Each ``run_*`` function returns a JSON-ready dict with a ``checks`` mapping of
named pass/fail verdicts; the CLI turns a failed check into exit status 1.
"""

from __future__ import annotations

import json
import math
import random
import sys
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import boundary as bd
from . import qc
from .config import AnchorConfig, RunConfig, SpaceConfig, derive_seed
from .cusped import CuspedBall, build_cusped_ball, measure_c4
from .graph import dump_graph, one_geodesic, product_gap
from .groups import normal_form, parse_word
from .hyperbolicity import (
    QuasiGeodesicError,
    estimate_delta,
    overlap_diameter,
    quasigeodesic_stability,
    triangle,
)

CONSTANT_KEYS = ("delta", "C1", "C4", "C5", "T1", "L", "D", "lambda", "K", "C", "A", "B")


class RadiusError(ValueError):
    pass


def _exp(ln: float | None):
    if ln is None:
        return None
    return {"ln": ln, "value": round(math.exp(ln), 6)}


@dataclass
class Space:
    """A cusped ball together with its lazily measured constants and atlases."""

    cfg: SpaceConfig
    seed: int
    label: str
    budget: int
    radius: int | None = None
    _cb: CuspedBall | None = None
    _delta: int | None = None
    _c4: int | None = None
    _atlases: dict = field(default_factory=dict)

    @property
    def cb(self) -> CuspedBall:
        if self._cb is None:
            self._cb = build_cusped_ball(self.cfg.group, self.radius or self.cfg.radius,
                                         self.cfg.depth, budget=self.budget)
        return self._cb

    def anchor(self, which: str = "first") -> bd.Anchor:
        a = self.cfg.anchor if which == "first" else self.cfg.second_anchor
        if a is None:
            raise ValueError(f"{self.label}: no second anchor configured")
        return resolve_anchor(self.cb, a)

    def atlas(self, which: str = "first") -> bd.BoundaryAtlas:
        if which not in self._atlases:
            self._atlases[which] = bd.build_atlas(self.cb, self.anchor(which), self.cfg.rho, self.cfg.tau)
        return self._atlases[which]


def resolve_anchor(cb: CuspedBall, a: AnchorConfig) -> bd.Anchor:
    spec = cb.spec
    word = normal_form(spec, parse_word(spec, a.rep))
    if a.kind == "parabolic":
        for h in cb.horoballs:
            if h.coset.peripheral == a.peripheral and h.coset.rep.word == word:
                return bd.Anchor("parabolic", h.coset)
        raise ValueError(f"no horoball over coset {' '.join(word) or 'e'}H{a.peripheral}")
    v = cb.vertex_of(word, a.level)
    return bd.Anchor("horizon", vertex=v)


class Context:
    def __init__(self, cfg: RunConfig, log=None):
        self.cfg = cfg
        self.log = log or (lambda msg: print(msg, file=sys.stderr))
        self.domain = Space(cfg.domain, cfg.seed, "domain", cfg.budget)
        self.codomain = Space(cfg.codomain, cfg.seed, "codomain", cfg.budget) if cfg.codomain else None
        self._R: int | None = None
        self.constants: dict = {k: None for k in CONSTANT_KEYS}

    def seed(self, *labels: str) -> int:
        return derive_seed(self.cfg.seed, *labels)

    def delta_of(self, space: Space) -> int:
        if space._delta is None:
            cb = space.cb
            if self.cfg.delta_mode == "exhaustive":
                est = estimate_delta(cb.graph, "exhaustive")
            else:
                est = estimate_delta(cb.graph, "sampled", self.cfg.delta_samples,
                                     self.seed("delta", space.label), pool=cb.non_rim())
            space._delta = est.delta
        return space._delta

    @property
    def delta(self) -> int:
        """max of the two spaces' estimates wherever a single delta is needed."""
        d = self.delta_of(self.domain)
        if self.codomain is not None:
            d = max(d, self.delta_of(self.codomain))
        self.constants["delta"] = d
        return d

    @property
    def R(self) -> int:
        if self._R is None:
            d = self.delta
            R = self.cfg.shadow_radius if self.cfg.shadow_radius is not None else math.ceil(2 * d) + 1
            if R <= 2 * d:
                msg = f"shadow radius {R} is not > 2*delta = {2 * d}"
                if self.cfg.radius_policy == "fail":
                    raise RadiusError(msg)
                warnings.warn(msg)
            self._R = R
        return self._R

    def c4_of(self, space: Space) -> int:
        if space._c4 is None:
            space._c4 = measure_c4(space.cb, self.cfg.samples["c4"], self.seed("c4", space.label)).value
        return space._c4


def config_record(cfg: RunConfig) -> dict:
    return json.loads(json.dumps(cfg.raw, sort_keys=True, default=str))


def _report(ctx: Context, command: str, body: dict, checks: dict) -> dict:
    return {
        "command": command,
        "config": config_record(ctx.cfg),
        "constants": {k: ctx.constants.get(k) for k in CONSTANT_KEYS},
        "results": body,
        "checks": {k: bool(v) for k, v in checks.items()},
        "passed": all(checks.values()),
    }


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


# -- build / delta ---------------------------------------------------------------

def registry(cb: CuspedBall) -> str:
    """Horoball registry sidecar: coset, level-0 ids, then the id range of levels >= 1."""
    lines = [f"# R_cay {cb.radius} depth {cb.depth} group-vertices {cb.n_group}"]
    for h in cb.horoballs:
        upper = h.levels[1:].ravel()
        lines.append(f"{h.coset}\t{' '.join(map(str, h.base.tolist()))}\t{upper.min()}-{upper.max()}")
    return "\n".join(lines) + "\n"


def run_build(ctx: Context) -> tuple[dict, dict[str, str]]:
    files = {}
    body = {}
    for sp in (ctx.domain, ctx.codomain):
        if sp is None:
            continue
        cb = sp.cb
        files[f"{sp.label}.graph"] = dump_graph(cb.graph)
        files[f"{sp.label}.registry"] = registry(cb)
        body[sp.label] = {"vertices": cb.graph.n, "edges": cb.graph.m, "group_vertices": cb.n_group,
                          "horoballs": len(cb.horoballs), "rim": int(cb.rim.sum()),
                          "hyperbolicity": cb.spec.hyperbolicity_note()}
    return _report(ctx, "build", body, {}), files


def run_delta(ctx: Context) -> dict:
    body = {}
    for sp in (ctx.domain, ctx.codomain):
        if sp is None:
            continue
        body[sp.label] = {"delta": ctx.delta_of(sp), "mode": ctx.cfg.delta_mode}
    d = ctx.delta
    R = ctx.R
    body["R"] = R
    # overlap lemma on sampled triangles of the domain
    cb = ctx.domain.cb
    rng = random.Random(ctx.seed("delta", "overlap"))
    pool = cb.non_rim().tolist()
    worst = 0
    n = ctx.cfg.samples["triangles"]
    ok = 0
    for _ in range(n):
        a, b, c = (rng.choice(pool) for _ in range(3))
        val = overlap_diameter(cb.graph, triangle(cb.graph, a, b, c), R)
        worst = max(worst, val)
        ok += val <= 2 * (R + 3 * d)
    body["overlap"] = {"triangles": n, "max": worst, "bound": 2 * (R + 3 * d), "within": ok}
    c2, wit = product_gap(cb.graph, ctx.cfg.samples["c2"], ctx.seed("delta", "c2"), pool=pool)
    body["C2"] = {"value": str(c2), "witness": list(wit or ())}
    # truncation check: delta-hat of the domain again with horoballs two levels deeper
    deep = build_cusped_ball(cb.spec, cb.radius, cb.depth + 2, budget=ctx.cfg.budget)
    if ctx.cfg.delta_mode == "exhaustive":
        dd = estimate_delta(deep.graph, "exhaustive").delta
    else:
        dd = estimate_delta(deep.graph, "sampled", ctx.cfg.delta_samples, ctx.seed("delta", "deep"),
                            pool=deep.non_rim()).delta
    body["depth_check"] = {"depth": cb.depth, "delta": ctx.delta_of(ctx.domain), "deeper_depth": deep.depth,
                           "deeper_delta": dd, "unstable": abs(dd - ctx.delta_of(ctx.domain)) > 1}
    return _report(ctx, "delta", body, {"overlap_bound": ok == n})


# -- boundary suites --------------------------------------------------------------

def run_shadows(ctx: Context) -> dict:
    at = ctx.domain.atlas()
    R = ctx.R
    S = at.shadow_rows(R)
    rng = random.Random(ctx.seed("shadows", "monotone"))
    pool = [v for v in at.cb.non_rim().tolist() if v != at.proxy]
    mono = True
    for _ in range(200):
        x = rng.choice(pool)
        mono &= bool(bd.subset(at.shadow_rows(R)[x], at.shadow_rows(R + 1)[x]))
    sizes = np.unpackbits(S[pool], axis=1)[:, : at.n_classes].sum(axis=1)
    body = {"classes": at.n_classes, "parabolic_classes": len(at.parabolic), "R": R,
            "mean_shadow_size": round(float(sizes.mean()), 6), "max_shadow_size": int(sizes.max()),
            "proxy": at.proxy, "table": bd.dump_atlas(at).splitlines()}
    return _report(ctx, "shadows", body, {"monotone_in_R": mono})


def run_rings(ctx: Context) -> dict:
    at = ctx.domain.atlas()
    d, R = ctx.delta, ctx.R
    lemma = bd.check_ring_lemma(at, ctx.cfg.samples["ring_lemma"], R, d, ctx.seed("rings", "lemma"))
    below = bd.check_ring_lemma(at, ctx.cfg.samples["ring_lemma"], R, d, ctx.seed("rings", "below"),
                                separation=math.ceil(R + d) - 1)
    eq = bd.equivalence_constant(at, R, R + 1, ctx.cfg.samples["equivalence"], d, ctx.seed("rings", "c5"))
    ctx.constants["C5"] = _exp(eq.ln_c5)
    body = {
        "R": R,
        "ring_lemma": {"checked": lemma.checked, "failures": len(lemma.failures), "separation": lemma.separation,
                       "witnesses": [list(map(str, w)) for w in lemma.failures[:10]]},
        "below_hypothesis": {"checked": below.checked, "counterexamples": len(below.failures),
                             "separation": below.separation},
        "equivalence": {"R": eq.R, "R2": eq.R2, "samples": eq.samples, "skipped": eq.skipped,
                        "skip_rate": round(eq.skip_rate, 6), "ln_C5": eq.ln_c5, "ln_bound": eq.ln_bound},
    }
    checks = {"ring_lemma": lemma.passed and lemma.checked >= ctx.cfg.samples["ring_lemma"],
              "C5_bound": eq.passed, "C5_skip_rate": eq.skip_rate < 0.2}
    return _report(ctx, "rings", body, checks)


def run_horoball_rings(ctx: Context) -> dict:
    at = ctx.domain.atlas()
    d, R = ctx.delta, ctx.R
    c4 = ctx.c4_of(ctx.domain)
    ctx.constants["C4"] = c4
    rows = []
    for coset in bd.admissible_horoballs(at):
        hr = bd.horoball_shadow_ring(at, coset, R, d, c4)
        rows.append({"coset": str(coset), "p": hr.p, "entry": hr.entry, "ln_T1": hr.ln_t1,
                     "dist_to_horoball": hr.dist_to_horoball, "inner": hr.inner_ok, "outer": hr.outer_ok})
    ctx.constants["T1"] = _exp(math.ceil(c4 + R + 2 * d))
    checks = {"covering": all(r["inner"] and r["outer"] for r in rows) and bool(rows),
              "near_horoball": all(r["dist_to_horoball"] <= R + d for r in rows)}
    return _report(ctx, "horoball-rings", {"R": R, "C4": c4, "horoballs": rows}, checks)


# -- theorem pipelines ------------------------------------------------------------

@dataclass
class ForwardResult:
    vmap: qc.VertexMap
    qi: qc.QIReport
    cusp: qc.CuspReport
    f: qc.BoundaryMap
    distortion: qc.DistortionReport
    shadows: qc.ShadowPreservation
    c1: int


def measure_c1(ctx: Context, m: qc.VertexMap, qi: qc.QIReport) -> int:
    """Hausdorff distance between images of sampled geodesics and geodesics on their endpoints."""
    X, Y = m.domain, m.codomain
    rng = random.Random(ctx.seed("c1"))
    pool = X.non_rim().tolist()
    worst = 0
    for _ in range(ctx.cfg.samples["c1"]):
        u, v = rng.choice(pool), rng.choice(pool)
        path = one_geodesic(X.graph, u, v)
        img = [int(m.images[p]) for p in path]
        # collapse repeated consecutive images; the quasigeodesic bound is checked with the QI constants
        seq = [img[0]] + [b for a, b in zip(img, img[1:]) if b != a]
        try:
            worst = max(worst, quasigeodesic_stability(Y.graph, seq, qi.lam, qi.K + 1))
        except QuasiGeodesicError:
            continue
    return worst


def codomain_atlas(ctx: Context, m: qc.VertexMap, which: str = "first") -> bd.BoundaryAtlas:
    X, Y = ctx.domain, ctx.codomain
    if ctx.cfg.codomain_atlas == "independent":
        return Y.atlas(which)
    key = ("induced", which)
    if key not in Y._atlases:
        Y._atlases[key] = qc.induced_codomain_atlas(m, X.atlas(which), Y.anchor(which), Y.cfg.rho, Y.cfg.tau)
    return Y._atlases[key]


def forward(ctx: Context, which: str = "first") -> ForwardResult:
    X, Y = ctx.domain, ctx.codomain
    if Y is None:
        raise ValueError("this workflow needs a codomain")
    d, R = ctx.delta, ctx.R
    m = qc.canonical_map(X.cb, Y.cb, name="canonical")
    m.inverse = qc.canonical_map(Y.cb, X.cb, name="canonical-inverse")
    qi = qc.measure_qi(m, ctx.cfg.samples["qi"], ctx.seed("qi", which))
    cusp = qc.measure_cusp_preserving(m)
    f = qc.extend_to_boundary(m, X.atlas(which), codomain_atlas(ctx, m, which), cusp)
    c1 = measure_c1(ctx, m, qi)
    dist = qc.measure_distortion(f, R, ctx.cfg.samples["distortion"], d, ctx.seed("distortion", which), qi, c1)
    c4 = max(ctx.c4_of(X), ctx.c4_of(Y))
    sh = qc.measure_shadow_horoball_preservation(f, R, d, c4)
    return ForwardResult(m, qi, cusp, f, dist, sh, c1)


def _forward_body(fr: ForwardResult) -> dict:
    dist = fr.distortion
    return {
        "qi": {"lambda": fr.qi.lam, "K": fr.qi.K, "ok": fr.qi.ok, "pairs": fr.qi.pairs,
               "surjectivity_radius": fr.qi.surjectivity, "witness": list(fr.qi.witness or ())},
        "cusp": {"C": fr.cusp.C, "forward": fr.cusp.forward, "backward": fr.cusp.backward,
                 "pairs": len(fr.cusp.pairing)},
        "boundary_map": {"classes": int(len(fr.f.forward)), "tags_preserved": fr.f.tags_preserved,
                         "forward": fr.f.forward.tolist()},
        "distortion": {"rings": len(dist.samples), "skipped": dist.skipped,
                       "skip_rate": round(dist.skip_rate, 6), "A": round(dist.A, 6), "B": round(dist.B, 6),
                       "ls_slope": round(dist.ln_slope_ls, 6), "residual": round(dist.residual, 6),
                       "max_excess": round(dist.max_excess(), 6),
                       "theory": {k: round(v, 6) for k, v in dist.constants.items()},
                       "samples": [list(s) for s in dist.samples]},
        "shadow_preservation": {"ln_L": fr.shadows.ln_L,
                                "per_horoball": {str(k): v for k, v in sorted(fr.shadows.per_horoball.items(),
                                                                              key=lambda kv: str(kv[0]))}},
        "C1": fr.c1,
    }


def _forward_checks(ctx: Context, fr: ForwardResult) -> dict:
    dist = fr.distortion
    return {
        "qi": fr.qi.ok,
        "tags_preserved": fr.f.tags_preserved,
        "rings_sampled": len(dist.samples) + dist.skipped >= ctx.cfg.samples["distortion"],
        "skip_rate": not dist.inadequate,
        "A_range": 1 <= dist.A <= fr.qi.lam + 0.25,
        "distortion_law": dist.max_excess() <= 0.5,
        "L_finite": bool(fr.shadows.per_horoball) and fr.shadows.ln_L < 10 ** 6,
    }


def _record_forward(ctx: Context, fr: ForwardResult):
    ctx.constants.update({"lambda": fr.qi.lam, "K": fr.qi.K, "C": fr.cusp.C, "C1": fr.c1,
                          "A": round(fr.distortion.A, 6), "B": round(fr.distortion.B, 6),
                          "L": _exp(fr.shadows.ln_L)})


def run_distortion(ctx: Context) -> dict:
    fr = forward(ctx)
    _record_forward(ctx, fr)
    return _report(ctx, "distortion", _forward_body(fr), _forward_checks(ctx, fr))


@dataclass
class BackwardResult:
    phi: qc.PhiF
    e_sets: list[qc.ESet]
    d_max: int
    d_bound: float
    coincidence: qc.Coincidence
    qi: qc.QIReport
    projection: qc.Projection
    cusp: qc.CuspReport
    deviation: int


def backward(ctx: Context, fr: ForwardResult) -> BackwardResult:
    d, R = ctx.delta, ctx.R
    phi = qc.phi_f(fr.f, R, d, fr.distortion)
    # E(x, t0) depends on x only through its shadow, so one x per distinct shadow covers every x
    nr = ctx.domain.cb.non_rim()
    _, first = np.unique(phi.table.f.domain.shadow_rows(R)[nr], axis=0, return_index=True)
    sets = [qc.e_set(phi.table, int(x)) for x in np.sort(nr[first])]
    d_max = max((s.diameter for s in sets), default=0)
    bound = 2 * phi.ln_eta_t0 + 2 * R + 10 * d + 2
    coin = qc.boundary_coincidence(fr.f, phi, R, d)
    qi = qc.measure_qi(phi.vmap, ctx.cfg.samples["qi"], ctx.seed("phif", "qi"), lam_max=16.0,
                       k_cap=4 * phi.ln_eta_t0)
    proj = qc.project_to_group(phi.vmap, ctx.cfg.samples["qi"], ctx.seed("phif", "project"))
    ext = proj.extension
    ext.inverse = fr.vmap.inverse
    cusp = qc.measure_cusp_preserving(ext)
    dev = qc.map_deviation(phi.vmap, fr.vmap)
    return BackwardResult(phi, sets, d_max, bound, coin, qi, proj, cusp, dev)


def _backward_body(br: BackwardResult) -> dict:
    return {
        "ln_t0": br.phi.ln_t0, "ln_eta_t0": br.phi.ln_eta_t0,
        "empty_e_sets": br.phi.empty[:20], "empty_count": len(br.phi.empty),
        "e_sets": [{"x": s.center, "size": int(s.members.size), "diameter": s.diameter, "exact": s.exact,
                    "witness_rings": len(s.witnesses)} for s in br.e_sets],
        "distinct_e_sets": len(br.e_sets),
        "D": br.d_max, "D_bound": br.d_bound,
        "coincidence": {"deviation": br.coincidence.deviation, "bound": br.coincidence.bound},
        "qi": {"lambda": br.qi.lam, "K": br.qi.K, "ok": br.qi.ok, "witness": list(br.qi.witness or ())},
        "projection": {"qi_lambda": br.projection.qi.lam, "qi_K": br.projection.qi.K,
                       "qi_ok": br.projection.qi.ok, "modulus": {str(k): v for k, v in br.projection.modulus.items()},
                       "extension_gap": br.projection.extension_gap},
        "cusp_of_projection": br.cusp.C,
        "deviation_from_phi": br.deviation,
    }


def _backward_checks(br: BackwardResult) -> dict:
    return {
        "e_sets_nonempty": not br.phi.empty and all(s.members.size for s in br.e_sets),
        "e_set_diameter": br.d_max <= br.d_bound,
        "phif_qi": br.qi.ok,
        "coincidence": br.coincidence.passed,
        "projection_cusp_finite": br.cusp.C < 10 ** 6,
    }


def run_phif(ctx: Context) -> dict:
    fr = forward(ctx)
    _record_forward(ctx, fr)
    br = backward(ctx, fr)
    ctx.constants["D"] = br.d_max
    body = {"forward": _forward_body(fr), "backward": _backward_body(br)}
    return _report(ctx, "phif", body, _backward_checks(br))


def run_roundtrip(ctx: Context) -> dict:
    """Forward then reconstruction pipeline, repeated at the larger truncation radius and a second anchor pair."""
    fr = forward(ctx)
    _record_forward(ctx, fr)
    br = backward(ctx, fr)
    ctx.constants["D"] = br.d_max
    checks = {f"A.{k}": v for k, v in _forward_checks(ctx, fr).items()}
    checks.update({f"B.{k}": v for k, v in _backward_checks(br).items()})
    body = {"forward": _forward_body(fr), "backward": _backward_body(br)}

    if ctx.cfg.larger_radius:
        big = larger_context(ctx)
        fr2 = forward(big)
        br2 = backward(big, fr2)
        body["larger"] = {"radius": ctx.cfg.larger_radius, "deviation_from_phi": br2.deviation,
                          "forward": {"A": fr2.distortion.A, "B": fr2.distortion.B}}
        checks["stability.D1"] = br2.deviation <= br.deviation + 2
    if ctx.cfg.domain.second_anchor is not None:
        fr_b = forward(ctx, "second")
        br_b = backward(ctx, fr_b)
        m1 = qc.map_deviation(br.phi.vmap, br_b.phi.vmap)
        body["second_anchor"] = {"A": round(fr_b.distortion.A, 6), "B": round(fr_b.distortion.B, 6),
                                 "M1": m1}
        checks["anchor.A"] = abs(fr_b.distortion.A - fr.distortion.A) <= 0.5
        checks["anchor.B"] = abs(fr_b.distortion.B - fr.distortion.B) <= 2 * (ctx.R + ctx.delta)
        if ctx.cfg.larger_radius:
            fr_bb = forward(big, "second")
            br_bb = backward(big, fr_bb)
            m1_big = qc.map_deviation(br2.phi.vmap, br_bb.phi.vmap)
            body["second_anchor"]["M1_larger"] = m1_big
            checks["anchor.M1_stable"] = m1_big <= m1 + 2
    return _report(ctx, "roundtrip", body, checks)


def larger_context(ctx: Context) -> Context:
    """Same run at the larger truncation radii (codomain: its own setting, else the same step)."""
    big = Context(ctx.cfg, ctx.log)
    step = ctx.cfg.larger_radius - ctx.cfg.domain.radius
    big.domain.radius = ctx.cfg.larger_radius
    if big.codomain is not None:
        big.codomain.radius = ctx.cfg.larger_codomain_radius or ctx.cfg.codomain.radius + step
    # keep delta, C4 and R of the base run so the two truncations are compared at equal constants
    big.domain._delta = ctx.delta_of(ctx.domain)
    big.domain._c4 = ctx.c4_of(ctx.domain)
    if big.codomain is not None:
        big.codomain._delta = ctx.delta_of(ctx.codomain)
        big.codomain._c4 = ctx.c4_of(ctx.codomain)
    big._R = ctx.R
    return big


def run_report(reports: list[dict]) -> dict:
    merged_consts: dict = {k: None for k in CONSTANT_KEYS}
    for r in reports:
        for k, v in r.get("constants", {}).items():
            if v is not None:
                merged_consts[k] = v
    return {
        "command": "report",
        "parts": {r["command"]: r for r in reports},
        "constants": merged_consts,
        "passed": all(r.get("passed", True) for r in reports),
    }


def run_svg(ctx: Context) -> str:
    at = ctx.domain.atlas()
    R = ctx.R
    S = at.shadow_rows(R)
    path = at.designated_geodesic(0)
    rows = [S[v] for v in path[1:][:: max(1, len(path) // 4)]]
    return bd.atlas_svg(at, rows)
