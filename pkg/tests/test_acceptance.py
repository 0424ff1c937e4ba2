"""Acceptance criteria 1-9, each at its stated tolerance and runtime limit.

Every criterion records one PASS/FAIL line (printed in the terminal summary).
Criteria 3-8 run on the shipped configs; criterion 9 reruns every criterion
with the same seed and compares the reports byte for byte.
"""

import math
import time

import pytest

from relhyp import pipeline
from relhyp.config import load_config
from relhyp.horoball import segment_horoball
from relhyp.hyperbolicity import estimate_delta
from test_graph import grid
from test_hyperbolicity import ternary_tree

VERDICTS: dict[int, str] = {}
REPORTS: dict[int, str] = {}


def verdict(n, ok, elapsed, limit, detail):
    ok = bool(ok) and elapsed < limit
    VERDICTS[n] = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({elapsed:.1f}s / {limit}s) {detail}"
    print(VERDICTS[n])
    return ok


def context(configs, name):
    return pipeline.Context(load_config(configs / name), log=lambda msg: None)


# -- 1 ------------------------------------------------------------------------

def horoball_report():
    h = segment_horoball(32, 6)
    k = len(h.base)
    have = {tuple(sorted(map(int, e))) for e in h.graph.edges()}
    rule = set()
    for n in range(h.depth + 1):
        for x in range(k):
            if n < h.depth:
                rule.add((h.vertex(x, n), h.vertex(x, n + 1)))
            for y in range(x + 1, k):
                if n >= 1 and 0 < abs(x - y) <= 2 ** n:
                    rule.add((h.vertex(x, n), h.vertex(y, n)))
    d0 = h.graph.dist_from(h.vertex(0, 0))
    dist = {k_: int(d0[h.vertex(2 ** k_, 0)]) for k_ in (3, 4, 5)}
    return {"edges_match": have == rule, "edges": len(have), "distances": dist}


def test_criterion_1():
    t = time.perf_counter()
    rep = horoball_report()
    el = time.perf_counter() - t
    REPORTS[1] = pipeline.dumps(rep)
    ok = rep["edges_match"] and all(2 * k <= d <= 2 * k + 4 for k, d in rep["distances"].items())
    assert verdict(1, ok, el, 5, f"edges match {rep['edges_match']}, d((0,0),(2^k,0)) = {rep['distances']}")


# -- 2 ------------------------------------------------------------------------

def delta_report():
    tree = ternary_tree(4)
    return {"tree_vertices": tree.n, "tree_delta": estimate_delta(tree, "exhaustive").delta,
            "grid_delta": {n: estimate_delta(grid(n), "exhaustive").delta for n in (4, 6, 8)}}


def test_criterion_2():
    t = time.perf_counter()
    rep = delta_report()
    el = time.perf_counter() - t
    REPORTS[2] = pipeline.dumps(rep)
    g = [rep["grid_delta"][n] for n in (4, 6, 8)]
    ok = rep["tree_vertices"] == 121 and rep["tree_delta"] == 0 and g[0] < g[1] < g[2]
    assert verdict(2, ok, el, 30, f"tree({rep['tree_vertices']}) delta {rep['tree_delta']}, grids 4/6/8 -> {g}")


# -- 3, 4 ----------------------------------------------------------------------

@pytest.fixture(scope="module")
def rings(configs):
    t = time.perf_counter()
    ctx = context(configs, "f2_rel_a.yaml")
    rep = pipeline.run_rings(ctx)
    return rep, time.perf_counter() - t, ctx


def test_criterion_3(rings):
    rep, el, ctx = rings
    REPORTS[3] = pipeline.dumps(rep)
    lem = rep["results"]["ring_lemma"]
    d, R = ctx.delta, ctx.R
    ok = (R == math.ceil(2 * d) + 1 and lem["separation"] >= R + d and lem["checked"] >= 500
          and lem["failures"] == 0)
    assert verdict(3, ok, el, 120, f"delta {d}, R {R}, separation {lem['separation']}: "
                                   f"{lem['checked'] - lem['failures']}/{lem['checked']} pass")


def test_criterion_4(rings):
    rep, el, ctx = rings
    REPORTS[4] = REPORTS.get(3, pipeline.dumps(rep))
    eq = rep["results"]["equivalence"]
    d, R = ctx.delta, ctx.R
    ok = (eq["R"] == R and eq["R2"] == R + 1 and eq["samples"] >= 200 and eq["skip_rate"] < 0.2
          and eq["ln_C5"] <= R + (R + 1) + 2 * d)
    assert verdict(4, ok, el, 120, f"ln C5 {eq['ln_C5']} <= {R + R + 1 + 2 * d} over {eq['samples']} rings, "
                                   f"skip rate {eq['skip_rate']}")


# -- 5 ------------------------------------------------------------------------

def test_criterion_5(configs):
    t = time.perf_counter()
    ctx = context(configs, "f2_rel_a.yaml")
    rep = pipeline.run_horoball_rings(ctx)
    el = time.perf_counter() - t
    REPORTS[5] = pipeline.dumps(rep)
    rows = rep["results"]["horoballs"]
    R, d, c4 = ctx.R, ctx.delta, rep["results"]["C4"]
    ok = (bool(rows) and all(r["inner"] and r["outer"] for r in rows)
          and all(r["dist_to_horoball"] <= R + d for r in rows)
          and all(r["ln_T1"] == math.ceil(c4 + R + 2 * d) for r in rows))
    assert verdict(5, ok, el, 120, f"{sum(r['inner'] and r['outer'] for r in rows)}/{len(rows)} horoballs covered, "
                                   f"C4 {c4}, max d(p,H) {max(r['dist_to_horoball'] for r in rows)} <= {R + d}")


# -- 6 ------------------------------------------------------------------------

def test_criterion_6(configs):
    t = time.perf_counter()
    ctx = context(configs, "f2_generator_change.yaml")
    rep = pipeline.run_distortion(ctx)
    el = time.perf_counter() - t
    REPORTS[6] = pipeline.dumps(rep)
    res = rep["results"]
    dist, qi = res["distortion"], res["qi"]
    A, B = dist["A"], dist["B"]
    law = all(b <= A * a + B + 0.5 for a, b in dist["samples"])
    ok = (dist["rings"] >= 150 and 1 <= A <= qi["lambda"] + 0.25 and law
          and rep["checks"]["L_finite"] and rep["checks"]["tags_preserved"] and rep["checks"]["skip_rate"])
    assert verdict(6, ok, el, 300, f"lambda {qi['lambda']}, A {A}, B {B} over {dist['rings']} rings, "
                                   f"law holds {law}, ln L {res['shadow_preservation']['ln_L']}")


# -- 7, 8 ------------------------------------------------------------------------

@pytest.fixture(scope="module")
def roundtrip(configs):
    t = time.perf_counter()
    ctx = context(configs, "f2_generator_change.yaml")
    rep = pipeline.run_roundtrip(ctx)
    return rep, time.perf_counter() - t, ctx


def test_criterion_7(roundtrip):
    rep, el, ctx = roundtrip
    REPORTS[7] = pipeline.dumps(rep)
    b = rep["results"]["backward"]
    d, R = ctx.delta, ctx.R
    bound = 2 * b["ln_eta_t0"] + 2 * R + 10 * d + 2
    dev, dev2 = b["deviation_from_phi"], rep["results"]["larger"]["deviation_from_phi"]
    ok = (b["ln_t0"] == 3 * R + 2 * d and b["empty_count"] == 0 and all(e["size"] > 0 for e in b["e_sets"])
          and b["D"] <= bound and dev2 <= dev + 2 and b["qi"]["ok"]
          and b["coincidence"]["deviation"] <= b["ln_eta_t0"] + R + 2 * d
          and b["cusp_of_projection"] < 10 ** 6)
    assert verdict(7, ok, el, 600, f"E-sets nonempty, D {b['D']} <= {bound}, sup d(Phi f, phi) {dev} -> {dev2}, "
                                   f"Phi f QI ({b['qi']['lambda']}, {b['qi']['K']}), coincidence "
                                   f"{b['coincidence']['deviation']} <= {b['ln_eta_t0'] + R + 2 * d}, "
                                   f"cusp {b['cusp_of_projection']}")


def test_criterion_8(roundtrip):
    rep, el, ctx = roundtrip
    REPORTS[8] = REPORTS.get(7, pipeline.dumps(rep))
    f, s = rep["results"]["forward"]["distortion"], rep["results"]["second_anchor"]
    d, R = ctx.delta, ctx.R
    ok = (abs(s["A"] - f["A"]) <= 0.5 and abs(s["B"] - f["B"]) <= 2 * (R + d)
          and s["M1_larger"] <= s["M1"] + 2)
    assert verdict(8, ok, el, 600, f"A {f['A']} -> {s['A']}, B {f['B']} -> {s['B']} (<= {2 * (R + d)}), "
                                   f"M1 {s['M1']} -> {s['M1_larger']}")


# -- 9 ------------------------------------------------------------------------

def test_criterion_9(configs):
    t = time.perf_counter()
    again = {
        1: pipeline.dumps(horoball_report()),
        2: pipeline.dumps(delta_report()),
        3: pipeline.dumps(pipeline.run_rings(context(configs, "f2_rel_a.yaml"))),
        5: pipeline.dumps(pipeline.run_horoball_rings(context(configs, "f2_rel_a.yaml"))),
        6: pipeline.dumps(pipeline.run_distortion(context(configs, "f2_generator_change.yaml"))),
        7: pipeline.dumps(pipeline.run_roundtrip(context(configs, "f2_generator_change.yaml"))),
    }
    again[4], again[8] = again[3], again[7]
    el = time.perf_counter() - t
    missing = sorted(set(range(1, 9)) - set(REPORTS))
    same = {n: REPORTS.get(n) == again[n] for n in range(1, 9)}
    ok = not missing and all(same.values())
    diff = [n for n, v in same.items() if not v]
    assert verdict(9, ok, el, float("inf"), f"reruns byte-identical for criteria "
                                            f"{[n for n, v in same.items() if v]}; differing {diff}")
