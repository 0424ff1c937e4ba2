import random

import pytest
from hypothesis import given, settings, strategies as st

from relhyp.cusped import build_cusped_ball
from relhyp.graph import Graph
from relhyp.hyperbolicity import (
    QuasiGeodesicError, estimate_delta, four_point_delta, overlap_diameter, quasigeodesic_stability,
    slimness, triangle,
)
from test_graph import cycle, grid, random_tree


def ternary_tree(depth):
    """Rooted tree with 3 children per vertex: 1 + 3 + ... + 3^depth vertices."""
    edges, frontier, n = [], [0], 1
    for _ in range(depth):
        nxt = []
        for v in frontier:
            for _ in range(3):
                edges.append((v, n))
                nxt.append(n)
                n += 1
        frontier = nxt
    return Graph(n, edges)


def test_tree_zero():
    g = ternary_tree(4)
    assert g.n == 121
    assert estimate_delta(g, "exhaustive").delta == 0


def test_six_cycle():
    est = estimate_delta(cycle(6), "exhaustive")
    assert est.delta == 1 and est.witness.defect == 1
    assert slimness(cycle(6), triangle(cycle(6), 0, 2, 4)) == 1


def test_grids_increase():
    # frozen from an independent least-id exhaustive scan
    assert [estimate_delta(grid(n), "exhaustive").delta for n in (4, 6, 8)] == [3, 5, 7]


def test_degenerate_and_tripod():
    g, _ = random_tree(40, 1)
    assert slimness(g, triangle(g, 5, 5, 9)) == 0
    assert slimness(g, triangle(g, 3, 17, 29)) == 0


def test_side_mismatch():
    g = cycle(6)
    with pytest.raises(ValueError):
        slimness(g, ([0, 1], [2, 3], [3, 0]))


def test_errors():
    with pytest.raises(ValueError):
        estimate_delta(Graph(0, []))
    with pytest.raises(ValueError):
        estimate_delta(cycle(6), "weird")


def test_sampled_below_exhaustive():
    g = grid(6)
    assert estimate_delta(g, "sampled", 200, seed=3).delta <= estimate_delta(g, "exhaustive").delta


def test_four_point():
    g, _ = random_tree(30, 2)
    assert four_point_delta(g) == 0
    assert four_point_delta(grid(4)) > 0


def test_quasigeodesic():
    g = ternary_tree(4)
    # a geodesic against itself
    assert quasigeodesic_stability(g, [0, 1, 4, 13], 1, 0) == 0
    # detour: from 1 down r = 2 into the branch of 2 and back, then on to 3
    # 1-0-2-7-2-0-3 is a (1, 2r)-quasigeodesic whose distance to [1, 3] is r
    path = [1, 0, 2, 7, 2, 0, 3]
    assert quasigeodesic_stability(g, path, 1, 4) == 2
    for r in (1, 3):
        deep = [0, 2, 7, 22][: r + 1]
        assert quasigeodesic_stability(g, [1] + deep + deep[-2::-1] + [3], 1, 2 * r) == r
    with pytest.raises(QuasiGeodesicError):
        quasigeodesic_stability(g, path, 1, 1)


def test_overlap():
    g = ternary_tree(3)
    s = triangle(g, 13, 16, 39)
    assert overlap_diameter(g, s, 0) == 0
    assert overlap_diameter(g, s, 100) == len(s[2]) - 1


def test_overlap_bound_on_cusped_ball(f2_rel_a):
    cb = build_cusped_ball(f2_rel_a, 6, 5)
    d = estimate_delta(cb.graph, "sampled", 300, seed=1, pool=cb.non_rim()).delta
    R = 2 * d + 1
    rng = random.Random(5)
    pool = cb.non_rim().tolist()
    for _ in range(60):
        s = triangle(cb.graph, *(rng.choice(pool) for _ in range(3)))
        assert overlap_diameter(cb.graph, s, R) <= 2 * (R + 3 * d)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(3, 40), seed=st.integers(0, 10 ** 6))
def test_random_trees_are_zero_hyperbolic(n, seed):
    g, _ = random_tree(n, seed)
    assert estimate_delta(g, "exhaustive").delta == 0
