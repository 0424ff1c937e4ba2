import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from relhyp.graph import (
    Graph, UnreachableError, bfs_distances, dist_to_segment, distances, dump_graph, geodesic_dag,
    gromov_product, hausdorff, load_graph, one_geodesic, product_gap,
)
from relhyp.cusped import build_cusped_ball


def path_graph(n):
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n):
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def grid(n):
    e = [(i * n + j, i * n + j + 1) for i in range(n) for j in range(n - 1)]
    e += [(i * n + j, (i + 1) * n + j) for i in range(n - 1) for j in range(n)]
    return Graph(n * n, e)


def random_tree(n, seed):
    rng = random.Random(seed)
    parent = [None] + [rng.randrange(i) for i in range(1, n)]
    return Graph(n, [(i, parent[i]) for i in range(1, n)]), parent


def tree_path(parent, u, v):
    def up(x):
        out = [x]
        while parent[out[-1]] is not None:
            out.append(parent[out[-1]])
        return out
    pu, pv = up(u), up(v)
    common = set(pu) & set(pv)
    lca = next(x for x in pu if x in common)
    return pu[: pu.index(lca) + 1] + pv[: pv.index(lca)][::-1]


def all_paths(g, u, v, d):
    """Every u-v walk of length d with distinct vertices (brute-force DFS)."""
    out = []

    def go(path):
        if len(path) == d + 1:
            if path[-1] == v:
                out.append(list(path))
            return
        for w in g.neighbors(path[-1]):
            if int(w) not in path:
                go(path + [int(w)])
    go([u])
    return out


def test_bfs_basics():
    assert bfs_distances(path_graph(3), 0) == {0: 0, 1: 1, 2: 2}
    assert cycle(4).dist(0, 2) == 2
    g = Graph(3, [(0, 1)])
    assert 2 not in bfs_distances(g, 0)
    with pytest.raises(UnreachableError):
        one_geodesic(g, 0, 2)


def test_distances_limit_and_until():
    g = path_graph(10)
    d = distances(g, [0], limit=3)
    assert d[3] == 3 and d[4] == -1
    assert distances(g, [0], until=5)[5] == 5


def test_one_geodesic_tie_break():
    assert one_geodesic(cycle(4), 0, 2) == [0, 1, 2]
    assert one_geodesic(cycle(4), 3, 3) == [3]


def test_tree_geodesic():
    g, parent = random_tree(60, 3)
    rng = random.Random(0)
    for _ in range(50):
        u, v = rng.randrange(60), rng.randrange(60)
        assert one_geodesic(g, u, v) == tree_path(parent, u, v)


def test_dag_counts():
    assert sorted(geodesic_dag(cycle(4), 0, 2).paths()) == [[0, 1, 2], [0, 3, 2]]
    g, parent = random_tree(30, 5)
    assert list(geodesic_dag(g, 4, 17).paths()) == [tree_path(parent, 4, 17)]


def test_dag_matches_enumeration():
    # grid plus the doubled-edge test graph: the 4-regular tree ball times a 2-point fiber
    cb = build_cusped_ball(build_free(), 2, 1)
    t = cb.graph
    n = t.n
    e = [(int(a), int(b)) for a, b in t.edges()]
    doubled = Graph(2 * n, e + [(a + n, b + n) for a, b in e] + [(i, i + n) for i in range(n)])
    rng = random.Random(2)
    for g in (grid(5), doubled):
        for _ in range(25):
            u, v = rng.randrange(g.n), rng.randrange(g.n)
            d = g.dist(u, v)
            paths = list(geodesic_dag(g, u, v).paths())
            assert sorted(paths) == sorted(all_paths(g, u, v, d))
            assert all(len(p) == d + 1 for p in paths)


def build_free():
    from relhyp.groups import free_group
    return free_group("a", "b")


def test_gromov_product():
    g = grid(4)
    assert gromov_product(g, 3, 3, 9) == g.dist(3, 9)
    assert gromov_product(g, 3, 12, 3) == 0
    assert isinstance(gromov_product(g, 0, 5, 7), Fraction)
    assert gromov_product(g, 0, 5, 7).denominator <= 2


def test_tree_product_is_distance_to_segment():
    g, parent = random_tree(80, 11)
    rng = random.Random(4)
    for _ in range(100):
        a, b, w = (rng.randrange(80) for _ in range(3))
        seg = one_geodesic(g, a, b)
        assert gromov_product(g, a, b, w) == dist_to_segment(g, w, seg)


def test_dist_to_segment():
    g = grid(6)
    seg = one_geodesic(g, 0, 35)
    assert dist_to_segment(g, seg[3], seg) == 0
    for w in range(36):
        assert dist_to_segment(g, w, seg) == min(g.dist(w, p) for p in seg)


def test_hausdorff():
    g = path_graph(6)
    assert hausdorff(g, [0, 1], [0, 1]) == 0
    assert hausdorff(g, [0], [0, 3]) == 3


def test_dump_round_trip():
    g = grid(3)
    h = load_graph(dump_graph(g))
    assert h.n == g.n and np.array_equal(h.edges(), g.edges()) and h.labels == g.labels


def test_horoball_shortcut(f2_rel_a):
    # across the horoball top is shorter than the 8-step Cayley path
    cb = build_cusped_ball(f2_rel_a, 8, 5)
    assert cb.graph.dist(cb.vertex_of(""), cb.vertex_of("a " * 8)) < 8


def test_product_gap_stable(f2_rel_a):
    vals = []
    for r in (6, 7):
        cb = build_cusped_ball(f2_rel_a, r, 5)
        gap, _ = product_gap(cb.graph, 300, seed=1, pool=cb.non_rim().tolist())
        vals.append(gap)
    assert vals[1] <= vals[0] + 1


edges = st.lists(st.tuples(st.integers(0, 19), st.integers(0, 19)), min_size=1, max_size=60)


@settings(max_examples=100, deadline=None)
@given(e=edges)
def test_triangle_inequality(e):
    g = Graph(20, e)
    d = np.stack([g.dist_from(s) for s in range(20)])
    for a in range(20):
        for b in range(20):
            if d[a, b] < 0:
                continue
            for c in range(20):
                if d[b, c] >= 0:
                    assert d[a, c] <= d[a, b] + d[b, c]


@settings(max_examples=60, deadline=None)
@given(e=edges, u=st.integers(0, 19), v=st.integers(0, 19))
def test_geodesic_paths_have_length_d(e, u, v):
    g = Graph(20, e)
    if g.dist_from(u)[v] < 0:
        return
    d = g.dist(u, v)
    p = one_geodesic(g, u, v)
    assert len(p) == d + 1 and p[0] == u and p[-1] == v
    assert all(q in g.neighbors(p_) for p_, q in zip(p, p[1:]))
    for path in geodesic_dag(g, u, v).paths(limit=50):
        assert len(path) == d + 1
