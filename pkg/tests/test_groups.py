import random

import pytest
from hypothesis import given, settings, strategies as st

from relhyp.graph import distances
from relhyp.groups import (
    BudgetError, CosetId, GroupSpecError, UnknownSymbolError, coset_of, distance, dump_group_spec,
    enumerate_ball, free_abelian_group, free_group, free_product_of_cyclics, inverse, multiply,
    parse_group_spec, parse_word, reduce_word, word_length,
)
from relhyp.cusped import build_cusped_ball, cayley_subgraph

CATALOG = {
    "free": free_group("a", "b", peripherals=[["a"]]),
    "free-abelian": free_abelian_group("a", "b"),
    "free-product-of-cyclics": free_product_of_cyclics({"a": 2, "b": 3}, peripherals=[["a"]]),
}


def nf(spec, w):
    return " ".join(reduce_word(spec, w).word)


def test_free_reduction(f2):
    assert nf(f2, "a b B") == "a"
    assert reduce_word(f2, "a A").word == ()
    assert word_length(f2, reduce_word(f2, "a A").word) == 0


def test_abelian_sorting():
    z2 = free_abelian_group("a", "b")
    assert nf(z2, "b a") == "a b"
    assert nf(z2, "b a B A") == ""


def test_free_product_syllables():
    g = free_product_of_cyclics({"a": 2, "b": 3})
    assert nf(g, "a a") == ""
    assert reduce_word(g, "b b b").word == ()
    assert word_length(g, reduce_word(g, "b b").word) == 1  # b^2 = b^-1


def test_unknown_symbol_position(f2):
    with pytest.raises(UnknownSymbolError) as e:
        parse_word(f2, "a b x")
    assert e.value.position == 2


def test_ball_sizes(f2):
    # frozen from an independent free-reduction BFS
    assert [len(enumerate_ball(f2, r)) for r in range(7)] == [1, 5, 17, 53, 161, 485, 1457]
    assert {str(g) for g in enumerate_ball(f2, 1)} == {"e", "a", "A", "b", "B"}


def test_ball_order(f2):
    ball = enumerate_ball(f2, 3)
    lengths = [word_length(f2, g.word) for g in ball]
    assert lengths == sorted(lengths)


def test_z_ball():
    assert len(enumerate_ball(free_group("a"), 3)) == 7


def test_budget(f2):
    with pytest.raises(BudgetError) as e:
        enumerate_ball(f2, 12, budget=1000)
    assert e.value.projected == 1 + 2 * (3 ** 12 - 1)


def test_cosets(f2_rel_a):
    s = f2_rel_a
    assert coset_of(s, reduce_word(s, "a a a"), 0) == coset_of(s, reduce_word(s, ""), 0)
    assert coset_of(s, reduce_word(s, "b a a"), 0) == coset_of(s, reduce_word(s, "b"), 0)
    assert coset_of(s, reduce_word(s, "b"), 0) != coset_of(s, reduce_word(s, "a b"), 0)
    # brute-force partition of the radius-3 ball gives 27 cosets
    assert len({coset_of(s, g, 0) for g in enumerate_ball(s, 3)}) == 27
    assert isinstance(coset_of(s, reduce_word(s, "b"), 0), CosetId)


def test_spec_round_trip(f2_rel_a_abgen):
    assert parse_group_spec(dump_group_spec(f2_rel_a_abgen)) == f2_rel_a_abgen


@pytest.mark.parametrize("text", [
    "kind: weird\ngenerators: [a]\n",
    "kind: free\ngenerators: [a, a]\n",
    "kind: free\ngenerators: [a]\nperipherals: [[b]]\n",
    "kind: free-product-of-cyclics\ngenerators: [a]\norders: [1]\n",
])
def test_bad_specs(text):
    with pytest.raises(GroupSpecError):
        parse_group_spec(text)


words = st.lists(st.sampled_from(["a", "A", "b", "B"]), max_size=30)


@settings(max_examples=300, deadline=None)
@given(kind=st.sampled_from(sorted(CATALOG)), w=words)
def test_reduce_is_retraction(kind, w):
    spec = CATALOG[kind]
    once = reduce_word(spec, w).word
    assert reduce_word(spec, once).word == once


@settings(max_examples=200, deadline=None)
@given(kind=st.sampled_from(sorted(CATALOG)), u=words, v=words)
def test_group_axioms(kind, u, v):
    spec = CATALOG[kind]
    g, h = reduce_word(spec, u), reduce_word(spec, v)
    assert multiply(spec, g, inverse(spec, g)).word == ()
    assert distance(spec, g, h) == distance(spec, h, g)


@settings(max_examples=200, deadline=None)
@given(w=words, p=st.sampled_from(["a", "A"]))
def test_coset_right_invariance(f2_rel_a, w, p):
    g = reduce_word(f2_rel_a, w)
    assert coset_of(f2_rel_a, multiply(f2_rel_a, g, reduce_word(f2_rel_a, p)), 0) == coset_of(f2_rel_a, g, 0)


def test_word_metric_matches_bfs():
    for spec in (free_group("a", "b"), free_group("a", "b", extras={"c": "a b"}), CATALOG["free-abelian"]):
        cb = build_cusped_ball(spec, 3, 1)
        g = cayley_subgraph(cb)
        rng = random.Random(1)
        for _ in range(15):
            i = rng.randrange(cb.n_group)
            gi = cb.elements[i]
            row = distances(g, [i])
            for j, gj in enumerate(cb.elements):
                if len(gi.word) + len(gj.word) > 6:
                    continue
                d = distance(spec, gi, gj)
                # a geodesic from i of length d stays inside the ball when |i| + d <= radius
                if gi.length + d <= 3:
                    assert row[j] == d
