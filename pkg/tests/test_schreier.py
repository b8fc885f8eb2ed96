import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rdpair import groups as grp
from rdpair.balls import enumerate_ball
from rdpair.errors import BallInsufficient, GraphTooLarge
from rdpair.fixtures import DEFAULT_CORPUS, build_fixture
from rdpair.schreier import (build_schreier, coset_representative_indicator, folner_ratio, folner_search,
                             format_coset_key, schreier_distance_bound_holds, schreier_growth)

R = 5


@pytest.mark.parametrize("fixture", DEFAULT_CORPUS)
def test_counts_match_ball_oracle(fixture):
    # gamma(H, r) = number of distinct cosets met by B(r)
    model, cosets = build_fixture(fixture)
    graph = build_schreier(cosets, R)
    ball = enumerate_ball(model, R)
    oracle = [len({cosets.key(x) for x in ball.elements(r)}) for r in range(R + 1)]
    assert graph.counts() == oracle
    for v in graph.vertices:
        assert cosets.key(graph.rep[v]) == v
        assert ball.length_of[graph.rep[v]] == graph.dist[v]


@pytest.mark.parametrize("fixture", ["z2-zline", "f2-a", "bs-t", "heisenberg-center"])
def test_distance_bound(fixture):
    model, cosets = build_fixture(fixture)
    graph = build_schreier(cosets, 4)
    ball = enumerate_ball(model, 6)
    assert schreier_distance_bound_holds(graph, ball, ball.elements())


@given(word=st.lists(st.integers(0, 3), max_size=4), v=st.integers(0, 40))
def test_edges_are_left_action(word, v):
    graph = _F2A
    vert = graph.vertices[v % len(graph.vertices)]
    gens = graph.cosets.group.generator_keys
    for s, w in zip(gens, graph.edges[vert]):
        if w is not None:
            assert graph.act(s, vert) == w
            assert w in graph


_F2A = build_schreier(build_fixture("f2-a")[1], 4)


def test_known_growth():
    _, c = build_fixture("z2-zline")
    assert build_schreier(c, 6).counts() == [2 * r + 1 for r in range(7)]
    assert schreier_growth(build_schreier(c, 10)).classification == "polynomial"
    for name in ("bs-a", "bs-t", "f2-a"):
        g = build_schreier(build_fixture(name)[1], 10)
        assert schreier_growth(g).classification == "exponential", name
    finite = build_schreier(build_fixture("s4-s3")[1], 10)
    assert finite.complete and len(finite) == 4


def test_loops():
    _, c = build_fixture("z2-zline")
    g = build_schreier(c, 3)
    # the e1 generators fix every coset of Z x {0}
    assert all(g.loops(v) == 2 for v in g.ball(2))


def test_folner():
    _, c = build_fixture("z2-zline")
    g = build_schreier(c, 12)
    gens = c.group.generator_keys
    assert folner_ratio(g, gens, g.ball(3)) == (2, 7)
    res = folner_search(g, gens, Fraction(1, 10))
    assert res.radius == 10 and res.ratio == Fraction(2, 21)
    g2 = build_schreier(build_fixture("f2-a")[1], 6)
    assert folner_search(g2, g2.cosets.group.generator_keys, Fraction(1, 2)) is None


def test_representative_indicator():
    model, c = build_fixture("f2-a")
    g = build_schreier(c, 4)
    ball = enumerate_ball(model, 4)
    ind = coset_representative_indicator(g, 3, ball)
    assert len(ind) == len(g.ball(3))
    assert {c.key(x) for x in ind.support} == set(g.ball(3))
    assert all(ball.length_of[x] == g.dist[c.key(x)] for x in ind.support)
    bfs = coset_representative_indicator(g, 3)
    assert len(bfs) == len(ind)
    with pytest.raises(BallInsufficient):
        coset_representative_indicator(g, 5)
    with pytest.raises(BallInsufficient):
        coset_representative_indicator(g, 3, enumerate_ball(model, 2))


def test_cap_and_json():
    with pytest.raises(GraphTooLarge):
        build_schreier(build_fixture("f2-free")[1], 10, cap=100)
    doc = build_schreier(build_fixture("bs-dyadic")[1], 2).to_json()
    assert doc["schema"] == "rdpair.schreier/1"
    assert [v["key"] for v in doc["vertices"]] == ["0", "1", "-1", "2", "-2"]
    assert format_coset_key((Fraction(1, 2), 3)) == "(1/2,3)"
