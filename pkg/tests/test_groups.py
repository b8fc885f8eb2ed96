import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rdpair import groups as grp
from rdpair.errors import EmbeddingInvalid, MalformedKey
from rdpair.fixtures import DEFAULT_CORPUS, build_fixture

MODELS = {
    "Z^3": grp.lattice(3),
    "F2": grp.free_group(),
    "BS(1,2)": grp.baumslag_solitar(2),
    "BS(1,3)": grp.baumslag_solitar(3),
    "Heis3": grp.heisenberg(),
    "S4": grp.symmetric_group_4(),
    "D8": grp.dihedral_8(),
}

words = st.lists(st.integers(min_value=0, max_value=7), max_size=12)


def _elem(model, word):
    gens = model.generator_keys
    g = model.identity
    for i in word:
        g = model.mul(g, gens[i % len(gens)])
    return g


@pytest.mark.parametrize("name", sorted(MODELS))
@given(u=words, v=words, w=words)
def test_group_axioms(name, u, v, w):
    m = MODELS[name]
    a, b, c = _elem(m, u), _elem(m, v), _elem(m, w)
    assert m.mul(m.mul(a, b), c) == m.mul(a, m.mul(b, c))
    assert m.mul(a, m.inv(a)) == m.identity
    assert m.mul(m.identity, a) == a
    assert m.is_valid(a)


@pytest.mark.parametrize("name", sorted(MODELS))
@given(u=words)
def test_key_roundtrip(name, u):
    m = MODELS[name]
    g = _elem(m, u)
    assert m.decode(m.encode(g)) == g
    assert m.parse_key(m.format_key(g)) == g


def test_generators_closed_under_inversion():
    for m in MODELS.values():
        keys = set(m.generator_keys)
        assert all(m.inv(s) in keys for s in keys)


def test_finite_orders():
    assert MODELS["S4"].order == 24
    assert MODELS["D8"].order == 8
    assert len(MODELS["S4"].elements) == 24


def test_free_reduction():
    f2 = MODELS["F2"]
    assert f2.mul("ab", "BA") == ""
    assert f2.mul("aB", "bb") == "ab"
    assert f2.inv("abA") == "aBA"
    assert grp.f2_exponent_sum("abAB") == 0
    assert grp.f2_strip_a("baA"[:2]) == "b"


def test_bs_relation():
    bs = MODELS["BS(1,2)"]
    a, t = (0, Fraction(1)), (1, Fraction(0))
    # t a t^-1 = a^2
    assert bs.mul(bs.mul(t, a), bs.inv(t)) == bs.power(a, 2)
    assert bs.format_key(bs.mul(bs.inv(t), bs.mul(a, t))) == "w:t^-1 a^1 t^1"


def test_heisenberg_commutator_is_central():
    h = MODELS["Heis3"]
    x, y = (1, 0, 0), (0, 1, 0)
    c = h.mul(h.mul(x, y), h.mul(h.inv(x), h.inv(y)))
    assert c == (0, 0, 1)
    assert h.mul(c, x) == h.mul(x, c)


def test_malformed_keys_rejected():
    with pytest.raises(MalformedKey):
        MODELS["F2"].multiply("aA", "b")
    with pytest.raises(MalformedKey):
        MODELS["Z^3"].invert((1, 2))
    with pytest.raises(MalformedKey):
        MODELS["F2"].parse_key("q:zz")
    with pytest.raises(MalformedKey):
        MODELS["BS(1,2)"].check((0, Fraction(1, 3)))
    with pytest.raises(MalformedKey):
        MODELS["S4"].check((0, 0, 1, 2))


@pytest.mark.parametrize("fixture", DEFAULT_CORPUS)
def test_coset_key_is_right_invariant(fixture):
    model, cosets = build_fixture(fixture)
    rng = random.Random(7)
    hs = cosets.subgroup_generators
    for _ in range(40):
        g = grp.sample_elements(model, rng, rng.randint(0, 8))
        for h in hs:
            assert cosets.key(model.mul(g, h)) == cosets.key(g)
            assert cosets.key(model.mul(g, model.inv(h))) == cosets.key(g)
        assert cosets.contains(model.identity)


def test_quotient_multiplication_on_normal_fixture():
    model, cosets = build_fixture("z2-zline")
    assert cosets.quotient_mul(2, -5) == -3
    _, c = build_fixture("f2-a")
    with pytest.raises(ValueError):
        c.quotient_mul("", "")


def test_product_pair():
    p = grp.product_pair(build_fixture("z2-zline"), build_fixture("s4-d8"))
    model, cosets = p
    assert len(model.generators) == 4 + len(build_fixture("s4-d8")[0].generators)
    g = model.word([model.generators[0][0], model.generators[-1][0]])
    assert model.decode(model.encode(g)) == g
    assert cosets.normal is False
    assert cosets.coamenable is True


def test_restrict_to_subgroup():
    model, cosets = build_fixture("z2-zline")
    z = grp.lattice(1)
    emb = grp.Embedding(z, embed=lambda k: (k[0], 0), contains=lambda g: g[1] == 0, pull=lambda g: (g[0],))
    k_model, k_cosets = grp.restrict_to_subgroup((model, cosets), emb)
    assert k_cosets.contains((5,))
    bad = grp.Embedding(z, embed=lambda k: (0, k[0]), contains=lambda g: g[0] == 0)
    with pytest.raises(EmbeddingInvalid):
        grp.restrict_to_subgroup((model, cosets), bad)
