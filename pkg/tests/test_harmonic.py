import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rdpair import harmonic as hm
from rdpair.balls import enumerate_ball
from rdpair.errors import ModelMismatch, NegativeEntry, SupportNotEnumerated
from rdpair.fixtures import build_fixture
from rdpair.harmonic import GroupFunction

FIXTURES = ["z2-zline", "f2-a", "bs-a", "s4-d8", "d8-flip", "heisenberg-center"]
BALLS = {}


def setup(name):
    if name not in BALLS:
        model, cosets = build_fixture(name)
        BALLS[name] = (model, cosets, enumerate_ball(model, 4))
    return BALLS[name]


seeds = st.integers(0, 2**32 - 1)


@pytest.mark.parametrize("name", FIXTURES)
@given(seed=seeds)
def test_convolution_associative_and_l1_submultiplicative(name, seed):
    model, cosets, ball = setup(name)
    rng = random.Random(seed)
    f, g, h = (hm.random_signed(model, ball, rng, 2, max_support=5) for _ in range(3))
    assert hm.convolve(hm.convolve(f, g), h) == hm.convolve(f, hm.convolve(g, h))
    assert hm.norm1(hm.convolve(f, g)).squared <= hm.norm1(f).squared * hm.norm1(g).squared
    # (f*g)^* = g^* * f^*
    assert hm.involute(hm.convolve(f, g)) == hm.convolve(hm.involute(g), hm.involute(f))


@pytest.mark.parametrize("name", FIXTURES)
@given(seed=seeds)
def test_norm_chain_and_pushforward(name, seed):
    model, cosets, ball = setup(name)
    f = hm.random_signed(model, ball, random.Random(seed), 4)
    assert hm.norm2(f) <= hm.norm21(f, cosets) <= hm.norm1(f)
    assert hm.norm21(f, cosets).squared == hm.vector_norm2(hm.pushforward(f.abs(), cosets)).squared


@given(seed=seeds)
def test_extreme_subgroups(seed):
    model, _, ball = setup("z2-zline")
    f = hm.random_signed(model, ball, random.Random(seed), 4)
    _, trivial = build_fixture("zd-trivial")
    _, full = build_fixture("zd-full")
    assert hm.norm21(f, trivial).squared == hm.norm2(f).squared
    assert hm.norm21(f, full).squared == hm.norm1(f).squared


@given(seed=seeds)
def test_float_mode_matches_exact(seed):
    model, cosets, ball = setup("bs-a")
    f = hm.random_signed(model, ball, random.Random(seed), 3)
    exact = float(hm.norm21(f, cosets).squared)
    approx = hm.norm21(f.to_float(), cosets).squared
    assert abs(exact - approx) <= 1e-12 * max(1.0, exact)


@given(seed=seeds)
def test_decompose_recompose(seed):
    model, _, ball = setup("f2-a")
    f = hm.random_signed(model, ball, random.Random(seed), 3)
    parts = hm.positive_decompose(f)
    assert all(p.is_positive() for p in parts)
    assert hm.recompose(parts) == f
    z = GroupFunction(model, {"a": 1 + 2j, "b": -3j}, "float")
    assert hm.recompose(hm.positive_decompose(z)).entries == z.entries


@given(seed=seeds)
def test_records_roundtrip(seed):
    model, _, ball = setup("bs-a")
    f = hm.random_signed(model, ball, random.Random(seed), 3)
    assert hm.function_from_records(model, hm.function_to_records(f)) == f
    ff = f.to_float()
    assert hm.function_from_records(model, hm.function_to_records(ff)).entries == ff.entries


@pytest.mark.parametrize("name", FIXTURES)
@given(seed=seeds)
def test_pairing_identity(name, seed):
    model, cosets, ball = setup(name)
    rng = random.Random(seed)
    f = hm.random_positive(model, ball, rng, 2, max_support=6)
    phi = hm.random_positive(model, ball, rng, 2, max_support=6)
    F = hm.convolve(f, phi)
    assert hm.condition4_pairing(f, phi, hm.involute(F), cosets) == hm.norm21(F, cosets).squared


def test_sobolev_weights():
    model, cosets, ball = setup("z2-zline")
    f = GroupFunction(model, {(0, 0): 1, (1, 1): 2, (0, -3): Fraction(1, 2)})
    w = hm.sobolev_weighted(f, ball, 2)
    assert w[(1, 1)] == 2 * 9 and w[(0, -3)] == Fraction(16, 2) and w[(0, 0)] == 1
    assert hm.sobolev_norm(f, cosets, ball, 0).squared == hm.norm21(f, cosets).squared
    assert hm.sobolev_norm(f, cosets, ball, 1, base="l2").squared == 1 + 36 + 4
    with pytest.raises(SupportNotEnumerated):
        hm.sobolev_weighted(GroupFunction.delta(model, (9, 9)), ball, 1)


def test_convolution_power_and_uniform():
    model, cosets, _ = setup("z2-zline")
    mu = GroupFunction.uniform(model, model.generator_keys)
    mu2 = hm.convolution_power(mu, 2)
    assert mu2[(0, 0)] == Fraction(1, 4)
    assert mu2[(2, 0)] == Fraction(1, 16)
    assert mu2.total() == 1
    assert hm.convolution_power(mu, 0) == GroupFunction.delta(model)


def test_guards():
    model, cosets, _ = setup("z2-zline")
    other, _ = build_fixture("f2-a")
    with pytest.raises(ModelMismatch):
        hm.convolve(GroupFunction.delta(model), GroupFunction.delta(other))
    with pytest.raises(ModelMismatch):
        hm.norm21(GroupFunction.delta(other), cosets)
    with pytest.raises(NegativeEntry):
        hm.condition4_pairing(GroupFunction.delta(model, weight=-1), GroupFunction.delta(model),
                              GroupFunction.delta(model), cosets)
    with pytest.raises(ValueError):
        GroupFunction(model, {}, "decimal")


def test_zero_entries_dropped():
    model, _, _ = setup("z2-zline")
    f = GroupFunction(model, {(0, 0): 0, (1, 0): 1})
    assert list(f.support) == [(1, 0)]
    assert (f - f).is_zero()


def test_two_coset_example():
    model, cosets, _ = setup("z2-zline")
    f = GroupFunction(model, {(0, 0): 1, (1, 0): 1, (0, 1): 1})
    # coset sums 2 and 1
    assert hm.norm21(f, cosets).squared == 5
    assert hm.norm2(f).squared == 3 and hm.norm1(f).squared == 9
    assert hm.involute(GroupFunction(model, {(1, 0): 2, (0, 1): 3})) == GroupFunction(model, {(-1, 0): 2, (0, -1): 3})
