import math
from fractions import Fraction

import pytest

from rdpair.errors import MissingRho, NegativeEntry
from rdpair.fixtures import build_fixture
from rdpair.harmonic import GroupFunction
from rdpair.schreier import build_schreier
from rdpair.walks import (Measure, WalkReport, lower_bound_verify, n_step_distribution, return_identity_check,
                          return_probability, walk_spectral_radius)


def _mu(name):
    model, cosets = build_fixture(name)
    return Measure.uniform_on_generators(model), cosets


@pytest.mark.parametrize("name", ["z2-zline", "f2-a", "f2-ker", "bs-a", "bs-t", "bs-dyadic", "heisenberg-center",
                                  "s4-d8", "d8-flip", "z2-zline*s4-s3"])
def test_chain_matches_group_route(name):
    mu, cosets = _mu(name)
    for n in range(1, 4):
        assert return_probability(mu, cosets, n) == return_probability(mu, cosets, n, method="group")
        assert return_identity_check(mu, cosets, n).equal


def test_known_values():
    mu, cosets = _mu("f2-free")
    assert return_probability(mu, cosets, 1) == Fraction(1, 4)
    assert return_probability(mu, cosets, 2) == Fraction(7, 64)
    mu, cosets = _mu("z2-zline")
    assert return_probability(mu, cosets, 1) == Fraction(3, 8)
    mu, cosets = _mu("zd-full")
    assert return_probability(mu, cosets, 5) == 1
    mu, cosets = _mu("s4-full")
    assert return_probability(mu, cosets, 0) == 1


def test_measure_validation():
    model, _ = build_fixture("f2-free")
    with pytest.raises(ValueError):
        Measure(GroupFunction(model, {"a": Fraction(1, 2)}))
    with pytest.raises(NegativeEntry):
        Measure(GroupFunction(model, {"a": 2, "b": -1}))
    lopsided = Measure(GroupFunction(model, {"a": Fraction(1, 2), "b": Fraction(1, 2)}))
    assert not lopsided.symmetric
    assert lopsided.radius == 1
    with pytest.raises(ValueError):
        walk_spectral_radius(lopsided, build_fixture("f2-a")[1], None, 3)
    assert Measure.uniform_on_generators(model).generates()
    assert not Measure(GroupFunction.delta(model, "a")).generates()


def test_n_step_distribution_is_probability():
    mu, _ = _mu("bs-a")
    p = n_step_distribution(mu, 4)
    assert p.total() == 1 and p.is_positive()


def test_walk_report():
    mu, cosets = _mu("z2-zline")
    graph = build_schreier(cosets, 10)
    rep = walk_spectral_radius(mu, cosets, graph, 10, fixture="z2-zline")
    assert rep.returns[0] == Fraction(3, 8)
    assert isinstance(rep.returns[7], Fraction) and isinstance(rep.returns[8], float)
    assert rep.cross_check["consistent"] and rep.cross_check["tailBelowUpper"]
    assert rep.rho_lower <= rep.rho_upper == 1.0
    assert list(rep.radius_sequence) == sorted(rep.radius_sequence)
    # sqrt(P_2N / P_2N-2) approaches 1 faster than the roots
    assert rep.ratio_estimate > rep.radius_sequence[-1]
    csv = rep.to_csv().splitlines()
    assert csv[0] == "n,P2n,P2n_exact,root" and csv[1].startswith("1,0.375,3/8,")
    rec = rep.as_record()
    assert rec["N"] == 10 and rec["rho"]["upper"] == 1.0


def test_lower_bound_verify():
    mu, cosets = _mu("z2-zline")
    rep = walk_spectral_radius(mu, cosets, None, 6)
    rows = lower_bound_verify(rep, 0.5, 3.0)
    assert [r["n"] for r in rows] == list(range(1, 7))
    # the coset walk is lazy on Z, P_2n ~ 1/sqrt(2 pi n), so d = 1/2 and C = 3 suffice
    assert all(r["holds"] for r in rows)
    assert not lower_bound_verify(rep, 0.5, 0.1)[-1]["holds"]
    empty = WalkReport("x", (), (), 0.0, 0.0, 0.0, {})
    with pytest.raises(MissingRho):
        lower_bound_verify(empty, 1, 1)


def test_nonamenable_walk_decays():
    mu, cosets = _mu("f2-a")
    rep = walk_spectral_radius(mu, cosets, None, 8)
    assert rep.radius_sequence[-1] < 0.95
    assert math.isfinite(rep.ratio_estimate)


def test_coamenable_root_sequence_rate():
    # the roots approach 1 like n^(-1/4n); the ratio sqrt(P_2N / P_2N-2) is much closer at N = 20
    mu, cosets = _mu("z2-zline")
    rep = walk_spectral_radius(mu, cosets, None, 20)
    assert 0.93 < rep.radius_sequence[-1] < 0.97
    assert abs(1 - rep.ratio_estimate) < 0.03
