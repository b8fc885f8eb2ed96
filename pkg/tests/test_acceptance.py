"""The eleven acceptance criteria, each with an oracle independent of the code under test.

Every test records a one-line PASS/FAIL summary that is printed at the end
of the run (see conftest.py).
"""

import filecmp
import math
import random
import time
from fractions import Fraction
from math import comb

import numpy as np
import pytest

from rdpair import harmonic as hm
from rdpair.balls import enumerate_ball
from rdpair.cli import main
from rdpair.fixtures import DEFAULT_CORPUS, FixtureSpec, build_fixture
from rdpair.harmonic import GroupFunction
from rdpair.operators import KINDS, dense_regular_matrix, hybrid_norm_bracket, spectral_radius
from rdpair.rdlab import leptin_check, rd_exponent_fit
from rdpair.schreier import build_schreier, schreier_growth
from rdpair.walks import Measure, lower_bound_verify, return_identity_check, return_probability, walk_spectral_radius

SAMPLES = 1000


def _corpus_functions(name, count, radius=4, seed=0):
    model, cosets = build_fixture(name)
    ball = enumerate_ball(model, radius)
    rng = random.Random(f"{name}:{seed}")
    return model, cosets, [hm.random_signed(model, ball, rng, radius) for _ in range(count)]


def _l21_by_membership(f, cosets):
    # cosets found by pairwise tests x^-1 y in H, without coset keys
    model = f.model
    classes = []
    for x, v in f.items_sorted():
        for cl in classes:
            if cosets.contains(model.mul(model.inv(cl[0]), x)):
                cl[1].append(abs(v))
                break
        else:
            classes.append((x, [abs(v)]))
    return sum((sum(vals, Fraction(0)) ** 2 for _, vals in classes), Fraction(0))


def test_criterion_01_norm_chain(acceptance):
    start = time.perf_counter()
    bad = []
    for name in DEFAULT_CORPUS:
        _, cosets, fs = _corpus_functions(name, SAMPLES)
        for f in fs:
            if not (hm.norm2(f) <= hm.norm21(f, cosets) <= hm.norm1(f)):
                bad.append(name)
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 60
    acceptance(1, ok, f"{len(DEFAULT_CORPUS)} fixtures x {SAMPLES} f, exact; {elapsed:.1f}s; failures {len(bad)}")
    assert ok


def test_criterion_02_pushforward_identity(acceptance):
    bad = 0
    for name in DEFAULT_CORPUS:
        _, cosets, fs = _corpus_functions(name, SAMPLES)
        for f in fs:
            n21 = hm.norm21(f, cosets).squared
            push = hm.vector_norm2(hm.pushforward(f.abs(), cosets)).squared
            bad += not (n21 == push == _l21_by_membership(f, cosets))
    acceptance(2, bad == 0, f"{len(DEFAULT_CORPUS)} fixtures x {SAMPLES} f against a membership oracle; "
                            f"mismatches {bad}")
    assert bad == 0


FLAGSHIP = ("z2-zline", "f2-a", "f2-ker", "bs-a", "bs-dyadic", "s4-d8")


def test_criterion_03_return_identity(acceptance):
    start = time.perf_counter()
    bad = []
    for name in FLAGSHIP:
        model, cosets = build_fixture(name)
        mu = Measure.uniform_on_generators(model)
        for n in range(0, 9):
            chk = return_identity_check(mu, cosets, n)
            if not (chk.equal and isinstance(chk.lhs, Fraction)):
                bad.append((name, n))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 300
    acceptance(3, ok, f"P_2n(H,H) = ||mu^(n)||^2_(2,1) exactly, n <= 8 on {len(FLAGSHIP)} fixtures; "
                      f"{elapsed:.1f}s; failures {bad}")
    assert ok


def test_criterion_04_binomial(acceptance):
    model, cosets = build_fixture(FixtureSpec("zd-trivial", d=1))
    mu = Measure.uniform_on_generators(model)
    bad = []
    for n in range(0, 13):
        want = Fraction(comb(2 * n, n), 4**n)
        chain = return_probability(mu, cosets, n)
        group = return_probability(mu, cosets, n, method="group")
        if not (chain == group == want):
            bad.append(n)
    acceptance(4, not bad, f"P_2n(e,e) = C(2n,n)/4^n on Z for n <= 12, both routes; failures {bad}")
    assert not bad


def test_criterion_05_pairing_identity(acceptance):
    bad = []
    for name in DEFAULT_CORPUS:
        model, cosets = build_fixture(name)
        ball = enumerate_ball(model, 3)
        for seed in range(100):
            rng = random.Random(seed)
            f = hm.random_positive(model, ball, rng, 3)
            phi = hm.random_positive(model, ball, rng, 3)
            F = hm.convolve(f, phi)
            if hm.condition4_pairing(f, phi, hm.involute(F), cosets) != hm.norm21(F, cosets).squared:
                bad.append((name, seed))
    acceptance(5, not bad, f"pairing with psi = (f*phi)^* equals ||f*phi||^2_(2,1), 100 seeds x "
                           f"{len(DEFAULT_CORPUS)} fixtures at R = 3; failures {len(bad)}")
    assert not bad


def test_criterion_06_finite_oracle(acceptance):
    model, cosets = build_fixture("s4-d8")
    ball = enumerate_ball(model, 10)
    graph = build_schreier(cosets, 10)
    rng = random.Random(6)
    outside = 0
    for _ in range(100):
        f = hm.random_positive(model, ball, rng, 10)
        M, _ = dense_regular_matrix(f, cosets)
        if not hybrid_norm_bracket(f, cosets, graph).contains(float(np.linalg.norm(M, 2)), rel=1e-12):
            outside += 1
    worst = 0.0
    for _ in range(5):
        # lazy f (mass on e) keeps the power ratios from oscillating
        f = hm.random_positive(model, ball, rng, 10) + GroupFunction.delta(model)
        M, _ = dense_regular_matrix(f, cosets)
        rho = float(max(abs(np.linalg.eigvals(M))))
        for kind in KINDS:
            est = spectral_radius(f, kind, cosets=cosets, N=120, s=2)
            worst = max(worst, abs(est.extrapolated - rho) / rho)
    ok = outside == 0 and worst <= 1e-8
    acceptance(6, ok, f"S4/D8: 100 brackets, {outside} miss the dense norm; spectral kinds max rel err "
                      f"{worst:.2e} (tol 1e-8)")
    assert ok


def test_criterion_07_leptin(acceptance):
    pair = build_fixture("z2-zline")
    mu = GroupFunction.uniform(pair[0], pair[0].generator_keys)
    res = leptin_check(pair, mu, radii=(10, 20, 40))
    zero = []
    for name in ("zd-full", "s4-full"):
        p = build_fixture(name)
        r = leptin_check(p, GroupFunction.uniform(p[0], p[0].generator_keys), radii=(2, 4))
        zero.append(r["gapExactZero"])
    ok = res["gap"] < 0.05 and all(zero)
    gaps = ", ".join(f"R={r['radius']}: {r['gap']:.2e}" for r in res["rows"])
    acceptance(7, ok, f"Z^2/Z gaps {gaps}; (G,G) gap exactly 0: {all(zero)}")
    assert ok


DICHOTOMY = {"z2-zline": "polynomial", "f2-ker": "polynomial", "bs-dyadic": "polynomial",
             "bs-a": "exponential", "bs-t": "exponential"}
_FITS = {}


def _fit(name):
    if name not in _FITS:
        _FITS[name] = rd_exponent_fit(build_fixture(name), range(4, 15))
    return _FITS[name]


def test_criterion_08_dichotomy(acceptance):
    start = time.perf_counter()
    rows = []
    for name, want in DICHOTOMY.items():
        growth = schreier_growth(build_schreier(build_fixture(name)[1], 12)).classification
        verdict = _fit(name).verdict
        rows.append((name, growth == want, verdict == f"{want}-consistent", growth, verdict))
    elapsed = time.perf_counter() - start
    ok = all(a and b for _, a, b, _, _ in rows) and elapsed < 600
    summary = "; ".join(f"{n}: {g}/{v}" for n, _, _, g, v in rows)
    acceptance(8, ok, f"{summary}; {elapsed:.1f}s")
    assert ok


def test_criterion_09_walk_lower_bound(acceptance):
    fit = _fit("z2-zline")
    model, cosets = build_fixture("z2-zline")
    mu = Measure.uniform_on_generators(model)
    report = walk_spectral_radius(mu, cosets, None, 20)
    C = fit.theorem_constant(mu.radius)
    rows = lower_bound_verify(report, fit.d_hat, C)
    failing = [r["n"] for r in rows if not r["holds"]]
    ok = len(rows) == 20 and not failing
    acceptance(9, ok, f"d = {fit.d_hat:.3f}, C = {C:.3f}, rho in [{report.rho_lower:.4f}, {report.rho_upper}]; "
                      f"failing n: {failing}")
    assert ok


SANDWICH = ("z2-zline", "f2-a", "bs-a", "s4-d8", "heisenberg-center")


def test_criterion_10_sobolev_consistency(acceptance):
    s, t, R, n_max = 3, 1, 2, 5
    bad_sandwich = 0
    checked = 0
    for name in SANDWICH:
        model, cosets = build_fixture(name)
        ball = enumerate_ball(model, R * n_max)
        rng = random.Random(name)
        for _ in range(4):
            f = hm.random_signed(model, ball, rng, R, max_support=5)
            power = GroupFunction.delta(model)
            for n in range(1, n_max + 1):
                power = hm.convolve(power, f)
                if power.is_zero():
                    break
                a_t = hm.sobolev_norm(power, cosets, ball, t).squared
                a_s = hm.sobolev_norm(power, cosets, ball, s).squared
                # raised to the power 2n: both sides are exact rationals
                ok = a_t <= a_s <= Fraction(1 + n * R) ** (2 * s) * a_t
                bad_sandwich += not ok
                checked += 1
    bad_holder = 0
    for i, name in enumerate(SANDWICH):
        model, cosets = build_fixture(name)
        ball = enumerate_ball(model, 4)
        rng = random.Random(f"holder:{name}")
        for _ in range(SAMPLES // len(SANDWICH)):
            f = hm.random_signed(model, ball, rng, 4)
            a1 = hm.sobolev_norm(f, cosets, ball, t, base="l2").squared
            a3 = hm.sobolev_norm(f, cosets, ball, s, base="l2").squared
            a0 = hm.norm2(f).squared
            # ||f w^t||_2 <= ||f w^s||_2^(t/s) ||f||_2^(1-t/s), to the sixth power
            bad_holder += not (a1**3 <= a3 * a0**2)
    ok = bad_sandwich == 0 and bad_holder == 0 and checked > 0
    acceptance(10, ok, f"sandwich (s=3, t=1) on {checked} powers: {bad_sandwich} failures; "
                       f"Holder on {SAMPLES} f: {bad_holder} failures (exact)")
    assert ok


def test_criterion_11_determinism(acceptance, tmp_path):
    args = ["suite", "--fixture", "z2-zline", "--seed", "3", "--trials", "40"]
    codes = [main(args + ["--out", str(tmp_path / d)]) for d in ("a", "b")]
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    match, mismatch, errors = filecmp.cmpfiles(tmp_path / "a", tmp_path / "b", names, shallow=False)
    ok = codes == [0, 0] and names and not mismatch and not errors
    acceptance(11, ok, f"two suite runs, {len(match)} artifact(s) byte-identical: {', '.join(match)}")
    assert ok
