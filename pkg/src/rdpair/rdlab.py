"""RD-exponent fits, the equivalence battery, Leptin and Banach-algebra checks.

Every verdict here is consistency evidence at finite radius.  Ratios use
certified lower bounds for ||f||_h, so an exponential verdict cannot come
from rounding in our favour.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .balls import BallIndex, classify, enumerate_ball
from .errors import BallTooLarge, GraphTooLarge, NotNormal
from .groups import CosetStructure, sample_elements
from .harmonic import (
    EXACT,
    GroupFunction,
    convolve,
    function_to_records,
    involute,
    norm1_value,
    norm21,
    pushforward,
    random_positive,
    random_signed,
    require_positive,
    sobolev_weighted,
)
from .operators import BracketConfig, float_up, hybrid_norm_bracket, sqrt_down
from .schreier import DEFAULT_GRAPH_CAP, build_schreier, coset_representative_indicator

FAMILIES = ("sphereIndicators", "cosetRepresentatives", "randomPositive")
VERDICTS = {"polynomial": "polynomial-consistent", "exponential": "exponential-consistent",
            "inconclusive": "inconclusive"}


# ---------------------------------------------------------------------------
# reports


@dataclass
class CheckRecord:
    name: str
    passed: bool
    evidence: dict = field(default_factory=dict)
    reproducer: Optional[dict] = None

    def as_record(self) -> dict:
        out = {"name": self.name, "passed": self.passed, "evidence": self.evidence}
        if self.reproducer is not None:
            out["reproducer"] = self.reproducer
        return out


@dataclass
class SuiteReport:
    fixture: str
    checks: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def extend(self, other: "SuiteReport") -> None:
        self.checks.extend(other.checks)

    def as_record(self) -> dict:
        return {
            "fixture": self.fixture,
            "passed": self.passed,
            "provenance": self.provenance,
            "checks": [c.as_record() for c in self.checks],
        }


# ---------------------------------------------------------------------------
# exponent fit


@dataclass(frozen=True)
class FitConfig:
    seed: int = 0
    samples: int = 3  # random functions per radius
    analytic: bool = True  # use ||f||_h = ||f||_1 on pairs declared co-amenable
    margin: int = 2  # extra Schreier radius for the numeric bound
    ball_cap: int = 200_000
    graph_cap: int = 1_000_000
    iterations: int = 200


@dataclass(frozen=True)
class ExponentFit:
    radii: tuple
    ratios: tuple  # M(R)
    d_hat: float
    c_hat: float
    verdict: str
    family: tuple
    per_family: dict
    loglog: tuple  # (slope, intercept, rms)
    semilog: tuple
    method: str  # "analytic" or "numeric"
    notes: tuple = ()

    def theorem_constant(self, r_mu: int = 1) -> float:
        """C in n^(-2d) <= C rho^(-2n) P_2n obtained from the fitted (C, D).

        From ||mu^(n)||_h <= C (1 + n r)^D ||mu^(n)||_(2,1) and
        (1 + n r) <= n (1 + r) for n >= 1.
        """
        return self.c_hat ** 2 * (1 + r_mu) ** (2 * self.d_hat)

    def as_record(self) -> dict:
        return {
            "radii": list(self.radii),
            "ratios": list(self.ratios),
            "dHat": self.d_hat,
            "CHat": self.c_hat,
            "verdict": self.verdict,
            "family": list(self.family),
            "perFamily": {k: list(v) for k, v in self.per_family.items()},
            "loglog": list(self.loglog),
            "semilog": list(self.semilog),
            "method": self.method,
            "notes": list(self.notes),
        }


def _random_word_function(model, rng, R: int, max_support: int = 12) -> GroupFunction:
    """Seeded positive function on random words of length <= R (no ball needed)."""
    size = rng.randint(1, max_support)
    entries = {}
    for _ in range(size):
        g = sample_elements(model, rng, rng.randint(0, R))
        entries[g] = entries.get(g, 0) + Fraction(rng.randint(1, 9), rng.randint(1, 4))
    return GroupFunction(model, entries, EXACT)


def certified_ratio(f: GroupFunction, cosets: CosetStructure, graph=None, *, analytic: bool = True,
                    config: Optional[BracketConfig] = None) -> tuple:
    """(lower bound of ||f||_h / ||f||_(2,1), method) for nonnegative f.

    delta_e is always a test vector, so the ratio is at least 1.  On pairs
    declared co-amenable the analytic value ||f||_h = ||f||_1 is used;
    otherwise the numeric bracket on ``graph`` supplies the lower bound.
    """
    require_positive(f)
    n21 = norm21(f, cosets).squared
    if n21 == 0:
        raise ValueError("the ratio is undefined for the zero function")
    if analytic and cosets.coamenable is True:
        n1 = norm1_value(f)
        return sqrt_down(n1 * n1 / n21), "analytic"
    if graph is None:
        return 1.0, "delta"
    br = hybrid_norm_bracket(f, cosets, graph, config)
    return max(1.0, br.lower / math.sqrt(float(n21))), "numeric"


def rd_exponent_fit(pair, radii: Sequence[int] = tuple(range(4, 15)), families: Sequence[str] = FAMILIES,
                    config: Optional[FitConfig] = None) -> ExponentFit:
    """M(R) = max over test functions supported in B(R) of certified ||f||_h / ||f||_(2,1).

    The fit is log M against log(1 + R) and against R on the upper half of
    the window, with the growth classifier's rule.
    """
    cfg = config or FitConfig()
    model, cosets = pair
    radii = tuple(sorted(set(int(r) for r in radii)))
    if not radii or radii[0] < 0:
        raise ValueError("radii must be nonnegative")
    for fam in families:
        if fam not in FAMILIES:
            raise ValueError(f"unknown family {fam!r}")
    R_max = radii[-1]
    numeric = not (cfg.analytic and cosets.coamenable is True)
    graph = build_schreier(cosets, R_max + (cfg.margin if numeric else 0), cfg.graph_cap)
    notes = []
    ball: Optional[BallIndex]
    try:
        ball = enumerate_ball(model, R_max, cfg.ball_cap)
    except BallTooLarge as e:
        ball = enumerate_ball(model, e.completed or 0, cfg.ball_cap)
        notes.append(f"ball capped at radius {ball.radius}; sphere family stops there, "
                     f"coset representatives use BFS tie-breaking beyond it")
    bcfg = BracketConfig(iterations=cfg.iterations)
    per_family = {fam: [] for fam in families}
    M = []
    method = "numeric" if numeric else "analytic"
    for R in radii:
        best = 1.0  # delta_e
        for fam in families:
            if fam == "sphereIndicators":
                if R > ball.radius:
                    per_family[fam].append(None)
                    continue
                fs = [GroupFunction(model, {g: 1 for g in ball.sphere(R)})]
            elif fam == "cosetRepresentatives":
                fs = [coset_representative_indicator(graph, R, ball if ball.radius >= R else None)]
            else:
                rng = random.Random(f"{cfg.seed}:{R}")
                fs = [_random_word_function(model, rng, R) for _ in range(cfg.samples)]
            fs = [f for f in fs if not f.is_zero()]  # spheres past the diameter of a finite group
            if not fs:
                per_family[fam].append(None)
                continue
            vals = [certified_ratio(f, cosets, graph, analytic=cfg.analytic, config=bcfg)[0] for f in fs]
            v = max(vals)
            per_family[fam].append(v)
            best = max(best, v)
        # functions supported in B(R) are supported in B(R+1), so M is nondecreasing;
        # a truncated numeric bound can dip, the running max removes that
        M.append(max(best, M[-1]) if M else best)
    verdict, _, loglog, semilog, _ = classify(radii, M, log_offset=1.0)
    d_hat = max(loglog.slope, 0.0)
    c_hat = max(m / (1 + R) ** d_hat for R, m in zip(radii, M))
    return ExponentFit(
        radii=radii,
        ratios=tuple(M),
        d_hat=d_hat,
        c_hat=c_hat,
        verdict=VERDICTS[verdict],
        family=tuple(families),
        per_family=per_family,
        loglog=(loglog.slope, loglog.intercept, loglog.rms),
        semilog=(semilog.slope, semilog.intercept, semilog.rms),
        method=method,
        notes=tuple(notes),
    )


# ---------------------------------------------------------------------------
# equivalence battery

MUTATIONS = ("coset-shift", "pairing-scale", "weight-off-by-one")


def _pairing(f, phi, psi, cosets, mutation=None):
    """sum over H of ((f*phi)^* * psi^*), optionally corrupted for harness self-tests."""
    total = involute(convolve(f, phi))
    total = convolve(total, involute(psi))
    target = cosets.base
    if mutation == "coset-shift":
        target = cosets.coset_key(f.model.generator_keys[0])
        if target == cosets.base:
            target = cosets.coset_key(f.model.mul(f.model.generator_keys[0], f.model.generator_keys[-1]))
    key = cosets.coset_key
    val = sum((v for g, v in total.entries.items() if key(g) == target), Fraction(0))
    if mutation == "pairing-scale":
        val *= 2
    return val


def equivalence_battery(pair, R: int, seed: int, *, trials: int = 100, s: int = 2,
                        mutation: Optional[str] = None, fixture: str = "") -> SuiteReport:
    """Exact checks (a) pairing bound, (b) pairing identity, (c) spherical bound.

    Trial 0 uses f = phi = delta_e and trial 1 a delta on the sphere of
    radius R; the rest are seeded random positive functions in B(R).
    """
    if mutation is not None and mutation not in MUTATIONS:
        raise ValueError(f"unknown mutation {mutation!r}")
    model, cosets = pair
    ball = enumerate_ball(model, R)
    rng = random.Random(seed)
    fail = {"a": None, "b": None, "c": None}
    counts = {"a": 0, "b": 0, "c": 0}
    equalities = 0
    weight_base = R if mutation == "weight-off-by-one" else R + 1
    sphere = ball.sphere(R) if ball.sphere(R) else ball.sphere(ball.radius)
    for t in range(trials):
        if t == 0:
            f = phi = GroupFunction.delta(model)
        elif t == 1:
            f = GroupFunction.delta(model, sphere[0] if sphere else model.identity)
            phi = GroupFunction.delta(model)
        else:
            f = random_positive(model, ball, rng, R)
            phi = random_positive(model, ball, rng, R)
        psi = random_positive(model, ball, rng, R) if t >= 2 else involute(convolve(f, phi))
        F = convolve(f, phi)
        nF = norm21(F, cosets).squared
        # (a)
        p = _pairing(f, phi, psi, cosets, mutation)
        ok_a = p >= 0 and p * p <= nF * norm21(involute(psi), cosets).squared
        # (b)
        q = _pairing(f, phi, involute(F), cosets, mutation)
        ok_b = q == nF
        equalities += ok_b
        # (c)
        lhs = norm21(sobolev_weighted(f, ball, s), cosets).squared
        ok_c = lhs <= Fraction(weight_base) ** (2 * s) * norm21(f, cosets).squared
        for name, ok in (("a", ok_a), ("b", ok_b), ("c", ok_c)):
            if ok:
                counts[name] += 1
            elif fail[name] is None:
                fail[name] = {
                    "trial": t,
                    "f": function_to_records(f),
                    "phi": function_to_records(phi),
                    "psi": function_to_records(psi),
                }
    report = SuiteReport(fixture, provenance={"seed": seed, "R": R, "trials": trials, "s": s, "mode": "exact",
                                               "mutation": mutation})
    names = {
        "a": "pairing <= ||f*phi||_(2,1) ||psi^*||_(2,1)",
        "b": "pairing with psi = (f*phi)^* equals ||f*phi||_(2,1)^2",
        "c": "||f||_(s,(2,1)) <= (R+1)^s ||f||_(2,1)",
    }
    for k in ("a", "b", "c"):
        report.checks.append(CheckRecord(f"equivalence.{k}", fail[k] is None,
                                         {"statement": names[k], "passed": counts[k], "trials": trials},
                                         fail[k]))
    return report


# ---------------------------------------------------------------------------
# Leptin / co-amenability evidence


def leptin_check(pair, f: GroupFunction, radii: Sequence[int] = (10, 20, 40), threshold: float = 0.05,
                 config: Optional[BracketConfig] = None, cap: int = DEFAULT_GRAPH_CAP) -> dict:
    """gap(R) = ||f||_1 - certified lower bound of ||f||_h on the Schreier ball of radius R.

    Only numeric bounds enter here (no analytic certificate), and the lower
    bound is carried as a running maximum over the radii.  Radii whose
    Schreier ball exceeds ``cap`` are skipped and listed under ``capped``.
    """
    model, cosets = pair
    require_positive(f)
    fx = f.to_exact()
    n1 = norm1_value(fx)
    rows, best, capped = [], 0.0, []
    for R in sorted(radii):
        if capped:
            capped.append(R)
            continue
        try:
            graph = build_schreier(cosets, R, cap)
        except GraphTooLarge:
            if not rows:
                raise
            capped.append(R)
            continue
        br = hybrid_norm_bracket(fx, cosets, graph, config)
        best = max(best, br.lower)
        gap = n1 - Fraction(best)
        rows.append({"radius": R, "vertices": len(graph), "lower": best, "upper": float_up(n1),
                     "gap": float_up(gap), "gapExactZero": gap == 0, "iterations": br.iterations})
    last = rows[-1]
    if last["gap"] < threshold:
        verdict = "consistent with co-amenability"
    else:
        verdict = f"inconsistent at radius {last['radius']}"
    return {"norm1": float(n1), "threshold": threshold, "rows": rows, "verdict": verdict,
            "gap": last["gap"], "gapExactZero": last["gapExactZero"], "capped": capped}


# ---------------------------------------------------------------------------
# Banach-algebra inequality


def banach_algebra_check(pair, s: int, R: int, seed: int, *, trials: int = 20, fixture: str = "") -> CheckRecord:
    """Exact check of the two-term splitting bound for ||f*psi||_(s,(2,1)).

    ||.||_h is replaced by its upper bound ||.||_1.  The bound as usually
    written puts ||psi||_h on the first term, which needs right translations
    to preserve the (2,1)-norm; that holds for normal H only.  For other H
    the left-operator form ||(|f|w)||_h ||psi||_(2,1) is checked instead and
    the other form is recorded.
    """
    model, cosets = pair
    ball = enumerate_ball(model, 2 * R)
    rng = random.Random(seed)
    two = Fraction(2) ** s
    stats = {"pointwise": 0, "cosetSum": 0, "statedForm": 0, "leftOperatorForm": 0}
    repro = None
    for t in range(trials):
        if t == 0:
            f = psi = GroupFunction.delta(model)
        else:
            f = random_signed(model, ball, rng, R)
            psi = random_signed(model, ball, rng, R)
        af, apsi = f.abs(), psi.abs()
        afw, apsiw = sobolev_weighted(af, ball, s), sobolev_weighted(apsi, ball, s)
        F = convolve(f, psi)
        Fw = sobolev_weighted(F, ball, s)
        t1, t2 = convolve(afw, apsi), convolve(af, apsiw)
        ok_pt = all(abs(v) <= two * (t1[g] + t2[g]) for g, v in Fw.entries.items())
        lhs = norm21(Fw, cosets).squared
        ok_sum = lhs <= 2 * two * two * (norm21(t1, cosets).squared + norm21(t2, cosets).squared)
        n1f, n1p, n1fw = norm1_value(af), norm1_value(apsi), norm1_value(afw)
        stated = 2 * two * two * (norm21(afw, cosets).squared * n1p ** 2 + n1f ** 2 * norm21(apsiw, cosets).squared)
        left = 2 * two * two * (n1fw ** 2 * norm21(apsi, cosets).squared + n1f ** 2 * norm21(apsiw, cosets).squared)
        ok_stated, ok_left = lhs <= stated, lhs <= left
        for k, ok in (("pointwise", ok_pt), ("cosetSum", ok_sum), ("statedForm", ok_stated),
                      ("leftOperatorForm", ok_left)):
            stats[k] += ok
        required = ok_pt and ok_sum and ok_left and (ok_stated or not cosets.normal)
        if not required and repro is None:
            repro = {"trial": t, "f": function_to_records(f), "psi": function_to_records(psi)}
    passed = repro is None
    return CheckRecord("banach-algebra", passed, {"s": s, "R": R, "seed": seed, "trials": trials,
                                                  "normal": cosets.normal, **stats}, repro)


# ---------------------------------------------------------------------------
# normal subgroups


def _quotient_convolve(p: dict, q: dict, cosets: CosetStructure) -> dict:
    out = {}
    for a, x in p.items():
        for b, y in q.items():
            c = cosets.quotient_mul(a, b)
            out[c] = out.get(c, 0) + x * y
    return out


def normal_quotient_check(pair, R: int, seed: int, *, trials: int = 100, fixture: str = "") -> CheckRecord:
    """||f*phi||_(2,1) = ||pi(f*phi)||_2 <= ||pi f * pi phi||_2 and ||lift q||_(2,1) = ||q||_2."""
    model, cosets = pair
    if not cosets.normal or cosets.section is None:
        raise NotNormal(f"{cosets.subgroup_name} is not declared normal with a section")
    ball = enumerate_ball(model, R)
    graph = build_schreier(cosets, R)
    qkeys = list(graph.ball(R))
    rng = random.Random(seed)
    counts = {"pushforward": 0, "quotientBound": 0, "quotientEquality": 0, "lift": 0}
    repro = None
    for t in range(trials):
        if t == 0:
            f = phi = GroupFunction.delta(model)
        else:
            f = random_positive(model, ball, rng, R)
            phi = random_positive(model, ball, rng, R)
        F = convolve(f, phi)
        a = norm21(F, cosets).squared
        b = sum((v * v for v in pushforward(F.abs(), cosets).values()), Fraction(0))
        qc = _quotient_convolve(pushforward(f.abs(), cosets), pushforward(phi.abs(), cosets), cosets)
        c = sum((v * v for v in qc.values()), Fraction(0))
        size = rng.randint(1, min(6, len(qkeys)))
        q = {k: Fraction(rng.choice([-1, 1]) * rng.randint(1, 9), rng.randint(1, 3)) for k in rng.sample(qkeys, size)}
        lift = GroupFunction(model, {cosets.section(k): v for k, v in q.items()})
        ok_lift = norm21(lift, cosets).squared == sum((v * v for v in q.values()), Fraction(0))
        oks = {"pushforward": a == b, "quotientBound": b <= c, "quotientEquality": b == c, "lift": ok_lift}
        for k, ok in oks.items():
            counts[k] += ok
        if not (oks["pushforward"] and oks["quotientBound"] and ok_lift) and repro is None:
            repro = {"trial": t, "f": function_to_records(f), "phi": function_to_records(phi),
                     "q": [[str(k), v.numerator, v.denominator] for k, v in q.items()]}
    return CheckRecord("normal-quotient", repro is None, {"R": R, "seed": seed, "trials": trials, **counts}, repro)


# ---------------------------------------------------------------------------
# stability under products and restriction


@dataclass(frozen=True)
class StabilityCase:
    name: str
    kind: str  # "product" or "restriction"
    derived: tuple  # the derived pair
    components: tuple  # ((label, pair), ...)


def stability_checks(cases: Sequence[StabilityCase], radii: Sequence[int] = tuple(range(4, 15)),
                     config: Optional[FitConfig] = None) -> SuiteReport:
    """Exponent fits on derived pairs against the verdicts of their components."""
    report = SuiteReport("stability", provenance={"radii": list(radii)})
    for case in cases:
        comp = {}
        for label, p in case.components:
            comp[label] = rd_exponent_fit(p, radii, config=config).verdict
        derived = rd_exponent_fit(case.derived, radii, config=config)
        hypotheses = all(v == "polynomial-consistent" for v in comp.values())
        ok = derived.verdict == "polynomial-consistent" if hypotheses else True
        report.checks.append(CheckRecord(f"stability.{case.name}", ok, {
            "kind": case.kind,
            "components": comp,
            "derivedVerdict": derived.verdict,
            "derivedDHat": derived.d_hat,
            "hypothesesHold": hypotheses,
        }))
    return report
