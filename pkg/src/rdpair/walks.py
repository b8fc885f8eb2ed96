"""Symmetric random walks: n-step laws, return probabilities to H, walk spectral radius."""

from __future__ import annotations

import io
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import MissingRho, NegativeEntry, PowerOverflow
from .groups import CosetStructure
from .harmonic import EXACT, FLOAT, GroupFunction, convolution_power, convolve, norm21
from .operators import BracketConfig, hybrid_norm_bracket, moment_lower_sequence
from .schreier import SchreierGraph, build_schreier

N_EXACT = 8


@dataclass(frozen=True, eq=False)
class Measure:
    """A finitely supported probability measure on a group."""

    base: GroupFunction
    symmetric: bool = field(init=False)
    radius: int = field(init=False)  # max word length over the support

    def __post_init__(self):
        f = self.base
        if any(v < 0 for v in f.entries.values()):
            raise NegativeEntry("a measure must be nonnegative")
        total = f.total()
        if (f.mode == EXACT and total != 1) or (f.mode == FLOAT and abs(total - 1.0) > 1e-12):
            raise ValueError(f"total mass {total} != 1")
        inv = f.model.inv
        object.__setattr__(self, "symmetric", all(f[inv(g)] == v for g, v in f.entries.items()))
        object.__setattr__(self, "radius", _support_radius(f))

    @classmethod
    def uniform_on_generators(cls, model, mode: str = EXACT) -> "Measure":
        return cls(GroupFunction.uniform(model, model.generator_keys, mode))

    @property
    def model(self):
        return self.base.model

    def generates(self, depth: int = 6) -> bool:
        """Every generator of the model is a product of at most ``depth`` support elements."""
        mul = self.model.mul
        supp = list(self.base.entries)
        reached = {self.model.identity}
        frontier = [self.model.identity]
        for _ in range(depth):
            nxt = []
            for g in frontier:
                for s in supp:
                    h = mul(g, s)
                    if h not in reached:
                        reached.add(h)
                        nxt.append(h)
            frontier = nxt
        return all(s in reached for s in self.model.generator_keys)


def _support_radius(f: GroupFunction) -> int:
    need = set(f.entries)
    if not need:
        return 0
    model = f.model
    found, r = 0, 0
    length = {model.identity: 0}
    frontier = [model.identity]
    if model.identity in need:
        found = 1
    while found < len(need):
        r += 1
        nxt = []
        for g in frontier:
            for s in model.generator_keys:
                h = model.mul(g, s)
                if h not in length:
                    length[h] = r
                    nxt.append(h)
                    if h in need:
                        found += 1
        frontier = nxt
        if not frontier:
            break
    return r


def n_step_distribution(mu: Measure, n: int, cap: Optional[int] = None) -> GroupFunction:
    """mu^(n), exact in exact mode."""
    return convolution_power(mu.base, n, cap)


def _chain_return(mu: Measure, cosets: CosetStructure, n: int, graph: Optional[SchreierGraph] = None):
    """P_2n(H,H) from the walk induced on the Schreier graph.

    The coset distribution is pushed forward 2n times; mass that can no
    longer get back to H in the remaining steps is dropped.  Needs the graph
    out to radius n * r_mu, which is built here when not supplied.
    """
    r_mu = max(mu.radius, 1)
    R = n * r_mu
    if graph is None or graph.radius < R:
        graph = build_schreier(cosets, R)
    f = mu.base
    mode = f.mode
    zero = 0.0 if mode == FLOAT else Fraction(0)
    items = list(f.entries.items())
    act = graph.act
    dist = graph.dist
    vec = {graph.base: (1.0 if mode == FLOAT else Fraction(1))}
    for k in range(2 * n):
        remaining = 2 * n - k - 1
        acc = defaultdict(list) if mode == FLOAT else defaultdict(Fraction)
        for v, b in vec.items():
            for z, a in items:
                w = act(z, v)
                d = dist.get(w)
                if d is None or d > remaining * r_mu:
                    continue
                if mode == FLOAT:
                    acc[w].append(a * b)
                else:
                    acc[w] += a * b
        vec = {w: (math.fsum(t) if mode == FLOAT else t) for w, t in acc.items()}
    return vec.get(graph.base, zero)


def return_probability(mu: Measure, cosets: CosetStructure, n: int, *, method: str = "chain",
                       graph: Optional[SchreierGraph] = None, cap: Optional[int] = None):
    """P_2n(H,H), the mass mu^(2n) puts on H.

    ``method="chain"`` walks on the Schreier graph; ``method="group"`` forms
    mu^(2n) on G and sums it over H (only practical for small n).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return Fraction(1) if mu.base.mode == EXACT else 1.0
    if method == "group":
        p = convolution_power(mu.base, 2 * n, cap)
        key = cosets.coset_key
        base = cosets.base
        vals = [v for g, v in p.entries.items() if key(g) == base]
        return math.fsum(vals) if p.mode == FLOAT else sum(vals, Fraction(0))
    if method != "chain":
        raise ValueError(f"unknown method {method!r}")
    return _chain_return(mu, cosets, n, graph)


@dataclass(frozen=True)
class IdentityCheck:
    n: int
    lhs: object
    rhs: object
    equal: bool


def return_identity_check(mu: Measure, cosets: CosetStructure, n: int, cap: Optional[int] = None) -> IdentityCheck:
    """P_2n(H,H) (Schreier walk) against ||mu^(n)||_(2,1)^2 (group convolution)."""
    lhs = return_probability(mu, cosets, n)
    rhs = norm21(convolution_power(mu.base, n, cap), cosets).squared
    if mu.base.mode == EXACT:
        equal = lhs == rhs
    else:
        equal = abs(lhs - rhs) <= 1e-12
    return IdentityCheck(n, lhs, rhs, equal)


# ---------------------------------------------------------------------------
# walk spectral radius


@dataclass(frozen=True)
class WalkReport:
    fixture: str
    returns: tuple  # P_2n(H,H), n = 1..N (Fraction up to N_EXACT, float after)
    radius_sequence: tuple  # P_2n^(1/2n)
    rho_lower: float
    rho_upper: float
    rho_estimate: float
    cross_check: dict
    lower_bound_check: tuple = ()
    ratio_estimate: float = float("nan")  # sqrt(P_2N / P_2N-2), converges faster than the roots

    def with_lower_bound(self, table) -> "WalkReport":
        return WalkReport(self.fixture, self.returns, self.radius_sequence, self.rho_lower, self.rho_upper,
                          self.rho_estimate, self.cross_check, tuple(table), self.ratio_estimate)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("n,P2n,P2n_exact,root\n")
        for n, (p, r) in enumerate(zip(self.returns, self.radius_sequence), start=1):
            exact = f"{p.numerator}/{p.denominator}" if isinstance(p, Fraction) else ""
            buf.write(f"{n},{float(p)!r},{exact},{r!r}\n")
        return buf.getvalue()

    def as_record(self) -> dict:
        return {
            "fixture": self.fixture,
            "N": len(self.returns),
            "returns": [float(p) for p in self.returns],
            "radiusSequence": list(self.radius_sequence),
            "rho": {"lower": self.rho_lower, "upper": self.rho_upper, "estimate": self.rho_estimate,
                    "ratioEstimate": self.ratio_estimate},
            "crossCheck": dict(self.cross_check),
            "lowerBoundCheck": [dict(r) for r in self.lower_bound_check],
        }


def walk_spectral_radius(mu: Measure, cosets: CosetStructure, graph: Optional[SchreierGraph], N: int,
                         *, fixture: str = "", cap: Optional[int] = 2_000_000,
                         n_exact: int = N_EXACT) -> WalkReport:
    """P_2n(H,H) = ||mu^(n)||_(2,1)^2 for n = 1..N and the root sequence.

    Powers are exact up to ``n_exact`` and float afterwards.  When a graph is
    given, the roots are compared with the moment lower bounds of the hybrid
    bracket computed on the Schreier side.
    """
    if not mu.symmetric:
        raise ValueError("the walk measure must be symmetric")
    returns, roots = [], []
    power = GroupFunction.delta(mu.model, mode=EXACT)
    step = mu.base.to_exact()
    for n in range(1, N + 1):
        if n == n_exact + 1:
            power = power.to_float()
            step = mu.base.to_float()
        power = convolve(power, step)
        if cap is not None and len(power) > cap:
            if not returns:
                raise PowerOverflow("support of mu^(n) exceeds cap", completed=n - 1)
            break
        p = norm21(power, cosets).squared
        returns.append(p)
        roots.append(float(p) ** (1.0 / (2 * n)) if p > 0 else 0.0)
    upper = min(1.0, float(mu.base.total()))
    lower = max(roots) if roots else 0.0
    cross = {}
    if graph is not None:
        seq = moment_lower_sequence(mu.base, graph, len(roots))
        diffs = [abs(a - b) for a, b in zip(roots, seq)]
        br = hybrid_norm_bracket(mu.base.to_exact(), cosets, graph, BracketConfig(method="moment",
                                                                                   iterations=len(roots)))
        cross = {
            "compared": len(diffs),
            "maxAbsDiff": max(diffs) if diffs else 0.0,
            "consistent": bool(diffs) and max(diffs) <= 1e-9,
            "hybridLower": br.lower,
            "hybridUpper": br.upper,
            "tailBelowUpper": roots[-1] <= br.upper,
        }
    ratio = math.sqrt(float(returns[-1]) / float(returns[-2])) if len(returns) >= 2 else float("nan")
    return WalkReport(fixture, tuple(returns), tuple(roots), lower, upper, roots[-1] if roots else 0.0, cross,
                      (), ratio)


def lower_bound_verify(report: WalkReport, d: float, C: float) -> list:
    """Per-n check of n^(-2d) <= C rho^(-2n) P_2n(H,H).

    ``holds`` uses the upper end of the rho bracket, which makes rho^(-2n)
    as small as the data allow (the conservative direction); the result with
    the lower end is recorded as ``holdsWithRhoLower``.
    """
    if report.rho_upper <= 0 or report.rho_lower <= 0:
        raise MissingRho("walk report carries no rho bracket")
    rows = []
    for n, p in enumerate(report.returns, start=1):
        p = float(p)
        lhs = -2.0 * d * math.log(n)
        log_c = math.log(C)
        rhs_up = log_c - 2 * n * math.log(report.rho_upper) + math.log(p)
        rhs_lo = log_c - 2 * n * math.log(report.rho_lower) + math.log(p)
        rows.append({
            "n": n,
            "lhs": math.exp(lhs),
            "rhs": math.exp(rhs_up),
            "holds": lhs <= rhs_up + 1e-12,
            "holdsWithRhoLower": lhs <= rhs_lo + 1e-12,
        })
    return rows
