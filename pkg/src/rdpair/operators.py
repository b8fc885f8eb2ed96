"""The quasi-regular representation on l2(G/H), hybrid operator-norm brackets,
and spectral-radius estimates.

Lower bounds are certified: the float iterate of a power iteration is scaled
to integers and its Rayleigh quotient recomputed in exact arithmetic, then
the square root is rounded down.  Upper bounds are rounded up.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Mapping, Optional

import numpy as np
import scipy.sparse as sp

from .balls import BallIndex, enumerate_ball
from .errors import CapExceeded, NegativeEntry, PowerOverflow, SupportNotEnumerated, TruncationOverflow
from .groups import CosetStructure, restrict_trivially
from .harmonic import (
    EXACT,
    FLOAT,
    GroupFunction,
    convolve,
    involute,
    norm1_value,
    norm21,
    positive_decompose,
    sobolev_norm,
)
from .schreier import SchreierGraph

# ---------------------------------------------------------------------------
# rounding helpers


def sqrt_down(q) -> float:
    """Largest float r found with r*r <= q exactly (q a nonnegative rational)."""
    q = Fraction(q)
    if q <= 0:
        return 0.0
    r = math.sqrt(float(q))
    while Fraction(r) ** 2 > q:
        r = math.nextafter(r, 0.0)
    while Fraction(math.nextafter(r, math.inf)) ** 2 <= q:
        r = math.nextafter(r, math.inf)
    return r


def sqrt_up(q) -> float:
    q = Fraction(q)
    if q <= 0:
        return 0.0
    r = math.sqrt(float(q))
    while Fraction(r) ** 2 < q:
        r = math.nextafter(r, math.inf)
    return r


def float_up(q) -> float:
    q = Fraction(q)
    r = float(q)
    while Fraction(r) < q:
        r = math.nextafter(r, math.inf)
    return r


def float_down(q) -> float:
    q = Fraction(q)
    r = float(q)
    while Fraction(r) > q:
        r = math.nextafter(r, -math.inf)
    return r


# ---------------------------------------------------------------------------
# quasi-regular representation


def _acc(mode):
    return defaultdict(list) if mode == FLOAT else defaultdict(Fraction)


def _finish(acc, mode) -> dict:
    if mode == FLOAT:
        out = {k: math.fsum(v) for k, v in acc.items()}
    else:
        out = dict(acc)
    return {k: v for k, v in out.items() if v != 0}


def apply_quasi_regular(f: GroupFunction, graph: SchreierGraph, xi: Mapping) -> dict:
    """lambda_{G/H}(f) xi, i.e. w -> sum over z.v = w of f(z) xi(v).

    Raises TruncationOverflow if xi lives off the graph or an image coset
    falls outside it.
    """
    mode = f.mode
    acc = _acc(mode)
    act = graph.act
    dist = graph.dist
    items = list(f.entries.items())
    for v, b in xi.items():
        if v not in dist:
            raise TruncationOverflow(f"input vector supported off the graph at {v!r}")
        for z, a in items:
            w = act(z, v)
            if w not in dist:
                raise TruncationOverflow(f"image coset leaves the Schreier ball of radius {graph.radius}")
            if mode == FLOAT:
                acc[w].append(a * b)
            else:
                acc[w] += a * b
    return _finish(acc, mode)


@dataclass
class CosetOrbit:
    """Graph-free action on coset keys; remembers one representative per coset seen."""

    cosets: CosetStructure
    rep: dict = field(default_factory=dict)

    def __post_init__(self):
        self.rep.setdefault(self.cosets.base, self.cosets.group.identity)

    def apply(self, f: GroupFunction, xi: Mapping) -> dict:
        mode = f.mode
        acc = _acc(mode)
        mul = self.cosets.group.mul
        key = self.cosets.coset_key
        items = list(f.entries.items())
        rep = self.rep
        for v, b in xi.items():
            x = rep[v]
            for z, a in items:
                y = mul(z, x)
                w = key(y)
                if w not in rep:
                    rep[w] = y
                if mode == FLOAT:
                    acc[w].append(a * b)
                else:
                    acc[w] += a * b
        return _finish(acc, mode)


def coefficient_decay_sum(graph: SchreierGraph, ball: BallIndex, xi: Mapping, eta: Mapping, R: int):
    """sum over gamma in B(R) of <lambda(gamma) xi, eta>^2 (real vectors)."""
    if R > ball.radius:
        raise SupportNotEnumerated(f"B({R}) not enumerated")
    for vec in (xi, eta):
        for v in vec:
            if v not in graph.dist:
                raise TruncationOverflow(f"vector supported off the graph at {v!r}")
    total = 0
    for g in ball.elements(R):
        c = 0
        for v, a in xi.items():
            b = eta.get(graph.act(g, v))
            if b:
                c += a * b
        total += c * c
    return total


# ---------------------------------------------------------------------------
# brackets


@dataclass(frozen=True)
class NormBracket:
    lower: float
    upper: float
    method: str
    iterations: int
    truncation_radius: int
    log: tuple = ()  # certified-or-float running lower bound per iteration

    def as_record(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "method": self.method,
            "iterations": self.iterations,
            "truncationRadius": self.truncation_radius,
            "log": list(self.log),
        }

    def contains(self, value: float, rel: float = 0.0) -> bool:
        slack = rel * abs(value)
        return self.lower <= value + slack and value - slack <= self.upper


@dataclass(frozen=True)
class BracketConfig:
    method: str = "rayleigh"  # or "moment"
    iterations: int = 300
    tol: float = 1e-14
    start: str = "indicator"  # or "delta"


def _operator_matrix(f: GroupFunction, graph: SchreierGraph):
    """Sparse matrix of lambda(f) restricted to columns whose images stay in the graph."""
    index = {v: i for i, v in enumerate(graph.vertices)}
    act = graph.act
    items = [(z, Fraction(a)) for z, a in f.entries.items()]
    domain, triples = [], []
    for v in graph.vertices:
        row = []
        for z, a in items:
            w = act(z, v)
            j = index.get(w)
            if j is None:
                break
            row.append((j, a))
        else:
            c = len(domain)
            domain.append(v)
            triples.extend((j, c, a) for j, a in row)
    return index, domain, triples


def _certify(triples, x_float: np.ndarray) -> Fraction:
    """Exact ||A x||^2 / ||x||^2 for an integer rescaling of the float iterate."""
    m = float(np.max(np.abs(x_float))) if len(x_float) else 0.0
    if m == 0.0:
        return Fraction(0)
    xi = [int(round(v / m * 2**40)) for v in x_float]
    denom = 1
    for _, _, a in triples:
        denom = denom * a.denominator // math.gcd(denom, a.denominator)
    y = defaultdict(int)
    for j, c, a in triples:
        if xi[c]:
            y[j] += (a.numerator * (denom // a.denominator)) * xi[c]
    num = sum(v * v for v in y.values())
    den = sum(v * v for v in xi) * denom * denom
    return Fraction(num, den) if den else Fraction(0)


def _power_iteration(f: GroupFunction, graph: SchreierGraph, cfg: BracketConfig):
    index, domain, triples = _operator_matrix(f, graph)
    if not domain:
        raise TruncationOverflow(f"no coset of the radius-{graph.radius} ball keeps its images inside")
    rows = np.array([t[0] for t in triples], dtype=np.int64)
    cols = np.array([t[1] for t in triples], dtype=np.int64)
    vals = np.array([float(t[2]) for t in triples])
    A = sp.csr_matrix((vals, (rows, cols)), shape=(len(index), len(domain)))
    At = A.T.tocsr()
    if cfg.start == "delta":
        x = np.zeros(len(domain))
        x[domain.index(graph.base) if graph.base in domain else 0] = 1.0
    else:
        x = np.ones(len(domain))
    best, best_x, log = 0.0, x.copy(), []
    it = 0
    for it in range(1, cfg.iterations + 1):
        y = A @ x
        nx = float(np.linalg.norm(x))
        q = float(np.linalg.norm(y)) / nx if nx else 0.0
        if q > best:
            best, best_x = q, x.copy()
        log.append(best)
        z = At @ y
        nz = float(np.max(np.abs(z)))
        if nz == 0.0:
            break
        x = z / nz
        if it > 1 and abs(log[-1] - log[-2]) <= cfg.tol * max(log[-1], 1.0):
            break
    return _certify(triples, best_x), it, log


def hybrid_norm_bracket(f: GroupFunction, cosets: CosetStructure, graph: SchreierGraph,
                        config: Optional[BracketConfig] = None, analytic_upper=None) -> NormBracket:
    """Certified bracket for ||f||_h = ||lambda_{G/H}(f)||, f nonnegative.

    The lower end is the best of the exact value ||lambda(f) delta_H|| =
    ||f||_(2,1) and the iteration bound; the upper end is ||f||_1 (or a
    smaller supplied analytic bound).
    """
    cfg = config or BracketConfig()
    if any(v < 0 for v in f.entries.values()):
        raise NegativeEntry("hybrid_norm_bracket needs a nonnegative function")
    fx = f.to_exact()
    upper_q = norm1_value(fx)
    if analytic_upper is not None:
        upper_q = min(upper_q, Fraction(analytic_upper))
    upper = float_up(upper_q)
    if fx.is_zero():
        return NormBracket(0.0, 0.0, cfg.method, 0, graph.radius)
    base_sq = norm21(fx, cosets).squared
    if cfg.method == "moment":
        seq = moment_lower_sequence(fx, graph, cfg.iterations)
        lower = max([sqrt_down(base_sq)] + seq)
        log = tuple(itertools.accumulate(seq, max))
        return NormBracket(min(lower, upper), upper, "moment", len(seq), graph.radius, log)
    q, it, log = _power_iteration(fx, graph, cfg)
    lower = max(sqrt_down(max(q, base_sq)), 0.0)
    return NormBracket(min(lower, upper), upper, "rayleigh", it, graph.radius, tuple(log))


def moment_lower_sequence(f: GroupFunction, graph: SchreierGraph, n_max: int) -> list:
    """||lambda(f)^n delta_H||^(1/n), n = 1..n_max, each a lower bound for ||lambda(f)||.

    Stops silently at the first n whose vector would leave the graph.
    Exact arithmetic while denominators stay small, float afterwards.
    """
    vec = {graph.base: Fraction(1)}
    out = []
    g = f.to_exact()
    for n in range(1, n_max + 1):
        if n > 8 and g.mode == EXACT:
            g = f.to_float()
            vec = {k: float(v) for k, v in vec.items()}
        try:
            vec = apply_quasi_regular(g, graph, vec)
        except TruncationOverflow:
            break
        if g.mode == EXACT:
            sq = sum(v * v for v in vec.values())
            out.append(float(sq) ** (1.0 / (2 * n)) if sq else 0.0)
        else:
            sq = math.fsum(v * v for v in vec.values())
            out.append(sq ** (1.0 / (2 * n)) if sq > 0 else 0.0)
    return out


def _test_ratio_sq(f: GroupFunction, phi: GroupFunction, cosets: CosetStructure) -> Fraction:
    den = norm21(phi, cosets).squared
    return norm21(convolve(f, phi), cosets).squared / den if den else Fraction(0)


def general_hybrid_bracket(f: GroupFunction, cosets: CosetStructure, graph: Optional[SchreierGraph] = None,
                           *, rng=None, samples: int = 64, ball: Optional[BallIndex] = None,
                           config: Optional[BracketConfig] = None) -> NormBracket:
    """Bracket for ||f||_h with f signed (real parts only; complex via the 4-piece split).

    Lower: max of ||f*phi||_(2,1) / ||phi||_(2,1) over deltas and seeded random
    test functions, evaluated exactly.  Upper: sum of the four positive parts'
    upper bounds.
    """
    fx = f.to_exact() if f.mode == FLOAT and not any(isinstance(v, complex) for v in f.entries.values()) else f
    if fx.mode == EXACT and all(v >= 0 for v in fx.entries.values()) and graph is not None:
        return hybrid_norm_bracket(fx, cosets, graph, config)
    parts = positive_decompose(fx)
    upper_q = sum((norm1_value(p.to_exact()) for p in parts), Fraction(0))
    upper = float_up(upper_q)
    if fx.mode != EXACT:
        raise ValueError("complex functions: only the upper bound is implemented")
    model = fx.model
    best = norm21(fx, cosets).squared
    cands = []
    if ball is None:
        ball = enumerate_ball(model, 1)
    pool = list(ball.elements())
    for x in pool[:32]:
        cands.append(GroupFunction.delta(model, x))
    if rng is not None:
        inv_support = [model.inv(z) for z in fx.entries]
        for _ in range(samples):
            size = rng.randint(1, min(8, len(pool)))
            keys = rng.sample(pool, size)
            if inv_support and rng.random() < 0.5:
                keys = list(dict.fromkeys(keys + [rng.choice(inv_support)]))
            cands.append(GroupFunction(model, {k: rng.choice([-3, -2, -1, 1, 2, 3]) for k in keys}))
    for phi in cands:
        best = max(best, _test_ratio_sq(fx, phi, cosets))
    lower = sqrt_down(best)
    return NormBracket(min(lower, upper), upper, "sampled", len(cands), ball.radius)


# ---------------------------------------------------------------------------
# spectral radius


KINDS = ("rho1", "rho21power", "rhoS", "rhoH", "rhoStar")


@dataclass(frozen=True)
class SpectralRadiusEstimate:
    kind: str
    sequence: tuple  # ||f^(n)||^(1/n) (or moment roots), n = 1..N
    ratios: tuple  # ||f^(n+1)|| / ||f^(n)||
    extrapolated: float
    tail: float
    diagnostics: dict

    def as_record(self) -> dict:
        return {
            "kind": self.kind,
            "sequence": list(self.sequence),
            "ratios": list(self.ratios),
            "extrapolated": self.extrapolated,
            "tail": self.tail,
            "diagnostics": dict(self.diagnostics),
        }


def aitken(tail) -> float:
    """Aitken delta-squared on the last three entries.

    The result may leave the range of ``tail`` by at most its spread, which
    keeps a noisy denominator from throwing the estimate far away.
    """
    tail = list(tail)
    spread = max(tail) - min(tail)
    lo, hi = min(tail) - spread, max(tail) + spread
    if len(tail) < 3:
        return tail[-1]
    x0, x1, x2 = tail[-3:]
    d2 = x2 - 2 * x1 + x0
    if d2 == 0 or not math.isfinite(d2):
        est = x2
    else:
        est = x2 - (x2 - x1) ** 2 / d2
    return min(max(est, lo), hi)


def _monotone(seq, sign: int) -> bool:
    return all(sign * (b - a) >= -1e-12 * max(abs(a), 1.0) for a, b in zip(seq, seq[1:]))


def _estimate(kind, logs, exponents, window) -> SpectralRadiusEstimate:
    """logs[n-1] = log of the n-th quantity; exponents[n-1] = 1/n or 1/2n."""
    seq = tuple(math.exp(l * e) for l, e in zip(logs, exponents))
    # quotient of consecutive quantities, on the same root scale (square root for moments)
    ratios = tuple(math.exp((b - a) * exponents[0]) for a, b in zip(logs, logs[1:]))
    tail_w = ratios[-window:] if ratios else seq[-window:]
    extrap = aitken(tail_w)
    diag = {
        "nondecreasing": _monotone(seq, +1),
        "nonincreasing": _monotone(seq, -1),
        "tailWindow": len(tail_w),
        "n": len(seq),
    }
    return SpectralRadiusEstimate(kind, seq, ratios, extrap, seq[-1], diag)


def spectral_radius(f: GroupFunction, kind: str, *, cosets: Optional[CosetStructure] = None, N: int = 40,
                    s=None, ball: Optional[BallIndex] = None, window: int = 5,
                    cap: int = 2_000_000) -> SpectralRadiusEstimate:
    """Estimate a spectral radius of f from N convolution powers (float mode).

    rho1, rho21power and rhoS(s) use ||f^(n)||^(1/n) in the l1, (2,1) and
    Sobolev-(2,1) norms; rhoH and rhoStar use <lambda(g)^n delta, delta>^(1/2n)
    with g = f^* * f on l2(G/H) and l2(G).  ``ratios`` holds the successive
    quotients, whose Aitken-accelerated tail is ``extrapolated``.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}; choose from {KINDS}")
    if N < 1:
        raise ValueError("N must be >= 1")
    ff = f.to_float()
    if ff.is_zero():
        raise ValueError("zero function has radius 0 and no log sequence")
    if kind in ("rhoH", "rhoStar"):
        cs = restrict_trivially(f.model) if kind == "rhoStar" else cosets
        if cs is None:
            raise ValueError("rhoH needs cosets")
        g = convolve(involute(ff), ff)
        orbit = CosetOrbit(cs)
        vec = {cs.base: 1.0}
        logs, scale = [], 0.0
        for n in range(1, N + 1):
            vec = orbit.apply(g, vec)
            if len(vec) > cap:
                if not logs:
                    raise PowerOverflow("moment vector exceeds cap", completed=n - 1)
                break
            m = vec.get(cs.base, 0.0)
            if m <= 0:
                raise ValueError("vanishing moment: delta_H is orthogonal to lambda(g)^n delta_H")
            logs.append(math.log(m) + scale)
            top = max(abs(v) for v in vec.values())
            vec = {k: v / top for k, v in vec.items()}
            scale += math.log(top)
        return _estimate(kind, logs, [1.0 / (2 * n) for n in range(1, len(logs) + 1)], window)

    if kind in ("rho21power", "rhoS") and cosets is None:
        raise ValueError(f"{kind} needs cosets")
    if kind == "rhoS":
        if s is None:
            raise ValueError("rhoS needs s")
        if ball is None:
            ball = _ball_for_powers(f, N, cap)
    power = GroupFunction.delta(f.model, mode=FLOAT)
    logs, scale = [], 0.0
    for n in range(1, N + 1):
        power = convolve(power, ff)
        if len(power) > cap:
            if not logs:
                raise PowerOverflow("support exceeds cap", completed=n - 1)
            break
        if kind == "rho1":
            val = math.fsum(abs(v) for v in power.entries.values())
        elif kind == "rho21power":
            val = math.sqrt(norm21(power, cosets).squared)
        else:
            try:
                val = math.sqrt(sobolev_norm(power, cosets, ball, s).squared)
            except SupportNotEnumerated:
                if not logs:
                    raise PowerOverflow("support leaves the enumerated ball", completed=n - 1) from None
                break
        logs.append(math.log(val) + scale)
        top = max(abs(v) for v in power.entries.values())
        power = power.scale(1.0 / top)
        scale += math.log(top)
    return _estimate(kind if kind != "rhoS" else f"rhoS({s})", logs, [1.0 / n for n in range(1, len(logs) + 1)],
                     window)


def _ball_for_powers(f: GroupFunction, N: int, cap: int) -> BallIndex:
    """Enumerate a ball large enough for supp f^(N), or as far as the cap allows."""
    model = f.model
    if model.order is not None:
        b = enumerate_ball(model, model.order)
        return b
    r, ball = 1, enumerate_ball(model, 1)
    while not all(z in ball for z in f.entries):
        r += 1
        ball = enumerate_ball(model, r, cap)
    try:
        return enumerate_ball(model, r * N, cap)
    except CapExceeded as e:
        return enumerate_ball(model, e.completed or 0, cap)


def dense_regular_matrix(f: GroupFunction, cosets: CosetStructure) -> tuple:
    """Dense matrix of lambda_{G/H}(f) on a finite quotient, with the coset ordering used."""
    model = f.model
    if model.elements is None:
        raise ValueError("dense matrices need a finite group")
    keys = []
    rep = {}
    for g in model.elements:
        k = cosets.coset_key(g)
        if k not in rep:
            rep[k] = g
            keys.append(k)
    idx = {k: i for i, k in enumerate(keys)}
    M = np.zeros((len(keys), len(keys)))
    for k in keys:
        for z, a in f.entries.items():
            M[idx[cosets.coset_key(model.mul(z, rep[k]))], idx[k]] += float(a)
    return M, keys


def dense_hybrid_norm(f: GroupFunction, cosets: CosetStructure, max_choices: int = 100_000) -> float:
    """||f||_h on a finite group by enumerating extreme points of the (2,1) unit ball.

    The unit ball is the convex hull of vectors with one point per coset and
    l2-unit weights; the target norm is a max over sign patterns.  So the
    value is max over (representatives, signs) of a top singular value.
    """
    model = f.model
    if model.elements is None:
        raise ValueError("dense oracle needs a finite group")
    elems = list(model.elements)
    eidx = {g: i for i, g in enumerate(elems)}
    classes = {}
    for g in elems:
        classes.setdefault(cosets.coset_key(g), []).append(g)
    cls = list(classes.values())
    L = np.zeros((len(elems), len(elems)))
    for x in elems:
        for z, a in f.entries.items():
            L[eidx[model.mul(z, x)], eidx[x]] += float(a)
    n_rep = math.prod(len(c) for c in cls)
    n_sign = 2 ** sum(len(c) - 1 for c in cls)
    if n_rep * n_sign > max_choices:
        raise ValueError(f"{n_rep * n_sign} extreme choices exceed {max_choices}")
    sign_rows = []
    for c in cls:
        pats = []
        for bits in itertools.product((1.0, -1.0), repeat=len(c) - 1):
            row = np.zeros(len(elems))
            row[eidx[c[0]]] = 1.0
            for g, b in zip(c[1:], bits):
                row[eidx[g]] = b
            pats.append(row)
        sign_rows.append(pats)
    best = 0.0
    for reps in itertools.product(*cls):
        Phi = L[:, [eidx[x] for x in reps]]
        for rows in itertools.product(*sign_rows):
            E = np.vstack(rows)
            best = max(best, float(np.linalg.norm(E @ Phi, 2)))
    return best
