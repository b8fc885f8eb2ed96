"""Finitely supported functions on a group, convolution and the hybrid norms.

Exact mode stores :class:`fractions.Fraction` values and every norm is
reported through its exact square.  Float mode stores Python floats and all
reductions go through :func:`math.fsum`, which is correctly rounded and
therefore independent of summation order.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Mapping, Optional

from .balls import BallIndex
from .errors import ModeMismatch, ModelMismatch, NegativeEntry, SupportNotEnumerated
from .groups import CosetStructure, GroupModel

EXACT = "exact"
FLOAT = "float"


def _coerce(value, mode):
    if mode == EXACT:
        return Fraction(value)
    if isinstance(value, complex):
        return value if value.imag else value.real
    return float(value)


@dataclass(frozen=True, eq=False)
class GroupFunction:
    """A finitely supported scalar function on ``model`` with no stored zeros."""

    model: GroupModel
    entries: Mapping
    mode: str = EXACT

    def __post_init__(self):
        if self.mode not in (EXACT, FLOAT):
            raise ValueError(f"unknown mode {self.mode!r}")
        clean = {}
        for k, v in self.entries.items():
            v = _coerce(v, self.mode)
            if v != 0:
                clean[k] = v
        object.__setattr__(self, "entries", clean)

    # construction helpers -------------------------------------------------

    @classmethod
    def delta(cls, model: GroupModel, g=None, mode: str = EXACT, weight=1) -> "GroupFunction":
        return cls(model, {model.identity if g is None else g: weight}, mode)

    @classmethod
    def zero(cls, model: GroupModel, mode: str = EXACT) -> "GroupFunction":
        return cls(model, {}, mode)

    @classmethod
    def uniform(cls, model: GroupModel, keys, mode: str = EXACT) -> "GroupFunction":
        keys = list(keys)
        w = Fraction(1, len(keys))
        out = defaultdict(Fraction)
        for k in keys:
            out[k] += w
        return cls(model, dict(out), mode)

    # basic accessors ------------------------------------------------------

    def __getitem__(self, g):
        return self.entries.get(g, 0)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def support(self):
        return self.entries.keys()

    def items_sorted(self):
        """Entries in ascending encoding order (the documented reduction order)."""
        enc = self.model.encode
        return sorted(self.entries.items(), key=lambda kv: enc(kv[0]))

    def is_zero(self) -> bool:
        return not self.entries

    def is_positive(self) -> bool:
        return all(v > 0 for v in self.entries.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupFunction):
            return NotImplemented
        return self.model.same_as(other.model) and self.entries == other.entries

    __hash__ = None

    # linear structure -----------------------------------------------------

    def _check(self, other: "GroupFunction") -> None:
        if not self.model.same_as(other.model):
            raise ModelMismatch(f"{self.model.name} vs {other.model.name}")
        if self.mode != other.mode:
            raise ModeMismatch(f"{self.mode} vs {other.mode}")

    def __add__(self, other: "GroupFunction") -> "GroupFunction":
        self._check(other)
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out.get(k, 0) + v
        return GroupFunction(self.model, out, self.mode)

    def __neg__(self) -> "GroupFunction":
        return GroupFunction(self.model, {k: -v for k, v in self.entries.items()}, self.mode)

    def __sub__(self, other: "GroupFunction") -> "GroupFunction":
        return self + (-other)

    def scale(self, c) -> "GroupFunction":
        c = _coerce(c, self.mode)
        return GroupFunction(self.model, {k: c * v for k, v in self.entries.items()}, self.mode)

    def abs(self) -> "GroupFunction":
        return GroupFunction(self.model, {k: abs(v) for k, v in self.entries.items()}, self.mode)

    def to_float(self) -> "GroupFunction":
        return GroupFunction(self.model, {k: float(v) for k, v in self.entries.items()}, FLOAT)

    def to_exact(self) -> "GroupFunction":
        return GroupFunction(self.model, {k: Fraction(v) for k, v in self.entries.items()}, EXACT)

    def weighted(self, weight: Callable) -> "GroupFunction":
        """Pointwise product with ``weight(g)``."""
        return GroupFunction(self.model, {k: v * weight(k) for k, v in self.entries.items()}, self.mode)

    def restrict(self, keys) -> "GroupFunction":
        keys = set(keys)
        return GroupFunction(self.model, {k: v for k, v in self.entries.items() if k in keys}, self.mode)

    def total(self):
        return _sum(self.entries.values(), self.mode)


def _sum(values, mode):
    if mode == FLOAT:
        return math.fsum(values)
    return sum(values, Fraction(0))


# ---------------------------------------------------------------------------
# convolution and involution


def convolve(f: GroupFunction, phi: GroupFunction) -> GroupFunction:
    """(f * phi)(x) = sum_z f(z) phi(z^-1 x), computed as sum over pairs z*y.

    The smaller support is iterated in the outer loop.
    """
    f._check(phi)
    mul = f.model.mul
    if f.mode == EXACT:
        acc = defaultdict(Fraction)
        if len(f) <= len(phi):
            pitems = list(phi.entries.items())
            for z, a in f.entries.items():
                for y, b in pitems:
                    acc[mul(z, y)] += a * b
        else:
            fitems = list(f.entries.items())
            for y, b in phi.entries.items():
                for z, a in fitems:
                    acc[mul(z, y)] += a * b
        return GroupFunction(f.model, acc, EXACT)
    terms = defaultdict(list)
    if len(f) <= len(phi):
        pitems = list(phi.entries.items())
        for z, a in f.entries.items():
            for y, b in pitems:
                terms[mul(z, y)].append(a * b)
    else:
        fitems = list(f.entries.items())
        for y, b in phi.entries.items():
            for z, a in fitems:
                terms[mul(z, y)].append(a * b)
    return GroupFunction(f.model, {k: math.fsum(v) for k, v in terms.items()}, FLOAT)


def convolution_power(f: GroupFunction, n: int, cap: Optional[int] = None) -> GroupFunction:
    """f^(n), with f^(0) = delta_e.  ``cap`` bounds the support size."""
    from .errors import PowerOverflow

    out = GroupFunction.delta(f.model, mode=f.mode)
    for i in range(n):
        out = convolve(out, f)
        if cap is not None and len(out) > cap:
            raise PowerOverflow(f"support of f^({i + 1}) exceeds cap {cap}", completed=i)
    return out


def involute(f: GroupFunction) -> GroupFunction:
    """f*(x) = f(x^-1)."""
    inv = f.model.inv
    return GroupFunction(f.model, {inv(k): v for k, v in f.entries.items()}, f.mode)


# ---------------------------------------------------------------------------
# norms


@dataclass(frozen=True)
class NormValue:
    """A norm, carried by its exact square where the norm itself is irrational."""

    kind: str  # "l1", "l2", "l21", "sobolev(s,l21)", "sobolev(s,l2)"
    squared: object  # Fraction in exact mode, float otherwise

    @property
    def value(self) -> float:
        return math.sqrt(self.squared)

    def __float__(self) -> float:
        return self.value

    def __le__(self, other: "NormValue") -> bool:
        return self.squared <= other.squared

    def __lt__(self, other: "NormValue") -> bool:
        return self.squared < other.squared


def _check_cosets(f: GroupFunction, cosets: CosetStructure) -> None:
    if not cosets.group.same_as(f.model):
        raise ModelMismatch(f"function on {f.model.name}, cosets of {cosets.group.name}")


def norm1(f: GroupFunction) -> NormValue:
    s = _sum((abs(v) for v in f.entries.values()), f.mode)
    return NormValue("l1", s * s)


def norm1_value(f: GroupFunction):
    """The l1 norm itself (exact in exact mode)."""
    return _sum((abs(v) for v in f.entries.values()), f.mode)


def norm2(f: GroupFunction) -> NormValue:
    return NormValue("l2", _sum((v * v for v in f.entries.values()), f.mode))


def pushforward(f: GroupFunction, cosets: CosetStructure) -> dict:
    """pi_#(f): the sum of f over each left coset, keyed by coset key."""
    _check_cosets(f, cosets)
    key = cosets.coset_key
    if f.mode == EXACT:
        acc = defaultdict(Fraction)
        for g, v in f.entries.items():
            acc[key(g)] += v
        return {k: v for k, v in acc.items() if v != 0}
    terms = defaultdict(list)
    for g, v in f.entries.items():
        terms[key(g)].append(v)
    out = {k: math.fsum(v) for k, v in terms.items()}
    return {k: v for k, v in out.items() if v != 0}


def coset_l1(f: GroupFunction, cosets: CosetStructure) -> dict:
    """||f restricted to gH||_1 for every coset meeting the support."""
    return pushforward(f.abs(), cosets)


def norm21(f: GroupFunction, cosets: CosetStructure) -> NormValue:
    """Hybrid norm: sqrt of the sum over cosets of the squared coset l1 norms."""
    sums = coset_l1(f, cosets)
    return NormValue("l21", _sum((v * v for v in sums.values()), f.mode))


def vector_norm2(vec: Mapping, mode: str = EXACT) -> NormValue:
    return NormValue("l2", _sum((v * v for v in vec.values()), mode))


def sobolev_weight(ball: BallIndex, s) -> Callable:
    """g -> (1 + l(g))^s, exact for integer s in exact mode."""

    def w(g):
        try:
            n = ball.length_of[g]
        except KeyError:
            raise SupportNotEnumerated(f"{g!r} outside the enumerated ball") from None
        if isinstance(s, int) or (isinstance(s, Fraction) and s.denominator == 1):
            return Fraction(1 + n) ** int(s)
        return (1 + n) ** float(s)

    return w


def sobolev_weighted(f: GroupFunction, ball: BallIndex, s) -> GroupFunction:
    if not ball.model.same_as(f.model):
        raise ModelMismatch("ball and function live on different models")
    w = sobolev_weight(ball, s)
    exact_weight = isinstance(s, int) or (isinstance(s, Fraction) and s.denominator == 1)
    g = f if (exact_weight or f.mode == FLOAT) else f.to_float()
    return g.weighted(w)


def sobolev_norm(f: GroupFunction, cosets: CosetStructure, ball: BallIndex, s, base: str = "l21") -> NormValue:
    """||f (1+l)^s|| in the chosen base norm ("l21" or "l2")."""
    _check_cosets(f, cosets)
    fw = sobolev_weighted(f, ball, s)
    nv = norm21(fw, cosets) if base == "l21" else norm2(fw)
    return NormValue(f"sobolev({s},{base})", nv.squared)


# ---------------------------------------------------------------------------
# positivity and the condition-(4) pairing


def positive_decompose(f: GroupFunction) -> tuple:
    """f = f1 - f2 + i (f3 - f4) with nonnegative parts, disjoint supports in each pair.

    Values may be Python complex numbers in float mode; exact values are real.
    """
    parts = [{}, {}, {}, {}]
    for g, v in f.entries.items():
        re, im = (v.real, v.imag) if isinstance(v, complex) else (v, 0)
        if re > 0:
            parts[0][g] = re
        elif re < 0:
            parts[1][g] = -re
        if im > 0:
            parts[2][g] = im
        elif im < 0:
            parts[3][g] = -im
    return tuple(GroupFunction(f.model, p, f.mode) for p in parts)


def recompose(parts) -> GroupFunction:
    f1, f2, f3, f4 = parts
    real = f1 - f2
    imag = f3 - f4
    if imag.is_zero():
        return real
    out = dict(real.entries)
    for k, v in imag.entries.items():
        out[k] = out.get(k, 0) + 1j * v
    return GroupFunction(f1.model, out, FLOAT)


def require_positive(*fs: GroupFunction) -> None:
    for f in fs:
        if any(v < 0 for v in f.entries.values()):
            raise NegativeEntry("function has a negative entry")


def subgroup_sum(f: GroupFunction, cosets: CosetStructure):
    """sum_{h in H} f(h)."""
    _check_cosets(f, cosets)
    base = cosets.base
    key = cosets.coset_key
    return _sum((v for g, v in f.entries.items() if key(g) == base), f.mode)


def condition4_pairing(f: GroupFunction, phi: GroupFunction, psi: GroupFunction, cosets: CosetStructure):
    """sum_{h in H} ((f*phi)^* * psi^*)(h) for nonnegative f, phi, psi.

    Evaluated literally: both convolutions are formed and the result is
    summed over the subgroup.
    """
    require_positive(f, phi, psi)
    for g in (phi, psi):
        f._check(g)
    _check_cosets(f, cosets)
    lhs = involute(convolve(f, phi))
    return subgroup_sum(convolve(lhs, involute(psi)), cosets)


# ---------------------------------------------------------------------------
# serialization


def function_to_records(f: GroupFunction) -> list:
    out = []
    for k, v in f.items_sorted():
        key = f.model.format_key(k)
        if f.mode == EXACT:
            out.append([key, v.numerator, v.denominator])
        else:
            out.append([key, v])
    return out


def function_from_records(model: GroupModel, records: list) -> GroupFunction:
    if not records:
        return GroupFunction.zero(model)
    exact = all(len(r) == 3 for r in records)
    entries = {}
    for r in records:
        k = model.parse_key(r[0])
        v = Fraction(int(r[1]), int(r[2])) if exact else float(r[1])
        entries[k] = entries.get(k, 0) + v
    return GroupFunction(model, entries, EXACT if exact else FLOAT)


def random_positive(model: GroupModel, ball: BallIndex, rng, radius: int, max_support: int = 12,
                    max_num: int = 9, mode: str = EXACT) -> GroupFunction:
    """A seeded random positive function supported in B(radius).

    Support size is uniform in [1, max_support]; values are small rationals.
    """
    pool = list(ball.elements(radius))
    size = rng.randint(1, min(max_support, len(pool)))
    keys = rng.sample(pool, size)
    entries = {k: Fraction(rng.randint(1, max_num), rng.randint(1, 4)) for k in keys}
    return GroupFunction(model, entries, mode)


def random_signed(model: GroupModel, ball: BallIndex, rng, radius: int, max_support: int = 12,
                  max_num: int = 9) -> GroupFunction:
    pool = list(ball.elements(radius))
    size = rng.randint(1, min(max_support, len(pool)))
    keys = rng.sample(pool, size)
    entries = {k: Fraction(rng.choice([-1, 1]) * rng.randint(1, max_num), rng.randint(1, 4)) for k in keys}
    return GroupFunction(model, entries, EXACT)
