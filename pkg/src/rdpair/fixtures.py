"""The fixture catalog: named (group, subgroup) pairs with documented behaviour.

Fixture ids, with their integer parameters:

=====================  ===================================================
``zd-trivial``         Z^d, H = {0}                                (d)
``zd-full``            Z^d, H = Z^d                                (d)
``zd-sublattice``      Z^d, H = kZ x Z^(d-1), finite index k       (d, k)
``z2-zline``           Z^2, H = Z x {0}; quotient Z
``f2-free``            F2, H = {e}
``f2-ker``             F2, H = kernel of the exponent sum; quotient Z
``f2-a``               F2, H = <a>
``bs-a``               BS(1,n), H = <a>                            (n)
``bs-t``               BS(1,n), H = <t>                            (n)
``bs-dyadic``          BS(1,n), H = Z[1/n]; quotient Z             (n)
``heisenberg-center``  discrete Heisenberg group, H = centre
``s4-d8``              S4, H = dihedral subgroup of order 8 (index 3)
``s4-s3``              S4, H = stabiliser of a point (index 4)
``s4-trivial``         S4, H = {e}
``s4-full``            S4, H = S4
``d8-flip``            D8, H = <a reflection> (order 2, not normal)
=====================  ===================================================

Products are written ``id1*id2``.  Generating sets: the standard basis of
Z^d, {a, b} for F2, {a, t} for BS(1,n), {x, y} for Heisenberg, a
transposition and a 4-cycle for S4, a rotation and a reflection for D8,
always closed under inversion.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from . import groups as grp
from .errors import ParameterOutOfRange, UnknownFixture


@dataclass(frozen=True)
class FixtureSpec:
    id: str
    d: int = 2
    k: int = 2
    n: int = 2
    factors: tuple = ()

    @classmethod
    def parse(cls, text: str, **params) -> "FixtureSpec":
        parts = [p.strip() for p in text.split("*")]
        if len(parts) > 1:
            return cls(id="product", factors=tuple(cls.parse(p, **params) for p in parts))
        return cls(id=parts[0], **params)

    @property
    def label(self) -> str:
        if self.factors:
            return "*".join(f.label for f in self.factors)
        extra = {
            "zd-trivial": f"[d={self.d}]",
            "zd-full": f"[d={self.d}]",
            "zd-sublattice": f"[d={self.d},k={self.k}]",
            "bs-a": f"[n={self.n}]",
            "bs-t": f"[n={self.n}]",
            "bs-dyadic": f"[n={self.n}]",
        }.get(self.id, "")
        return self.id + extra


@dataclass(frozen=True)
class FixtureInfo:
    """Documented expectations for a catalog entry."""

    description: str
    rd: Optional[bool]  # does the pair have rapid decay
    cogrowth: str  # "finite", "polynomial" or "exponential"
    builder: Callable = field(repr=False, compare=False, default=None)


def _zd_trivial(spec):
    _need(spec.d >= 1, "d >= 1")
    m = grp.lattice(spec.d)
    return m, grp.restrict_trivially(m)


def _zd_full(spec):
    _need(spec.d >= 1, "d >= 1")
    m = grp.lattice(spec.d)
    return m, grp.whole_group(m)


def _zd_sublattice(spec):
    _need(spec.d >= 1, "d >= 1")
    _need(spec.k >= 1, "k >= 1")
    d, k = spec.d, spec.k
    m = grp.lattice(d)
    gens = []
    for i in range(d):
        v = [0] * d
        v[i] = k if i == 0 else 1
        gens.append(tuple(v))
    cosets = grp.CosetStructure(
        group=m,
        subgroup_name=f"{k}Z x Z^{d - 1}",
        coset_key=lambda g: g[0] % k,
        normal=True,
        coamenable=True,
        coamenable_reason="finite index",
        subgroup_generators=tuple(gens),
        section=lambda r: (r,) + (0,) * (d - 1),
        index=k,
    )
    return m, cosets


def _z2_zline(spec):
    m = grp.lattice(2)
    cosets = grp.CosetStructure(
        group=m,
        subgroup_name="Z x {0}",
        coset_key=lambda g: g[1],
        normal=True,
        coamenable=True,
        coamenable_reason="normal with amenable quotient Z",
        subgroup_generators=((1, 0),),
        section=lambda y: (0, y),
    )
    return m, cosets


def _f2_free(spec):
    m = grp.free_group()
    c = grp.restrict_trivially(m)
    return m, grp.CosetStructure(
        group=m,
        subgroup_name="{e}",
        coset_key=c.coset_key,
        normal=True,
        coamenable=False,
        coamenable_reason="F2 is not amenable",
        subgroup_generators=(),
        section=c.section,
    )


def _f2_ker(spec):
    m = grp.free_group()
    cosets = grp.CosetStructure(
        group=m,
        subgroup_name="ker(exp-sum)",
        coset_key=grp.f2_exponent_sum,
        normal=True,
        coamenable=True,
        coamenable_reason="normal with amenable quotient Z",
        subgroup_generators=("aB", "Ab", "ab" + "AB", "bA"),
        section=lambda e: "a" * e if e >= 0 else "A" * (-e),
    )
    return m, cosets


def _f2_a(spec):
    m = grp.free_group()
    cosets = grp.CosetStructure(
        group=m,
        subgroup_name="<a>",
        coset_key=grp.f2_strip_a,
        normal=False,
        coamenable=False,
        coamenable_reason="infinite-index subgroup of F2 with exponential co-growth; quasi-regular walk not co-amenable",
        subgroup_generators=("a",),
    )
    return m, cosets


def _bs_check(spec):
    _need(spec.n >= 2, "BS parameter n >= 2")


def _bs_a(spec):
    _bs_check(spec)
    n = spec.n
    m = grp.baumslag_solitar(n)

    def key(g):
        k, x = g
        return (k, grp.bs_mod(x, Fraction(n) ** k))

    return m, grp.CosetStructure(
        group=m,
        subgroup_name="<a>",
        coset_key=key,
        normal=False,
        coamenable=True,
        coamenable_reason="BS(1,n) is solvable, hence amenable",
        subgroup_generators=((0, Fraction(1)),),
    )


def _bs_t(spec):
    _bs_check(spec)
    m = grp.baumslag_solitar(spec.n)
    return m, grp.CosetStructure(
        group=m,
        subgroup_name="<t>",
        coset_key=lambda g: g[1],
        normal=False,
        coamenable=True,
        coamenable_reason="BS(1,n) is solvable, hence amenable",
        subgroup_generators=((1, Fraction(0)),),
    )


def _bs_dyadic(spec):
    _bs_check(spec)
    m = grp.baumslag_solitar(spec.n)
    return m, grp.CosetStructure(
        group=m,
        subgroup_name=f"Z[1/{spec.n}]",
        coset_key=lambda g: g[0],
        normal=True,
        coamenable=True,
        coamenable_reason="BS(1,n) is solvable, hence amenable",
        # Z[1/n] is not finitely generated; the conjugates t^-j a t^j that matter here
        subgroup_generators=tuple((0, Fraction(1, spec.n**j)) for j in range(4)),
        section=lambda k: (k, Fraction(0)),
    )


def _heisenberg_center(spec):
    m = grp.heisenberg()
    return m, grp.CosetStructure(
        group=m,
        subgroup_name="Z(H3)",
        coset_key=lambda g: (g[0], g[1]),
        normal=True,
        coamenable=True,
        coamenable_reason="nilpotent group",
        subgroup_generators=((0, 0, 1),),
        section=lambda q: (q[0], q[1], 0),
    )


def _pair_partition(g, pairs):
    return tuple(sorted(tuple(sorted((g[i], g[j]))) for i, j in pairs))


def _s4_d8(spec):
    m = grp.symmetric_group_4()
    p0 = ((0, 2), (1, 3))
    return m, grp.CosetStructure(
        group=m,
        subgroup_name="D8",
        coset_key=lambda g: _pair_partition(g, p0),
        normal=False,
        coamenable=True,
        coamenable_reason="finite group",
        subgroup_generators=((1, 2, 3, 0), (2, 1, 0, 3)),
        index=3,
    )


def _s4_s3(spec):
    m = grp.symmetric_group_4()
    return m, grp.CosetStructure(
        group=m,
        subgroup_name="Stab(3)",
        coset_key=lambda g: g[3],
        normal=False,
        coamenable=True,
        coamenable_reason="finite group",
        subgroup_generators=((1, 0, 2, 3), (1, 2, 0, 3)),
        index=4,
    )


def _s4_trivial(spec):
    m = grp.symmetric_group_4()
    return m, grp.restrict_trivially(m)


def _s4_full(spec):
    m = grp.symmetric_group_4()
    return m, grp.whole_group(m)


def _d8_flip(spec):
    m = grp.dihedral_8()
    return m, grp.CosetStructure(
        group=m,
        subgroup_name="<f>",
        coset_key=lambda g: g[1],
        normal=False,
        coamenable=True,
        coamenable_reason="finite group",
        subgroup_generators=((2, 1, 0, 3),),
        index=4,
    )


CATALOG = {
    "zd-trivial": FixtureInfo("Z^d with the trivial subgroup (RD of Z^d)", True, "polynomial", _zd_trivial),
    "zd-full": FixtureInfo("Z^d with H = G (hybrid norm is l1)", True, "finite", _zd_full),
    "zd-sublattice": FixtureInfo("Z^d with the finite-index sublattice kZ x Z^(d-1)", True, "finite", _zd_sublattice),
    "z2-zline": FixtureInfo("Z^2 with H = Z x {0}; normal, quotient Z", True, "polynomial", _z2_zline),
    "f2-free": FixtureInfo("F2 with the trivial subgroup (Haagerup)", True, "exponential", _f2_free),
    "f2-ker": FixtureInfo("F2 with the kernel of the exponent sum; normal, quotient Z", True, "polynomial", _f2_ker),
    "f2-a": FixtureInfo("F2 with the amenable subgroup <a> of an RD group", True, "exponential", _f2_a),
    "bs-a": FixtureInfo("BS(1,n) with <a>: co-amenable, exponential quotient, RD fails", False, "exponential", _bs_a),
    "bs-t": FixtureInfo("BS(1,n) with <t>: co-amenable, exponential quotient, RD fails", False, "exponential", _bs_t),
    "bs-dyadic": FixtureInfo("BS(1,n) with Z[1/n]; normal, quotient Z, RD holds", True, "polynomial", _bs_dyadic),
    "heisenberg-center": FixtureInfo("Heisenberg group with its centre; quotient Z^2", True, "polynomial", _heisenberg_center),
    "s4-d8": FixtureInfo("S4 with a dihedral subgroup of index 3", True, "finite", _s4_d8),
    "s4-s3": FixtureInfo("S4 with a point stabiliser of index 4", True, "finite", _s4_s3),
    "s4-trivial": FixtureInfo("S4 with the trivial subgroup", True, "finite", _s4_trivial),
    "s4-full": FixtureInfo("S4 with H = S4", True, "finite", _s4_full),
    "d8-flip": FixtureInfo("D8 with a non-normal reflection subgroup", True, "finite", _d8_flip),
}


def _need(cond: bool, what: str) -> None:
    if not cond:
        raise ParameterOutOfRange(f"parameter constraint violated: {what}")


def build_fixture(spec) -> grp.Pair:
    """Resolve a :class:`FixtureSpec` (or id string) to ``(model, cosets)``."""
    if isinstance(spec, str):
        spec = FixtureSpec.parse(spec)
    if spec.id == "product":
        if len(spec.factors) < 2:
            raise ParameterOutOfRange("a product needs at least two factors")
        pair = build_fixture(spec.factors[0])
        for f in spec.factors[1:]:
            pair = grp.product_pair(pair, build_fixture(f))
        return pair
    info = CATALOG.get(spec.id)
    if info is None:
        raise UnknownFixture(f"unknown fixture id {spec.id!r}; known: {', '.join(sorted(CATALOG))}")
    return info.builder(spec)


def expectation(spec) -> dict:
    """Documented (rd, cogrowth) expectation for a fixture, products included."""
    if isinstance(spec, str):
        spec = FixtureSpec.parse(spec)
    if spec.id == "product":
        parts = [expectation(f) for f in spec.factors]
        order = ["finite", "polynomial", "exponential"]
        cogrowth = max((p["cogrowth"] for p in parts), key=order.index)
        rd = all(p["rd"] for p in parts) if all(p["rd"] is not None for p in parts) else None
        return {"rd": rd, "cogrowth": cogrowth}
    info = CATALOG.get(spec.id)
    if info is None:
        raise UnknownFixture(spec.id)
    return {"rd": info.rd, "cogrowth": info.cogrowth}


# the fixtures every catalog-wide check runs on
DEFAULT_CORPUS = (
    "zd-trivial",
    "zd-full",
    "zd-sublattice",
    "z2-zline",
    "f2-free",
    "f2-ker",
    "f2-a",
    "bs-a",
    "bs-t",
    "bs-dyadic",
    "heisenberg-center",
    "s4-d8",
    "s4-s3",
    "s4-trivial",
    "s4-full",
    "d8-flip",
    "z2-zline*f2-ker",
)
