"""Exact group models, coset structures and the constructions on pairs.

Elements are represented by canonical hashable Python values (tuples or
strings); two values are equal iff the group elements are equal.  Each model
also knows how to turn a key into bytes and back, which is what the JSON
artifacts carry.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Hashable, Optional, Sequence

from .errors import EmbeddingInvalid, MalformedKey

Key = Hashable


@dataclass(frozen=True, eq=False)
class GroupModel:
    """A finitely generated group with exact multiplication.

    ``mul`` and ``inv`` are the raw (unchecked) operations used in hot loops;
    :meth:`multiply` and :meth:`invert` validate their arguments first.
    """

    name: str
    identity: Key
    generators: tuple  # ((label, key), ...) closed under inversion
    mul: Callable[[Key, Key], Key]
    inv: Callable[[Key], Key]
    is_valid: Callable[[Key], bool]
    encode: Callable[[Key], bytes]
    decode: Callable[[bytes], Key]
    order: Optional[int] = None  # None for infinite groups
    amenable: bool = False
    elements: Optional[tuple] = None  # full element list for finite groups

    def same_as(self, other: "GroupModel") -> bool:
        """Models are identified by name; fixtures rebuild them on every call."""
        return self is other or self.name == other.name

    def multiply(self, g: Key, h: Key) -> Key:
        self.check(g)
        self.check(h)
        return self.mul(g, h)

    def invert(self, g: Key) -> Key:
        self.check(g)
        return self.inv(g)

    def check(self, g: Key) -> None:
        try:
            ok = self.is_valid(g)
        except Exception:  # a malformed value may break the validator itself
            ok = False
        if not ok:
            raise MalformedKey(f"{g!r} is not an element key of {self.name}")

    @property
    def generator_keys(self) -> tuple:
        return tuple(k for _, k in self.generators)

    def label_of(self, g: Key) -> Optional[str]:
        for lab, k in self.generators:
            if k == g:
                return lab
        return None

    def word(self, labels: Sequence[str]) -> Key:
        """Evaluate a word given as a sequence of generator labels."""
        table = dict(self.generators)
        out = self.identity
        for lab in labels:
            out = self.mul(out, table[lab])
        return out

    def power(self, g: Key, n: int) -> Key:
        base = g if n >= 0 else self.inv(g)
        out = self.identity
        for _ in range(abs(n)):
            out = self.mul(out, base)
        return out

    def key_bytes(self, g: Key) -> bytes:
        return self.encode(g)

    def format_key(self, g: Key) -> str:
        """Printable form of the encoding: ``w:<word>`` or ``x:<hex>``."""
        b = self.encode(g)
        return "w:" + b.decode("ascii") if _is_text(b) else "x:" + b.hex()

    def parse_key(self, s: str) -> Key:
        if s.startswith("w:"):
            g = self.decode(s[2:].encode("ascii"))
        elif s.startswith("x:"):
            g = self.decode(bytes.fromhex(s[2:]))
        else:
            raise MalformedKey(f"unknown key format {s!r}")
        self.check(g)
        return g


def _is_text(b: bytes) -> bool:
    try:
        s = b.decode("ascii")
    except UnicodeDecodeError:
        return False
    return s.isprintable()


@dataclass(frozen=True, eq=False)
class CosetStructure:
    """Left cosets gH of a subgroup H, given by a total key function.

    ``section`` maps a coset key to a minimal-length representative and is
    only provided when H is normal (it is used by the quotient checks).
    """

    group: GroupModel
    subgroup_name: str
    coset_key: Callable[[Key], Hashable]
    normal: bool = False
    coamenable: Optional[bool] = None
    coamenable_reason: str = ""
    subgroup_generators: Optional[tuple] = None
    section: Optional[Callable[[Hashable], Key]] = None
    index: Optional[int] = None  # |G/H| when finite

    @property
    def base(self) -> Hashable:
        return self.coset_key(self.group.identity)

    def key(self, g: Key) -> Hashable:
        return self.coset_key(g)

    def contains(self, g: Key) -> bool:
        """Membership in H."""
        return self.coset_key(g) == self.base

    def quotient_mul(self, p: Hashable, q: Hashable) -> Hashable:
        if self.section is None:
            raise ValueError(f"{self.subgroup_name} has no section; not a declared normal subgroup")
        return self.coset_key(self.group.mul(self.section(p), self.section(q)))


Pair = tuple  # (GroupModel, CosetStructure)


# ---------------------------------------------------------------------------
# encodings


def _enc_ints(values: Sequence[int]) -> bytes:
    """Little-endian, length-prefixed signed integers of arbitrary size."""
    out = bytearray(struct.pack("<I", len(values)))
    for v in values:
        n = (v.bit_length() + 8) // 8 or 1
        out += struct.pack("<I", n) + int(v).to_bytes(n, "little", signed=True)
    return bytes(out)


def _dec_ints(b: bytes) -> tuple:
    (count,) = struct.unpack_from("<I", b, 0)
    pos = 4
    vals = []
    for _ in range(count):
        (n,) = struct.unpack_from("<I", b, pos)
        pos += 4
        vals.append(int.from_bytes(b[pos : pos + n], "little", signed=True))
        pos += n
    if pos != len(b):
        raise MalformedKey("trailing bytes in integer-tuple encoding")
    return tuple(vals)


# ---------------------------------------------------------------------------
# Z^d


def lattice(d: int) -> GroupModel:
    e = (0,) * d
    gens = []
    for i in range(d):
        for sign, lab in ((1, f"e{i + 1}"), (-1, f"-e{i + 1}")):
            v = [0] * d
            v[i] = sign
            gens.append((lab, tuple(v)))

    def valid(g):
        return isinstance(g, tuple) and len(g) == d and all(type(x) is int for x in g)

    return GroupModel(
        name=f"Z^{d}",
        identity=e,
        generators=tuple(gens),
        mul=lambda g, h: tuple(a + b for a, b in zip(g, h)),
        inv=lambda g: tuple(-a for a in g),
        is_valid=valid,
        encode=_enc_ints,
        decode=_dec_ints,
        amenable=True,
    )


# ---------------------------------------------------------------------------
# free group F2 on a, b; A = a^-1, B = b^-1


_F2_INV = {"a": "A", "A": "a", "b": "B", "B": "b"}


def _free_reduce_concat(u: str, v: str) -> str:
    i = 0
    n = min(len(u), len(v))
    while i < n and _F2_INV[u[-1 - i]] == v[i]:
        i += 1
    return u[: len(u) - i] + v[i:]


def _f2_valid(g) -> bool:
    if not isinstance(g, str):
        return False
    for x, y in zip(g, g[1:]):
        if _F2_INV.get(x) == y:
            return False
    return all(c in _F2_INV for c in g)


def _f2_decode(b: bytes) -> str:
    s = b.decode("ascii")
    if not _f2_valid(s):
        raise MalformedKey(f"{s!r} is not a reduced word")
    return s


def free_group() -> GroupModel:
    return GroupModel(
        name="F2",
        identity="",
        generators=(("a", "a"), ("A", "A"), ("b", "b"), ("B", "B")),
        mul=_free_reduce_concat,
        inv=lambda g: "".join(_F2_INV[c] for c in reversed(g)),
        is_valid=_f2_valid,
        encode=lambda g: g.encode("ascii"),
        decode=_f2_decode,
    )


def f2_exponent_sum(g: str) -> int:
    return sum(1 if c in "ab" else -1 for c in g)


def f2_strip_a(g: str) -> str:
    """Shortest representative of the left coset g<a>."""
    return g.rstrip("aA")


# ---------------------------------------------------------------------------
# BS(1, n) = Z[1/n] x| Z, elements (k, x) with (k,x)(k',x') = (k+k', x + n^k x')


def _nk(n: int, k: int) -> Fraction:
    return Fraction(n) ** k


def baumslag_solitar(n: int = 2) -> GroupModel:
    def mul(g, h):
        k, x = g
        k2, x2 = h
        return (k + k2, x + _nk(n, k) * x2)

    def inv(g):
        k, x = g
        return (-k, -x * _nk(n, -k))

    def valid(g):
        if not (isinstance(g, tuple) and len(g) == 2 and type(g[0]) is int and isinstance(g[1], Fraction)):
            return False
        den = g[1].denominator
        while den % n == 0:
            den //= n
        return den == 1

    def encode(g):
        k, x = g
        j = 0
        den = x.denominator
        while den > 1:
            den //= n
            j += 1
        m = x.numerator * (n**j // x.denominator)
        return f"t^{-j} a^{m} t^{j + k}".encode("ascii")

    def decode(b):
        try:
            p1, p2, p3 = b.decode("ascii").split()
            j = -int(p1[2:])
            m = int(p2[2:])
            k = int(p3[2:]) - j
        except (ValueError, IndexError) as exc:
            raise MalformedKey(f"bad BS key {b!r}") from exc
        return (k, Fraction(m) / _nk(n, j))

    one = Fraction(1)
    zero = Fraction(0)
    return GroupModel(
        name=f"BS(1,{n})",
        identity=(0, zero),
        generators=(("a", (0, one)), ("A", (0, -one)), ("t", (1, zero)), ("T", (-1, zero))),
        mul=mul,
        inv=inv,
        is_valid=valid,
        encode=encode,
        decode=decode,
        amenable=True,
    )


def bs_mod(x: Fraction, m: Fraction) -> Fraction:
    """x reduced into [0, m)."""
    q = x / m
    return x - (q.numerator // q.denominator) * m


# ---------------------------------------------------------------------------
# discrete Heisenberg group: (a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab')


def heisenberg() -> GroupModel:
    def mul(g, h):
        return (g[0] + h[0], g[1] + h[1], g[2] + h[2] + g[0] * h[1])

    def inv(g):
        a, b, c = g
        return (-a, -b, -c + a * b)

    def valid(g):
        return isinstance(g, tuple) and len(g) == 3 and all(type(x) is int for x in g)

    return GroupModel(
        name="Heis3",
        identity=(0, 0, 0),
        generators=(("x", (1, 0, 0)), ("X", (-1, 0, 0)), ("y", (0, 1, 0)), ("Y", (0, -1, 0))),
        mul=mul,
        inv=inv,
        is_valid=valid,
        encode=_enc_ints,
        decode=_dec_ints,
        amenable=True,
    )


# ---------------------------------------------------------------------------
# finite permutation groups; (g*h)(i) = g(h(i))


def _perm_mul(g, h):
    return tuple(g[i] for i in h)


def _perm_inv(g):
    out = [0] * len(g)
    for i, gi in enumerate(g):
        out[gi] = i
    return tuple(out)


def _closure(gens, identity):
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = _perm_mul(s, g)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    return tuple(sorted(seen))


def permutation_group(name: str, generators: Sequence[tuple], degree: int) -> GroupModel:
    """Permutation group generated by ``generators`` (labels, perms), symmetrized."""
    identity = tuple(range(degree))
    gens = list(generators)
    have = {p for _, p in gens}
    for lab, p in list(gens):
        ip = _perm_inv(p)
        if ip not in have:
            gens.append((lab + "'", ip))
            have.add(ip)
    elements = _closure([p for _, p in gens], identity)
    members = frozenset(elements)
    return GroupModel(
        name=name,
        identity=identity,
        generators=tuple(gens),
        mul=_perm_mul,
        inv=_perm_inv,
        is_valid=lambda g: g in members,
        encode=lambda g: bytes(g),
        decode=lambda b: tuple(b),
        order=len(elements),
        amenable=True,
        elements=elements,
    )


def symmetric_group_4() -> GroupModel:
    return permutation_group("S4", [("s", (1, 0, 2, 3)), ("c", (1, 2, 3, 0))], 4)


def dihedral_8() -> GroupModel:
    # symmetries of the square with vertices 0,1,2,3 in cyclic order
    return permutation_group("D8", [("r", (1, 2, 3, 0)), ("f", (2, 1, 0, 3))], 4)


# ---------------------------------------------------------------------------
# constructions on pairs


def product_pair(p1: Pair, p2: Pair) -> Pair:
    """Direct product (G1 x G2, H1 x H2) with S = (S1 x e) u (e x S2)."""
    (g1, c1), (g2, c2) = p1, p2
    gens = tuple((f"{lab}.1", (k, g2.identity)) for lab, k in g1.generators) + tuple(
        (f"{lab}.2", (g1.identity, k)) for lab, k in g2.generators
    )

    def valid(g):
        return isinstance(g, tuple) and len(g) == 2 and g1.is_valid(g[0]) and g2.is_valid(g[1])

    def encode(g):
        a, b = g1.encode(g[0]), g2.encode(g[1])
        return struct.pack("<I", len(a)) + a + b

    def decode(b):
        (n,) = struct.unpack_from("<I", b, 0)
        return (g1.decode(b[4 : 4 + n]), g2.decode(b[4 + n :]))

    order = g1.order * g2.order if g1.order and g2.order else None
    elements = None
    if g1.elements is not None and g2.elements is not None:
        elements = tuple((x, y) for x in g1.elements for y in g2.elements)
    model = GroupModel(
        name=f"{g1.name}x{g2.name}",
        identity=(g1.identity, g2.identity),
        generators=gens,
        mul=lambda g, h: (g1.mul(g[0], h[0]), g2.mul(g[1], h[1])),
        inv=lambda g: (g1.inv(g[0]), g2.inv(g[1])),
        is_valid=valid,
        encode=encode,
        decode=decode,
        order=order,
        amenable=g1.amenable and g2.amenable,
        elements=elements,
    )
    section = None
    if c1.section is not None and c2.section is not None:
        section = lambda q: (c1.section(q[0]), c2.section(q[1]))  # noqa: E731
    sub_gens = None
    if c1.subgroup_generators is not None and c2.subgroup_generators is not None:
        sub_gens = tuple((h, g2.identity) for h in c1.subgroup_generators) + tuple(
            (g1.identity, h) for h in c2.subgroup_generators
        )
    coamenable = None
    if c1.coamenable is not None and c2.coamenable is not None:
        coamenable = c1.coamenable and c2.coamenable
    cosets = CosetStructure(
        group=model,
        subgroup_name=f"{c1.subgroup_name}x{c2.subgroup_name}",
        coset_key=lambda g: (c1.coset_key(g[0]), c2.coset_key(g[1])),
        normal=c1.normal and c2.normal,
        coamenable=coamenable,
        coamenable_reason="product of co-amenable pairs" if coamenable else "",
        subgroup_generators=sub_gens,
        section=section,
        index=c1.index * c2.index if c1.index and c2.index else None,
    )
    return model, cosets


@dataclass(frozen=True, eq=False)
class Embedding:
    """An injective homomorphism K -> G together with a membership test for its image."""

    model: GroupModel
    embed: Callable[[Key], Key]
    contains: Callable[[Key], bool]
    pull: Optional[Callable[[Key], Key]] = None  # inverse on the image, if available


def identity_embedding(model: GroupModel) -> Embedding:
    return Embedding(model=model, embed=lambda k: k, contains=lambda g: True, pull=lambda g: g)


def restrict_to_subgroup(pair: Pair, emb: Embedding) -> Pair:
    """The pair (K, H) for H <= K <= G, cosets inherited from G/H.

    H <= K is checked on the declared generators of H.
    """
    model, cosets = pair
    for _, k in emb.model.generators:
        if not emb.contains(emb.embed(k)):
            raise EmbeddingInvalid(f"generator {k!r} of {emb.model.name} does not embed")
    if emb.embed(emb.model.identity) != model.identity:
        raise EmbeddingInvalid("embedding does not preserve the identity")
    if cosets.subgroup_generators is None:
        raise EmbeddingInvalid(f"subgroup {cosets.subgroup_name} declares no generators; H <= K undecidable")
    for h in cosets.subgroup_generators:
        if not emb.contains(h):
            raise EmbeddingInvalid(f"{cosets.subgroup_name} is not contained in {emb.model.name}")
    sub_gens = None
    if emb.pull is not None:
        sub_gens = tuple(emb.pull(h) for h in cosets.subgroup_generators)
    restricted = CosetStructure(
        group=emb.model,
        subgroup_name=cosets.subgroup_name,
        coset_key=lambda k: cosets.coset_key(emb.embed(k)),
        normal=cosets.normal,
        coamenable=None,
        subgroup_generators=sub_gens,
        section=None,
    )
    return emb.model, restricted


def restrict_trivially(model: GroupModel, name: str = "{e}") -> CosetStructure:
    """The trivial subgroup: cosets are the elements themselves."""
    return CosetStructure(
        group=model,
        subgroup_name=name,
        coset_key=lambda g: g,
        normal=True,
        coamenable=model.amenable or None,
        coamenable_reason="amenable group" if model.amenable else "",
        subgroup_generators=(),
        section=lambda q: q,
        index=model.order,
    )


def whole_group(model: GroupModel) -> CosetStructure:
    return CosetStructure(
        group=model,
        subgroup_name="G",
        coset_key=lambda g: 0,
        normal=True,
        coamenable=True,
        coamenable_reason="H = G",
        subgroup_generators=model.generator_keys,
        section=lambda q: model.identity,
        index=1,
    )


def sample_elements(model: GroupModel, rng, length: int) -> Any:
    """A random element obtained as a random word of the given length."""
    gens = model.generator_keys
    g = model.identity
    for _ in range(length):
        g = model.mul(g, gens[rng.randrange(len(gens))])
    return g
