"""Schreier coset graphs S(G,H,S), their growth, and Folner-ball search."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Optional

from .balls import DEFAULT_MIN_WINDOW, BallIndex, GrowthSeries, growth_from_counts
from .errors import BallInsufficient, GraphTooLarge
from .groups import CosetStructure
from .harmonic import EXACT, GroupFunction

DEFAULT_GRAPH_CAP = 5_000_000


@dataclass(frozen=True, eq=False)
class SchreierGraph:
    """Ball of radius ``radius`` around the base vertex H.

    ``edges[v]`` lists, in generator order, the image s.v of v (``None`` when
    the image lies outside the enumerated ball).  ``rep[v]`` is an element of
    minimal word length in the coset v.
    """

    cosets: CosetStructure
    radius: int
    vertices: tuple  # BFS order
    dist: dict = field(repr=False)
    rep: dict = field(repr=False)
    edges: dict = field(repr=False)
    complete: bool = False

    @property
    def base(self) -> Hashable:
        return self.cosets.base

    @property
    def labels(self) -> tuple:
        return tuple(lab for lab, _ in self.cosets.group.generators)

    def __contains__(self, v) -> bool:
        return v in self.dist

    def __len__(self) -> int:
        return len(self.vertices)

    def act(self, g, v) -> Hashable:
        """The coset g.v (may lie outside the graph)."""
        return self.cosets.coset_key(self.cosets.group.mul(g, self.rep[v]))

    def ball(self, r: int) -> list:
        return [v for v in self.vertices if self.dist[v] <= r]

    def counts(self) -> list:
        """gamma(H, r) for r = 0..radius."""
        per = [0] * (self.radius + 1)
        for v in self.vertices:
            per[self.dist[v]] += 1
        out, acc = [], 0
        for c in per:
            acc += c
            out.append(acc)
        return out

    def loops(self, v) -> int:
        return sum(1 for w in self.edges[v] if w == v)

    def to_json(self) -> dict:
        labels = self.labels
        fmt = format_coset_key
        edges = []
        for v in self.vertices:
            for lab, w in zip(labels, self.edges[v]):
                if w is not None:
                    edges.append([fmt(v), lab, fmt(w)])
        return {
            "schema": "rdpair.schreier/1",
            "group": self.cosets.group.name,
            "subgroup": self.cosets.subgroup_name,
            "radius": self.radius,
            "complete": self.complete,
            "base": fmt(self.base),
            "vertices": [{"key": fmt(v), "dist": self.dist[v], "rep": self.cosets.group.format_key(self.rep[v])}
                         for v in self.vertices],
            "edges": edges,
        }


def format_coset_key(k) -> str:
    """Canonical string form of a coset key (ints, Fractions, strings, tuples)."""
    if isinstance(k, tuple):
        return "(" + ",".join(format_coset_key(x) for x in k) + ")"
    if isinstance(k, Fraction):
        return str(k.numerator) if k.denominator == 1 else f"{k.numerator}/{k.denominator}"
    return str(k)


def build_schreier(cosets: CosetStructure, radius: int, cap: int = DEFAULT_GRAPH_CAP) -> SchreierGraph:
    """BFS from the base vertex with left multiplication by the generators."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    G = cosets.group
    gens = G.generator_keys
    key = cosets.coset_key
    mul = G.mul
    base = key(G.identity)
    dist = {base: 0}
    rep = {base: G.identity}
    images = {}
    order = [base]
    frontier = [base]
    for r in range(radius + 1):
        nxt = []
        for v in frontier:
            x = rep[v]
            row = []
            for s in gens:
                y = mul(s, x)
                w = key(y)
                if w not in dist:
                    if r == radius:
                        row.append(None)
                        continue
                    dist[w] = r + 1
                    rep[w] = y
                    nxt.append(w)
                    order.append(w)
                row.append(w)
            images[v] = tuple(row)
        if len(order) > cap:
            raise GraphTooLarge(f"Schreier ball exceeds cap {cap}", completed=r)
        frontier = nxt
        if not frontier:
            break
    complete = all(w is not None for row in images.values() for w in row)
    return SchreierGraph(cosets, radius, tuple(order), dist, rep, images, complete)


def schreier_growth(graph: SchreierGraph, min_window: int = DEFAULT_MIN_WINDOW) -> GrowthSeries:
    return growth_from_counts(graph.counts(), min_window)


def schreier_distance_bound_holds(graph: SchreierGraph, ball: BallIndex, samples: Iterable) -> bool:
    """d(H, xH) <= l(x) for the given enumerated x whose coset lies in the graph."""
    key = graph.cosets.coset_key
    for x in samples:
        v = key(x)
        if v in graph.dist and graph.dist[v] > ball.length_of[x]:
            return False
        if v not in graph.dist and ball.length_of[x] <= graph.radius:
            return False
    return True


# ---------------------------------------------------------------------------
# Folner search


@dataclass(frozen=True)
class FolnerResult:
    radius: int
    vertices: frozenset
    boundary: int  # |F.V symmetric-difference V|
    ratio: Fraction


def folner_ratio(graph: SchreierGraph, F: Iterable, V: Iterable) -> tuple:
    """(|F.V symmetric-difference V|, |V|), recounted from scratch."""
    V = set(V)
    FV = set()
    for z in F:
        for v in V:
            FV.add(graph.act(z, v))
    return len(FV ^ V), len(V)


def folner_search(graph: SchreierGraph, F: Iterable, eps) -> Optional[FolnerResult]:
    """First Schreier ball B(H, r), r = 0..radius, with |F.V sym-diff V| / |V| <= eps."""
    F = list(F)
    eps = Fraction(eps)
    for r in range(graph.radius + 1):
        V = graph.ball(r)
        bnd, size = folner_ratio(graph, F, V)
        ratio = Fraction(bnd, size)
        if ratio <= eps:
            return FolnerResult(r, frozenset(V), bnd, ratio)
    return None


# ---------------------------------------------------------------------------
# coset representatives


def coset_representative_indicator(graph: SchreierGraph, R: int, ball: Optional[BallIndex] = None) -> GroupFunction:
    """Indicator of one minimal-length representative per coset of the Schreier R-ball.

    With a ball, ties are broken by the smallest element encoding; the ball
    must reach radius R.  Without one, the BFS representatives stored in the
    graph are used (also minimal length).
    """
    if R > graph.radius:
        raise BallInsufficient(f"graph radius {graph.radius} < {R}")
    targets = [v for v in graph.vertices if graph.dist[v] <= R]
    model = graph.cosets.group
    if ball is None:
        return GroupFunction(model, {graph.rep[v]: 1 for v in targets}, EXACT)
    if ball.radius < R:
        raise BallInsufficient(f"ball radius {ball.radius} < {R}")
    key = graph.cosets.coset_key
    enc = model.encode
    best = {}
    for n in range(R + 1):
        for x in ball.spheres[n]:
            v = key(x)
            if graph.dist.get(v) == n:
                b = best.get(v)
                if b is None or enc(x) < enc(b):
                    best[v] = x
    missing = [v for v in targets if v not in best]
    if missing:
        raise BallInsufficient(f"{len(missing)} cosets have no representative in the ball")
    return GroupFunction(model, {best[v]: 1 for v in targets}, EXACT)
