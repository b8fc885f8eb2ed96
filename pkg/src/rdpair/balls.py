"""Word length, balls and spheres in Cayley graphs, and growth classification."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Hashable, Optional, Sequence

import numpy as np

from .errors import BallTooLarge, NotEnumerated, WindowTooSmall
from .groups import GroupModel

DEFAULT_BALL_CAP = 5_000_000
DEFAULT_MIN_WINDOW = 8


@dataclass(frozen=True, eq=False)
class BallIndex:
    model: GroupModel
    radius: int
    spheres: tuple  # spheres[n] = tuple of keys at word length exactly n
    length_of: dict = field(repr=False)
    complete: bool = False  # the whole (finite) group has been exhausted

    def __len__(self) -> int:
        return len(self.length_of)

    def __contains__(self, g) -> bool:
        return g in self.length_of

    @property
    def sizes(self) -> list:
        """|B(r)| for r = 0..radius."""
        return list(np.cumsum([len(s) for s in self.spheres]).tolist())

    def elements(self, radius: Optional[int] = None):
        r = self.radius if radius is None else min(radius, self.radius)
        for n in range(r + 1):
            yield from self.spheres[n]

    def sphere(self, n: int) -> tuple:
        if n > self.radius:
            raise NotEnumerated(f"sphere {n} beyond enumerated radius {self.radius}")
        return self.spheres[n]


def enumerate_ball(model: GroupModel, radius: int, cap: int = DEFAULT_BALL_CAP) -> BallIndex:
    """Breadth-first enumeration of B(radius) for the model's generating set.

    Generators are applied on the right in catalog order; the resulting
    sphere contents do not depend on that order, only their listing does.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    gens = model.generator_keys
    mul = model.mul
    length_of = {model.identity: 0}
    spheres = [(model.identity,)]
    complete = False
    for n in range(radius):
        nxt = []
        for g in spheres[n]:
            for s in gens:
                h = mul(g, s)
                if h not in length_of:
                    length_of[h] = n + 1
                    nxt.append(h)
        if len(length_of) > cap:
            raise BallTooLarge(f"|B({n + 1})| exceeds cap {cap}", completed=n)
        spheres.append(tuple(nxt))
        if not nxt:
            complete = True
    if model.order is not None and len(length_of) == model.order:
        complete = True
    return BallIndex(model=model, radius=radius, spheres=tuple(spheres), length_of=length_of, complete=complete)


def word_length(ball: BallIndex, g: Hashable) -> int:
    try:
        return ball.length_of[g]
    except KeyError:
        raise NotEnumerated(f"{g!r} is not in the enumerated ball of radius {ball.radius}") from None


# ---------------------------------------------------------------------------
# growth classification


@dataclass(frozen=True)
class FitLine:
    slope: float
    intercept: float
    rms: float


@dataclass(frozen=True)
class GrowthSeries:
    counts: tuple
    classification: str  # "polynomial", "exponential" or "inconclusive"
    estimate: float  # degree for polynomial, rate (log base e) for exponential
    loglog: FitLine
    semilog: FitLine
    window: tuple  # (r_lo, r_hi) used by the fits

    def as_record(self) -> dict:
        return {
            "classification": self.classification,
            "estimate": self.estimate,
            "window": list(self.window),
            "loglog": {"slope": self.loglog.slope, "intercept": self.loglog.intercept, "rms": self.loglog.rms},
            "semilog": {"slope": self.semilog.slope, "intercept": self.semilog.intercept, "rms": self.semilog.rms},
            "counts": list(self.counts),
        }


def _fit(x: np.ndarray, y: np.ndarray) -> FitLine:
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    return FitLine(float(coef[0]), float(coef[1]), float(np.sqrt(np.mean(resid**2))))


MIN_EXP_SLOPE = 0.1


def classify(xs: Sequence[float], values: Sequence[float], *, log_offset: float = 0.0) -> tuple:
    """Classify a positive series as polynomial / exponential / inconclusive.

    Both fits use the upper half of the window: log v against log(x + log_offset)
    and log v against x.  Exponential when the semilog residual RMS is at most
    half the log-log one and the semilog slope is at least 0.1; polynomial in
    the mirrored case; otherwise inconclusive.  Returns
    ``(verdict, estimate, loglog, semilog, (x_lo, x_hi))``.
    """
    xs = np.asarray(xs, dtype=float)
    vs = np.asarray(values, dtype=float)
    if np.any(vs <= 0):
        raise ValueError("series must be positive")
    half = len(xs) // 2
    xw, vw = xs[half:], vs[half:]
    if len(xw) < 2:
        raise WindowTooSmall("need at least two points in the fit window")
    ly = np.log(vw)
    loglog = _fit(np.log(xw + log_offset), ly)
    semilog = _fit(xw, ly)
    eps = 1e-12
    if semilog.rms <= 0.5 * loglog.rms + eps and semilog.slope >= MIN_EXP_SLOPE:
        verdict, est = "exponential", semilog.slope
    elif loglog.rms <= 0.5 * semilog.rms + eps:
        verdict, est = "polynomial", max(loglog.slope, 0.0)
    else:
        verdict, est = "inconclusive", float("nan")
    return verdict, est, loglog, semilog, (float(xw[0]), float(xw[-1]))


def growth_from_counts(counts: Sequence[int], min_window: int = DEFAULT_MIN_WINDOW) -> GrowthSeries:
    counts = tuple(int(c) for c in counts)
    if counts[0] != 1:
        raise ValueError("gamma(0) must be 1")
    R = len(counts) - 1
    if R < min_window:
        raise WindowTooSmall(f"radius {R} below the minimum fit window {min_window}")
    radii = list(range(1, R + 1))
    verdict, est, loglog, semilog, window = classify(radii, counts[1:])
    return GrowthSeries(counts, verdict, est, loglog, semilog, (int(window[0]), int(window[1])))


def growth_series(ball: BallIndex, min_window: int = DEFAULT_MIN_WINDOW) -> GrowthSeries:
    """Exact ball sizes gamma(r), r = 0..R, with the shared classifier applied."""
    return growth_from_counts(ball.sizes, min_window)


def growth_csv(series: GrowthSeries) -> str:
    lines = ["r,gamma"] + [f"{r},{c}" for r, c in enumerate(series.counts)]
    return "\n".join(lines) + "\n"
