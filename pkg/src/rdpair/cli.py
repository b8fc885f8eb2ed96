"""Command-line entry point: ``rdpair <command> [options]``.

Options can also come from a YAML file given with ``--config``; flags given
on the command line override it.  Exit status: 0 success, 1 a check failed,
2 usage error, 3 a size cap was hit (partial artifacts are still written).
"""

from __future__ import annotations

import argparse
import itertools
import random
import sys
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path
from typing import Optional

import yaml

from . import __version__
from . import artifacts as art
from .balls import DEFAULT_BALL_CAP, enumerate_ball, growth_csv, growth_from_counts
from .errors import CapExceeded, MalformedKey, ParameterOutOfRange, RDPairError, UnknownFixture, WindowTooSmall
from .fixtures import CATALOG, FixtureSpec, build_fixture, expectation
from .harmonic import (
    EXACT,
    FLOAT,
    GroupFunction,
    convolve,
    function_to_records,
    norm1,
    norm2,
    norm21,
    random_positive,
    random_signed,
    sobolev_norm,
)
from .operators import KINDS, BracketConfig, hybrid_norm_bracket, spectral_radius
from .rdlab import (
    FAMILIES,
    CheckRecord,
    FitConfig,
    SuiteReport,
    banach_algebra_check,
    equivalence_battery,
    leptin_check,
    normal_quotient_check,
    rd_exponent_fit,
)
from .schreier import DEFAULT_GRAPH_CAP, build_schreier, schreier_growth
from .walks import N_EXACT, Measure, return_identity_check, walk_spectral_radius

COMMANDS = ("fixtures", "ball", "schreier", "norms", "conv", "opnorm", "spectral", "walk", "rdfit", "suite")


@dataclass
class RunConfig:
    fixture: str = "z2-zline"
    dim: int = 2
    index: int = 2
    bs_n: int = 2
    radius: int = 3
    schreier_radius: Optional[int] = None
    truncation: int = 20
    leptin_radii: list = field(default_factory=lambda: [4, 8])
    mode: str = EXACT
    seed: int = 0
    s: int = 2
    N: int = 8
    kind: str = "rho1"
    iterations: int = 300
    trials: int = 100
    window: list = field(default_factory=lambda: [4, 14])
    families: list = field(default_factory=lambda: list(FAMILIES))
    function: str = "mu"
    ball_cap: int = DEFAULT_BALL_CAP
    graph_cap: int = DEFAULT_GRAPH_CAP
    power_cap: int = 2_000_000
    out: str = "rdpair-out"
    plot: bool = False

    def validate(self) -> None:
        for name in ("ball_cap", "graph_cap", "power_cap", "iterations", "trials"):
            if getattr(self, name) <= 0:
                raise ParameterOutOfRange(f"{name} must be positive")
        if self.mode not in (EXACT, FLOAT):
            raise ParameterOutOfRange(f"mode must be {EXACT!r} or {FLOAT!r}")
        if self.radius < 0 or self.N < 0:
            raise ParameterOutOfRange("radius and N must be >= 0")
        if len(self.window) != 2 or self.window[0] > self.window[1]:
            raise ParameterOutOfRange("window must be [lo, hi] with lo <= hi")
        if self.kind not in KINDS:
            raise ParameterOutOfRange(f"kind must be one of {KINDS}")
        if self.function not in ("mu", "random"):
            raise ParameterOutOfRange("function must be 'mu' or 'random'")
        for fam in self.families:
            if fam not in FAMILIES:
                raise ParameterOutOfRange(f"unknown family {fam!r}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise ParameterOutOfRange(f"unknown config keys: {sorted(extra)}")
        return cls(**d)

    def digest_view(self) -> dict:
        """The config as embedded in artifacts (output location excluded)."""
        d = self.to_dict()
        d.pop("out")
        return d

    @property
    def spec(self) -> FixtureSpec:
        return FixtureSpec.parse(self.fixture, d=self.dim, k=self.index, n=self.bs_n)


# ---------------------------------------------------------------------------
# argument parsing


def _window(text: str) -> list:
    try:
        lo, hi = (int(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError("window must look like 4:14") from None
    return [lo, hi]


def _int_list(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated integers") from None


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    common = argparse.ArgumentParser(add_help=False, argument_default=S)
    common.add_argument("--config", help="YAML file with RunConfig keys")
    common.add_argument("--fixture", help="fixture id, products as id1*id2")
    common.add_argument("--dim", type=int)
    common.add_argument("--index", type=int)
    common.add_argument("--bs-n", dest="bs_n", type=int)
    common.add_argument("-R", "--radius", type=int)
    common.add_argument("--schreier-radius", dest="schreier_radius", type=int)
    common.add_argument("--truncation", type=int)
    common.add_argument("--leptin-radii", dest="leptin_radii", type=_int_list)
    common.add_argument("--exact", dest="mode", action="store_const", const=EXACT)
    common.add_argument("--float", dest="mode", action="store_const", const=FLOAT)
    common.add_argument("--seed", type=int)
    common.add_argument("-s", type=int)
    common.add_argument("-n", "--N", dest="N", type=int)
    common.add_argument("--kind", choices=KINDS)
    common.add_argument("--iterations", type=int)
    common.add_argument("--trials", type=int)
    common.add_argument("--window", type=_window)
    common.add_argument("--family", dest="families", action="append", choices=FAMILIES)
    common.add_argument("--function", choices=("mu", "random"))
    common.add_argument("--ball-cap", dest="ball_cap", type=int)
    common.add_argument("--graph-cap", dest="graph_cap", type=int)
    common.add_argument("--power-cap", dest="power_cap", type=int)
    common.add_argument("--out", help="output directory")
    common.add_argument("--plot", action="store_true", help="also write two-column plot data")

    p = argparse.ArgumentParser(prog="rdpair", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"rdpair {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "ball":
            sp.add_argument("--counts", action="store_true", default=False, help="print sphere sizes only")
    return p


def resolve_config(ns: argparse.Namespace) -> RunConfig:
    data = {}
    path = getattr(ns, "config", None)
    if path:
        with open(path) as fh:
            loaded = yaml.safe_load(fh) or {}
        if not isinstance(loaded, dict):
            raise ParameterOutOfRange("config file must hold a mapping")
        data.update(loaded)
    known = {f.name for f in fields(RunConfig)}
    for k, v in vars(ns).items():
        if k in known:
            data[k] = v
    cfg = RunConfig.from_dict(data)
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# commands


def _frac(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def _norm_record(nv) -> dict:
    out = {"value": nv.value}
    if isinstance(nv.squared, Fraction):
        out["squared"] = _frac(nv.squared)
    return out


class Ctx:
    def __init__(self, cfg: RunConfig, command: str):
        self.cfg = cfg
        self.command = command
        self.out = Path(cfg.out)
        self.written = []

    def json(self, name: str, payload: dict) -> Path:
        p = art.write_json(self.out / name, art.envelope(self.command, self.cfg.digest_view(), payload))
        self.written.append(p)
        return p

    def csv(self, name: str, text: str) -> Path:
        p = art.write_csv(self.out / name, text, self.cfg.digest_view(), self.command)
        self.written.append(p)
        return p

    def plot(self, report, stem: str) -> None:
        if self.cfg.plot:
            self.written.extend(art.emit_plot_data(report, self.out / stem))


def cmd_fixtures(ctx: Ctx, ns) -> int:
    rows = []
    for fid, info in CATALOG.items():
        rows.append({"id": fid, "description": info.description, "rd": info.rd, "cogrowth": info.cogrowth})
        print(f"{fid:20s} rd={str(info.rd):5s} cogrowth={info.cogrowth:11s} {info.description}")
    ctx.json("fixtures.json", {"fixtures": rows})
    return 0


def cmd_ball(ctx: Ctx, ns) -> int:
    cfg = ctx.cfg
    model, _ = build_fixture(cfg.spec)
    key = f"spheres-{model.name}-{cfg.radius}"
    spheres = art.cache_load(key)
    if spheres is None:
        ball = enumerate_ball(model, cfg.radius, cfg.ball_cap)
        spheres = [len(s) for s in ball.spheres]
        art.cache_store(key, spheres)
    sizes = list(itertools.accumulate(spheres))
    payload = {"fixture": cfg.spec.label, "group": model.name, "radius": cfg.radius,
               "sphereSizes": spheres, "ballSizes": sizes}
    try:
        gs = growth_from_counts(sizes)
        payload["growth"] = gs.as_record()
        ctx.csv("growth.csv", growth_csv(gs))
        ctx.plot(gs, "ball")
    except WindowTooSmall:
        payload["growth"] = None
    ctx.json("ball.json", payload)
    if ns.counts:
        print(",".join(str(c) for c in spheres))
    else:
        print(f"{model.name}: |B(r)| = {','.join(str(c) for c in sizes)}")
        if payload["growth"]:
            print(f"growth: {payload['growth']['classification']} ({payload['growth']['estimate']:.4f})")
    return 0


def cmd_schreier(ctx: Ctx, ns) -> int:
    cfg = ctx.cfg
    model, cosets = build_fixture(cfg.spec)
    R = cfg.schreier_radius if cfg.schreier_radius is not None else cfg.radius
    graph = build_schreier(cosets, R, cfg.graph_cap)
    doc = graph.to_json()
    doc.pop("schema")
    doc["counts"] = graph.counts()
    try:
        gs = schreier_growth(graph)
        doc["growth"] = gs.as_record()
        ctx.csv("schreier-growth.csv", growth_csv(gs))
        ctx.plot(gs, "schreier")
        verdict = f"{gs.classification} ({gs.estimate:.4f})"
    except WindowTooSmall:
        doc["growth"] = None
        verdict = "window too small to classify"
    ctx.json("schreier.json", doc)
    print(f"{cfg.spec.label}: gamma(H,r) = {','.join(str(c) for c in graph.counts())}; {verdict}")
    return 0


def _random_function(cfg: RunConfig, model, rng, signed: bool):
    ball = enumerate_ball(model, cfg.radius, cfg.ball_cap)
    f = random_signed(model, ball, rng, cfg.radius) if signed else random_positive(model, ball, rng, cfg.radius)
    return (f if cfg.mode == EXACT else f.to_float()), ball


def cmd_norms(ctx: Ctx, ns) -> int:
    cfg = ctx.cfg
    model, cosets = build_fixture(cfg.spec)
    rng = random.Random(cfg.seed)
    f, ball = _random_function(cfg, model, rng, signed=True)
    n2, n21, n1 = norm2(f), norm21(f, cosets), norm1(f)
    sob = sobolev_norm(f, cosets, ball, cfg.s)
    chain = n2 <= n21 and n21 <= n1
    ctx.json("norms.json", {
        "fixture": cfg.spec.label,
        "function": function_to_records(f),
        "norms": {"l2": _norm_record(n2), "l21": _norm_record(n21), "l1": _norm_record(n1),
                  "sobolev": _norm_record(sob)},
        "chainHolds": chain,
    })
    print(f"||f||_2 = {n2.value:.12g}  ||f||_(2,1) = {n21.value:.12g}  ||f||_1 = {n1.value:.12g}  "
          f"||f||_(s={cfg.s},(2,1)) = {sob.value:.12g}")
    return 0 if chain else 1


def cmd_conv(ctx: Ctx, ns) -> int:
    cfg = ctx.cfg
    model, cosets = build_fixture(cfg.spec)
    rng = random.Random(cfg.seed)
    f, _ = _random_function(cfg, model, rng, signed=True)
    phi, _ = _random_function(cfg, model, rng, signed=True)
    F = convolve(f, phi)
    ok = norm1(F).squared <= norm1(f).squared * norm1(phi).squared
    ctx.json("conv.json", {
        "fixture": cfg.spec.label,
        "f": function_to_records(f),
        "phi": function_to_records(phi),
        "convolution": function_to_records(F),
        "l21": _norm_record(norm21(F, cosets)),
        "l1Submultiplicative": ok,
    })
    print(f"|supp f*phi| = {len(F)}  ||f*phi||_(2,1) = {norm21(F, cosets).value:.12g}")
    return 0 if ok else 1


def _test_function(cfg: RunConfig, model, rng):
    if cfg.function == "mu":
        return GroupFunction.uniform(model, model.generator_keys)
    f, _ = _random_function(cfg, model, rng, signed=False)
    return f.to_exact()


def cmd_opnorm(ctx: Ctx, ns) -> int:
    cfg = ctx.cfg
    model, cosets = build_fixture(cfg.spec)
    f = _test_function(cfg, model, random.Random(cfg.seed))
    graph = build_schreier(cosets, cfg.truncation, cfg.graph_cap)
    br = hybrid_norm_bracket(f, cosets, graph, BracketConfig(iterations=cfg.iterations))
    ctx.json("opnorm.json", {"fixture": cfg.spec.label, "function": function_to_records(f),
                             "bracket": br.as_record()})
    print(f"||f||_h in [{br.lower!r}, {br.upper!r}]  (truncation {cfg.truncation}, {br.iterations} iterations)")
    return 0


def cmd_spectral(ctx: Ctx, ns) -> int:
    cfg = ctx.cfg
    model, cosets = build_fixture(cfg.spec)
    f = _test_function(cfg, model, random.Random(cfg.seed))
    est = spectral_radius(f, cfg.kind, cosets=cosets, N=cfg.N, s=cfg.s, cap=cfg.power_cap)
    ctx.json("spectral.json", {"fixture": cfg.spec.label, "function": function_to_records(f),
                               "estimate": est.as_record()})
    print(f"{est.kind}: tail {est.tail!r}, extrapolated {est.extrapolated!r} (n = {len(est.sequence)})")
    return 0


def cmd_walk(ctx: Ctx, ns) -> int:
    cfg = ctx.cfg
    model, cosets = build_fixture(cfg.spec)
    mu = Measure.uniform_on_generators(model)
    n_exact = cfg.N if cfg.mode == EXACT else min(cfg.N, N_EXACT)
    graph = None
    try:
        graph = build_schreier(cosets, cfg.N * max(mu.radius, 1), cfg.graph_cap)
    except CapExceeded:
        graph = None
    report = walk_spectral_radius(mu, cosets, graph, cfg.N, fixture=cfg.spec.label, cap=cfg.power_cap,
                                  n_exact=n_exact)
    checks = [return_identity_check(mu, cosets, n, cfg.power_cap) for n in range(0, min(cfg.N, N_EXACT) + 1)]
    ok = all(c.equal for c in checks) and report.cross_check.get("consistent", True)
    ctx.csv("walk.csv", report.to_csv())
    ctx.json("walk.json", {**report.as_record(),
                           "identity": [{"n": c.n, "lhs": str(c.lhs), "rhs": str(c.rhs), "equal": c.equal}
                                        for c in checks]})
    ctx.plot(report, "walk")
    print(report.to_csv(), end="")
    return 0 if ok else 1


def cmd_rdfit(ctx: Ctx, ns) -> int:
    cfg = ctx.cfg
    pair = build_fixture(cfg.spec)
    lo, hi = cfg.window
    fit = rd_exponent_fit(pair, range(lo, hi + 1), cfg.families,
                          FitConfig(seed=cfg.seed, ball_cap=min(cfg.ball_cap, 200_000),
                                    graph_cap=min(cfg.graph_cap, 1_000_000), iterations=cfg.iterations))
    ctx.json("rdfit.json", {"fixture": cfg.spec.label, "fit": fit.as_record(),
                            "expectation": expectation(cfg.spec)})
    ctx.plot(fit, "rdfit")
    print(f"{cfg.spec.label}: {fit.verdict} (dHat = {fit.d_hat:.4f}, CHat = {fit.c_hat:.4f})")
    return 0


def run_suite(cfg: RunConfig) -> SuiteReport:
    spec = cfg.spec
    pair = build_fixture(spec)
    model, cosets = pair
    report = equivalence_battery(pair, cfg.radius, cfg.seed, trials=cfg.trials, s=cfg.s, fixture=spec.label)
    report.provenance.update({"fixture": spec.label, "mode": cfg.mode, "N": cfg.N})
    mu = Measure.uniform_on_generators(model)
    ids = [return_identity_check(mu, cosets, n, cfg.power_cap) for n in range(0, min(cfg.N, 4) + 1)]
    report.checks.append(CheckRecord("return-identity", all(c.equal for c in ids),
                                     {"rows": [{"n": c.n, "lhs": str(c.lhs), "rhs": str(c.rhs)} for c in ids]}))
    if cosets.normal and cosets.section is not None:
        report.checks.append(normal_quotient_check(pair, cfg.radius, cfg.seed, trials=cfg.trials))
    report.checks.append(banach_algebra_check(pair, cfg.s, min(cfg.radius, 2), cfg.seed))
    gs_graph = build_schreier(cosets, 8, cfg.graph_cap)
    gs = schreier_growth(gs_graph)
    expected = expectation(spec)["cogrowth"]
    want = "polynomial" if expected in ("finite", "polynomial") else "exponential"
    report.checks.append(CheckRecord("schreier-growth", gs.classification == want,
                                     {"expected": expected, **gs.as_record()}))
    lep = leptin_check(pair, mu.base, cfg.leptin_radii, config=BracketConfig(iterations=cfg.iterations))
    declared = cosets.coamenable
    report.checks.append(CheckRecord("leptin-evidence", True, {"declaredCoamenable": declared, **lep}))
    return report


def cmd_suite(ctx: Ctx, ns) -> int:
    report = run_suite(ctx.cfg)
    ctx.json("suite.json", {"report": report.as_record()})
    ctx.csv("suite.csv", "check,passed\n" + "".join(f"{c.name},{str(c.passed).lower()}\n" for c in report.checks))
    for c in report.checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name}")
    return 0 if report.passed else 1


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        cfg = resolve_config(ns)
    except (RDPairError, TypeError, OSError, yaml.YAMLError) as e:
        print(f"rdpair: {e}", file=sys.stderr)
        return 2
    ctx = Ctx(cfg, ns.command)
    try:
        return HANDLERS[ns.command](ctx, ns)
    except (UnknownFixture, ParameterOutOfRange, MalformedKey, WindowTooSmall) as e:
        print(f"rdpair: {e}", file=sys.stderr)
        return 2
    except CapExceeded as e:
        ctx.json(f"{ns.command}.partial.json", {"error": type(e).__name__, "message": str(e),
                                                "completed": e.completed})
        print(f"rdpair: {type(e).__name__}: {e} (completed: {e.completed})", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
