"""Return probabilities P_2n(H,H) and the polynomial lower bound n^(-2d) <= C rho^(-2n) P_2n.

(d, C) come from the exponent fit of the same pair; rho is bracketed by
the largest computed root and the mass of mu.

    python scripts/walk_lower_bound.py --fixture z2-zline -N 20
"""

import argparse
from dataclasses import asdict, dataclass
from pathlib import Path

from rdpair.artifacts import envelope, write_csv, write_json
from rdpair.fixtures import build_fixture
from rdpair.rdlab import rd_exponent_fit
from rdpair.schreier import build_schreier
from rdpair.walks import Measure, lower_bound_verify, walk_spectral_radius


@dataclass
class WalkConfig:
    fixture: str = "z2-zline"
    N: int = 20
    window: tuple = (4, 14)
    out: str = "results/walk"


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--fixture", default=WalkConfig.fixture)
    p.add_argument("-N", type=int, default=WalkConfig.N)
    p.add_argument("--out", default=WalkConfig.out)
    a = p.parse_args()
    cfg = WalkConfig(fixture=a.fixture, N=a.N, out=a.out)
    cfg_view = {k: v for k, v in asdict(cfg).items() if k != "out"}

    pair = build_fixture(cfg.fixture)
    model, cosets = pair
    lo, hi = cfg.window
    fit = rd_exponent_fit(pair, range(lo, hi + 1))
    mu = Measure.uniform_on_generators(model)
    graph = build_schreier(cosets, cfg.N * mu.radius)
    report = walk_spectral_radius(mu, cosets, graph, cfg.N, fixture=cfg.fixture)
    C = fit.theorem_constant(mu.radius)
    report = report.with_lower_bound(lower_bound_verify(report, fit.d_hat, C))

    out = Path(cfg.out)
    write_csv(out / f"{cfg.fixture}.walk.csv", report.to_csv(), cfg_view, "walk")
    write_json(out / f"{cfg.fixture}.walk.json", envelope("walk", cfg_view, {"fit": fit.as_record(),
                                                                              **report.as_record()}))
    print(f"{cfg.fixture}: verdict {fit.verdict}, d = {fit.d_hat:.4f}, C = {C:.4f}")
    print(f"rho in [{report.rho_lower:.6f}, {report.rho_upper:.6f}], sqrt(P_2N/P_2N-2) = {report.ratio_estimate:.6f}")
    print(f"{'n':>3s} {'P_2n':>14s} {'root':>10s} {'n^-2d':>10s} {'C rho^-2n P':>12s} holds")
    for row, p2n, root in zip(report.lower_bound_check, report.returns, report.radius_sequence):
        print(f"{row['n']:3d} {float(p2n):14.8e} {root:10.6f} {row['lhs']:10.6f} {row['rhs']:12.6f} {row['holds']}")


if __name__ == "__main__":
    main()
