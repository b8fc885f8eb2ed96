"""Gap between ||mu||_1 and the certified lower bound of ||mu||_h as the truncation grows.

A gap tending to 0 is what co-amenability predicts; a gap that stays put
is evidence against it.

    python scripts/leptin_scan.py --radius 10 --radius 20 --radius 40
"""

import argparse
from dataclasses import asdict, dataclass, field
from pathlib import Path

from rdpair.artifacts import envelope, write_json
from rdpair.fixtures import build_fixture
from rdpair.harmonic import GroupFunction
from rdpair.operators import BracketConfig
from rdpair.rdlab import leptin_check


@dataclass
class LeptinConfig:
    fixtures: list = field(default_factory=lambda: ["z2-zline", "f2-ker", "bs-dyadic", "bs-a", "f2-a", "zd-full"])
    radii: list = field(default_factory=lambda: [5, 10, 20])
    iterations: int = 300
    graph_cap: int = 500_000
    out: str = "results/leptin"


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--fixture", action="append", dest="fixtures")
    p.add_argument("--radius", action="append", type=int, dest="radii")
    p.add_argument("--iterations", type=int, default=LeptinConfig.iterations)
    p.add_argument("--out", default=LeptinConfig.out)
    a = p.parse_args()
    cfg = LeptinConfig(iterations=a.iterations, out=a.out)
    if a.fixtures:
        cfg.fixtures = a.fixtures
    if a.radii:
        cfg.radii = sorted(a.radii)
    cfg_view = {k: v for k, v in asdict(cfg).items() if k != "out"}
    for name in cfg.fixtures:
        pair = build_fixture(name)
        mu = GroupFunction.uniform(pair[0], pair[0].generator_keys)
        res = leptin_check(pair, mu, cfg.radii, config=BracketConfig(iterations=cfg.iterations), cap=cfg.graph_cap)
        declared = pair[1].coamenable
        write_json(Path(cfg.out) / f"{name}.json", envelope("leptin", cfg_view, {"fixture": name,
                                                                                "declaredCoamenable": declared,
                                                                                **res}))
        gaps = "  ".join(f"R={r['radius']}: {r['gap']:.3e}" for r in res["rows"])
        skipped = f"  (capped: {res['capped']})" if res["capped"] else ""
        print(f"{name:18s} coamenable={str(declared):5s} {gaps}  -> {res['verdict']}{skipped}")


if __name__ == "__main__":
    main()
