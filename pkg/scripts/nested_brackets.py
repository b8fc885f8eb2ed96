"""Hybrid operator norms along a chain of nested subgroups, recorded without asserting an order.

On D8 with {e} <= <f> <= D8 the norm ||f||_h is exact (dense extreme-point
oracle), so each random signed f gives three numbers.  For positive f they
coincide with the quasi-regular operator norms; for signed f nothing forces
them to be monotone along the chain, and the script only counts what it sees.

    python scripts/nested_brackets.py --samples 200
"""

import argparse
import random
from dataclasses import asdict, dataclass
from pathlib import Path

from rdpair import groups as grp
from rdpair.artifacts import envelope, write_json
from rdpair.balls import enumerate_ball
from rdpair.fixtures import build_fixture
from rdpair.harmonic import function_to_records, random_signed
from rdpair.operators import dense_hybrid_norm


@dataclass
class NestedConfig:
    samples: int = 200
    radius: int = 3
    seed: int = 0
    out: str = "results/nested"


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--samples", type=int, default=NestedConfig.samples)
    p.add_argument("--seed", type=int, default=NestedConfig.seed)
    p.add_argument("--out", default=NestedConfig.out)
    a = p.parse_args()
    cfg = NestedConfig(samples=a.samples, seed=a.seed, out=a.out)

    model, flip = build_fixture("d8-flip")
    chain = [("{e}", grp.restrict_trivially(model)), ("<f>", flip), ("D8", grp.whole_group(model))]
    ball = enumerate_ball(model, cfg.radius)
    rng = random.Random(cfg.seed)
    rows = []
    counts = {"increasing": 0, "decreasing": 0, "neither": 0}
    for _ in range(cfg.samples):
        f = random_signed(model, ball, rng, cfg.radius, max_support=6)
        vals = [dense_hybrid_norm(f, c) for _, c in chain]
        tol = 1e-12 * max(vals)
        if all(x <= y + tol for x, y in zip(vals, vals[1:])):
            counts["increasing"] += 1
        elif all(x >= y - tol for x, y in zip(vals, vals[1:])):
            counts["decreasing"] += 1
        else:
            counts["neither"] += 1
        rows.append({"f": function_to_records(f), "norms": dict(zip([n for n, _ in chain], vals))})
    cfg_view = {k: v for k, v in asdict(cfg).items() if k != "out"}
    write_json(Path(cfg.out) / "d8-chain.json", envelope("nested", cfg_view, {"chain": [n for n, _ in chain],
                                                                               "counts": counts, "rows": rows}))
    print(f"D8 chain {{e}} <= <f> <= D8, {cfg.samples} signed f: {counts}")


if __name__ == "__main__":
    main()
