"""Environmental-motif share in folklore as a function of climate scale.

Holds the prior scale fixed per run (no estimation noise) and lets the
motif process run long enough that the binomial share concentrates, so the
plotted curve is the transmission channel in isolation: log(1 + env/total)
against theta, alongside log1p of the attention share it should track.
"""

import argparse
import math
from pathlib import Path

import numpy as np

from climattn import (
    CostSpec,
    PriorScaleFamily,
    StakesSpec,
    expected_stakes,
    optimal_attention,
    simulate_folklore,
)
from climattn.charts import line_chart
from climattn.utils import write_csv


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="figures")
    ap.add_argument("--points", type=int, default=25)
    ap.add_argument("--generations", type=int, default=16)
    ap.add_argument("--motifs", type=int, default=2000, help="motifs per generation")
    ap.add_argument("--seed", type=int, default=20240901)
    args = ap.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stakes, cost = StakesSpec(), CostSpec()
    thetas = np.geomspace(0.01, 0.4, args.points)

    rows = []
    for i, theta in enumerate(thetas):
        prior = PriorScaleFamily.lognormal(theta, 0.5)
        w_bar, l_bar = expected_stakes(stakes, prior)
        xi = optimal_attention(w_bar + l_bar, cost.kappa)
        env, total = simulate_folklore(
            [theta] * args.generations, stakes, prior, cost, args.motifs, (args.seed, i)
        )
        rows.append([theta, xi, env, total, math.log1p(env / total), math.log1p(xi)])
        print(f"theta={theta:.4f}  xi*={xi:.4f}  env/total={env}/{total}  "
              f"score={rows[-1][4]:.4f}")

    write_csv(
        out / "folklore_curve.csv",
        ["theta", "xi_star", "env_motifs", "total_motifs", "score", "log1p_xi"],
        rows,
    )
    line_chart(
        out / "folklore_curve.svg",
        [
            ("log1p(env share)", [r[0] for r in rows], [r[4] for r in rows]),
            ("log1p(xi_star)", [r[0] for r in rows], [r[5] for r in rows]),
        ],
        title="folklore environmental share vs climate scale",
        x_label="theta",
        y_label="score",
    )
    print(f"wrote {out}/folklore_curve.csv and folklore_curve.svg")


if __name__ == "__main__":
    main()
