"""Attention-share curve for the calibrated model, with thresholds marked.

Writes curve.csv, thresholds.json, and curve.svg into --out-dir. The extra
kappa variants show how the inattention region widens as information gets
more expensive.
"""

import argparse
import json
from pathlib import Path

import numpy as np

from climattn import CostSpec, PriorScaleFamily, StakesSpec, attention_curve, find_thresholds
from climattn.charts import line_chart
from climattn.utils import write_csv


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="figures")
    ap.add_argument("--theta-min", type=float, default=0.01)
    ap.add_argument("--theta-max", type=float, default=0.3)
    ap.add_argument("--points", type=int, default=400)
    ap.add_argument("--kappas", type=float, nargs="+", default=[12.0, 18.0, 24.0])
    args = ap.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stakes = StakesSpec()
    prior = PriorScaleFamily.lognormal(theta=0.05, log_sd=0.5)
    thetas = np.geomspace(args.theta_min, args.theta_max, args.points)

    series = []
    records = {}
    for kappa in args.kappas:
        cost = CostSpec(kappa=kappa)
        curve = attention_curve(stakes, prior, cost, thetas)
        th = find_thresholds(stakes, prior, cost)
        series.append((f"kappa={kappa:g}", list(thetas), [p.xi_star for p in curve]))
        records[f"kappa={kappa:g}"] = {
            "theta_low": th.theta_low,
            "theta_tilde": th.theta_tilde,
            "theta_high": th.theta_high,
        }
        write_csv(
            out / f"curve_kappa{kappa:g}.csv",
            ["theta", "xi_star", "W_bar", "L_bar"],
            [[p.theta, p.xi_star, p.w_bar, p.l_bar] for p in curve],
        )
        print(
            f"kappa={kappa:<5g} thresholds: "
            f"({th.theta_low:.6f}, {th.theta_tilde:.6f}, {th.theta_high:.6f})"
        )

    (out / "thresholds.json").write_text(json.dumps(records, indent=2, sort_keys=True) + "\n")
    line_chart(
        out / "curve.svg",
        series,
        title="attention share vs prior scale",
        x_label="theta",
        y_label="xi_star",
    )
    print(f"wrote {out}/curve.svg and per-kappa curves")


if __name__ == "__main__":
    main()
