"""Command-line pipeline driver.

Subcommands: index, model solve, model sweep, simulate, regress,
folklore score, reproduce. Every run writes a manifest(config echo, seed,
input hashes, artifact version) sufficient to reproduce it byte for byte;
outputs carry no timestamps.

Exit codes: 0 success or verdict pass, 1 verdict fail, 2 input error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import copy
import json
import math
import sys
from pathlib import Path

import numpy as np
import pandas as pd

from . import __version__
from .attention import (
    BracketError,
    CostSpec,
    PriorScaleFamily,
    QuadratureError,
    StakesSpec,
    attention_curve,
    find_thresholds,
    solve,
    verify_single_trough,
)
from .charts import line_chart
from .econometrics import RegressionSpec, margins, quadratic_fit, u_shape_test
from .folklore import TermDictionary, read_catalog, score_catalog, seed_dictionary, write_scores
from .simulate import CohortConfig, GroupSpec, build_dataset, default_groups
from .utils import SchemaError, fmt_float, read_csv_rows, sha256_file, write_csv
from .variability import (
    VariabilityConfig,
    attach_to_groups,
    average_variability,
    read_anomalies,
    read_link_table,
    write_index,
)

DEFAULT_CONFIG: dict = {
    "schema_version": 1,
    "seed": 20240901,
    "variability": {
        "period_start": 1600,
        "period_end": 1920,
        "span_years": 20,
        "alpha": 0.2,
        "measure": "quantile_deviation",
    },
    "model": {
        "stakes": {"q": 0.5, "sigma_sq": 1.0, "a": 0.02, "b": 700.0},
        "prior": {"kind": "lognormal", "log_sd": 0.5, "theta": 0.05, "support": None, "weights": None},
        "cost": {"kappa": 18.0},
        "sweep": {"theta_min": 0.01, "theta_max": 10.0, "points": 500, "log_spaced": True},
    },
    "cohort": {
        "n_groups": 2000,
        "n_respondents": 5,
        "scale_min": 0.03,
        "scale_max": 0.15,
        "n_cells": 20,
        "noise_sd": 0.08,
        "response_levels": 6,
        "n_controls": 3,
        "motifs_per_generation": 25,
        "ar1": 0.0,
        "transmission_scale": 1.0,
    },
    "regression": {
        "outcome": "attention",
        "regressor": "avg_variability",
        "controls": ["ctrl_1", "ctrl_2", "ctrl_3"],
        "fe": "cell",
        "cluster": "group_id",
        "alpha": 0.05,
        "margins_points": 101,
    },
    "dictionary": None,
}


# ---------------------------------------------------------------------------
# configuration


def _merge(defaults: dict, override: dict, path: str = "") -> dict:
    out = copy.deepcopy(defaults)
    for key, value in override.items():
        here = f"{path}.{key}" if path else key
        if key not in defaults:
            raise SchemaError(f"config: unknown key {here!r}")
        if isinstance(defaults[key], dict) and defaults[key]:
            if not isinstance(value, dict):
                raise SchemaError(f"config: {here!r} must be a table")
            out[key] = _merge(defaults[key], value, here)
        else:
            out[key] = value
    return out


def load_config(path: str | None) -> dict:
    if path is None:
        return copy.deepcopy(DEFAULT_CONFIG)
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, dict):
        raise SchemaError(f"{path}: config root must be an object")
    version = raw.get("schema_version", 1)
    if version != 1:
        raise SchemaError(f"{path}: unsupported schema_version {version}")
    return _merge(DEFAULT_CONFIG, raw)


def _variability(cfg: dict) -> VariabilityConfig:
    v = cfg["variability"]
    return VariabilityConfig(
        period_start=v["period_start"],
        period_end=v["period_end"],
        span_years=v["span_years"],
        alpha=v["alpha"],
        measure=v["measure"],
    )


def _stakes(cfg: dict) -> StakesSpec:
    s = cfg["model"]["stakes"]
    return StakesSpec(q=s["q"], sigma_sq=s["sigma_sq"], a=s["a"], b=s["b"])


def _prior(cfg: dict, theta: float | None = None) -> PriorScaleFamily:
    p = cfg["model"]["prior"]
    if p["kind"] == "discrete":
        return PriorScaleFamily.discrete(
            p["theta"] if theta is None else theta, p["support"], p["weights"]
        )
    return PriorScaleFamily(
        theta=p["theta"] if theta is None else theta,
        kind=p["kind"],
        log_sd=p["log_sd"],
    )


def _cost(cfg: dict) -> CostSpec:
    return CostSpec(kappa=cfg["model"]["cost"]["kappa"])


def _cohort(cfg: dict) -> CohortConfig:
    c = cfg["cohort"]
    vc = _variability(cfg)
    return CohortConfig(
        generations=vc.generations,
        span_years=vc.span_years,
        variability_config=vc,
        noise_sd=c["noise_sd"],
        response_levels=c["response_levels"],
        seed=cfg["seed"],
        n_controls=c["n_controls"],
        motifs_per_generation=c["motifs_per_generation"],
        ar1=c["ar1"],
        transmission_scale=c["transmission_scale"],
    )


def _regression(cfg: dict) -> RegressionSpec:
    r = cfg["regression"]
    return RegressionSpec(
        outcome=r["outcome"],
        regressor=r["regressor"],
        controls=tuple(r["controls"]),
        fe=r["fe"],
        cluster=r["cluster"],
    )


# ---------------------------------------------------------------------------
# output plumbing


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n", encoding="utf-8")


def write_manifest(out_dir: Path, command: str, cfg: dict, inputs: dict, outputs: list[str], extra: dict | None = None) -> None:
    manifest = {
        "artifact": f"climattn {__version__}",
        "command": command,
        "config": cfg,
        "inputs": {str(k): sha256_file(k) for k in inputs},
        "outputs": sorted(outputs),
        "seed": cfg["seed"],
    }
    if extra:
        manifest.update(extra)
    write_json(out_dir / "manifest.json", manifest)


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _check_inputs(*paths) -> list[str]:
    found = []
    for p in paths:
        if p is None:
            continue
        if not Path(p).exists():
            raise FileNotFoundError(f"input file not found: {p}")
        found.append(str(p))
    return found


def _thresholds_record(stakes, prior, cost, curve) -> dict:
    th = find_thresholds(stakes, prior, cost)
    report = verify_single_trough([p.theta for p in curve], [p.xi_star for p in curve])
    return {
        "theta_low": th.theta_low,
        "theta_tilde": th.theta_tilde,
        "theta_high": th.theta_high,
        "is_empty": th.is_empty,
        "trough_test": {
            "passes": report.passes,
            "interval": list(report.trough_interval) if report.trough_interval else None,
            "n_points": report.n_points,
            "note": report.note,
        },
    }


def _write_curve(out: Path, curve) -> None:
    write_csv(
        out / "curve.csv",
        ["theta", "xi_star", "W_bar", "L_bar"],
        [[p.theta, p.xi_star, p.w_bar, p.l_bar] for p in curve],
    )


def _fit_payload(fit) -> dict:
    return {
        "columns": list(fit.column_names),
        "coefficients": fit.coefficients,
        "std_errors": fit.std_errors,
        "t_stats": fit.t_stats,
        "p_values": fit.p_values,
        "stars": {name: fit.star(name) for name in fit.column_names},
        "n_obs": fit.n_obs,
        "n_clusters": fit.n_clusters,
        "dof": fit.dof,
        "r_squared": fit.r_squared,
        "adj_r_squared": fit.adj_r_squared,
        "singleton_cells": fit.singleton_cells,
        "data_range": list(fit.data_range),
    }


def _fit_text(fit) -> str:
    width = max(len(n) for n in fit.column_names)
    lines = [
        f"outcome: {fit.spec.outcome}",
        f"{'column':<{width}}  {'estimate':>12}  {'std err':>12}  {'t':>9}  {'p':>9}",
    ]
    for name in fit.column_names:
        lines.append(
            f"{name:<{width}}  {fit.coefficients[name]:>12.6f}  {fit.std_errors[name]:>12.6f}"
            f"  {fit.t_stats[name]:>9.3f}  {fit.p_values[name]:>9.5f}  {fit.star(name)}"
        )
    cluster_txt = "none" if fit.n_clusters is None else str(fit.n_clusters)
    lines.append(
        f"n={fit.n_obs}  clusters={cluster_txt}  dof={fit.dof}"
        f"  R2={fit.r_squared:.4f}  adjR2={fit.adj_r_squared:.4f}"
    )
    lines.append("significance: *** p<0.01, ** p<0.05, * p<0.1, + p<0.15")
    return "\n".join(lines) + "\n"


def _ushape_payload(verdict) -> dict:
    return {
        "is_u": verdict.is_u,
        "turning_point": verdict.turning_point,
        "beta1": verdict.beta1,
        "beta2": verdict.beta2,
        "p1": verdict.p1,
        "p2": verdict.p2,
        "significant": verdict.significant,
        "turning_in_range": verdict.turning_in_range,
        "data_range": list(verdict.data_range),
    }


# ---------------------------------------------------------------------------
# subcommands


def cmd_index(args, cfg: dict) -> int:
    inputs = _check_inputs(args.anomalies, args.link, args.config)
    out = _out_dir(args)
    vc = _variability(cfg)
    series = read_anomalies(args.anomalies)
    index = {s.unit_id: average_variability(s, vc) for s in series}
    write_index(out / "index.csv", index, vc.generations)
    outputs = ["index.csv"]
    if args.link:
        link = read_link_table(args.link)
        grouped = attach_to_groups(index, link)
        write_csv(
            out / "group_index.csv",
            ["group_id", "unit_id", "avg_variability"],
            [[gid, link[gid], grouped[gid].avg_variability] for gid in sorted(grouped)],
        )
        outputs.append("group_index.csv")
    write_manifest(out, "index", cfg, inputs, outputs + ["manifest.json"])
    return 0


def cmd_model(args, cfg: dict) -> int:
    inputs = _check_inputs(args.config)
    out = _out_dir(args)
    stakes, prior, cost = _stakes(cfg), _prior(cfg), _cost(cfg)
    sweep_cfg = cfg["model"]["sweep"]
    if args.subcommand == "solve":
        thetas = [prior.theta]
    else:
        lo = args.theta_min if args.theta_min is not None else sweep_cfg["theta_min"]
        hi = args.theta_max if args.theta_max is not None else sweep_cfg["theta_max"]
        n = args.points if args.points is not None else sweep_cfg["points"]
        thetas = np.geomspace(lo, hi, n) if sweep_cfg["log_spaced"] else np.linspace(lo, hi, n)
    curve = attention_curve(stakes, prior, cost, thetas)
    _write_curve(out, curve)
    write_json(out / "thresholds.json", _thresholds_record(stakes, prior, cost, curve))
    outputs = ["curve.csv", "thresholds.json"]
    if args.subcommand == "solve":
        solution = solve(stakes, prior, cost)
        write_json(
            out / "solution.json",
            {
                "theta": solution.theta,
                "w_bar": solution.w_bar,
                "l_bar": solution.l_bar,
                "value": solution.value,
                "xi_star": solution.xi_star,
                "posterior_variance": solution.posterior_variance,
                "mutual_information": solution.mutual_information,
                "attention_cost": solution.attention_cost,
            },
        )
        outputs.append("solution.json")
    if args.svg:
        line_chart(
            out / "curve.svg",
            [("xi_star", [p.theta for p in curve], [p.xi_star for p in curve])],
            title="attention share vs prior scale",
            x_label="theta",
            y_label="xi_star",
        )
        outputs.append("curve.svg")
    write_manifest(out, f"model {args.subcommand}", cfg, inputs, outputs + ["manifest.json"])
    return 0


def _load_groups(path: str | None, cfg: dict) -> list[GroupSpec]:
    if path is None:
        c = cfg["cohort"]
        return default_groups(
            c["n_groups"],
            c["n_respondents"],
            cfg["seed"],
            scale_range=(c["scale_min"], c["scale_max"]),
            n_cells=c["n_cells"],
        )
    rows = read_csv_rows(path, ["group_id", "true_scale", "cell", "n_respondents"])
    return [
        GroupSpec(
            group_id=r["group_id"],
            true_scale=float(r["true_scale"]),
            country_year_cell=r["cell"],
            n_respondents=int(r["n_respondents"]),
        )
        for r in rows
    ]


def _write_dataset(out: Path, dataset) -> list[str]:
    ctrl_names = [c for c in dataset.respondents.columns if c.startswith("ctrl_")]
    write_csv(
        out / "respondents.csv",
        ["group_id", "cell", "avg_variability", "attention", *ctrl_names],
        dataset.respondents.values.tolist(),
    )
    write_csv(
        out / "folklore.csv",
        ["group_id", "env_motifs", "total_motifs"],
        dataset.folklore.values.tolist(),
    )
    write_csv(
        out / "groups.csv",
        ["group_id", "true_scale", "cell", "n_respondents", "theta", "xi_star"],
        dataset.groups.values.tolist(),
    )
    return ["respondents.csv", "folklore.csv", "groups.csv"]


def cmd_simulate(args, cfg: dict) -> int:
    inputs = _check_inputs(args.config, args.groups)
    out = _out_dir(args)
    dataset = build_dataset(
        _load_groups(args.groups, cfg),
        _cohort(cfg),
        _stakes(cfg),
        _prior(cfg),
        _cost(cfg),
        n_workers=args.threads,
    )
    outputs = _write_dataset(out, dataset)
    write_manifest(out, "simulate", cfg, inputs, outputs + ["manifest.json"])
    return 0


def _read_respondents(path: str) -> pd.DataFrame:
    df = pd.read_csv(path)
    if df.empty:
        raise SchemaError(f"{path}: no data rows")
    return df


def cmd_regress(args, cfg: dict) -> int:
    inputs = _check_inputs(args.data, args.config)
    out = _out_dir(args)
    df = _read_respondents(args.data)
    spec = _regression(cfg)
    needed = [spec.outcome, spec.regressor, *spec.controls]
    needed += [c for c in (spec.fe, spec.cluster) if c is not None]
    missing = [c for c in needed if c not in df.columns]
    if missing:
        raise SchemaError(f"{args.data}: line 1: missing columns {missing}")
    fit = quadratic_fit(df, spec)
    verdict = u_shape_test(fit, alpha=cfg["regression"]["alpha"])
    grid = np.linspace(fit.data_range[0], fit.data_range[1], cfg["regression"]["margins_points"])
    curve = margins(fit, grid)
    write_json(out / "fit.json", _fit_payload(fit))
    (out / "fit.txt").write_text(_fit_text(fit), encoding="utf-8")
    write_csv(
        out / "margins.csv",
        [spec.regressor, "predicted"],
        [[float(x), float(y)] for x, y in zip(curve.grid, curve.predicted)],
    )
    write_json(out / "ushape.json", _ushape_payload(verdict))
    outputs = ["fit.json", "fit.txt", "margins.csv", "ushape.json"]
    if args.svg:
        line_chart(
            out / "margins.svg",
            [("predicted", curve.grid.tolist(), curve.predicted.tolist())],
            title="predicted outcome vs regressor",
            x_label=spec.regressor,
            y_label=spec.outcome,
        )
        outputs.append("margins.svg")
    write_manifest(out, "regress", cfg, inputs, outputs + ["manifest.json"])
    return 0


def cmd_folklore(args, cfg: dict) -> int:
    inputs = _check_inputs(args.catalog, args.dict, args.config)
    out = _out_dir(args)
    catalog = read_catalog(args.catalog)
    dictionary = TermDictionary.from_file(args.dict) if args.dict else seed_dictionary()
    if cfg["dictionary"] and not args.dict:
        inputs += _check_inputs(cfg["dictionary"])
        dictionary = TermDictionary.from_file(cfg["dictionary"])
    scores = score_catalog(catalog, dictionary)
    write_scores(out / "scores.csv", scores)
    write_manifest(out, "folklore score", cfg, inputs, ["scores.csv", "manifest.json"])
    return 0


def cmd_reproduce(args, cfg: dict) -> int:
    inputs = _check_inputs(args.config)
    out = _out_dir(args)
    stakes, cost = _stakes(cfg), _cost(cfg)
    prior = _prior(cfg)
    stages: list[str] = []
    outputs: list[str] = []
    try:
        dataset = build_dataset(
            _load_groups(None, cfg), _cohort(cfg), stakes, prior, cost, n_workers=args.threads
        )
        outputs += _write_dataset(out, dataset)
        stages.append("simulate")

        spec = _regression(cfg)
        fit = quadratic_fit(dataset.respondents, spec)
        verdict = u_shape_test(fit, alpha=cfg["regression"]["alpha"])
        write_json(out / "fit.json", _fit_payload(fit))
        (out / "fit.txt").write_text(_fit_text(fit), encoding="utf-8")
        write_json(out / "ushape.json", _ushape_payload(verdict))
        outputs += ["fit.json", "fit.txt", "ushape.json"]
        stages.append("regress")

        grid = np.linspace(
            fit.data_range[0], fit.data_range[1], cfg["regression"]["margins_points"]
        )
        curve = margins(fit, grid)
        write_csv(
            out / "margins.csv",
            [spec.regressor, "predicted"],
            [[float(x), float(y)] for x, y in zip(curve.grid, curve.predicted)],
        )
        outputs.append("margins.csv")
        stages.append("margins")

        model_curve = attention_curve(stakes, prior, cost, grid[grid > 0])
        _write_curve(out, model_curve)
        thresholds = _thresholds_record(stakes, prior, cost, model_curve)
        write_json(out / "thresholds.json", thresholds)
        outputs += ["curve.csv", "thresholds.json"]
        stages.append("model")

        folk = dataset.folklore
        write_csv(
            out / "folklore_scores.csv",
            ["group_id", "env_motifs", "total_motifs", "score"],
            [
                [r.group_id, int(r.env_motifs), int(r.total_motifs), math.log1p(r.env_motifs / r.total_motifs)]
                for r in folk.itertuples()
            ],
        )
        outputs.append("folklore_scores.csv")
        stages.append("folklore")

        trough_mid = 0.5 * (thresholds["theta_low"] + thresholds["theta_high"])
        report = {
            "is_u": verdict.is_u,
            "turning_point": verdict.turning_point,
            "beta1": verdict.beta1,
            "beta2": verdict.beta2,
            "p1": verdict.p1,
            "p2": verdict.p2,
            "trough": {
                "theta_low": thresholds["theta_low"],
                "theta_tilde": thresholds["theta_tilde"],
                "theta_high": thresholds["theta_high"],
                "midpoint": trough_mid,
            },
            "n_groups": int(dataset.groups.shape[0]),
            "n_respondents": int(dataset.respondents.shape[0]),
            "stages": stages + ["report"],
        }
        write_json(out / "report.json", report)
        outputs.append("report.json")
        stages.append("report")

        if args.svg:
            line_chart(
                out / "margins.svg",
                [("predicted", curve.grid.tolist(), curve.predicted.tolist())],
                title="predicted attention vs ancestral variability",
                x_label=spec.regressor,
                y_label=spec.outcome,
            )
            outputs.append("margins.svg")
    finally:
        # manifest records progress even when a stage dies
        write_manifest(
            out, "reproduce", cfg, inputs, outputs + ["manifest.json"], extra={"stages": stages}
        )
    return 0 if verdict.is_u else 1


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="pipeline config file (JSON, schema_version 1)")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--out-dir", default="out", help="output directory (default: ./out)")
    common.add_argument("--threads", type=int, default=1, help="worker threads for group simulation")
    common.add_argument("--svg", action="store_true", help="also emit line charts as SVG")

    parser = argparse.ArgumentParser(prog="climattn", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_index = sub.add_parser("index", parents=[common], help="compute the variability index")
    p_index.add_argument("--anomalies", required=True, help="anomaly table: unit_id,year,anomaly")
    p_index.add_argument("--link", help="optional link table: group_id,unit_id")

    p_model = sub.add_parser("model", help="attention model tools")
    model_sub = p_model.add_subparsers(dest="subcommand", required=True)
    p_solve = model_sub.add_parser("solve", parents=[common], help="solve at the configured theta")
    p_sweep = model_sub.add_parser("sweep", parents=[common], help="curve over a theta grid")
    for p in (p_solve, p_sweep):
        p.set_defaults(theta_min=None, theta_max=None, points=None)
    p_sweep.add_argument("--theta-min", type=float, dest="theta_min")
    p_sweep.add_argument("--theta-max", type=float, dest="theta_max")
    p_sweep.add_argument("--points", type=int, dest="points")

    p_sim = sub.add_parser("simulate", parents=[common], help="build a synthetic cohort")
    p_sim.add_argument("--groups", help="group spec file: group_id,true_scale,cell,n_respondents")

    p_reg = sub.add_parser("regress", parents=[common], help="quadratic FE fit with clustered SEs")
    p_reg.add_argument("--data", required=True, help="respondent table (extra columns pass through)")

    p_folk = sub.add_parser("folklore", help="folklore tools")
    folk_sub = p_folk.add_subparsers(dest="subcommand", required=True)
    p_score = folk_sub.add_parser("score", parents=[common], help="score a motif catalog")
    p_score.add_argument("--catalog", required=True, help="catalog: group_id,motif_id,description")
    p_score.add_argument("--dict", help="term dictionary, one term per line (default: packaged)")

    sub.add_parser("reproduce", parents=[common], help="simulate, estimate, and test the U-shape")
    return parser


def dispatch(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.command == "index":
        return cmd_index(args, cfg)
    if args.command == "model":
        return cmd_model(args, cfg)
    if args.command == "simulate":
        return cmd_simulate(args, cfg)
    if args.command == "regress":
        return cmd_regress(args, cfg)
    if args.command == "folklore":
        return cmd_folklore(args, cfg)
    if args.command == "reproduce":
        return cmd_reproduce(args, cfg)
    raise ValueError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return dispatch(args)
    except (QuadratureError, BracketError, np.linalg.LinAlgError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except (SchemaError, FileNotFoundError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
