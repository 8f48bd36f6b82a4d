"""End-to-end acceptance checks, one test per numbered criterion.

Each test prints a single PASS line on success; a failed assert shows up as
the usual pytest FAIL for that criterion.
"""

import json
import math
import time

import numpy as np
import pandas as pd
import pytest

import oracles
from climattn import (
    CostSpec,
    FitResult,
    Measure,
    PriorScaleFamily,
    RegressionSpec,
    StakesSpec,
    TemperatureSeries,
    VariabilityConfig,
    attention_curve,
    average_variability,
    brute_force_attention,
    cluster_vcov,
    find_thresholds,
    margins,
    optimal_attention,
    ols,
    quadratic_fit,
    simulate_folklore,
    verify_single_trough,
)
from climattn.attention import expected_stakes, stake_value
from climattn.cli import main


def _passed(n: int, detail: str) -> None:
    print(f"ACCEPTANCE {n}: PASS — {detail}")


def test_acceptance_1_closed_form_matches_brute_force():
    start = time.perf_counter()
    values = np.linspace(0.02, 50.0, 100)
    kappas = np.linspace(0.1, 25.0, 10)
    worst = 0.0
    for v in values:
        for k in kappas:
            diff = abs(optimal_attention(float(v), float(k)) - brute_force_attention(float(v), float(k)))
            worst = max(worst, diff)
    elapsed = time.perf_counter() - start
    assert worst <= 1e-6
    assert elapsed < 5.0
    _passed(1, f"max |closed form - grid search| = {worst:.2e} over 100x10 grid in {elapsed:.2f}s")


def test_acceptance_2_quadrature_against_closed_form_and_monte_carlo():
    start = time.perf_counter()
    rng = np.random.default_rng(20240902)
    worst_rel = 0.0
    worst_z = 0.0
    for theta in (0.5, 1.0, 2.0):
        for log_sd in (0.25, 0.5, 1.0):
            prior = PriorScaleFamily.lognormal(theta=theta, log_sd=log_sd)
            # hostile stake has a closed form
            stakes_l = StakesSpec(q=0.3, sigma_sq=1.7, a=0.35, b=2.1)
            _, l_bar = expected_stakes(stakes_l, prior)
            closed = 1.7 * 0.7 * 2.1 * theta**2 * math.exp(2.0 * log_sd**2)
            worst_rel = max(worst_rel, abs(l_bar - closed) / closed)
            # benign stake against brute Monte Carlo
            stakes_w = StakesSpec(q=0.8, sigma_sq=1.7, a=0.35, b=2.1)
            w_bar, _ = expected_stakes(stakes_w, prior)
            draws = 1.7 * 0.8 / (0.35 + theta * np.exp(log_sd * rng.standard_normal(1_000_000)))
            se = draws.std() / math.sqrt(draws.size)
            worst_z = max(worst_z, abs(w_bar - draws.mean()) / se)
    elapsed = time.perf_counter() - start
    assert worst_rel <= 1e-6
    assert worst_z <= 3.0
    assert elapsed < 10.0
    _passed(2, f"hostile stake rel err {worst_rel:.2e}, benign stake max z {worst_z:.2f} in {elapsed:.2f}s")


def test_acceptance_3_single_trough_over_randomized_configurations():
    start = time.perf_counter()
    thetas = np.geomspace(0.01, 10.0, 500)

    def check(stakes, prior, cost):
        curve = attention_curve(stakes, prior, cost, thetas)
        report = verify_single_trough(thetas, [p.xi_star for p in curve])
        assert report.passes is True, (stakes, prior, cost)

    # the default illustration configuration
    check(StakesSpec(), PriorScaleFamily.lognormal(theta=0.05, log_sd=0.5), CostSpec())

    rng = np.random.default_rng(20240903)
    for i in range(200):
        stakes = StakesSpec(
            q=float(rng.uniform(0.02, 0.98)),
            sigma_sq=float(rng.uniform(0.2, 5.0)),
            a=float(np.exp(rng.uniform(math.log(0.05), math.log(5.0)))),
            b=float(np.exp(rng.uniform(math.log(0.05), math.log(50.0)))),
        )
        cost = CostSpec(kappa=float(rng.uniform(0.05, 10.0)))
        kind = ("lognormal", "point_mass", "discrete")[i % 3]
        if kind == "lognormal":
            prior = PriorScaleFamily.lognormal(theta=1.0, log_sd=float(rng.uniform(0.1, 1.2)))
        elif kind == "point_mass":
            prior = PriorScaleFamily.point_mass(theta=1.0)
        else:
            support = rng.uniform(0.2, 3.0, size=int(rng.integers(2, 6)))
            weights = rng.uniform(0.1, 1.0, size=support.size)
            prior = PriorScaleFamily.discrete(1.0, support, weights / weights.sum())
        check(stakes, prior, cost)
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0
    _passed(3, f"single trough on the default and 200 random configurations in {elapsed:.2f}s")


def test_acceptance_4_index_matches_bruteforce_recomputation():
    start = time.perf_counter()
    rng = np.random.default_rng(888)
    series_bank = []
    for i in range(50):
        values = rng.normal(0.0, 0.1, size=320)
        if i % 5 == 0:
            values = np.round(values, 2)  # heavy ties
        series_bank.append(values)
    worst = 0.0
    for alpha in (0.1, 0.2, 0.3):
        for span in (20, 30, 40, 50):
            for measure in Measure:
                cfg = VariabilityConfig(span_years=span, alpha=alpha, measure=measure)
                for i, values in enumerate(series_bank):
                    series = TemperatureSeries(f"s{i}", np.arange(1600, 1920), values)
                    record = average_variability(series, cfg)
                    o_avg, o_etas = oracles.series_average(values, span, alpha, measure.value)
                    worst = max(worst, abs(record.avg_variability - o_avg))
                    worst = max(worst, float(np.max(np.abs(record.generation_etas - o_etas))))
    elapsed = time.perf_counter() - start
    assert worst <= 1e-12
    assert elapsed < 10.0
    _passed(4, f"max |index - oracle| = {worst:.2e} over 50 series x 3 alphas x 4 spans x 3 measures in {elapsed:.2f}s")


def test_acceptance_5_end_to_end_u_shape(tmp_path):
    start = time.perf_counter()
    out = tmp_path / "rep"
    code = main(["reproduce", "--out-dir", str(out), "--threads", "4"])
    elapsed = time.perf_counter() - start
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    fit = json.loads((out / "fit.json").read_text())
    assert report["n_respondents"] == 10_000
    assert report["beta1"] < 0 < report["beta2"]
    assert abs(fit["t_stats"]["avg_variability"]) > 2.58
    assert abs(fit["t_stats"]["avg_variability_sq"]) > 2.58
    midpoint = report["trough"]["midpoint"]
    deviation = abs(report["turning_point"] - midpoint) / midpoint
    assert deviation <= 0.10
    assert elapsed < 120.0
    _passed(5, f"default reproduce: turning point off trough midpoint by {100 * deviation:.2f}% in {elapsed:.1f}s")


def test_acceptance_6_published_scale_arithmetic():
    spec = RegressionSpec()
    names = (spec.regressor, spec.sq_term)
    fit = FitResult(
        spec=spec,
        column_names=names,
        coefficients={names[0]: -9.877, names[1]: 111.767},
        std_errors={names[0]: 1.0, names[1]: 10.0},
        t_stats={names[0]: -9.877, names[1]: 11.1767},
        p_values={names[0]: 1e-6, names[1]: 1e-6},
        vcov=np.eye(2),
        n_obs=1000,
        n_clusters=200,
        dof=199,
        r_squared=0.5,
        adj_r_squared=0.5,
        sample_means={"attention": 0.704, names[0]: 0.054, names[1]: 0.0036},
        data_range=(0.015, 0.093),
    )
    curve = margins(fit, np.linspace(0.015, 0.093, 79))
    turning = curve.turning_point
    assert turning == pytest.approx(0.0442, abs=5e-4)
    assert 0.015 < turning < 0.093
    drop = margins(fit, [0.02]).predicted[0] - margins(fit, [0.01]).predicted[0]
    fraction = abs(drop) / 0.704
    assert fraction == pytest.approx(0.09, abs=0.01)
    _passed(6, f"turning point {turning:.6f}, 0.01->0.02 drop = {100 * fraction:.2f}% of the mean outcome")


@pytest.mark.filterwarnings("ignore:.*single observation")
def test_acceptance_7_econometric_oracles():
    rng = np.random.default_rng(20240904)
    # FWL: demeaned slopes equal full dummy regression slopes
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(30, 200))
        n_cells = int(rng.integers(2, 10))
        cells = rng.integers(0, n_cells, size=n).astype(str)
        x = rng.uniform(0, 0.2, n)
        ctrl = rng.normal(0, 1, n)
        y = 1 - 9 * x + 100 * x**2 + 0.5 * ctrl + rng.normal(0, 0.1, n)
        y += np.array([float(c) for c in cells])
        df = pd.DataFrame({"attention": y, "avg_variability": x, "ctrl_1": ctrl, "cell": cells})
        fit = quadratic_fit(df, RegressionSpec(controls=("ctrl_1",), fe="cell"))
        slopes = oracles.dummy_ols(
            np.column_stack([x, x**2, ctrl]), y, cells
        )
        got = [fit.coefficients[c] for c in ("avg_variability", "avg_variability_sq", "ctrl_1")]
        worst = max(worst, float(np.max(np.abs(np.array(got) - slopes))))
    assert worst <= 1e-8

    # singleton clusters reduce CR1 to HC1
    n = 120
    X = np.column_stack([np.ones(n), rng.normal(0, 1, n)])
    y = X @ np.array([0.5, 2.0]) + rng.normal(0, 1, n) * (1 + np.abs(X[:, 1]))
    _, resid = ols(X, y)
    cr1 = cluster_vcov(X, resid, np.arange(n))
    hc1 = oracles.hc1_vcov(X, resid)
    hc1_gap = float(np.max(np.abs(cr1 - hc1)))
    assert hc1_gap <= 1e-12

    # hand-computed two-cluster sandwich
    X = np.array([[1.0, 0.0], [1.0, 1.0], [1.0, 2.0], [1.0, 3.0]])
    beta, resid = ols(X, np.array([0.0, 1.0, 1.0, 3.0]))
    vcov = cluster_vcov(X, resid, ["A", "A", "B", "B"])
    hand = np.array([[0.135, -0.045], [-0.045, 0.015]])
    hand_gap = float(np.max(np.abs(vcov - hand)))
    assert hand_gap <= 1e-12
    _passed(7, f"FWL gap {worst:.1e}; CR1 vs HC1 gap {hc1_gap:.1e}; hand sandwich gap {hand_gap:.1e}")


def test_acceptance_8_folklore_concentration_and_trough(default_model):
    stakes, prior, cost = default_model

    def xi_at(theta: float) -> float:
        return optimal_attention(stake_value(stakes, prior.with_theta(theta)), cost.kappa)

    # 10^4 motifs per group: score concentrates at ln(1 + xi*)
    thetas = np.geomspace(0.01, 0.3, 20)
    worst = 0.0
    for i, theta in enumerate(thetas):
        env, total = simulate_folklore([theta] * 16, stakes, prior, cost, 625, seed=1000 + i)
        assert total == 10_000
        score = math.log1p(env / total)
        worst = max(worst, abs(score - math.log1p(xi_at(float(theta)))))
    assert worst <= 0.01

    # expected score over constant climate scales is single-troughed
    grid = np.geomspace(0.01, 0.4, 15)
    scores = []
    for i, theta in enumerate(grid):
        env, total = simulate_folklore([theta] * 16, stakes, prior, cost, 6250, seed=2000 + i)
        scores.append(math.log1p(env / total))
    report = verify_single_trough(grid, scores, tol=0.004)
    assert report.passes is True
    lo, hi = report.trough_interval
    th = find_thresholds(stakes, prior, cost)
    assert lo <= th.theta_tilde <= hi
    _passed(8, f"max |score - ln(1 + xi*)| = {worst:.4f} at 1e4 motifs; scale curve single-troughed")


def test_acceptance_9_reproduce_is_byte_identical(tmp_path):
    def run_into(name: str) -> dict[str, bytes]:
        out = tmp_path / name
        assert main(["reproduce", "--out-dir", str(out), "--threads", "4"]) == 0
        return {p.name: p.read_bytes() for p in sorted(out.iterdir()) if p.is_file()}

    first = run_into("r1")
    second = run_into("r2")
    assert first.keys() == second.keys()
    mismatched = [name for name in first if first[name] != second[name]]
    assert mismatched == []
    _passed(9, f"{len(first)} files byte-identical across repeated runs, manifest included")
