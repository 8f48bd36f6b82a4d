"""Synthetic cohorts: ancestral climate, transmitted priors, survey responses.

Each group gets an annual anomaly history, its generations are scored by the
variability index, and the sample average of the generation intensities
becomes the prior scale theta handed to the attention model. Respondents
report the model's attention share plus Gaussian noise, snapped to a survey
grid of equally spaced levels on [0, 1]. Folklore accumulates per generation:
every generation contributes a fixed number of motifs, each environmental
independently with probability xi*(theta up to that generation).

Groups are simulated independently under per-group seeds derived from the
cohort seed and a hash of the group id, so results do not depend on execution
order; assembled tables are sorted by group id.
"""

from __future__ import annotations

import math
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .attention import CostSpec, PriorScaleFamily, StakesSpec, optimal_attention, stake_value
from .variability import TemperatureSeries, VariabilityConfig, average_variability


@dataclass(frozen=True)
class GroupSpec:
    group_id: str
    true_scale: float
    country_year_cell: str
    n_respondents: int = 1

    def __post_init__(self):
        if not (self.true_scale > 0 and math.isfinite(self.true_scale)):
            raise ValueError(f"group {self.group_id}: true_scale must be positive and finite")
        if self.n_respondents < 1:
            raise ValueError(f"group {self.group_id}: n_respondents must be >= 1")


@dataclass(frozen=True)
class CohortConfig:
    generations: int = 16
    span_years: int = 20
    variability_config: VariabilityConfig = field(default_factory=VariabilityConfig)
    noise_sd: float = 0.08
    response_levels: int = 6
    seed: int = 20240901
    n_controls: int = 3
    motifs_per_generation: int = 25
    ar1: float = 0.0
    transmission_scale: float = 1.0  # multiplies xi* before noise; 1 = faithful transmission

    def __post_init__(self):
        if self.generations < 1:
            raise ValueError("generations must be >= 1")
        if self.response_levels < 2:
            raise ValueError("response_levels must be >= 2")
        if self.noise_sd < 0:
            raise ValueError("noise_sd must be nonnegative")
        if not 0.0 <= self.ar1 < 1.0:
            raise ValueError("ar1 must lie in [0, 1)")
        if self.transmission_scale <= 0:
            raise ValueError("transmission_scale must be positive")
        vc = self.variability_config
        if vc.span_years != self.span_years or vc.generations != self.generations:
            raise ValueError(
                "variability_config must cover generations x span_years "
                f"(got {vc.generations} x {vc.span_years}, "
                f"expected {self.generations} x {self.span_years})"
            )


@dataclass(frozen=True)
class SyntheticDataset:
    respondents: pd.DataFrame
    folklore: pd.DataFrame
    groups: pd.DataFrame


def group_seed(seed: int, group_id: str) -> np.random.SeedSequence:
    # crc32 keeps the stream split stable across platforms and runs
    return np.random.SeedSequence((seed, zlib.crc32(group_id.encode("utf-8"))))


def simulate_climate(
    true_scale: float,
    years: int,
    seed,
    unit_id: str = "sim",
    start_year: int = 1600,
    ar1: float = 0.0,
) -> TemperatureSeries:
    """Annual anomalies, iid N(0, true_scale) by default.

    ar1 > 0 switches to a stationary first-order autoregression with the same
    marginal standard deviation.
    """
    if true_scale <= 0:
        raise ValueError("true_scale must be positive")
    if years < 1:
        raise ValueError("years must be >= 1")
    rng = np.random.default_rng(seed)
    if ar1 == 0.0:
        anomalies = rng.normal(0.0, true_scale, size=years)
    else:
        innov = rng.normal(0.0, true_scale * math.sqrt(1.0 - ar1**2), size=years)
        anomalies = np.empty(years)
        anomalies[0] = rng.normal(0.0, true_scale)
        for t in range(1, years):
            anomalies[t] = ar1 * anomalies[t - 1] + innov[t]
    return TemperatureSeries(unit_id, np.arange(start_year, start_year + years), anomalies)


def transmit_prior(eta_hats) -> float:
    """Prior scale from ancestral generations: the plain average of intensities."""
    etas = np.asarray(eta_hats, dtype=float)
    if etas.size == 0:
        raise ValueError("transmit_prior needs at least one generation")
    return float(np.mean(etas))


def snap_response(value: float, levels: int) -> float:
    """Clamp to [0, 1] and snap to the nearest of levels grid points; ties round up."""
    v = min(max(value, 0.0), 1.0)
    k = math.floor(v * (levels - 1) + 0.5)
    return k / (levels - 1)


def simulate_response(
    theta: float,
    stakes: StakesSpec,
    prior: PriorScaleFamily,
    cost: CostSpec,
    noise_sd: float,
    response_levels: int,
    seed,
    transmission_scale: float = 1.0,
) -> float:
    if theta <= 0:
        raise ValueError("theta must be positive")
    rng = np.random.default_rng(seed)
    xi = optimal_attention(stake_value(stakes, prior.with_theta(theta)), cost.kappa)
    return snap_response(transmission_scale * xi + rng.normal(0.0, noise_sd), response_levels)


def simulate_folklore(
    theta_path,
    stakes: StakesSpec,
    prior: PriorScaleFamily,
    cost: CostSpec,
    motifs_per_generation: int,
    seed,
) -> tuple[int, int]:
    """Accumulate motif counts along a theta path; returns (env, total).

    seed is anything numpy's default_rng accepts, including a live Generator.
    """
    if motifs_per_generation < 1:
        raise ValueError("motifs_per_generation must be >= 1")
    rng = np.random.default_rng(seed)
    env = 0
    total = 0
    for theta in theta_path:
        xi = optimal_attention(stake_value(stakes, prior.with_theta(float(theta))), cost.kappa)
        env += int(rng.binomial(motifs_per_generation, xi))
        total += motifs_per_generation
    return env, total


def _one_group(group: GroupSpec, config: CohortConfig, stakes, prior, cost):
    rng = np.random.default_rng(group_seed(config.seed, group.group_id))
    vc = config.variability_config
    series = simulate_climate(
        group.true_scale,
        config.generations * config.span_years,
        rng,
        unit_id=group.group_id,
        start_year=vc.period_start,
        ar1=config.ar1,
    )
    record = average_variability(series, vc)
    theta = transmit_prior(record.generation_etas)
    xi = optimal_attention(stake_value(stakes, prior.with_theta(theta)), cost.kappa)

    rows = []
    for _ in range(group.n_respondents):
        noise = rng.normal(0.0, config.noise_sd)
        controls = rng.standard_normal(config.n_controls)
        attention = snap_response(
            config.transmission_scale * xi + noise, config.response_levels
        )
        rows.append(
            [group.group_id, group.country_year_cell, theta, attention, *controls.tolist()]
        )

    # ancestors act on the history known to them: theta up to each generation
    theta_path = np.cumsum(record.generation_etas) / np.arange(1, config.generations + 1)
    theta_path = np.maximum(theta_path, 1e-12)  # prior scale must stay positive
    env, total = simulate_folklore(
        theta_path, stakes, prior, cost, config.motifs_per_generation, rng
    )
    return {
        "group_id": group.group_id,
        "rows": rows,
        "env": env,
        "total": total,
        "theta": theta,
        "xi": xi,
        "cell": group.country_year_cell,
        "true_scale": group.true_scale,
        "n_respondents": group.n_respondents,
    }


def build_dataset(
    groups,
    config: CohortConfig,
    stakes: StakesSpec,
    prior: PriorScaleFamily,
    cost: CostSpec,
    n_workers: int = 1,
) -> SyntheticDataset:
    """Simulate every group and assemble flat tables, sorted by group id."""
    groups = list(groups)
    seen = set()
    for g in groups:
        if g.group_id in seen:
            raise ValueError(f"duplicate group_id {g.group_id!r}")
        seen.add(g.group_id)
    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(lambda g: _one_group(g, config, stakes, prior, cost), groups))
    else:
        results = [_one_group(g, config, stakes, prior, cost) for g in groups]
    results.sort(key=lambda r: r["group_id"])

    ctrl_names = [f"ctrl_{j}" for j in range(1, config.n_controls + 1)]
    respondent_rows = [row for r in results for row in r["rows"]]
    respondents = pd.DataFrame(
        respondent_rows, columns=["group_id", "cell", "avg_variability", "attention", *ctrl_names]
    )
    folklore = pd.DataFrame(
        [[r["group_id"], r["env"], r["total"]] for r in results],
        columns=["group_id", "env_motifs", "total_motifs"],
    )
    group_table = pd.DataFrame(
        [
            [r["group_id"], r["true_scale"], r["cell"], r["n_respondents"], r["theta"], r["xi"]]
            for r in results
        ],
        columns=["group_id", "true_scale", "cell", "n_respondents", "theta", "xi_star"],
    )
    return SyntheticDataset(respondents, folklore, group_table)


def default_groups(
    n_groups: int,
    n_respondents: int,
    seed: int,
    scale_range: tuple[float, float] = (0.03, 0.15),
    n_cells: int = 20,
) -> list[GroupSpec]:
    """Convenience cohort: scales uniform over scale_range, cells round-robin."""
    rng = np.random.default_rng(np.random.SeedSequence((seed, 0xC0)))
    scales = rng.uniform(scale_range[0], scale_range[1], size=n_groups)
    width = len(str(n_groups - 1))
    return [
        GroupSpec(
            group_id=f"g{idx:0{width}d}",
            true_scale=float(scales[idx]),
            country_year_cell=f"cell{idx % n_cells:02d}",
            n_respondents=n_respondents,
        )
        for idx in range(n_groups)
    ]
