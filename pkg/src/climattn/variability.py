"""Generation-level climate variability from annual temperature anomalies.

The core statistic summarises how often and how far a generation's anomalies
escape the typical band of its own window. For a window of n annual anomalies
x_1..x_n and band level alpha, let q_lo and q_hi be the empirical alpha and
(1 - alpha) quantiles. The deviation intensity is

    eta = (1 / K) * sum over excursions of dist(x_t),

where an excursion is any year with x_t < q_lo or x_t > q_hi (strict), K is
the number of excursions, and dist is the distance to the nearer band edge.
Windows with no excursions score zero. A unit's ancestral variability is the
plain average of eta over its generation windows.

Robustness variants swap the per-window measure: squared distances over the
same excursion set, or the window's population standard deviation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .utils import SchemaError, fmt_float, parse_float, read_csv_rows

# Rank ties between n*p and its float representation are resolved downward:
# ceil(n*p - RANK_TIE_TOL) treats e.g. 5 * 0.2 as exactly 1 even though the
# double 0.2 is slightly above 1/5.
RANK_TIE_TOL = 1e-9


class Measure(str, enum.Enum):
    QUANTILE_DEVIATION = "quantile_deviation"
    SQUARED_QUANTILE_DEVIATION = "squared_quantile_deviation"
    STD_DEV = "std_dev"


@dataclass(frozen=True)
class TemperatureSeries:
    """Annual anomaly series for one spatial unit, years strictly increasing."""

    unit_id: str
    years: np.ndarray
    anomalies: np.ndarray

    def __post_init__(self):
        years = np.asarray(self.years, dtype=int)
        anomalies = np.asarray(self.anomalies, dtype=float)
        object.__setattr__(self, "years", years)
        object.__setattr__(self, "anomalies", anomalies)
        if years.shape != anomalies.shape or years.ndim != 1:
            raise ValueError("years and anomalies must be 1-d arrays of equal length")
        if len(years) > 1 and not np.all(np.diff(years) > 0):
            raise ValueError(f"unit {self.unit_id}: years must be strictly increasing")
        if not np.all(np.isfinite(anomalies)):
            raise ValueError(f"unit {self.unit_id}: anomalies must be finite")

    @classmethod
    def from_pairs(cls, unit_id: str, pairs) -> "TemperatureSeries":
        pairs = list(pairs)
        years = np.array([y for y, _ in pairs], dtype=int)
        anomalies = np.array([a for _, a in pairs], dtype=float)
        return cls(unit_id, years, anomalies)


@dataclass(frozen=True)
class VariabilityConfig:
    """Windowing and band parameters for the variability index.

    The baseline period [period_start, period_end) is split into consecutive
    spans of span_years; a trailing partial window is dropped.
    """

    period_start: int = 1600
    period_end: int = 1920
    span_years: int = 20
    alpha: float = 0.2
    measure: Measure = Measure.QUANTILE_DEVIATION

    def __post_init__(self):
        if self.period_end <= self.period_start:
            raise ValueError("period_end must exceed period_start")
        if self.span_years < 2:
            raise ValueError("span_years must be at least 2")
        if self.period_end - self.period_start < self.span_years:
            raise ValueError("period must fit at least one full generation window")
        if not 0.0 < self.alpha < 0.5:
            raise ValueError("alpha must lie in (0, 0.5)")
        object.__setattr__(self, "measure", Measure(self.measure))

    @property
    def generations(self) -> int:
        return (self.period_end - self.period_start) // self.span_years


@dataclass(frozen=True)
class GenerationVariability:
    generation_index: int  # 1-based
    eta_hat: float
    excursion_count: int


@dataclass(frozen=True)
class AncestralVariability:
    unit_id: str
    avg_variability: float
    per_generation: tuple[GenerationVariability, ...]
    config_used: VariabilityConfig

    @property
    def generation_etas(self) -> np.ndarray:
        return np.array([g.eta_hat for g in self.per_generation])


def empirical_quantile(values, p: float) -> float:
    """Type-1 empirical quantile: smallest sorted value whose rank fraction reaches p."""
    x = np.sort(np.asarray(values, dtype=float))
    n = len(x)
    if n == 0:
        raise ValueError("empirical_quantile needs at least one value")
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    k = math.ceil(n * p - RANK_TIE_TOL)
    k = min(max(k, 1), n)
    return float(x[k - 1])


def partition_generations(series: TemperatureSeries, config: VariabilityConfig) -> list[np.ndarray]:
    """Split the baseline period into consecutive full windows of anomalies.

    Every calendar year in [period_start, period_end) must be present exactly
    once (the first gap is reported by year); years past the last full window
    are dropped.
    """
    start, end = config.period_start, config.period_end
    lo = np.searchsorted(series.years, start)
    hi = np.searchsorted(series.years, end)
    years = series.years[lo:hi]
    expected = np.arange(start, end)
    if len(years) != len(expected) or not np.array_equal(years, expected):
        present = set(years.tolist())
        for y in range(start, end):
            if y not in present:
                raise ValueError(f"unit {series.unit_id}: missing year {y} in baseline period")
        raise ValueError(f"unit {series.unit_id}: duplicate years in baseline period")
    window = series.anomalies[lo:hi]
    used = config.generations * config.span_years
    return [
        window[i : i + config.span_years]
        for i in range(0, used, config.span_years)
    ]


def deviation_intensity(values, alpha: float) -> tuple[float, int]:
    """Score one window: (eta, excursion_count) under the quantile-band measure."""
    x = np.asarray(values, dtype=float)
    if x.ndim != 1 or len(x) == 0:
        raise ValueError("deviation_intensity needs a nonempty 1-d window")
    q_lo = empirical_quantile(x, alpha)
    q_hi = empirical_quantile(x, 1.0 - alpha)
    below = x < q_lo
    above = x > q_hi
    count = int(np.count_nonzero(below | above))
    if count == 0:
        return 0.0, 0
    dist = np.where(below, q_lo - x, x - q_hi)[below | above]
    return float(np.sum(dist) / count), count


def generation_variability(values, config: VariabilityConfig, generation_index: int = 1) -> GenerationVariability:
    """One window under the configured measure.

    The squared variant averages squared band distances over the same
    excursion set; the dispersion fallback ignores the band and reports the
    population standard deviation with the full window as its count.
    """
    x = np.asarray(values, dtype=float)
    if x.ndim != 1 or len(x) == 0:
        raise ValueError("generation_variability needs a nonempty 1-d window")
    measure = config.measure
    if measure is Measure.STD_DEV:
        return GenerationVariability(generation_index, float(np.std(x)), len(x))
    if measure is Measure.QUANTILE_DEVIATION:
        eta, count = deviation_intensity(x, config.alpha)
        return GenerationVariability(generation_index, eta, count)
    q_lo = empirical_quantile(x, config.alpha)
    q_hi = empirical_quantile(x, 1.0 - config.alpha)
    below = x < q_lo
    above = x > q_hi
    count = int(np.count_nonzero(below | above))
    if count == 0:
        return GenerationVariability(generation_index, 0.0, 0)
    dist = np.where(below, q_lo - x, x - q_hi)[below | above]
    return GenerationVariability(generation_index, float(np.sum(dist**2) / count), count)


def average_variability(series: TemperatureSeries, config: VariabilityConfig) -> AncestralVariability:
    """Per-generation intensities plus their average for one unit."""
    windows = partition_generations(series, config)
    per_generation = tuple(
        generation_variability(window, config, generation_index=g + 1)
        for g, window in enumerate(windows)
    )
    avg = float(np.mean([g.eta_hat for g in per_generation]))
    return AncestralVariability(series.unit_id, avg, per_generation, config)


def attach_to_groups(
    index: dict[str, AncestralVariability], link: dict[str, str]
) -> dict[str, AncestralVariability]:
    """Map survey groups to their unit's variability via a group -> unit link table."""
    unknown = sorted(gid for gid, uid in link.items() if uid not in index)
    if unknown:
        raise KeyError(f"groups with unknown units: {unknown}")
    return {gid: index[uid] for gid, uid in link.items()}


# ---------------------------------------------------------------------------
# file formats


def read_anomalies(path: str | Path) -> list[TemperatureSeries]:
    """Read a long-format anomaly table (unit_id, year, anomaly), one series per unit."""
    rows = read_csv_rows(path, ["unit_id", "year", "anomaly"])
    by_unit: dict[str, list[tuple[int, float]]] = {}
    for i, row in enumerate(rows, start=2):
        try:
            year = int(row["year"])
        except ValueError:
            raise SchemaError(f"{path}: line {i}: field 'year' is not an integer: {row['year']!r}")
        anomaly = parse_float(row["anomaly"], path, f"line {i}", "anomaly")
        by_unit.setdefault(row["unit_id"], []).append((year, anomaly))
    series = []
    for unit_id, pairs in by_unit.items():
        pairs.sort()
        series.append(TemperatureSeries.from_pairs(unit_id, pairs))
    return series


def read_link_table(path: str | Path) -> dict[str, str]:
    rows = read_csv_rows(path, ["group_id", "unit_id"])
    link: dict[str, str] = {}
    for i, row in enumerate(rows, start=2):
        if row["group_id"] in link:
            raise SchemaError(f"{path}: line {i}: duplicate group_id {row['group_id']!r}")
        link[row["group_id"]] = row["unit_id"]
    return link


def write_index(path: str | Path, index: dict[str, AncestralVariability], generations: int) -> None:
    """Write one row per unit: average plus each generation's intensity."""
    columns = ["unit_id", "avg_variability"] + [f"g{g}_eta" for g in range(1, generations + 1)]
    with open(path, "w", newline="") as fh:
        fh.write(",".join(columns) + "\n")
        for unit_id in sorted(index):
            rec = index[unit_id]
            if len(rec.per_generation) != generations:
                raise ValueError(
                    f"unit {unit_id}: expected {generations} generations, got {len(rec.per_generation)}"
                )
            cells = [unit_id, fmt_float(rec.avg_variability)]
            cells += [fmt_float(g.eta_hat) for g in rec.per_generation]
            fh.write(",".join(cells) + "\n")
