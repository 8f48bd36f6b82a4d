"""Fixed-effects quadratic regression with cluster-robust inference.

The target specification regresses a response on a variability index, its
square, and controls, absorbing cell fixed effects by within-demeaning and
clustering standard errors on groups. Estimation is ordinary least squares on
the demeaned design; the sandwich variance uses the CR1 small-sample factor
G / (G - 1) * (N - 1) / (N - K) with K the number of regression columns, so
with singleton clusters it reproduces HC1 exactly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy import linalg, stats

RANK_RTOL = 1e-10

STAR_LEVELS = ((0.01, "***"), (0.05, "**"), (0.10, "*"), (0.15, "+"))


def stars(p: float) -> str:
    for level, mark in STAR_LEVELS:
        if p < level:
            return mark
    return ""


@dataclass(frozen=True)
class RegressionSpec:
    outcome: str = "attention"
    regressor: str = "avg_variability"
    controls: tuple[str, ...] = ()
    fe: str | None = None
    cluster: str | None = None

    @property
    def sq_term(self) -> str:
        return f"{self.regressor}_sq"


@dataclass(frozen=True)
class FitResult:
    spec: RegressionSpec
    column_names: tuple[str, ...]
    coefficients: dict[str, float]
    std_errors: dict[str, float]
    t_stats: dict[str, float]
    p_values: dict[str, float]
    vcov: np.ndarray
    n_obs: int
    n_clusters: int | None
    dof: int
    r_squared: float
    adj_r_squared: float
    sample_means: dict[str, float]
    data_range: tuple[float, float]
    singleton_cells: int = 0

    def star(self, name: str) -> str:
        return stars(self.p_values[name])


@dataclass(frozen=True)
class MarginsCurve:
    grid: np.ndarray
    predicted: np.ndarray
    turning_point: float | None = None  # absent when the square term is not positive
    label: str = ""


@dataclass(frozen=True)
class UShapeReport:
    turning_point: float | None
    beta1: float
    beta2: float
    p1: float
    p2: float
    significant: bool
    turning_in_range: bool
    data_range: tuple[float, float]
    is_u: bool


def within_transform(data: pd.DataFrame, fe: str, columns: list[str]) -> tuple[pd.DataFrame, int]:
    """Demean columns within fixed-effect cells.

    Returns the transformed copy and the number of single-observation cells,
    whose rows become exactly zero and carry no information.
    """
    out = data.copy()
    grouped = data.groupby(fe, sort=False)
    out[columns] = data[columns] - grouped[columns].transform("mean")
    sizes = grouped.size()
    singletons = int((sizes == 1).sum())
    if singletons:
        warnings.warn(f"{singletons} fixed-effect cells have a single observation")
    return out, singletons


def ols(X: np.ndarray, y: np.ndarray, column_names: tuple[str, ...] | None = None):
    """Least squares via SVD with an explicit rank check.

    Raises with the names of dependent columns when the design is rank
    deficient beyond a relative tolerance of RANK_RTOL.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    svals = np.linalg.svd(X, compute_uv=False)
    if svals[-1] <= RANK_RTOL * svals[0]:
        names = column_names or tuple(f"x{j}" for j in range(X.shape[1]))
        rank = int(np.sum(svals > RANK_RTOL * svals[0]))
        _, _, pivots = linalg.qr(X, mode="economic", pivoting=True)
        bad = sorted(names[j] for j in pivots[rank:])
        raise ValueError(f"design matrix is rank deficient; dependent columns: {bad}")
    beta, _, _, _ = np.linalg.lstsq(X, y, rcond=None)
    return beta, y - X @ beta


def classical_vcov(X: np.ndarray, resid: np.ndarray, dof: int) -> np.ndarray:
    sigma_sq = float(resid @ resid) / dof
    return sigma_sq * np.linalg.inv(X.T @ X)


def cluster_vcov(X: np.ndarray, resid: np.ndarray, clusters) -> np.ndarray:
    """CR1 sandwich: bread (X'X)^-1, meat from per-cluster score sums."""
    X = np.asarray(X, dtype=float)
    resid = np.asarray(resid, dtype=float)
    codes, uniques = pd.factorize(np.asarray(clusters))
    n_clusters = len(uniques)
    n, k = X.shape
    if n_clusters < 2:
        raise ValueError("cluster variance needs at least two clusters")
    if n <= k:
        raise ValueError("more columns than observations")
    scores = np.zeros((n_clusters, k))
    np.add.at(scores, codes, X * resid[:, None])
    bread = np.linalg.inv(X.T @ X)
    meat = scores.T @ scores
    factor = (n_clusters / (n_clusters - 1.0)) * ((n - 1.0) / (n - k))
    return factor * bread @ meat @ bread


def quadratic_fit(data: pd.DataFrame, spec: RegressionSpec) -> FitResult:
    """Fit outcome ~ regressor + regressor^2 + controls with optional FE and clustering."""
    df = data.copy()
    df[spec.sq_term] = df[spec.regressor] ** 2
    x_names = [spec.regressor, spec.sq_term, *spec.controls]
    needed = [spec.outcome, *x_names]
    for name in needed:
        if name not in df.columns and name != spec.sq_term:
            raise KeyError(f"column {name!r} not in data")
    sample_means = {name: float(df[name].mean()) for name in needed}
    data_range = (float(df[spec.regressor].min()), float(df[spec.regressor].max()))
    y_raw = df[spec.outcome].to_numpy(dtype=float)

    singletons = 0
    n_cells = 0
    if spec.fe is not None:
        n_cells = df[spec.fe].nunique()
        df, singletons = within_transform(df, spec.fe, needed)
        names = tuple(x_names)
        X = df[x_names].to_numpy(dtype=float)
    else:
        names = ("const", *x_names)
        X = np.column_stack([np.ones(len(df)), df[x_names].to_numpy(dtype=float)])
    y = df[spec.outcome].to_numpy(dtype=float)

    beta, resid = ols(X, y, names)
    n, k = X.shape
    # count absorbed cell means as parameters, matching the dummy regression
    k_total = k + n_cells if spec.fe is not None else k
    if spec.cluster is not None:
        clusters = data[spec.cluster].to_numpy()
        vcov = cluster_vcov(X, resid, clusters)
        n_clusters = int(pd.factorize(clusters)[1].size)
        dof = n_clusters - 1
    else:
        vcov = classical_vcov(X, resid, n - k_total)
        n_clusters = None
        dof = n - k_total

    se = np.sqrt(np.diag(vcov))
    t = beta / se
    p = 2.0 * stats.t.sf(np.abs(t), dof)
    ss_res = float(resid @ resid)
    ss_tot = float(np.sum((y_raw - y_raw.mean()) ** 2))
    r_sq = 1.0 - ss_res / ss_tot
    adj = 1.0 - (1.0 - r_sq) * (n - 1.0) / (n - k_total)
    return FitResult(
        spec=spec,
        column_names=names,
        coefficients=dict(zip(names, beta.tolist())),
        std_errors=dict(zip(names, se.tolist())),
        t_stats=dict(zip(names, t.tolist())),
        p_values=dict(zip(names, p.tolist())),
        vcov=vcov,
        n_obs=n,
        n_clusters=n_clusters,
        dof=dof,
        r_squared=r_sq,
        adj_r_squared=adj,
        sample_means=sample_means,
        data_range=data_range,
        singleton_cells=singletons,
    )


def margins(fit: FitResult, grid, held_at: dict[str, float] | None = None, label: str = "") -> MarginsCurve:
    """Predicted outcome along the regressor grid, controls held at sample means.

    Predictions are anchored at the estimation-sample means, which matches the
    intercept (or average fixed effect) implied by the fit:
    yhat(g) = mean(y) + sum_j beta_j * (f_j(g) - mean(f_j)).
    """
    grid = np.asarray(grid, dtype=float)
    spec = fit.spec
    b1 = fit.coefficients[spec.regressor]
    b2 = fit.coefficients[spec.sq_term]
    base = fit.sample_means[spec.outcome]
    base -= b1 * fit.sample_means[spec.regressor] + b2 * fit.sample_means[spec.sq_term]
    for name in spec.controls:
        value = fit.sample_means[name] if held_at is None else held_at.get(name, fit.sample_means[name])
        base += fit.coefficients[name] * (value - fit.sample_means[name])
    turning = -b1 / (2.0 * b2) if b2 > 0 else None
    return MarginsCurve(grid, base + b1 * grid + b2 * grid**2, turning, label)


def normalized_margins(fits: tuple[FitResult, FitResult], grid) -> tuple[MarginsCurve, MarginsCurve]:
    """Margins for two fits on a shared grid, each min-max scaled to [0, 1].

    Scaling per curve aligns both minima at zero and is invariant to positive
    affine transforms of either curve's level, so shapes compare across
    samples with different outcome scales.
    """
    out = []
    for fit in fits:
        if fit.coefficients[fit.spec.sq_term] <= 0:
            raise ValueError("normalized margins need a positive square term")
        curve = margins(fit, grid, label=fit.spec.outcome)
        lo = float(np.min(curve.predicted))
        span = float(np.max(curve.predicted)) - lo
        if span == 0:
            raise ValueError("flat margins curve cannot be normalized")
        out.append(MarginsCurve(curve.grid, (curve.predicted - lo) / span, curve.turning_point, curve.label))
    return out[0], out[1]


def u_shape_test(fit: FitResult, data_range: tuple[float, float] | None = None, alpha: float = 0.05) -> UShapeReport:
    """U-shape verdict: falling then rising, both terms significant, turning interior."""
    spec = fit.spec
    b1 = fit.coefficients[spec.regressor]
    b2 = fit.coefficients[spec.sq_term]
    p1 = fit.p_values[spec.regressor]
    p2 = fit.p_values[spec.sq_term]
    rng = data_range if data_range is not None else fit.data_range
    turning = None if b2 == 0 else -b1 / (2.0 * b2)
    significant = p1 < alpha and p2 < alpha
    in_range = turning is not None and rng[0] < turning < rng[1]
    is_u = b1 < 0 and b2 > 0 and significant and in_range
    return UShapeReport(turning, b1, b2, p1, p2, significant, in_range, (float(rng[0]), float(rng[1])), is_u)
