"""Independent brute-force recomputations used as test oracles.

Everything here is deliberately written in plain Python (sorted lists, rank
counting, sequential sums) so it shares no code path with the library.
"""

from __future__ import annotations

import math

RANK_TOL = 1e-9  # same documented tie convention as the library


def quantile_by_rank(values, p: float) -> float:
    """Smallest sorted value whose rank fraction reaches p, by linear scan."""
    xs = sorted(values)
    n = len(xs)
    for rank, v in enumerate(xs, start=1):
        if rank >= n * p - RANK_TOL:
            return v
    return xs[-1]


def window_eta(window, alpha: float, measure: str = "quantile_deviation"):
    """Recompute one window's (eta, count) from first principles."""
    window = list(window)
    if measure == "std_dev":
        m = sum(window) / len(window)
        return math.sqrt(sum((v - m) ** 2 for v in window) / len(window)), len(window)
    q_lo = quantile_by_rank(window, alpha)
    q_hi = quantile_by_rank(window, 1.0 - alpha)
    devs = []
    for v in window:
        if v < q_lo:
            devs.append(q_lo - v)
        elif v > q_hi:
            devs.append(v - q_hi)
    if not devs:
        return 0.0, 0
    if measure == "squared_quantile_deviation":
        devs = [d * d for d in devs]
    return sum(devs) / len(devs), len(devs)


def series_average(values, span: int, alpha: float, measure: str = "quantile_deviation"):
    """(average, per-window etas) over consecutive full windows."""
    n_windows = len(values) // span
    etas = [
        window_eta(values[g * span : (g + 1) * span], alpha, measure)[0]
        for g in range(n_windows)
    ]
    return sum(etas) / len(etas), etas


def hc1_vcov(X, resid):
    """Heteroskedasticity-robust sandwich with the n/(n-k) correction."""
    import numpy as np

    X = np.asarray(X, dtype=float)
    u = np.asarray(resid, dtype=float)
    n, k = X.shape
    bread = np.linalg.inv(X.T @ X)
    meat = (X * (u**2)[:, None]).T @ X
    return (n / (n - k)) * bread @ meat @ bread


def dummy_ols(X, y, cells):
    """Full dummy-variable least squares; returns the slope coefficients only."""
    import numpy as np
    import pandas as pd

    dummies = pd.get_dummies(pd.Series(cells), dtype=float).to_numpy()
    full = np.hstack([np.asarray(X, dtype=float), dummies])
    beta, _, _, _ = np.linalg.lstsq(full, np.asarray(y, dtype=float), rcond=None)
    return beta[: np.asarray(X).shape[1]]
