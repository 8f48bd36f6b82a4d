"""Attention choice about environmental conditions under an information cost.

An agent tracks a Gaussian state x ~ N(0, sigma_sq). With probability q the
environment is benign and the flow loss from a belief error scales with
w(eta) = 1 / (a + eta); with probability 1 - q it is hostile and the loss
scales with l(eta) = b * eta^2, where eta >= 0 is the local volatility. The
agent pays kappa per nat of mutual information, equivalently a cost
c(xi) = (kappa / 2) * ln(1 / (1 - xi)) in terms of the fraction xi of prior
variance resolved. With quadratic losses the choice collapses to

    max over xi in [0, 1) of  xi * V - c(xi),

where V is the prior-expected stake. The interior solution is
xi* = 1 - kappa / (2 V), clamped at zero.

Volatility is drawn from a scale family: eta = theta * eta_bar with a fixed
reference shape p_bar, so expected stakes at scale theta are plain reference
expectations of w(theta * eta_bar) and l(theta * eta_bar).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

REL_QUAD_TOL = 1e-8  # refinement-doubling agreement for quadrature
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class QuadratureError(RuntimeError):
    """Quadrature failed to stabilise under node doubling."""


class BracketError(RuntimeError):
    """No interior minimum bracket found in the scanned theta range."""


@dataclass(frozen=True)
class StakesSpec:
    """Loss-scale primitives: P(benign) q, state variance, w and l parameters."""

    q: float = 0.5
    sigma_sq: float = 1.0
    a: float = 0.02
    b: float = 700.0

    def __post_init__(self):
        if not 0.0 <= self.q <= 1.0:
            raise ValueError("q must lie in [0, 1]")
        if self.sigma_sq <= 0:
            raise ValueError("sigma_sq must be positive")
        if self.a <= 0 or self.b <= 0:
            raise ValueError("a and b must be positive")


@dataclass(frozen=True)
class CostSpec:
    kappa: float = 18.0

    def __post_init__(self):
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")

    def cost(self, xi: float) -> float:
        """c(xi) = (kappa / 2) * ln(1 / (1 - xi)), the price of resolving xi."""
        if not 0.0 <= xi < 1.0:
            raise ValueError("xi must lie in [0, 1)")
        return -0.5 * self.kappa * math.log1p(-xi)


@dataclass(frozen=True)
class PriorScaleFamily:
    """Prior over volatility: eta = theta * eta_bar for a fixed reference shape.

    Reference shapes: a lognormal with log-sd s (median 1), a point mass at 1,
    or a finite sample with weights. E[eta] = mu * theta and
    Var(eta) = nu^2 * theta^2 follow from the reference moments.
    """

    theta: float
    kind: str = "lognormal"
    log_sd: float = 0.5
    support: tuple[float, ...] | None = None
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.theta <= 0:
            raise ValueError("theta must be positive")
        if self.kind not in ("lognormal", "point_mass", "discrete"):
            raise ValueError(f"unknown prior kind {self.kind!r}")
        if self.kind == "lognormal" and self.log_sd <= 0:
            raise ValueError("log_sd must be positive")
        if self.kind == "discrete":
            if self.support is None or self.weights is None:
                raise ValueError("discrete prior needs support and weights")
            support = tuple(float(v) for v in self.support)
            weights = tuple(float(v) for v in self.weights)
            if len(support) != len(weights) or not support:
                raise ValueError("support and weights must be nonempty, equal length")
            if any(v < 0 for v in support):
                raise ValueError("support must be nonnegative")
            if any(w < 0 for w in weights) or abs(sum(weights) - 1.0) > 1e-12:
                raise ValueError("weights must be nonnegative and sum to one")
            object.__setattr__(self, "support", support)
            object.__setattr__(self, "weights", weights)

    @classmethod
    def lognormal(cls, theta: float, log_sd: float = 0.5) -> "PriorScaleFamily":
        return cls(theta=theta, kind="lognormal", log_sd=log_sd)

    @classmethod
    def point_mass(cls, theta: float) -> "PriorScaleFamily":
        return cls(theta=theta, kind="point_mass")

    @classmethod
    def discrete(cls, theta: float, support, weights) -> "PriorScaleFamily":
        return cls(theta=theta, kind="discrete", support=tuple(support), weights=tuple(weights))

    def with_theta(self, theta: float) -> "PriorScaleFamily":
        return replace(self, theta=theta)

    @property
    def reference_mean(self) -> float:
        if self.kind == "lognormal":
            return math.exp(0.5 * self.log_sd**2)
        if self.kind == "point_mass":
            return 1.0
        return float(np.dot(self.weights, self.support))

    @property
    def reference_second_moment(self) -> float:
        if self.kind == "lognormal":
            return math.exp(2.0 * self.log_sd**2)
        if self.kind == "point_mass":
            return 1.0
        return float(np.dot(self.weights, np.square(self.support)))

    @property
    def reference_variance(self) -> float:
        return self.reference_second_moment - self.reference_mean**2

    def mean(self) -> float:
        return self.reference_mean * self.theta

    def variance(self) -> float:
        return self.reference_variance * self.theta**2


@dataclass(frozen=True)
class AttentionSolution:
    theta: float
    w_bar: float
    l_bar: float
    value: float
    xi_star: float
    posterior_variance: float
    mutual_information: float
    attention_cost: float


@dataclass(frozen=True)
class TroughReport:
    passes: bool | None  # None when the curve is too short to judge
    trough_interval: tuple[float, float] | None
    n_points: int
    note: str = ""


@lru_cache(maxsize=None)
def _hermgauss(n: int):
    return np.polynomial.hermite.hermgauss(n)


def _lognormal_expect(g, log_sd: float, rel_tol: float = REL_QUAD_TOL, max_nodes: int = 512) -> float:
    """E[g(eta_bar)] for eta_bar = exp(log_sd * Z) via Gauss-Hermite.

    Node counts double until two successive levels agree to rel_tol.
    """
    scale = log_sd * math.sqrt(2.0)
    prev = None
    n = 64
    while n <= max_nodes:
        x, w = _hermgauss(n)
        val = float(w @ g(np.exp(scale * x))) / math.sqrt(math.pi)
        if prev is not None and abs(val - prev) <= rel_tol * max(abs(val), 1e-300):
            return val
        prev = val
        n *= 2
    raise QuadratureError(
        f"no convergence by {max_nodes} nodes (last two values {prev!r}, log_sd={log_sd})"
    )


def expected_stakes(stakes: StakesSpec, prior: PriorScaleFamily) -> tuple[float, float]:
    """Prior-expected stakes (W_bar, L_bar) at the prior's scale theta.

    W_bar = sigma_sq * q * E[1 / (a + theta * eta_bar)] and
    L_bar = sigma_sq * (1 - q) * b * theta^2 * E[eta_bar^2].
    """
    theta = prior.theta
    if prior.kind == "point_mass":
        inv = 1.0 / (stakes.a + theta)
        second = 1.0
    elif prior.kind == "discrete":
        support = np.asarray(prior.support)
        weights = np.asarray(prior.weights)
        inv = float(weights @ (1.0 / (stakes.a + theta * support)))
        second = float(weights @ np.square(support))
    else:
        inv = _lognormal_expect(lambda e: 1.0 / (stakes.a + theta * e), prior.log_sd)
        second = _lognormal_expect(np.square, prior.log_sd)
    w_bar = stakes.sigma_sq * stakes.q * inv
    l_bar = stakes.sigma_sq * (1.0 - stakes.q) * stakes.b * theta**2 * second
    return w_bar, l_bar


def stake_value(stakes: StakesSpec, prior: PriorScaleFamily) -> float:
    w_bar, l_bar = expected_stakes(stakes, prior)
    return w_bar + l_bar


def optimal_attention(value: float, kappa: float) -> float:
    """Closed-form maximizer of xi * value - (kappa / 2) * ln(1 / (1 - xi))."""
    if value < 0:
        raise ValueError("value must be nonnegative")
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    if value == 0.0:
        return 0.0
    xi = max(0.0, 1.0 - kappa / (2.0 * value))
    return min(xi, math.nextafter(1.0, 0.0))  # keep strictly below 1 under rounding


def gaussian_mutual_information(sigma_sq: float, posterior_variance: float) -> float:
    """Nats carried by a Gaussian signal that cuts variance sigma_sq to posterior_variance."""
    if sigma_sq <= 0 or posterior_variance <= 0:
        raise ValueError("variances must be positive")
    if posterior_variance > sigma_sq:
        raise ValueError("posterior variance exceeds prior variance; information cannot be negative")
    return 0.5 * math.log(sigma_sq / posterior_variance)


def solve(stakes: StakesSpec, prior: PriorScaleFamily, cost: CostSpec) -> AttentionSolution:
    w_bar, l_bar = expected_stakes(stakes, prior)
    value = w_bar + l_bar
    xi = optimal_attention(value, cost.kappa)
    posterior = stakes.sigma_sq * (1.0 - xi)
    return AttentionSolution(
        theta=prior.theta,
        w_bar=w_bar,
        l_bar=l_bar,
        value=value,
        xi_star=xi,
        posterior_variance=posterior,
        mutual_information=gaussian_mutual_information(stakes.sigma_sq, posterior),
        attention_cost=cost.cost(xi),
    )


# ---------------------------------------------------------------------------
# brute-force oracle

# 10^6 grid points plus an endpoint probe just inside 1; the log term is
# precomputed once since only the linear part depends on (value, kappa).
_BF_GRID = np.append(np.arange(0.0, 1.0, 1e-6), 1.0 - 1e-9)
_BF_HALF_LOG1M = 0.5 * np.log1p(-_BF_GRID)
_BF_BUF = np.empty_like(_BF_GRID)
# Forward-difference slopes: the objective slope*xi + 0.5*log1p(-xi) rises
# across grid cell i iff slope exceeds _BF_THRESH[i]. The log term is strictly
# concave, so the thresholds increase and the grid argmax equals the count of
# cells still rising — a binary search instead of a full scan.
_BF_THRESH = -0.5 * np.diff(_BF_HALF_LOG1M * 2.0) / np.diff(_BF_GRID)


def brute_force_attention(
    value: float, kappa: float, refine: bool = True, exhaustive: bool = False
) -> float:
    """Grid maximizer of the attention objective, independent of the closed form.

    Maximizes the kappa-scaled objective (value / kappa) * xi + ln(1 - xi) / 2,
    which has the same argmax, then optionally polishes by trisection inside
    the bracketing grid cells. The grid argmax is located by binary search on
    the precomputed cell slopes (equivalent for this strictly concave
    objective); exhaustive=True forces the plain full-scan argmax instead.
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    slope = value / kappa
    if exhaustive:
        np.multiply(_BF_GRID, slope, out=_BF_BUF)
        np.add(_BF_BUF, _BF_HALF_LOG1M, out=_BF_BUF)
        i = int(np.argmax(_BF_BUF))
    else:
        i = int(np.searchsorted(_BF_THRESH, slope, side="left"))
    if not refine:
        return float(_BF_GRID[i])
    lo = float(_BF_GRID[max(i - 1, 0)])
    hi = float(_BF_GRID[min(i + 1, len(_BF_GRID) - 1)])

    def f(xi: float) -> float:
        return slope * xi + 0.5 * math.log1p(-xi)

    # trisection: each step keeps two thirds of the bracket
    for _ in range(80):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if f(m1) < f(m2):
            lo = m1
        else:
            hi = m2
        if hi - lo < 1e-13:
            break
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# comparative statics in theta


@dataclass(frozen=True)
class CurvePoint:
    theta: float
    w_bar: float
    l_bar: float
    value: float
    xi_star: float


@dataclass(frozen=True)
class Thresholds:
    theta_low: float
    theta_tilde: float
    theta_high: float

    @property
    def is_empty(self) -> bool:
        return self.theta_low == self.theta_high


def attention_curve(
    stakes: StakesSpec, prior: PriorScaleFamily, cost: CostSpec, thetas
) -> list[CurvePoint]:
    """xi*(theta) and its stake components along a positive theta grid."""
    points = []
    for theta in np.asarray(thetas, dtype=float):
        if theta <= 0:
            raise ValueError("theta grid must be positive")
        w_bar, l_bar = expected_stakes(stakes, prior.with_theta(float(theta)))
        value = w_bar + l_bar
        points.append(
            CurvePoint(float(theta), w_bar, l_bar, value, optimal_attention(value, cost.kappa))
        )
    return points


def _golden_min(f, lo: float, hi: float, tol: float = 1e-10) -> float:
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > tol:
        if f1 > f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = f(x1)
    return 0.5 * (lo + hi)


def find_thresholds(
    stakes: StakesSpec,
    prior: PriorScaleFamily,
    cost: CostSpec,
    theta_range: tuple[float, float] = (1e-8, 1e4),
    scan_points: int = 240,
) -> Thresholds:
    """Bounds of the inattention region {theta : V(theta) < kappa / 2}.

    V(theta) falls from sigma_sq * q / a toward a single interior trough and
    rises without bound afterwards, so the region is an interval
    (theta_low, theta_high) around the trough theta_tilde; it collapses to the
    trough point when even the trough stake reaches kappa / 2, and theta_low
    clamps to zero when the theta -> 0 stake is already below the bar.
    """
    half = cost.kappa / 2.0
    f_zero = stakes.sigma_sq * stakes.q / stakes.a  # theta -> 0 limit of V

    def f(theta: float) -> float:
        return stake_value(stakes, prior.with_theta(theta))

    thetas = np.geomspace(theta_range[0], theta_range[1], scan_points)
    values = np.array([f(t) for t in thetas])
    i = int(np.argmin(values))
    if i == len(thetas) - 1:
        raise BracketError(
            f"stake minimum not interior to theta range {theta_range}; "
            f"endpoint values {values[0]:.6g}, {values[-1]:.6g}"
        )
    if i == 0:
        # stakes rise from the start: the trough sits at the theta -> 0 boundary
        theta_tilde, f_min = 0.0, f_zero
    else:
        theta_tilde = _golden_min(f, float(thetas[i - 1]), float(thetas[i + 1]))
        f_min = f(theta_tilde)
    if f_min >= half:
        return Thresholds(theta_tilde, theta_tilde, theta_tilde)

    # upper crossing always exists since the hostile stake grows like theta^2
    hi = max(theta_tilde, theta_range[0] * 1e-3)
    step = max(theta_tilde, 1e-8)
    while f(hi + step) <= half:
        step *= 2.0
        if not math.isfinite(step):
            raise BracketError("no upper crossing found")
    theta_high = brentq(lambda t: f(t) - half, hi, hi + step, xtol=1e-10)

    if f_zero < half or theta_tilde == 0.0:
        theta_low = 0.0
    else:
        lo = theta_tilde * 1e-3
        while f(lo) <= half:
            lo *= 0.5
            if lo < 1e-300:
                theta_low = 0.0
                break
        else:
            theta_low = brentq(lambda t: f(t) - half, lo, theta_tilde, xtol=1e-10)
    return Thresholds(float(theta_low), float(theta_tilde), float(theta_high))


def verify_single_trough(xs, ys, tol: float = 1e-12) -> TroughReport:
    """Check a sampled curve falls then rises, with a tolerance for flat steps.

    The curve passes when no step larger than tol upward is ever followed by a
    step larger than tol downward. The reported trough interval spans from the
    end of the last falling step to the start of the first rising step.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(xs) != len(ys):
        raise ValueError("xs and ys must have equal length")
    if len(xs) < 3:
        return TroughReport(None, None, len(xs), "insufficient points")
    diffs = np.diff(ys)
    signs = np.zeros(len(diffs), dtype=int)
    signs[diffs > tol] = 1
    signs[diffs < -tol] = -1
    rising = np.flatnonzero(signs > 0)
    falling = np.flatnonzero(signs < 0)
    if len(rising) and len(falling) and falling[-1] > rising[0]:
        return TroughReport(False, None, len(xs), "falls again after rising")
    left = xs[falling[-1] + 1] if len(falling) else xs[0]
    right = xs[rising[0]] if len(rising) else xs[-1]
    return TroughReport(True, (float(left), float(right)), len(xs))
