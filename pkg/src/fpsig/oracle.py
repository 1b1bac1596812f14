"""Brute-force ground truth for the signaling programs.

Quality is discretized onto an equal-probability midpoint grid, prices onto a
finite candidate set, and for each candidate price the scheme design problem
becomes a small linear program solved by the in-house simplex. The oracle is
deliberately independent of the closed-form constructions: its expectations
are grid sums, its optimizer is an LP, and infeasibility comes back as a
Phase-I certificate rather than an analytic argument.

The ex-interim program supports two obedience encodings. ``aggregate`` sums
the purchase constraints across buyers (the form under which the argmax
construction is optimal and which the revenue upper bound uses); ``per_buyer``
keeps one constraint per buyer, which is strictly stronger for crossing
valuations and yields a lower optimum.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .quality_dist import DiscreteQualityGrid, QualityDistribution
from .signaling import GridScheme
from .simplex import STATUS_INFEASIBLE, STATUS_OPTIMAL, LpResult, solve_lp
from .valuation import ValuationProfile

AGGREGATE = "aggregate"
PER_BUYER = "per_buyer"

DEFAULT_PRICE_POINTS = 401


@dataclass
class OracleSolution:
    price: float
    objective: float
    status: str
    scheme: GridScheme | None = None
    evaluations: list = field(default_factory=list)  # (price, objective) pairs


def default_price_grid(profile: ValuationProfile, d: QualityDistribution,
                       points: int = DEFAULT_PRICE_POINTS) -> np.ndarray:
    hi = max(v(d.q2) for v in profile)
    return np.linspace(0.0, hi, points)


def candidate_prices(profile: ValuationProfile, d: QualityDistribution,
                     m: int, points: int) -> np.ndarray:
    """Uniform price candidates plus the oracle grid's own mean valuations.

    The ex-interim optima sit at grid expectations (per-buyer means and the
    mean of the pointwise max), so those values are appended as candidates;
    they are computed from the oracle's discretization, keeping the oracle
    independent of the closed forms.
    """
    grid = d.discretize(m)
    vals = _grid_values(profile, grid)
    extras = list(grid.weights @ vals)
    extras.append(float(np.dot(grid.weights, vals.max(axis=1))))
    hi = max(v(d.q2) for v in profile)
    return np.unique(np.concatenate([np.linspace(0.0, hi, points), extras]))


def _grid_values(profile: ValuationProfile, grid: DiscreteQualityGrid) -> np.ndarray:
    """vals[k, i] = v_i at grid point k."""
    return np.column_stack([np.asarray(v(grid.points), dtype=float) for v in profile])


def build_exinterim_lp(
    profile: ValuationProfile,
    grid: DiscreteQualityGrid,
    p: float,
    mode: str = AGGREGATE,
):
    """Assemble (c, A, b) for the ex-interim scheme design LP at price p.

    Variables x[k, i] (k-major) are recommendation probabilities. Rows:
      - purchase obedience:  sum_k w_k x[k,i] (v_i(q_k) - p) >= 0
      - refusal obedience:   same lhs >= grid E[v_i] - p
      - one item:            sum_i x[k,i] <= 1 per grid point
    encoded as <= rows; ``aggregate`` sums the obedience rows over buyers.
    """
    n = len(profile)
    m = grid.size
    vals = _grid_values(profile, grid)
    w = grid.weights
    means = w @ vals  # grid expectations of each valuation

    nvar = m * n
    c = np.repeat(p * w, n)  # objective: p * sold mass

    surplus = w[:, None] * (vals - p)  # (m, n) coefficients of the obedience rows
    rows = []
    rhs = []
    if mode == AGGREGATE:
        coef = np.zeros(nvar)
        for i in range(n):
            coef[i::n] = -surplus[:, i]
        rows.append(coef)
        rhs.append(0.0)
        rows.append(coef.copy())
        rhs.append(-(float(means.sum()) - n * p))
    elif mode == PER_BUYER:
        for i in range(n):
            coef = np.zeros(nvar)
            coef[i::n] = -surplus[:, i]
            rows.append(coef)
            rhs.append(0.0)
            rows.append(coef.copy())
            rhs.append(-(float(means[i]) - p))
    else:
        raise ValueError(f"unknown obedience mode {mode!r}")

    one_item = np.zeros((m, nvar))
    for k in range(m):
        one_item[k, k * n : (k + 1) * n] = 1.0
    A = np.vstack([np.array(rows), one_item])
    b = np.array(rhs + [1.0] * m)
    return c, A, b


def oracle_exinterim(
    profile: ValuationProfile,
    d: QualityDistribution,
    m: int,
    price_grid=None,
    mode: str = AGGREGATE,
) -> OracleSolution:
    """Best (price, scheme) over the candidate prices, ties to the smallest price."""
    if m < 2:
        raise ValueError("quality grid needs at least 2 points")
    grid = d.discretize(m)
    if price_grid is None:
        price_grid = default_price_grid(profile, d)
    prices = np.sort(np.asarray(price_grid, dtype=float))
    if prices.size == 0:
        raise ValueError("price grid must be nonempty")

    n = len(profile)
    best = None
    evaluations = []
    for p in prices:
        c, A, b = build_exinterim_lp(profile, grid, float(p), mode)
        res = solve_lp(c, A, b, maximize=True)
        if res.status != STATUS_OPTIMAL:
            continue
        evaluations.append((float(p), res.objective))
        if best is None or res.objective > best[1] + 1e-9:
            matrix = res.x.reshape(grid.size, n)
            best = (float(p), res.objective, GridScheme(grid, np.clip(matrix, 0.0, 1.0)))
    if best is None:
        return OracleSolution(price=np.nan, objective=np.nan, status=STATUS_INFEASIBLE)
    return OracleSolution(
        price=best[0],
        objective=best[1],
        status=STATUS_OPTIMAL,
        scheme=best[2],
        evaluations=evaluations,
    )


def oracle_expost_restricted(
    profile: ValuationProfile,
    d: QualityDistribution,
    price_grid=None,
    m: int = 401,
) -> OracleSolution:
    """Recommendation-gated ex-post buyers, brute force over the price grid.

    At price p a grid point may be recommended to buyer i only when
    q_k >= v_i^-1(p); one allowed recommendation per point is set greedily
    (the constraint rows are diagonal, so greedy is exact here).
    """
    grid = d.discretize(m)
    if price_grid is None:
        price_grid = default_price_grid(profile, d)
    prices = np.sort(np.asarray(price_grid, dtype=float))
    if prices.size == 0:
        raise ValueError("price grid must be nonempty")

    best = None
    evaluations = []
    for p in prices:
        thresholds = [v.inverse(float(p)) for v in profile]
        allowed = grid.points >= min(thresholds)
        objective = float(p) * float(grid.weights[allowed].sum())
        evaluations.append((float(p), objective))
        if best is None or objective > best[1] + 1e-9:
            best = (float(p), objective)
    return OracleSolution(
        price=best[0], objective=best[1], status=STATUS_OPTIMAL, evaluations=evaluations
    )


def oracle_expost_full_infeasible(
    profile: ValuationProfile,
    d: QualityDistribution,
    m: int,
    p: float,
) -> LpResult:
    """Phase-I probe of the full ex-post obedience system at price p.

    Per grid point and buyer: recommendation probability forced to 0 below the
    buyer's threshold and to 1 at or above it, plus the one-item row. With two
    or more buyers whose thresholds sit inside the support, the forced ones
    collide on the top interval and Phase I certifies the contradiction.
    """
    if len(profile) < 2:
        raise ValueError("the infeasibility probe needs at least two buyers")
    grid = d.discretize(m)
    n = len(profile)
    nvar = grid.size * n
    thresholds = [v.inverse(p) for v in profile]

    rows = []
    rhs = []
    for k, q in enumerate(grid.points):
        for i in range(n):
            coef = np.zeros(nvar)
            coef[k * n + i] = 1.0
            if q < thresholds[i]:
                rows.append(coef)  # x <= 0
                rhs.append(0.0)
            else:
                rows.append(-coef)  # x >= 1
                rhs.append(-1.0)
    one_item = np.zeros((grid.size, nvar))
    for k in range(grid.size):
        one_item[k, k * n : (k + 1) * n] = 1.0
    A = np.vstack([np.array(rows), one_item])
    b = np.array(rhs + [1.0] * grid.size)
    c = np.repeat(p * grid.weights, n)
    return solve_lp(c, A, b, maximize=True)
