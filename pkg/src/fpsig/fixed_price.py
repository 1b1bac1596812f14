"""Optimal fixed-price mechanism without signaling.

Two buyer rationality models are covered. Under ex-post rationality buyer i
purchases iff v_i(q) >= p at the realized quality, so the expected revenue is

    rev(p) = [1 - prod_i G(v_i^-1(p))] * p,

a trade-off between price and sale probability that may be multi-modal; it is
maximized by a global grid scan plus golden-section refinement. Under
ex-interim rationality each buyer's willingness is the constant E[v_i] >= p,
so the seller charges the largest prior mean and always sells.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .numerics import maximize_on_grid
from .quality_dist import QualityDistribution
from .valuation import ValuationProfile

EX_POST = "ex_post"
EX_INTERIM = "ex_interim"

PRICE_GRID_POINTS = 2001
REFINE_TOL = 1e-8
TIE_TOL = 1e-9


@dataclass(frozen=True)
class FixedPrice:
    """A posted price with no information design."""

    price: float

    def to_dict(self):
        return {"type": "fixed_price", "price": self.price}


@dataclass(frozen=True)
class FixedPriceSolution:
    price: float
    revenue: float
    rationality: str
    diagnostics: dict = field(default_factory=dict)

    def mechanism(self) -> FixedPrice:
        return FixedPrice(self.price)


def revenue_ex_post(profile: ValuationProfile, d: QualityDistribution, p: float) -> float:
    """[1 - prod_i G(v_i^-1(p))] * p with clamped inverse thresholds."""
    if p < 0:
        raise ValueError("price must be nonnegative")
    no_sale = 1.0
    for v in profile:
        no_sale *= d.cdf(v.inverse(p))
    return (1.0 - no_sale) * p


def price_bracket(profile: ValuationProfile, d: QualityDistribution) -> tuple[float, float]:
    """Search bracket [0, max_i v_i(q2)]; the lower end is kept at 0 even when
    valuations are bounded away from it."""
    hi = max(v(d.q2) for v in profile)
    return 0.0, float(hi)


def optimize_ex_post(
    profile: ValuationProfile,
    d: QualityDistribution,
    grid_points: int = PRICE_GRID_POINTS,
) -> FixedPriceSolution:
    """Maximize the ex-post revenue curve over the price bracket.

    Grid scan + golden-section refinement; revenue ties within 1e-9 resolve
    to the smallest price so results are deterministic.
    """
    lo, hi = price_bracket(profile, d)
    price, revenue, bracket = maximize_on_grid(
        lambda p: revenue_ex_post(profile, d, p),
        lo,
        hi,
        grid_points=grid_points,
        refine_tol=REFINE_TOL,
        tie_tol=TIE_TOL,
    )
    return FixedPriceSolution(
        price=price,
        revenue=revenue,
        rationality=EX_POST,
        diagnostics={
            "price_grid": {"lo": lo, "hi": hi, "points": grid_points},
            "refined_bracket": list(bracket),
        },
    )


def optimize_ex_interim(profile: ValuationProfile, d: QualityDistribution) -> FixedPriceSolution:
    """Charge the largest prior mean valuation; the item always sells there.

    A buyer at exact indifference (p equal to their mean) still purchases, so
    revenue equals the price.
    """
    means = profile.expected_valuations(d)
    price = max(means)
    winner = means.index(price)
    return FixedPriceSolution(
        price=price,
        revenue=price,
        rationality=EX_INTERIM,
        diagnostics={"prior_means": means, "pivotal_buyer": winner + 1},
    )
