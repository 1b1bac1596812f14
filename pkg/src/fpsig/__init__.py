"""Revenue-maximizing fixed-price mechanisms with and without signaling.

A seller with private knowledge of an item's quality posts one price for all
buyers and may commit to an action-recommendation signaling scheme first. The
package provides the closed-form optimal mechanisms for both buyer
rationality models, numerical obedience verification, brute-force LP oracles
on discretized grids, and a Monte-Carlo market simulator, all behind a small
CLI (``fpsig``).
"""

from .fixed_price import (
    EX_INTERIM,
    EX_POST,
    FixedPrice,
    FixedPriceSolution,
    optimize_ex_interim,
    optimize_ex_post,
    revenue_ex_post,
)
from .obedience import (
    NO_OBEDIENT_MECHANISM,
    OBEDIENT,
    VIOLATED,
    ObedienceReport,
    check_exinterim_multi,
    check_exinterim_single,
    check_expost_multi,
    check_expost_multi_restricted,
    check_expost_single,
)
from .oracle import (
    OracleSolution,
    oracle_exinterim,
    oracle_expost_full_infeasible,
    oracle_expost_restricted,
)
from .quality_dist import (
    DiscreteQualityGrid,
    PiecewiseLinearCdf,
    QualityDistribution,
    ScaledBeta,
    TruncatedNormal,
    Uniform,
    make_distribution,
)
from .scenario import Scenario, ScenarioError, load_scenario, parse_scenario
from .signaling import (
    AlwaysRecommend,
    GridScheme,
    Partition,
    SignalingMechanism,
    SingleThreshold,
    posterior_stats,
    revenue_sig,
    scheme_exinterim_multi,
    scheme_exinterim_single,
    scheme_expost_multi_restricted,
    scheme_expost_single,
    solve_expost_single,
)
from .simplex import LpResult, solve_lp
from .simulate import RevenueEstimate, TrialOutcome, run_trials
from .valuation import (
    Linear,
    PiecewiseLinearIncreasing,
    Power,
    ValuationFunction,
    ValuationProfile,
    make_valuation,
)

__version__ = "0.1.0"
