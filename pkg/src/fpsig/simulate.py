"""Monte-Carlo replay of the two trading protocols.

Each trial samples a quality, realizes the signal (for signaling mechanisms),
lets every buyer decide from the information the protocol gives them, and
awards the item uniformly at random among the willing buyers.

All randomness for a run is drawn up front from one seeded generator in a
fixed layout (qualities, signal uniforms, tie-break uniforms), so shards are
plain slices of the same arrays: the merged estimate is bit-identical no
matter how many shards process it, and reruns with the same seed replay
exactly.

Decision rules:
  - fixed price, ex-post: the buyer purchases iff v_i(q) >= p at the realized
    quality (the no-signaling protocol prices in the buyer's ex-post check
    against the actual q, which is what makes G(v_i^-1(p)) the no-sale
    probability).
  - fixed price, ex-interim: compares the prior mean E[v_i] with p.
  - signaling, ex-post: the buyer purchases iff their posterior given the
    received bit puts zero mass (within 1e-9) on valuations below p; they
    never observe q itself. Buyers with bit 0 apply the same rule to the
    bit-0 posterior, so disobedient purchases are modeled.
  - signaling, ex-interim: posterior mean valuation >= p for the received bit.
  - behavior="follow": buyers simply follow the recommendation, which is how
    mechanisms that are only aggregate-obedient are exercised.

Indifference buys: all comparisons carry a +1e-9 grace on the buyer's side.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fixed_price import EX_INTERIM, EX_POST, FixedPrice
from .quality_dist import QualityDistribution
from .signaling import GridScheme, IntervalScheme, SignalingMechanism, posterior_stats
from .valuation import ValuationProfile

DECIDE = "decide"
FOLLOW = "follow"

_GRACE = 1e-9


@dataclass(frozen=True)
class TrialOutcome:
    quality: float
    bits: tuple[int, ...]  # per-buyer recommendation bit; empty for fixed price
    willing: tuple[int, ...]  # 1-based indices of willing buyers
    winner: int | None  # 1-based; None if no sale
    revenue: float


@dataclass(frozen=True)
class RevenueEstimate:
    mean: float
    stderr: float
    trials: int
    seed: int

    def to_dict(self):
        return {
            "mean": self.mean,
            "stderr": self.stderr,
            "trials": self.trials,
            "seed": self.seed,
        }


def _interval_signals(scheme: IntervalScheme, qualities: np.ndarray) -> np.ndarray:
    """Vectorized signal_at: map qualities to their segment's signal id."""
    edges = np.array([hi for _, hi, _ in scheme.segments[:-1]])
    sigs = np.array([sig for _, _, sig in scheme.segments])
    idx = np.searchsorted(edges, qualities, side="right")
    return sigs[np.clip(idx, 0, len(sigs) - 1)]


def _grid_signals(scheme: GridScheme, qualities: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Draw a signal per trial from the nearest grid row's distribution."""
    pts = scheme.grid.points
    mids = 0.5 * (pts[1:] + pts[:-1])
    k = np.searchsorted(mids, qualities)
    cums = np.cumsum(scheme.matrix, axis=1)[k]  # (trials, n)
    hit = u[:, None] < cums
    sig = np.where(hit.any(axis=1), hit.argmax(axis=1) + 1, 0)
    return sig


def _signal_decisions(
    mech: SignalingMechanism,
    profile: ValuationProfile,
    d: QualityDistribution,
    rationality: str,
) -> np.ndarray:
    """decision[i, bit]: does buyer i purchase after seeing that bit."""
    n = len(profile)
    table = np.zeros((n, 2), dtype=bool)
    for i in range(n):
        for bit in (0, 1):
            stats = posterior_stats(mech.scheme, d, profile[i], i, bit)
            if stats is None:
                table[i, bit] = False
            elif rationality == EX_POST:
                table[i, bit] = stats.prob_value_below(mech.price) <= _GRACE
            else:
                table[i, bit] = stats.mean_valuation >= mech.price - _GRACE
    return table


def run_trials(
    d: QualityDistribution,
    profile: ValuationProfile,
    mechanism,
    rationality: str,
    trials: int,
    seed: int,
    behavior: str = DECIDE,
    shards: int = 1,
    record: bool = False,
):
    """Estimate the mechanism's revenue over seeded Monte-Carlo trials.

    Returns RevenueEstimate, or (RevenueEstimate, list[TrialOutcome]) when
    ``record`` is set.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    if shards < 1:
        raise ValueError("need at least one shard")
    if rationality not in (EX_POST, EX_INTERIM):
        raise ValueError(f"unknown rationality {rationality!r}")
    if behavior not in (DECIDE, FOLLOW):
        raise ValueError(f"unknown behavior {behavior!r}")

    n = len(profile)
    rng = np.random.default_rng(seed)
    qualities = d.sample(rng, trials)
    signal_u = rng.random(trials)
    tie_u = rng.random(trials)

    if isinstance(mechanism, FixedPrice):
        price = mechanism.price
        bits = None
        if rationality == EX_POST:
            willing = np.column_stack(
                [np.asarray(v(qualities)) >= price - _GRACE for v in profile]
            )
        else:
            means = profile.expected_valuations(d)
            willing = np.tile(
                np.array([mu >= price - _GRACE for mu in means]), (trials, 1)
            )
    elif isinstance(mechanism, SignalingMechanism):
        if mechanism.scheme.n_buyers != n:
            raise ValueError("mechanism dimension does not match the profile")
        price = mechanism.price
        scheme = mechanism.scheme
        if isinstance(scheme, IntervalScheme):
            signals = _interval_signals(scheme, qualities)
        else:
            signals = _grid_signals(scheme, qualities, signal_u)
        bits = signals[:, None] == (np.arange(n) + 1)[None, :]
        if behavior == FOLLOW:
            willing = bits
        else:
            table = _signal_decisions(mechanism, profile, d, rationality)
            willing = np.where(bits, table[None, :, 1], table[None, :, 0])
    else:
        raise TypeError(f"unsupported mechanism {type(mechanism).__name__}")

    counts = willing.sum(axis=1)
    sold = counts > 0
    # uniform winner among the willing: pick the r-th willing buyer where
    # r = floor(u * count)
    pick = np.minimum((tie_u * counts).astype(int), np.maximum(counts - 1, 0))
    ranks = willing.cumsum(axis=1) - 1
    winner_col = np.argmax((ranks == pick[:, None]) & willing, axis=1)
    revenues = np.where(sold, price, 0.0)

    # per-trial revenue is two-valued (0 or the price), so each shard's
    # streaming statistic reduces to its sold count; integer accumulation
    # makes the merged estimate bit-identical for every shard count
    bounds = np.linspace(0, trials, shards + 1).astype(int)
    total_sold = 0
    for a, b in zip(bounds[:-1], bounds[1:]):
        total_sold += int(sold[a:b].sum())
    mean = price * (total_sold / trials)
    if trials > 1:
        m2 = total_sold * (price - mean) ** 2 + (trials - total_sold) * mean**2
        stderr = float(np.sqrt(m2 / (trials - 1) / trials))
    else:
        stderr = 0.0
    estimate = RevenueEstimate(mean=mean, stderr=stderr, trials=trials, seed=seed)
    if not record:
        return estimate

    outcomes = []
    for t in range(trials):
        willing_ids = tuple(int(i + 1) for i in np.flatnonzero(willing[t]))
        outcomes.append(
            TrialOutcome(
                quality=float(qualities[t]),
                bits=tuple(int(x) for x in bits[t]) if bits is not None else (),
                willing=willing_ids,
                winner=int(winner_col[t] + 1) if sold[t] else None,
                revenue=float(revenues[t]),
            )
        )
    return estimate, outcomes
