"""Signaling schemes, posteriors, and the four closed-form optimal mechanisms.

A scheme maps quality to a distribution over n+1 action recommendations:
signal 0 means "nobody buys", signal i (1-based) recommends buyer i. The
optimal constructions are all deterministic (threshold / partition /
always-recommend); the stochastic grid form exists for oracle output and
stress tests. Signal probabilities at every quality are a sub-simplex:
nonnegative and summing to at most 1, the remainder being signal 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fixed_price import PRICE_GRID_POINTS, REFINE_TOL, TIE_TOL
from .numerics import integrate_piecewise, maximize_on_grid
from .quality_dist import DiscreteQualityGrid, QualityDistribution
from .valuation import PiecewiseLinearIncreasing, ValuationFunction, ValuationProfile

NEVER_SENT_MASS = 1e-12


class SchemeError(ValueError):
    pass


class SignalingScheme:
    """Base class; concrete schemes are either interval-based or grid-based."""

    n_buyers: int

    def signal_one_probability(self, q, buyer: int) -> float:
        """pi(q, s_{buyer+1}) for a scalar quality."""
        raise NotImplementedError

    def sale_probability(self, q) -> float:
        """Probability some buyer is recommended at quality q."""
        return sum(self.signal_one_probability(q, i) for i in range(self.n_buyers))

    def to_dict(self) -> dict:
        raise NotImplementedError


class IntervalScheme(SignalingScheme):
    """Deterministic scheme given by support segments (lo, hi, signal id)."""

    def __init__(self, segments, n_buyers: int):
        segs = []
        for lo, hi, sig in segments:
            lo, hi, sig = float(lo), float(hi), int(sig)
            if hi < lo:
                raise SchemeError(f"segment [{lo}, {hi}] reversed")
            if not 0 <= sig <= n_buyers:
                raise SchemeError(f"signal id {sig} outside 0..{n_buyers}")
            if hi > lo:
                segs.append((lo, hi, sig))
        if not segs:
            raise SchemeError("scheme needs at least one nonempty segment")
        segs.sort()
        for (a, b, _), (c, _, _) in zip(segs[:-1], segs[1:]):
            if abs(b - c) > 1e-12:
                raise SchemeError("segments must tile the support without gaps or overlap")
        self._segments = segs
        self.n_buyers = int(n_buyers)

    @property
    def segments(self):
        return list(self._segments)

    @property
    def support(self):
        return (self._segments[0][0], self._segments[-1][1])

    def signal_at(self, q) -> int:
        """The (deterministic) signal sent at quality q.

        Segments are half-open [lo, hi) except the last, which includes q2.
        """
        last_lo, _, last_sig = self._segments[-1]
        if q >= last_lo:
            return last_sig
        for lo, hi, sig in self._segments:
            if q < hi:
                return sig
        return last_sig

    def signal_one_probability(self, q, buyer: int) -> float:
        return 1.0 if self.signal_at(q) == buyer + 1 else 0.0

    def buyer_segments(self, buyer: int):
        """Segments on which buyer (0-based) is recommended."""
        return [(lo, hi) for lo, hi, sig in self._segments if sig == buyer + 1]

    def breakpoints(self):
        return tuple(lo for lo, _, _ in self._segments[1:])


class SingleThreshold(IntervalScheme):
    """One buyer: recommend purchase exactly when quality reaches a threshold."""

    def __init__(self, threshold: float, support):
        q1, q2 = float(support[0]), float(support[1])
        t = min(max(float(threshold), q1), q2)
        self.threshold = t
        segs = []
        if t > q1:
            segs.append((q1, t, 0))
        if t < q2:
            segs.append((t, q2, 1))
        if not segs:  # degenerate zero-width support guard
            segs = [(q1, q2, 0)]
        super().__init__(segs, 1)

    def to_dict(self):
        return {
            "type": "single_threshold",
            "threshold": self.threshold,
            "support": list(self.support),
        }


class AlwaysRecommend(IntervalScheme):
    """Every quality is recommended to some buyer (signal 0 never sent)."""

    def __init__(self, segments, n_buyers: int):
        super().__init__(segments, n_buyers)
        if any(sig == 0 for _, _, sig in self._segments):
            raise SchemeError("always-recommend schemes may not send signal 0")

    def to_dict(self):
        return {
            "type": "always_recommend",
            "n_buyers": self.n_buyers,
            "segments": [[lo, hi, sig] for lo, hi, sig in self._segments],
        }


class Partition(IntervalScheme):
    """General deterministic scheme: intervals mapped to arbitrary signals."""

    def to_dict(self):
        return {
            "type": "partition",
            "n_buyers": self.n_buyers,
            "segments": [[lo, hi, sig] for lo, hi, sig in self._segments],
        }


class GridScheme(SignalingScheme):
    """Stochastic scheme on a discrete quality grid.

    matrix[k, i] is the probability of recommending buyer i at grid point k;
    the leftover row mass is signal 0. Row sums may not exceed 1.
    """

    def __init__(self, grid: DiscreteQualityGrid, matrix):
        m = np.asarray(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != grid.size:
            raise SchemeError("matrix must have one row per grid point")
        if np.any(m < -1e-12) or np.any(m.sum(axis=1) > 1.0 + 1e-9):
            raise SchemeError("rows must be nonnegative with sum at most 1")
        self.grid = grid
        self.matrix = np.clip(m, 0.0, None)
        self.n_buyers = m.shape[1]

    def signal_one_probability(self, q, buyer: int) -> float:
        k = int(np.argmin(np.abs(self.grid.points - q)))
        return float(self.matrix[k, buyer])

    def to_dict(self):
        return {
            "type": "grid",
            "n_buyers": self.n_buyers,
            "points": self.grid.points.tolist(),
            "weights": self.grid.weights.tolist(),
            "matrix": self.matrix.tolist(),
        }


def scheme_from_dict(data: dict) -> SignalingScheme:
    kind = data.get("type")
    if kind == "single_threshold":
        return SingleThreshold(data["threshold"], data["support"])
    if kind == "always_recommend":
        return AlwaysRecommend(data["segments"], data["n_buyers"])
    if kind == "partition":
        return Partition(data["segments"], data["n_buyers"])
    if kind == "grid":
        grid = DiscreteQualityGrid(np.asarray(data["points"]), np.asarray(data["weights"]))
        return GridScheme(grid, np.asarray(data["matrix"]))
    raise SchemeError(f"unknown scheme type {kind!r}")


@dataclass(frozen=True)
class SignalingMechanism:
    scheme: SignalingScheme
    price: float

    def __post_init__(self):
        if self.price < 0:
            raise SchemeError("price must be nonnegative")

    def to_dict(self):
        return {"scheme": self.scheme.to_dict(), "price": self.price}

    @staticmethod
    def from_dict(data: dict) -> "SignalingMechanism":
        return SignalingMechanism(scheme_from_dict(data["scheme"]), float(data["price"]))


# ---------------------------------------------------------------------------
# signal-weighted integrals, shared by posteriors, revenue and obedience
# ---------------------------------------------------------------------------

def _valuation_kinks(v):
    return v.kinks() if isinstance(v, PiecewiseLinearIncreasing) else ()


def signal_mass(scheme: SignalingScheme, d: QualityDistribution, buyer: int,
                lo: float | None = None, hi: float | None = None) -> float:
    """integral of pi(q, s_{buyer+1}) g(q) dq over [lo, hi] (default: support)."""
    lo = d.q1 if lo is None else max(lo, d.q1)
    hi = d.q2 if hi is None else min(hi, d.q2)
    if hi <= lo:
        return 0.0
    if isinstance(scheme, IntervalScheme):
        return sum(
            d.mass(max(a, lo), min(b, hi)) for a, b in scheme.buyer_segments(buyer)
        )
    assert isinstance(scheme, GridScheme)
    pts = scheme.grid.points
    inside = (pts >= lo) & (pts <= hi)
    return float(np.dot(scheme.grid.weights[inside], scheme.matrix[inside, buyer]))


def complement_mass(scheme: SignalingScheme, d: QualityDistribution, buyer: int,
                    lo: float | None = None, hi: float | None = None) -> float:
    """integral of [1 - pi(q, s_{buyer+1})] g(q) dq over [lo, hi].

    Grid schemes measure quality with their own grid weights so that the
    complement stays consistent with the grid's signal mass.
    """
    lo = d.q1 if lo is None else max(lo, d.q1)
    hi = d.q2 if hi is None else min(hi, d.q2)
    if hi <= lo:
        return 0.0
    if isinstance(scheme, GridScheme):
        pts = scheme.grid.points
        inside = (pts >= lo) & (pts <= hi)
        return float(
            np.dot(scheme.grid.weights[inside], 1.0 - scheme.matrix[inside, buyer])
        )
    return d.mass(lo, hi) - signal_mass(scheme, d, buyer, lo, hi)


def signal_expect(scheme: SignalingScheme, d: QualityDistribution, buyer: int,
                  f, breakpoints=(), complement: bool = False) -> float:
    """integral of weight(q) f(q) g(q) dq, weight = pi or 1-pi for the buyer."""
    if isinstance(scheme, IntervalScheme):
        segs = scheme.buyer_segments(buyer)
        if complement:
            total = d.expect(f, breakpoints=tuple(breakpoints) + scheme.breakpoints())
            return total - signal_expect(scheme, d, buyer, f, breakpoints)
        return sum(
            integrate_piecewise(lambda q: f(q) * d.pdf(q), a, b, breakpoints)
            for a, b in segs
        )
    assert isinstance(scheme, GridScheme)
    w = scheme.matrix[:, buyer]
    if complement:
        w = 1.0 - w
    vals = np.array([f(q) for q in scheme.grid.points])
    return float(np.dot(scheme.grid.weights * w, vals))


# ---------------------------------------------------------------------------
# posterior statistics
# ---------------------------------------------------------------------------

@dataclass
class PosteriorStats:
    """Conditional statistics of a buyer's belief given their signal bit."""

    mass: float
    mean_valuation: float
    _scheme: SignalingScheme
    _dist: QualityDistribution
    _valuation: ValuationFunction
    _buyer: int
    _bit: int

    def prob_value_below(self, p: float) -> float:
        """Posterior probability that the buyer's valuation is below p."""
        t = self._valuation.inverse(p)
        if self._bit == 1:
            below = signal_mass(self._scheme, self._dist, self._buyer, self._dist.q1, t)
        else:
            below = complement_mass(self._scheme, self._dist, self._buyer, self._dist.q1, t)
        return below / self.mass


def posterior_stats(
    scheme: SignalingScheme,
    d: QualityDistribution,
    v: ValuationFunction,
    buyer: int,
    bit: int,
) -> PosteriorStats | None:
    """Bayes-updated mass and mean valuation for one buyer and signal bit.

    bit=1 conditions on the buyer being recommended, bit=0 on not. Returns
    None when the conditioning event has mass below 1e-12 (signal never
    sent, posterior undefined).
    """
    if bit not in (0, 1):
        raise ValueError("bit must be 0 or 1")
    if bit == 1:
        mass = signal_mass(scheme, d, buyer)
    else:
        mass = 1.0 - signal_mass(scheme, d, buyer)
    if mass < NEVER_SENT_MASS:
        return None
    weighted_value = signal_expect(
        scheme, d, buyer, v, _valuation_kinks(v), complement=(bit == 0)
    )
    return PosteriorStats(
        mass=mass,
        mean_valuation=weighted_value / mass,
        _scheme=scheme,
        _dist=d,
        _valuation=v,
        _buyer=buyer,
        _bit=bit,
    )


# ---------------------------------------------------------------------------
# revenue and the optimal constructions
# ---------------------------------------------------------------------------

def revenue_sig(mech: SignalingMechanism, d: QualityDistribution) -> float:
    """Sale probability times price."""
    scheme = mech.scheme
    if isinstance(scheme, IntervalScheme):
        sold = sum(
            d.mass(lo, hi) for lo, hi, sig in scheme.segments if sig != 0
        )
    else:
        assert isinstance(scheme, GridScheme)
        sold = float(np.dot(scheme.grid.weights, scheme.matrix.sum(axis=1)))
    return sold * mech.price


def scheme_expost_single(v: ValuationFunction, d: QualityDistribution, p: float) -> SingleThreshold:
    """Single ex-post buyer at price p: recommend exactly when v(q) >= p.

    With the threshold at v^-1(p) the buyer is certain their valuation covers
    the price whenever recommended, and certain it does not otherwise.
    """
    return SingleThreshold(v.inverse(p), (d.q1, d.q2))


def solve_expost_single(v: ValuationFunction, d: QualityDistribution) -> tuple[SignalingMechanism, float]:
    """Optimal threshold mechanism for one ex-post buyer.

    The price maximizes the signaling revenue of the threshold scheme, which
    is evaluated by quadrature of the recommended mass (independently of the
    fixed-price formula it provably equals).
    """
    def objective(p):
        scheme = scheme_expost_single(v, d, p)
        return revenue_sig(SignalingMechanism(scheme, p), d)

    lo, hi = 0.0, float(v(d.q2))
    price, revenue, _ = maximize_on_grid(
        objective, lo, hi, grid_points=PRICE_GRID_POINTS, refine_tol=REFINE_TOL, tie_tol=TIE_TOL
    )
    return SignalingMechanism(scheme_expost_single(v, d, price), price), revenue


def scheme_exinterim_single(v: ValuationFunction, d: QualityDistribution) -> SignalingMechanism:
    """Single ex-interim buyer: always recommend, price at the prior mean.

    Full disclosure of nothing: the recommendation carries no information, the
    posterior mean equals E[v(q)], and the obedience constraint binds exactly.
    """
    price = d.expect(v, breakpoints=_valuation_kinks(v))
    scheme = AlwaysRecommend([(d.q1, d.q2, 1)], 1)
    return SignalingMechanism(scheme, price)


def scheme_expost_multi_restricted(
    profile: ValuationProfile, d: QualityDistribution
) -> tuple[SignalingMechanism, float]:
    """Multiple ex-post buyers who may only purchase when recommended.

    Revenue [1 - G(vmin^-1(p))] * p is maximized over p; above the lowest
    inverse threshold the item is recommended to the buyer reaching the price
    soonest (lowest index on ties), below it nobody is recommended.
    """
    def objective(p):
        return (1.0 - d.cdf(profile.min_inverse(p))) * p

    lo = 0.0
    hi = max(v(d.q2) for v in profile)
    price, revenue, _ = maximize_on_grid(
        objective, lo, hi, grid_points=PRICE_GRID_POINTS, refine_tol=REFINE_TOL, tie_tol=TIE_TOL
    )
    t = profile.min_inverse(price)
    j = profile.argmin_inverse(price)
    segments = []
    if t > d.q1:
        segments.append((d.q1, t, 0))
    if t < d.q2:
        segments.append((t, d.q2, j + 1))
    if not segments:
        segments = [(d.q1, d.q2, 0)]
    return SignalingMechanism(Partition(segments, len(profile)), price), revenue


def scheme_exinterim_multi(profile: ValuationProfile, d: QualityDistribution) -> SignalingMechanism:
    """Multiple ex-interim buyers: recommend the argmax buyer, price at E[max_i v_i].

    Every quality is recommended to the buyer who values it most (lowest index
    on ties), so the sale probability is 1 and the price extracts the full
    expected maximum valuation. The summed obedience constraint binds; the
    per-buyer one can go negative (see the obedience module).
    """
    q1, q2 = d.q1, d.q2
    cuts = sorted(set(profile.crossings()) | set(profile.value_kinks()))
    edges = [q1, *[c for c in cuts if q1 < c < q2], q2]
    segments = []
    for a, b in zip(edges[:-1], edges[1:]):
        recipient = profile.argmax_buyer(0.5 * (a + b))
        if segments and segments[-1][2] == recipient + 1:
            lo, _, sig = segments[-1]
            segments[-1] = (lo, b, sig)
        else:
            segments.append((a, b, recipient + 1))
    price = profile.expected_max_valuation(d)
    return SignalingMechanism(AlwaysRecommend(segments, len(profile)), price)
