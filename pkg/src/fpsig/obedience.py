"""Numerical verification of the obedience constraints.

Every constraint is reported as a slack: nonnegative means satisfied, and the
verdict tolerates -1e-9 of quadrature noise. Constraints conditioned on a
signal that is (almost) never sent are flagged vacuous and excluded from the
verdict, since the posterior behind them is undefined.

Ex-post obedience is encoded as mass conditions (recommended mass below the
buyer's price threshold, unrecommended mass above it) rather than posterior
probabilities, avoiding division by small signal masses. Ex-interim obedience
is the signed surplus integral of pi_i (v_i - p) g.

For multiple ex-interim buyers the checker reports both the per-buyer slacks
and their sum. The argmax construction makes the *summed* purchase constraint
bind while a low buyer's own slack can be negative (the single posted price
can exceed that buyer's conditional mean); callers choose which reading
decides the verdict via ``aggregate=``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .quality_dist import QualityDistribution
from .signaling import (
    NEVER_SENT_MASS,
    SignalingMechanism,
    SignalingScheme,
    complement_mass,
    signal_expect,
    signal_mass,
)
from .valuation import PiecewiseLinearIncreasing, ValuationFunction, ValuationProfile

SLACK_TOL = 1e-9

OBEDIENT = "obedient"
VIOLATED = "violated"
NO_OBEDIENT_MECHANISM = "no_obedient_mechanism_exists"


@dataclass(frozen=True)
class ConstraintSlack:
    label: str
    buyer: int | None  # 1-based buyer; None for aggregate rows
    signal_bit: int
    slack: float
    vacuous: bool = False
    tol: float = SLACK_TOL

    def satisfied(self) -> bool:
        return self.vacuous or self.slack >= -self.tol


@dataclass
class ObedienceReport:
    constraints: list[ConstraintSlack]
    verdict: str
    witness: tuple[float, float] | None = None
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "note": self.note,
            "witness": list(self.witness) if self.witness else None,
            "constraints": [
                {
                    "label": c.label,
                    "buyer": c.buyer,
                    "signal_bit": c.signal_bit,
                    "slack": c.slack,
                    "vacuous": c.vacuous,
                }
                for c in self.constraints
            ],
        }


def _verdict(rows) -> str:
    return OBEDIENT if all(r.satisfied() for r in rows) else VIOLATED


def _kinks(v: ValuationFunction):
    return v.kinks() if isinstance(v, PiecewiseLinearIncreasing) else ()


def _slack_tolerance(scheme: SignalingScheme) -> float:
    """Verdict tolerance matched to how the scheme's integrals are computed.

    Interval schemes integrate by quadrature (noise floor 1e-10, tolerance
    1e-9). Grid schemes replace integrals with midpoint sums whose error is
    O(1/m^2); judging those against 1e-9 would flip verdicts on binding
    constraints, so the tolerance widens with the grid resolution. This is
    what keeps verdicts representation-agnostic at m around 401.
    """
    from .signaling import GridScheme

    if isinstance(scheme, GridScheme):
        return SLACK_TOL + 4.0 / scheme.grid.size**2
    return SLACK_TOL


def check_expost_single(
    mech: SignalingMechanism, v: ValuationFunction, d: QualityDistribution
) -> ObedienceReport:
    """Single ex-post buyer: recommended mass below v^-1(p) must vanish, and
    so must the unrecommended mass above it."""
    if mech.scheme.n_buyers != 1:
        raise ValueError("single-buyer checker on a multi-buyer scheme")
    t = v.inverse(mech.price)
    tol = _slack_tolerance(mech.scheme)
    m1 = signal_mass(mech.scheme, d, 0)
    m0 = 1.0 - m1
    rows = [
        ConstraintSlack(
            label="recommended_mass_below_threshold",
            buyer=1,
            signal_bit=1,
            slack=-signal_mass(mech.scheme, d, 0, d.q1, t),
            vacuous=m1 < NEVER_SENT_MASS,
            tol=tol,
        ),
        ConstraintSlack(
            label="unrecommended_mass_above_threshold",
            buyer=1,
            signal_bit=0,
            slack=-complement_mass(mech.scheme, d, 0, t, d.q2),
            vacuous=m0 < NEVER_SENT_MASS,
            tol=tol,
        ),
    ]
    return ObedienceReport(constraints=rows, verdict=_verdict(rows))


def check_exinterim_single(
    mech: SignalingMechanism, v: ValuationFunction, d: QualityDistribution
) -> ObedienceReport:
    """Single ex-interim buyer: surplus integral of pi (v-p) g decides both
    bits; the refusal slack subtracts the prior surplus E[v] - p."""
    if mech.scheme.n_buyers != 1:
        raise ValueError("single-buyer checker on a multi-buyer scheme")
    p = mech.price
    tol = _slack_tolerance(mech.scheme)
    surplus = signal_expect(mech.scheme, d, 0, lambda q: v(q) - p, _kinks(v))
    prior_surplus = d.expect(v, breakpoints=_kinks(v)) - p
    m1 = signal_mass(mech.scheme, d, 0)
    rows = [
        ConstraintSlack(
            label="buy_after_recommendation",
            buyer=1,
            signal_bit=1,
            slack=surplus,
            vacuous=m1 < NEVER_SENT_MASS,
            tol=tol,
        ),
        ConstraintSlack(
            label="refuse_without_recommendation",
            buyer=1,
            signal_bit=0,
            slack=surplus - prior_surplus,
            vacuous=(1.0 - m1) < NEVER_SENT_MASS,
            tol=tol,
        ),
    ]
    return ObedienceReport(constraints=rows, verdict=_verdict(rows))


def check_expost_multi(
    profile: ValuationProfile,
    d: QualityDistribution,
    p: float,
    scheme: SignalingScheme | None = None,
) -> ObedienceReport:
    """Existence analysis for multiple ex-post buyers at price p.

    Whenever two or more buyers have price thresholds strictly below q2, the
    refusal constraints force every such buyer's recommendation probability to
    1 on the common top interval, which no sub-simplex row can carry: no
    obedient mechanism exists, and that interval is the witness. With at most
    one effective buyer the system collapses to the single-buyer case. If a
    concrete scheme is supplied its per-constraint slacks are reported too.
    """
    thresholds = [v.inverse(p) for v in profile]
    inside = [i for i, t in enumerate(thresholds) if t < d.q2 - 1e-12]

    rows: list[ConstraintSlack] = []
    if scheme is not None:
        if scheme.n_buyers != len(profile):
            raise ValueError("scheme dimension does not match the profile")
        tol = _slack_tolerance(scheme)
        for i, t in enumerate(thresholds):
            m1 = signal_mass(scheme, d, i)
            rows.append(
                ConstraintSlack(
                    label="recommended_mass_below_threshold",
                    buyer=i + 1,
                    signal_bit=1,
                    slack=-signal_mass(scheme, d, i, d.q1, t),
                    vacuous=m1 < NEVER_SENT_MASS,
                    tol=tol,
                )
            )
            rows.append(
                ConstraintSlack(
                    label="unrecommended_mass_above_threshold",
                    buyer=i + 1,
                    signal_bit=0,
                    slack=-complement_mass(scheme, d, i, t, d.q2),
                    vacuous=(1.0 - m1) < NEVER_SENT_MASS,
                    tol=tol,
                )
            )

    if len(inside) >= 2:
        forcing_lo = max(thresholds[i] for i in inside)
        return ObedienceReport(
            constraints=rows,
            verdict=NO_OBEDIENT_MECHANISM,
            witness=(forcing_lo, d.q2),
            note=(
                f"{len(inside)} buyers reach the price inside the support; on the "
                f"witness interval each must be recommended with probability 1"
            ),
        )

    note = "reduces to single-buyer: at most one buyer's threshold lies inside the support"
    if scheme is not None:
        return ObedienceReport(constraints=rows, verdict=_verdict(rows), note=note)
    return ObedienceReport(constraints=rows, verdict=OBEDIENT, note=note)


def check_expost_multi_restricted(
    mech: SignalingMechanism, profile: ValuationProfile, d: QualityDistribution
) -> ObedienceReport:
    """Recommendation-gated ex-post buyers: only the purchase-side mass
    conditions apply (buyers cannot buy unrecommended, so the refusal rows
    are dropped by assumption)."""
    if mech.scheme.n_buyers != len(profile):
        raise ValueError("scheme dimension does not match the profile")
    tol = _slack_tolerance(mech.scheme)
    rows = []
    for i, v in enumerate(profile):
        t = v.inverse(mech.price)
        m1 = signal_mass(mech.scheme, d, i)
        rows.append(
            ConstraintSlack(
                label="recommended_mass_below_threshold",
                buyer=i + 1,
                signal_bit=1,
                slack=-signal_mass(mech.scheme, d, i, d.q1, t),
                vacuous=m1 < NEVER_SENT_MASS,
                tol=tol,
            )
        )
    return ObedienceReport(constraints=rows, verdict=_verdict(rows))


def check_exinterim_multi(
    mech: SignalingMechanism,
    profile: ValuationProfile,
    d: QualityDistribution,
    aggregate: bool = False,
) -> ObedienceReport:
    """Multiple ex-interim buyers: per-buyer surplus slacks plus their sum.

    ``aggregate=True`` bases the verdict on the summed rows only (the reading
    under which the argmax construction is obedient); the per-buyer rows are
    always present in the report either way.
    """
    if mech.scheme.n_buyers != len(profile):
        raise ValueError("scheme dimension does not match the profile")
    p = mech.price
    tol = _slack_tolerance(mech.scheme)
    per_buyer: list[ConstraintSlack] = []
    surpluses = []
    prior_surpluses = []
    sold_mass = 0.0
    for i, v in enumerate(profile):
        surplus = signal_expect(mech.scheme, d, i, lambda q: v(q) - p, _kinks(v))
        prior_surplus = profile.expected_valuation(i, d) - p
        m1 = signal_mass(mech.scheme, d, i)
        sold_mass += m1
        surpluses.append(surplus)
        prior_surpluses.append(prior_surplus)
        per_buyer.append(
            ConstraintSlack(
                label="buy_after_recommendation",
                buyer=i + 1,
                signal_bit=1,
                slack=surplus,
                vacuous=m1 < NEVER_SENT_MASS,
                tol=tol,
            )
        )
        per_buyer.append(
            ConstraintSlack(
                label="refuse_without_recommendation",
                buyer=i + 1,
                signal_bit=0,
                slack=surplus - prior_surplus,
                vacuous=(1.0 - m1) < NEVER_SENT_MASS,
                tol=tol,
            )
        )
    agg_rows = [
        ConstraintSlack(
            label="aggregate_buy_after_recommendation",
            buyer=None,
            signal_bit=1,
            slack=sum(surpluses),
            vacuous=sold_mass < NEVER_SENT_MASS,
            tol=tol,
        ),
        ConstraintSlack(
            label="aggregate_refuse_without_recommendation",
            buyer=None,
            signal_bit=0,
            slack=sum(surpluses) - sum(prior_surpluses),
            vacuous=(len(profile) - sold_mass) < NEVER_SENT_MASS,
            tol=tol,
        ),
    ]
    rows = per_buyer + agg_rows
    verdict = _verdict(agg_rows) if aggregate else _verdict(per_buyer)
    note = "verdict from aggregate rows" if aggregate else "verdict from per-buyer rows"
    return ObedienceReport(constraints=rows, verdict=verdict, note=note)
