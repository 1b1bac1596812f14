"""Buyer valuation functions v_i(q) and profile-level aggregates.

Valuations are strictly increasing and nonnegative on the quality support, so
each has a well-defined inverse; the inverse is clamped to the support, which
makes G(v^-1(p)) the exact probability that a valuation falls below p even for
prices outside the attainable range.
"""

from __future__ import annotations

import math

import numpy as np

from .numerics import bisect_increasing
from .quality_dist import QualityDistribution

_MONOTONE_GRID = 1024
_INVERSE_XTOL = 1e-10


class ValuationFunction:
    """Strictly increasing map from quality to money on a fixed support."""

    form = "abstract"

    def __init__(self, support: tuple[float, float]):
        self.q1, self.q2 = float(support[0]), float(support[1])
        if not self.q1 < self.q2:
            raise ValueError("valuation support must satisfy q1 < q2")

    def __call__(self, q):
        raise NotImplementedError

    def _check_monotone(self):
        qs = np.linspace(self.q1, self.q2, _MONOTONE_GRID)
        vals = np.asarray(self(qs), dtype=float)
        if np.any(np.diff(vals) <= 0):
            raise ValueError(f"{self.form}: valuation must be strictly increasing on the support")
        if vals[0] < 0:
            raise ValueError(f"{self.form}: valuation must be nonnegative on the support")

    def inverse(self, p: float) -> float:
        """Quality at which the valuation reaches price p, clamped to the support."""
        if p <= self(self.q1):
            return self.q1
        if p >= self(self.q2):
            return self.q2
        return bisect_increasing(self, p, self.q1, self.q2, _INVERSE_XTOL)

    def __repr__(self):
        return f"{type(self).__name__}(support=({self.q1}, {self.q2}))"


class Linear(ValuationFunction):
    """v(q) = intercept + slope*q with slope > 0."""

    form = "linear"

    def __init__(self, intercept: float, slope: float, support):
        super().__init__(support)
        if slope <= 0:
            raise ValueError("linear valuation needs positive slope")
        self.intercept = float(intercept)
        self.slope = float(slope)
        self._check_monotone()

    def __call__(self, q):
        return self.intercept + self.slope * q


class Power(ValuationFunction):
    """v(q) = scale * q**exponent on a nonnegative support."""

    form = "power"

    def __init__(self, scale: float, exponent: float, support):
        super().__init__(support)
        if scale <= 0 or exponent <= 0:
            raise ValueError("power valuation needs positive scale and exponent")
        if self.q1 < 0:
            raise ValueError("power valuation requires a nonnegative support")
        self.scale = float(scale)
        self.exponent = float(exponent)
        self._check_monotone()

    def __call__(self, q):
        return self.scale * np.power(q, self.exponent) if np.ndim(q) else self.scale * float(q) ** self.exponent


class PiecewiseLinearIncreasing(ValuationFunction):
    """Piecewise-linear valuation through knots (q_j, v_j) spanning the support."""

    form = "piecewise_linear"

    def __init__(self, knots, support=None):
        pts = [(float(q), float(v)) for q, v in knots]
        if len(pts) < 2:
            raise ValueError("need at least two valuation knots")
        qs = np.array([q for q, _ in pts])
        vs = np.array([v for _, v in pts])
        if support is None:
            support = (qs[0], qs[-1])
        super().__init__(support)
        if not (math.isclose(qs[0], self.q1) and math.isclose(qs[-1], self.q2)):
            raise ValueError("valuation knots must span the support")
        if np.any(np.diff(qs) <= 0) or np.any(np.diff(vs) <= 0):
            raise ValueError("valuation knots must be strictly increasing in both coordinates")
        self.knot_q = qs
        self.knot_v = vs
        self._check_monotone()

    def __call__(self, q):
        out = np.interp(q, self.knot_q, self.knot_v)
        return float(out) if np.ndim(q) == 0 else out

    def kinks(self):
        return tuple(self.knot_q[1:-1])


class ValuationProfile:
    """Ordered collection of n >= 1 buyer valuations sharing one support."""

    def __init__(self, buyers):
        buyers = list(buyers)
        if not buyers:
            raise ValueError("profile needs at least one buyer")
        s0 = (buyers[0].q1, buyers[0].q2)
        for v in buyers[1:]:
            if (v.q1, v.q2) != s0:
                raise ValueError("all buyers must share one quality support")
        self.buyers = buyers

    def __len__(self):
        return len(self.buyers)

    def __iter__(self):
        return iter(self.buyers)

    def __getitem__(self, i):
        return self.buyers[i]

    @property
    def support(self):
        return (self.buyers[0].q1, self.buyers[0].q2)

    def value_kinks(self):
        """Interior kink locations of all piecewise-linear buyers."""
        pts = []
        for v in self.buyers:
            if isinstance(v, PiecewiseLinearIncreasing):
                pts.extend(v.kinks())
        return tuple(sorted(set(pts)))

    def expected_valuation(self, i: int, d: QualityDistribution) -> float:
        """E[v_i(q)] under the prior (buyers indexed from 0)."""
        v = self.buyers[i]
        kinks = v.kinks() if isinstance(v, PiecewiseLinearIncreasing) else ()
        return d.expect(lambda q: v(q), breakpoints=kinks)

    def expected_valuations(self, d: QualityDistribution) -> list[float]:
        return [self.expected_valuation(i, d) for i in range(len(self.buyers))]

    def crossings(self, grid_points: int = 256) -> tuple[float, ...]:
        """Interior qualities where two buyers' valuations cross.

        Sign-change scan of v_i - v_j on a coarse grid, refined by bisection.
        Profiles in scope have O(1) crossings; a crossing squeezed entirely
        inside one scan cell would be missed.
        """
        q1, q2 = self.support
        qs = np.linspace(q1, q2, grid_points)
        found = set()
        for i in range(len(self.buyers)):
            for j in range(i + 1, len(self.buyers)):
                diff = np.asarray(self.buyers[i](qs)) - np.asarray(self.buyers[j](qs))
                sign = np.sign(diff)
                for k in range(len(qs) - 1):
                    if sign[k] == 0.0 and q1 < qs[k] < q2:
                        found.add(float(qs[k]))
                    elif sign[k] * sign[k + 1] < 0:
                        f = lambda q: self.buyers[i](q) - self.buyers[j](q)
                        lo, hi = qs[k], qs[k + 1]
                        if f(lo) > f(hi):
                            g = lambda q: -f(q)
                        else:
                            g = f
                        x = bisect_increasing(g, 0.0, lo, hi, _INVERSE_XTOL)
                        found.add(float(x))
        return tuple(sorted(found))

    def max_valuation(self, q):
        """Pointwise max over buyers at quality q."""
        return max(v(q) for v in self.buyers)

    def argmax_buyer(self, q) -> int:
        """Index of the highest-valuation buyer at q, lowest index on ties."""
        vals = [v(q) for v in self.buyers]
        best = max(vals)
        for i, x in enumerate(vals):
            if x >= best - 1e-15:
                return i
        return 0

    def expected_max_valuation(self, d: QualityDistribution) -> float:
        """E[max_i v_i(q)], splitting the integral at valuation crossings."""
        breaks = tuple(self.crossings()) + self.value_kinks()
        return d.expect(self.max_valuation, breakpoints=breaks)

    def min_inverse(self, p: float) -> float:
        """min_i v_i^-1(p), clamped thresholds."""
        return min(v.inverse(p) for v in self.buyers)

    def max_inverse(self, p: float) -> float:
        """max_i v_i^-1(p), clamped thresholds."""
        return max(v.inverse(p) for v in self.buyers)

    def argmin_inverse(self, p: float) -> int:
        """Buyer attaining min_inverse(p), lowest index on ties."""
        thresholds = [v.inverse(p) for v in self.buyers]
        best = min(thresholds)
        for i, t in enumerate(thresholds):
            if t <= best + 1e-12:
                return i
        return 0


def make_valuation(form: str, params: dict, support) -> ValuationFunction:
    """Build a valuation from config fields (form name, params, support)."""
    key = form.strip().lower()
    if key == "linear":
        return Linear(params["intercept"], params["slope"], support)
    if key == "power":
        return Power(params["scale"], params["exponent"], support)
    if key == "piecewise_linear":
        return PiecewiseLinearIncreasing(params["knots"], support)
    raise ValueError(f"unknown valuation form {form!r}; known: linear, power, piecewise_linear")
