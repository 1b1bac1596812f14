"""Quality priors over a bounded support [q1, q2].

Every distribution exposes the same surface: cdf/pdf, quantile by bisection,
inverse-transform sampling from a caller-supplied generator, expectation of a
(possibly kinked) integrand by adaptive Simpson, and an equal-probability
midpoint discretization used by the LP oracle. Instances are immutable and
validated at construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .numerics import bisect_increasing, integrate_piecewise

_CDF_EDGE_TOL = 1e-12
_QUANTILE_XTOL = 1e-10


@dataclass(frozen=True)
class DiscreteQualityGrid:
    """Equal-probability midpoint grid: m points, each carrying weight 1/m."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "points", np.asarray(self.points, dtype=float))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        if self.points.ndim != 1 or self.points.shape != self.weights.shape:
            raise ValueError("points and weights must be 1-D arrays of equal length")
        if np.any(np.diff(self.points) <= 0):
            raise ValueError("grid points must be strictly increasing")
        if np.any(self.weights < 0) or abs(self.weights.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be nonnegative and sum to 1")

    @property
    def size(self) -> int:
        return len(self.points)

    def expect(self, values: np.ndarray) -> float:
        """Grid expectation sum(w_k * values_k)."""
        return float(np.dot(self.weights, values))


class QualityDistribution:
    """Base prior on [q1, q2]; subclasses supply the raw cdf/pdf on the support."""

    family = "abstract"

    def __init__(self, q1: float, q2: float):
        if not (math.isfinite(q1) and math.isfinite(q2) and q1 < q2):
            raise ValueError(f"support must satisfy q1 < q2, got [{q1}, {q2}]")
        self.q1 = float(q1)
        self.q2 = float(q2)

    @property
    def support(self) -> tuple[float, float]:
        return (self.q1, self.q2)

    # subclasses implement these on arrays clipped to the support
    def _cdf_in(self, q):
        raise NotImplementedError

    def _pdf_in(self, q):
        raise NotImplementedError

    def cdf(self, q):
        """P(quality <= q); 0 below the support, 1 above it. Accepts arrays."""
        arr = np.asarray(q, dtype=float)
        out = np.clip(self._cdf_in(np.clip(arr, self.q1, self.q2)), 0.0, 1.0)
        out = np.where(arr <= self.q1, 0.0, np.where(arr >= self.q2, 1.0, out))
        return float(out) if np.ndim(q) == 0 else out

    def pdf(self, q):
        """Density g(q); zero outside the support. Accepts arrays."""
        arr = np.asarray(q, dtype=float)
        inside = (arr >= self.q1) & (arr <= self.q2)
        out = np.where(inside, self._pdf_in(np.clip(arr, self.q1, self.q2)), 0.0)
        return float(out) if np.ndim(q) == 0 else out

    def quantile(self, u: float) -> float:
        """Smallest q with cdf(q) >= u, by bisection to 1e-10."""
        if not 0.0 <= u <= 1.0:
            raise ValueError(f"quantile argument must lie in [0, 1], got {u}")
        if u <= 0.0:
            return self.q1
        if u >= 1.0:
            # smallest q reaching cdf 1 (plateaus matter for piecewise cdfs)
            return bisect_increasing(self.cdf, 1.0, self.q1, self.q2, _QUANTILE_XTOL)
        return bisect_increasing(self.cdf, u, self.q1, self.q2, _QUANTILE_XTOL)

    def _quantile_array(self, u: np.ndarray) -> np.ndarray:
        # vectorized bisection, same semantics as quantile(); ~60 halvings
        # push the interval width far below the scalar tolerance
        lo = np.full_like(u, self.q1)
        hi = np.full_like(u, self.q2)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            ge = self.cdf(mid) >= u
            hi = np.where(ge, mid, hi)
            lo = np.where(ge, lo, mid)
        out = hi.copy()
        out[u <= 0.0] = self.q1
        return out

    def sample(self, rng: np.random.Generator, size: int | None = None):
        """Inverse-transform sampling; reproducible per generator state."""
        if size is None:
            return self.quantile(float(rng.random()))
        return self._quantile_array(rng.random(size))

    def expect(self, f, breakpoints=()) -> float:
        """E[f(q)] = integral of f*g over the support, adaptive Simpson at 1e-10.

        Kinked integrands must supply their interior kink locations via
        ``breakpoints``; the density's own discontinuities are added here.
        """
        return integrate_piecewise(
            lambda q: f(q) * self.pdf(q),
            self.q1,
            self.q2,
            tuple(breakpoints) + tuple(self._density_breakpoints()),
        )

    def mass(self, lo: float, hi: float) -> float:
        """P(lo <= quality <= hi) via the cdf."""
        if hi <= lo:
            return 0.0
        return self.cdf(hi) - self.cdf(lo)

    def discretize(self, m: int) -> DiscreteQualityGrid:
        """m equal-probability bins represented by their quantile midpoints."""
        if m < 2:
            raise ValueError(f"discretization needs at least 2 bins, got {m}")
        u = (np.arange(m) + 0.5) / m
        return DiscreteQualityGrid(self._quantile_array(u), np.full(m, 1.0 / m))

    def _validate(self):
        # construction-time sanity: cdf pins the support endpoints and the
        # density integrates to 1
        if abs(self.cdf(self.q1)) > _CDF_EDGE_TOL or abs(self.cdf(self.q2) - 1.0) > _CDF_EDGE_TOL:
            raise ValueError(f"{self.family}: cdf must run from 0 to 1 over the support")
        total = integrate_piecewise(self.pdf, self.q1, self.q2, self._density_breakpoints())
        if abs(total - 1.0) > 1e-8:
            raise ValueError(f"{self.family}: density integrates to {total}, expected 1")

    def _density_breakpoints(self):
        return ()

    def __repr__(self):
        return f"{type(self).__name__}(q1={self.q1}, q2={self.q2})"


class Uniform(QualityDistribution):
    family = "uniform"

    def __init__(self, q1: float, q2: float):
        super().__init__(q1, q2)
        self._validate()

    def _cdf_in(self, q):
        return (q - self.q1) / (self.q2 - self.q1)

    def _pdf_in(self, q):
        return np.full_like(np.asarray(q, dtype=float), 1.0 / (self.q2 - self.q1))


class ScaledBeta(QualityDistribution):
    """Beta(alpha, beta) stretched onto [q1, q2]."""

    family = "scaled_beta"

    def __init__(self, alpha: float, beta: float, q1: float = 0.0, q2: float = 1.0):
        super().__init__(q1, q2)
        if alpha <= 0 or beta <= 0:
            raise ValueError("beta shape parameters must be positive")
        self.alpha = float(alpha)
        self.beta = float(beta)
        self._log_norm = special.betaln(self.alpha, self.beta) + math.log(q2 - q1)
        self._validate()

    def _unit(self, q):
        return (q - self.q1) / (self.q2 - self.q1)

    def _cdf_in(self, q):
        return special.betainc(self.alpha, self.beta, self._unit(q))

    def _pdf_in(self, q):
        t = np.clip(self._unit(q), 0.0, 1.0)
        with np.errstate(divide="ignore"):
            logp = (
                special.xlogy(self.alpha - 1.0, t)
                + special.xlog1py(self.beta - 1.0, -t)
                - self._log_norm
            )
        return np.exp(logp)


class TruncatedNormal(QualityDistribution):
    """Normal(mu, sigma) conditioned on [q1, q2]."""

    family = "truncated_normal"

    def __init__(self, mu: float, sigma: float, q1: float, q2: float):
        super().__init__(q1, q2)
        if sigma <= 0:
            raise ValueError("sigma must be positive")
        self.mu = float(mu)
        self.sigma = float(sigma)
        self._lo = self._phi((q1 - mu) / sigma)
        self._hi = self._phi((q2 - mu) / sigma)
        self._z = self._hi - self._lo
        if self._z < 1e-12:
            raise ValueError("support carries negligible normal mass")
        self._validate()

    @staticmethod
    def _phi(z):
        return 0.5 * (1.0 + special.erf(np.asarray(z) / math.sqrt(2.0)))

    def _cdf_in(self, q):
        z = (np.asarray(q, dtype=float) - self.mu) / self.sigma
        return (self._phi(z) - self._lo) / self._z

    def _pdf_in(self, q):
        z = (np.asarray(q, dtype=float) - self.mu) / self.sigma
        dens = np.exp(-0.5 * z * z) / (self.sigma * math.sqrt(2.0 * math.pi))
        return dens / self._z


class PiecewiseLinearCdf(QualityDistribution):
    """Cdf given by knots (q_j, F_j); density is piecewise constant.

    The density jumps at interior knots, so the knots are advertised as
    breakpoints to the quadrature. Deviates from a smooth prior but useful
    as a stress-test family.
    """

    family = "piecewise_linear_cdf"

    def __init__(self, knots):
        pts = [(float(q), float(F)) for q, F in knots]
        if len(pts) < 2:
            raise ValueError("need at least two cdf knots")
        qs = np.array([q for q, _ in pts])
        Fs = np.array([F for _, F in pts])
        if np.any(np.diff(qs) <= 0):
            raise ValueError("cdf knot positions must be strictly increasing")
        if np.any(np.diff(Fs) < 0):
            raise ValueError("cdf knot values must be nondecreasing")
        if abs(Fs[0]) > _CDF_EDGE_TOL or abs(Fs[-1] - 1.0) > _CDF_EDGE_TOL:
            raise ValueError("cdf knots must start at 0 and end at 1")
        super().__init__(qs[0], qs[-1])
        self.knot_q = qs
        self.knot_F = Fs
        self._slopes = np.diff(Fs) / np.diff(qs)
        self._validate()

    def _cdf_in(self, q):
        return np.interp(q, self.knot_q, self.knot_F)

    def _pdf_in(self, q):
        idx = np.clip(np.searchsorted(self.knot_q, q, side="right") - 1, 0, len(self._slopes) - 1)
        return self._slopes[idx]

    def _density_breakpoints(self):
        return tuple(self.knot_q[1:-1])


_FAMILIES = {
    "uniform": Uniform,
    "scaled_beta": ScaledBeta,
    "truncated_normal": TruncatedNormal,
    "piecewise_linear_cdf": PiecewiseLinearCdf,
}


def make_distribution(family: str, params: dict, support=None) -> QualityDistribution:
    """Build a distribution from config fields (family name, params, support)."""
    key = family.strip().lower()
    if key not in _FAMILIES:
        raise ValueError(f"unknown distribution family {family!r}; known: {sorted(_FAMILIES)}")
    if key == "uniform":
        if support is None:
            raise ValueError("uniform requires a support [q1, q2]")
        return Uniform(support[0], support[1])
    if key == "scaled_beta":
        q1, q2 = support if support is not None else (0.0, 1.0)
        return ScaledBeta(params["alpha"], params["beta"], q1, q2)
    if key == "truncated_normal":
        if support is None:
            raise ValueError("truncated_normal requires a support [q1, q2]")
        return TruncatedNormal(params["mu"], params["sigma"], support[0], support[1])
    return PiecewiseLinearCdf(params["knots"])
