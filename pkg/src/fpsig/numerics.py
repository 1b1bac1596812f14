"""Scalar numerical kernels: adaptive Simpson quadrature, bisection, golden section.

Everything here is deterministic and allocation-free; the rest of the package
builds its integrals, inverses and price searches on these three routines.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0  # 1/phi
INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0  # 1/phi^2


class QuadratureError(Exception):
    """Adaptive subdivision hit its depth cap before reaching tolerance."""


def _simpson(f, a, fa, b, fb):
    m = 0.5 * (a + b)
    fm = f(m)
    return m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb)


_RESIDUAL_FLOOR = 1e-12  # depth-cap residuals below this are absorbed


def _adaptive(f, a, fa, b, fb, m, fm, whole, tol, depth):
    lm, flm, left = _simpson(f, a, fa, m, fm)
    rm, frm, right = _simpson(f, m, fm, b, fb)
    delta = left + right - whole
    if abs(delta) <= 15.0 * tol:
        # Richardson extrapolation of the two Simpson estimates
        return left + right + delta / 15.0
    if depth <= 0:
        # point discontinuities (e.g. a piecewise density evaluated at its own
        # knot) bottom out here with residuals far below the caller's
        # tolerance; only a genuinely unresolved interval is an error
        if abs(delta) <= _RESIDUAL_FLOOR:
            return left + right + delta / 15.0
        raise QuadratureError(
            f"adaptive Simpson did not converge on [{a}, {b}] "
            f"(residual {abs(delta):.3e} > {15.0 * tol:.3e})"
        )
    half = 0.5 * tol
    return _adaptive(f, a, fa, m, fm, lm, flm, left, half, depth - 1) + _adaptive(
        f, m, fm, b, fb, rm, frm, right, half, depth - 1
    )


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10,
    max_depth: int = 40,
) -> float:
    """Integrate f over [a, b] by adaptive Simpson to absolute tolerance ``tol``.

    Raises QuadratureError if the recursion reaches ``max_depth`` without the
    local error estimate falling below tolerance (e.g. on unsplit kinks).
    """
    if a == b:
        return 0.0
    if b < a:
        return -adaptive_simpson(f, b, a, tol, max_depth)
    fa, fb = f(a), f(b)
    m, fm, whole = _simpson(f, a, fa, b, fb)
    return _adaptive(f, a, fa, b, fb, m, fm, whole, tol, max_depth)


def integrate_piecewise(
    f: Callable[[float], float],
    a: float,
    b: float,
    breakpoints: Sequence[float] = (),
    tol: float = 1e-10,
    max_depth: int = 40,
) -> float:
    """Integrate f over [a, b], splitting at the supplied interior breakpoints.

    Kinked integrands (max of valuations, indicator thresholds) stall adaptive
    refinement; callers pass the known kink locations and each smooth piece is
    integrated separately. Breakpoints outside (a, b) are ignored.
    """
    if b < a:
        return -integrate_piecewise(f, b, a, breakpoints, tol, max_depth)
    cuts = sorted({x for x in breakpoints if a < x < b})
    edges = [a, *cuts, b]
    pieces = len(edges) - 1
    if pieces <= 0:
        return 0.0
    piece_tol = tol / pieces
    return sum(
        adaptive_simpson(f, lo, hi, piece_tol, max_depth)
        for lo, hi in zip(edges[:-1], edges[1:])
    )


def bisect_increasing(
    f: Callable[[float], float],
    target: float,
    lo: float,
    hi: float,
    xtol: float = 1e-10,
) -> float:
    """Smallest x in [lo, hi] with f(x) >= target, for nondecreasing f.

    Plain interval bisection to absolute x-tolerance; callers guarantee
    f(lo) <= target <= f(hi) up to clamping.
    """
    if f(lo) >= target:
        return lo
    if f(hi) < target:
        return hi
    a, b = lo, hi
    while b - a > xtol:
        m = 0.5 * (a + b)
        if f(m) >= target:
            b = m
        else:
            a = m
    return b


def golden_section_maximize(
    f: Callable[[float], float],
    a: float,
    b: float,
    xtol: float = 1e-8,
) -> tuple[float, float]:
    """Golden-section search for a maximum of f on [a, b].

    Returns (x, f(x)) with the bracket narrowed to ``xtol``. Assumes f is
    unimodal on the bracket; callers locate the bracket with a global grid
    scan first.
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    if h <= xtol:
        x = 0.5 * (a + b)
        return x, f(x)
    n = int(math.ceil(math.log(xtol / h) / math.log(INV_PHI)))
    c = a + INV_PHI2 * h
    d = a + INV_PHI * h
    yc, yd = f(c), f(d)
    for _ in range(n - 1):
        if yc > yd:
            b, d, yd = d, c, yc
            h *= INV_PHI
            c = a + INV_PHI2 * h
            yc = f(c)
        else:
            a, c, yc = c, d, yd
            h *= INV_PHI
            d = a + INV_PHI * h
            yd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def maximize_on_grid(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    grid_points: int = 2001,
    refine_tol: float = 1e-8,
    tie_tol: float = 1e-9,
) -> tuple[float, float, tuple[float, float]]:
    """Global grid scan over [lo, hi] followed by golden-section refinement.

    Returns (argmax, max, bracket). The 2001-point scan finds the best bucket
    for possibly multi-modal objectives; golden section then polishes inside
    the bracket around it. Candidates whose refined value ties the best within
    ``tie_tol`` resolve to the smallest price, so results are deterministic.
    """
    if hi <= lo:
        raise ValueError("empty bracket")
    step = (hi - lo) / (grid_points - 1)
    xs = [lo + k * step for k in range(grid_points)]
    ys = [f(x) for x in xs]
    best = max(ys)
    # every near-optimal grid bucket is refined so a flat top still resolves
    # to the smallest maximizing price; 8 buckets suffice since ties resolve low
    candidates = [k for k, y in enumerate(ys) if y >= best - tie_tol][:8]
    results = []
    for k in candidates:
        ka = xs[max(k - 1, 0)]
        kb = xs[min(k + 1, grid_points - 1)]
        x, y = golden_section_maximize(f, ka, kb, refine_tol)
        results.append((x, y, (ka, kb)))
    top = max(y for _, y, _ in results)
    winners = [(x, y, br) for x, y, br in results if y >= top - tie_tol]
    winners.sort(key=lambda t: t[0])
    return winners[0]
