"""Quadrature, bisection and golden-section kernels against analytic values."""

import math

import numpy as np
import pytest

from fpsig.numerics import (
    adaptive_simpson,
    bisect_increasing,
    golden_section_maximize,
    integrate_piecewise,
    maximize_on_grid,
)


class TestAdaptiveSimpson:
    def test_polynomials_exact(self):
        assert adaptive_simpson(lambda q: q, 0, 1) == pytest.approx(0.5, abs=1e-12)
        assert adaptive_simpson(lambda q: q * q, 0, 1) == pytest.approx(1 / 3, abs=1e-12)
        assert adaptive_simpson(lambda q: 1.0, 0, 1) == pytest.approx(1.0, abs=1e-13)

    def test_transcendental(self):
        assert adaptive_simpson(math.sin, 0, math.pi) == pytest.approx(2.0, abs=1e-10)
        assert adaptive_simpson(math.exp, 0, 1) == pytest.approx(math.e - 1, abs=1e-10)

    def test_orientation_and_empty(self):
        assert adaptive_simpson(lambda q: q, 1, 0) == pytest.approx(-0.5, abs=1e-12)
        assert adaptive_simpson(lambda q: q, 0.3, 0.3) == 0.0

    def test_riemann_oracle_agreement(self):
        # brute-force midpoint Riemann sum as an independent check
        f = lambda q: 1.0 / (1.0 + q * q)
        grid = (np.arange(1_000_000) + 0.5) / 1_000_000
        riemann = float(np.mean(1.0 / (1.0 + grid * grid)))
        assert adaptive_simpson(f, 0, 1) == pytest.approx(riemann, abs=1e-6)
        assert adaptive_simpson(f, 0, 1) == pytest.approx(math.pi / 4, abs=1e-10)


class TestPiecewise:
    def test_kink_split(self):
        # integral of max(0.3 + 0.4q, q) on [0,1] splits at the crossing 0.5
        f = lambda q: max(0.3 + 0.4 * q, q)
        assert integrate_piecewise(f, 0, 1, breakpoints=(0.5,)) == pytest.approx(
            0.575, abs=1e-10
        )

    def test_breakpoints_outside_ignored(self):
        got = integrate_piecewise(lambda q: q, 0, 1, breakpoints=(-1.0, 2.0, 0.5))
        assert got == pytest.approx(0.5, abs=1e-12)

    def test_indicator_with_breakpoint(self):
        f = lambda q: (q - 0.6) if q >= 0.5 else 0.0
        assert integrate_piecewise(f, 0, 1, breakpoints=(0.5,)) == pytest.approx(
            0.075, abs=1e-10
        )


class TestBisection:
    def test_linear_target(self):
        f = lambda x: 2.0 * x
        assert bisect_increasing(f, 1.0, 0, 1) == pytest.approx(0.5, abs=1e-9)

    def test_clamps(self):
        f = lambda x: x
        assert bisect_increasing(f, -1.0, 0, 1) == 0.0
        assert bisect_increasing(f, 2.0, 0, 1) == 1.0

    def test_plateau_smallest(self):
        # flat-then-rising: smallest x reaching the target
        f = lambda x: max(x - 0.5, 0.0)
        x = bisect_increasing(f, 0.0, 0, 1)
        assert x == 0.0  # already at target on the left edge


class TestGoldenSection:
    def test_downward_parabola(self):
        x, y = golden_section_maximize(lambda p: (1 - p) * p, 0, 1, xtol=1e-8)
        assert x == pytest.approx(0.5, abs=1e-6)
        assert y == pytest.approx(0.25, abs=1e-10)

    def test_cubic_revenue(self):
        x, _ = golden_section_maximize(lambda p: (1 - p * p) * p, 0, 1, xtol=1e-8)
        assert x == pytest.approx(1 / math.sqrt(3), abs=1e-6)


class TestMaximizeOnGrid:
    def test_finds_global_of_bimodal(self):
        # two bumps, the higher one on the right
        f = lambda p: math.exp(-200 * (p - 0.2) ** 2) + 1.1 * math.exp(-200 * (p - 0.8) ** 2)
        x, y, _ = maximize_on_grid(f, 0, 1)
        assert x == pytest.approx(0.8, abs=1e-5)

    def test_tie_resolves_to_smallest_price(self):
        # two identical tent peaks at 0.25 and 0.75
        f = lambda p: max(0.0, 0.1 - abs(p - 0.25)) + max(0.0, 0.1 - abs(p - 0.75))
        x, _, _ = maximize_on_grid(f, 0, 1)
        assert x == pytest.approx(0.25, abs=1e-6)

    def test_empty_bracket_rejected(self):
        with pytest.raises(ValueError):
            maximize_on_grid(lambda p: p, 1.0, 1.0)
