"""The dense two-phase simplex against toy cases and scipy's solver."""

import numpy as np
import pytest
from scipy.optimize import linprog

from fpsig.simplex import (
    STATUS_INFEASIBLE,
    STATUS_OPTIMAL,
    STATUS_UNBOUNDED,
    solve_lp,
)


class TestToyPrograms:
    def test_single_variable_bound(self):
        res = solve_lp([1.0], [[1.0]], [0.7])
        assert res.status == STATUS_OPTIMAL
        assert res.objective == pytest.approx(0.7, abs=1e-12)

    def test_shared_budget(self):
        res = solve_lp([1.0, 1.0], [[1.0, 1.0]], [1.0])
        assert res.status == STATUS_OPTIMAL
        assert res.objective == pytest.approx(1.0, abs=1e-12)

    def test_contradiction_certified(self):
        # x >= 2 and x <= 1 cannot hold; the Phase-I mass measures the gap
        res = solve_lp([1.0], [[-1.0], [1.0]], [-2.0, 1.0])
        assert res.status == STATUS_INFEASIBLE
        assert res.certificate >= 1.0 - 1e-9

    def test_unbounded_detected(self):
        res = solve_lp([1.0], [[-1.0]], [1.0])  # max x s.t. x >= -1
        assert res.status == STATUS_UNBOUNDED

    def test_minimization(self):
        # min x + y s.t. x + y >= 1
        res = solve_lp([1.0, 1.0], [[-1.0, -1.0]], [-1.0], maximize=False)
        assert res.status == STATUS_OPTIMAL
        assert res.objective == pytest.approx(1.0, abs=1e-10)

    def test_degenerate_vertex(self):
        # many redundant rows intersecting at the same vertex
        A = [[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]
        b = [0.5, 0.5, 0.5, 1.0]
        res = solve_lp([1.0, 1.0], A, b)
        assert res.status == STATUS_OPTIMAL
        assert res.objective == pytest.approx(1.0, abs=1e-10)


class TestAgainstScipy:
    @pytest.mark.parametrize("seed", range(8))
    def test_random_instances(self, seed):
        rng = np.random.default_rng(seed)
        n, m = 6, 9
        A = rng.normal(size=(m, n))
        b = rng.uniform(0.5, 2.0, size=m)  # origin feasible
        c = rng.normal(size=n)
        ours = solve_lp(c, A, b, maximize=False)
        ref = linprog(c, A_ub=A, b_ub=b, bounds=(0, None), method="highs")
        if ref.status == 3:
            assert ours.status == STATUS_UNBOUNDED
        else:
            assert ref.status == 0
            assert ours.status == STATUS_OPTIMAL
            assert ours.objective == pytest.approx(ref.fun, abs=1e-7)

    @pytest.mark.parametrize("seed", range(8, 12))
    def test_random_with_negative_rhs(self, seed):
        rng = np.random.default_rng(seed)
        n, m = 5, 8
        A = rng.normal(size=(m, n))
        b = rng.uniform(-0.5, 1.5, size=m)
        c = rng.normal(size=n)
        b[-1] = 5.0
        A[-1] = 1.0  # keep the region bounded: sum x <= 5
        ours = solve_lp(-c, A, b, maximize=True)
        ref = linprog(c, A_ub=A, b_ub=b, bounds=(0, None), method="highs")
        if ref.status == 2:
            assert ours.status == STATUS_INFEASIBLE
        else:
            assert ours.status == STATUS_OPTIMAL
            assert ours.objective == pytest.approx(-ref.fun, abs=1e-7)


class TestSolutionQuality:
    def test_primal_feasibility(self):
        rng = np.random.default_rng(3)
        A = rng.normal(size=(7, 5))
        b = rng.uniform(0.5, 2.0, size=7)
        c = rng.normal(size=5)
        res = solve_lp(c, A, b)
        assert res.status == STATUS_OPTIMAL
        assert np.all(A @ res.x <= b + 1e-9)
        assert np.all(res.x >= -1e-12)

    def test_complementary_slackness(self):
        rng = np.random.default_rng(4)
        A = rng.normal(size=(7, 5))
        b = rng.uniform(0.5, 2.0, size=7)
        c = rng.normal(size=5)
        res = solve_lp(c, A, b)
        row_slack = b - A @ res.x
        residual = max(
            float(np.max(np.abs(res.duals * row_slack))),
            float(np.max(np.abs(res.reduced_costs * res.x))),
        )
        assert residual < 1e-7
