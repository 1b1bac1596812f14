"""Shared fixtures: canonical distributions, valuations and scheme builders."""

import numpy as np
import pytest

from fpsig import (
    Linear,
    Power,
    ScaledBeta,
    TruncatedNormal,
    Uniform,
    ValuationProfile,
)
from fpsig.signaling import GridScheme

UNIT = (0.0, 1.0)


@pytest.fixture
def uniform():
    return Uniform(0.0, 1.0)


@pytest.fixture
def beta22():
    return ScaledBeta(2.0, 2.0, 0.0, 1.0)


@pytest.fixture
def tnorm():
    return TruncatedNormal(0.5, 0.2, 0.0, 1.0)


@pytest.fixture
def v_identity():
    return Linear(0.0, 1.0, UNIT)


@pytest.fixture
def v_affine():
    return Linear(0.3, 0.4, UNIT)


@pytest.fixture
def v_square():
    return Power(1.0, 2.0, UNIT)


@pytest.fixture
def single_profile(v_identity):
    return ValuationProfile([v_identity])


@pytest.fixture
def crossing_profile(v_affine, v_identity):
    # valuations cross at q = 0.5; E[max] = 0.575 on Uniform[0,1]
    return ValuationProfile([v_affine, v_identity])


@pytest.fixture
def scaled_pair_profile():
    # thresholds v1^-1(p) = p and v2^-1(p) = 2p: the Theorem-3 stress pair
    return ValuationProfile([Linear(0.0, 1.0, UNIT), Linear(0.0, 0.5, UNIT)])


def random_feasible_grid_mechanism(grid, valuations, rng):
    """Random sub-simplex scheme plus a price below the sold-mass mean value.

    Row masses are Dirichlet draws damped by a random factor so signal 0
    keeps mass; the price cap is the scheme's own conditional mean valuation
    over the sold mass, which makes the summed purchase constraint hold by
    construction.
    """
    m = grid.size
    n = len(valuations)
    rows = rng.dirichlet(np.ones(n + 1), size=m)[:, :n]
    rows *= rng.uniform(0.2, 1.0, size=(m, 1))
    scheme = GridScheme(grid, rows)
    vals = np.column_stack([np.asarray(v(grid.points), dtype=float) for v in valuations])
    sold = float(np.dot(grid.weights, rows.sum(axis=1)))
    if sold <= 0.0:
        return scheme, 0.0
    mean_value = float(np.dot(grid.weights, (rows * vals).sum(axis=1))) / sold
    price = rng.uniform(0.0, mean_value)
    return scheme, price
