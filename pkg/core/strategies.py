"""Hypothesis strategies shared by the app test suites."""
import numpy as np
from hypothesis import assume
from hypothesis import strategies as st

from model_core.domain import Design

intercepts = st.floats(min_value=0.5, max_value=2.0, allow_nan=False, allow_infinity=False)
reduced_slopes = st.floats(min_value=-0.8, max_value=5.0, allow_nan=False, allow_infinity=False)


@st.composite
def one_factor_betas(draw):
    """beta = beta0 (1, gamma) with 1 + gamma bounded away from zero"""
    beta0 = draw(intercepts)
    return np.array([beta0, beta0 * draw(reduced_slopes)])


@st.composite
def two_factor_betas(draw):
    """beta = beta0 (1, gamma1, gamma2), positive on the unit square with margin"""
    beta0 = draw(intercepts)
    g1 = draw(reduced_slopes)
    g2 = draw(reduced_slopes)
    assume(1.0 + g1 + g2 > 0.2)
    return beta0 * np.array([1.0, g1, g2])


@st.composite
def designs_on(draw, points):
    """Design with positive random weights on every one of ``points``"""
    raw = draw(st.lists(st.floats(min_value=0.05, max_value=1.0), min_size=len(points), max_size=len(points)))
    weights = np.asarray(raw)
    return Design(points, weights / weights.sum())


@st.composite
def random_designs(draw, region, min_size=3, max_size=6):
    """Design with random support points inside a box region"""
    n = draw(st.integers(min_value=min_size, max_value=max_size))
    coords = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)
    support = [
        region.lower + (region.upper - region.lower) * np.array([draw(coords) for _ in range(region.dim)])
        for _ in range(n)
    ]
    raw = np.asarray(draw(st.lists(st.floats(min_value=0.05, max_value=1.0), min_size=n, max_size=n)))
    return Design(np.asarray(support), raw / raw.sum())
