from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import HALF, affine_system, example3_system
from fractalhisto.core_model import build_partition
from fractalhisto.diagnostics import (
    bound_value,
    discontinuity_points,
    oscillation,
    oscillation_bound,
    oscillation_vs_bound,
    riemann_convergence,
    word_interval,
)
from fractalhisto.errors import AdmissibilityError, ValidationError
from fractalhisto.rb_solver import SampledFunction, make_sampled, solve_on_grid


def test_word_intervals_half():
    assert word_interval(HALF, (0, 0)) == (0.0, 0.25)
    assert word_interval(HALF, (1,)) == (0.5, 1.0)
    assert word_interval(HALF, (1, 0)) == (0.5, 0.75)


def test_word_symbol_checked():
    with pytest.raises(ValidationError):
        word_interval(HALF, (2,))


def test_discontinuities_small_depths():
    assert discontinuity_points(HALF, 0) == [0.5]
    assert discontinuity_points(HALF, 1) == [0.25, 0.5, 0.75]


def enumerate_images(knots, depth):
    """All ``l_w(t_k)`` for ``|w| <= depth`` in exact rational arithmetic."""
    knots = [Fraction(k) for k in knots]
    t0, tN = knots[0], knots[-1]
    maps = [((b - a) / (tN - t0), a - (b - a) / (tN - t0) * t0) for a, b in zip(knots, knots[1:])]
    level = set(knots[1:-1])
    found = set(level)
    for _ in range(depth):
        level = {a * t + b for a, b in maps for t in level}
        found |= level
    return sorted(found)


@pytest.mark.parametrize("depth", range(7))
def test_discontinuity_count_dyadic(depth):
    pts = discontinuity_points(HALF, depth)
    oracle = enumerate_images([0, Fraction(1, 2), 1], depth)
    assert len(pts) == len(oracle) == 2 ** (depth + 1) - 1
    assert pts == [float(v) for v in oracle]


def test_discontinuities_uneven_partition():
    knots = [0, Fraction(1, 4), Fraction(1, 2), 1]
    pts = discontinuity_points(build_partition([float(k) for k in knots]), 3)
    assert pts == pytest.approx([float(v) for v in enumerate_images(knots, 3)], abs=1e-15)


@given(st.integers(0, 6))
def test_discontinuities_nested(depth):
    a = set(discontinuity_points(HALF, depth))
    assert a <= set(discontinuity_points(HALF, depth + 1))


@given(st.lists(st.integers(0, 2), min_size=1, max_size=6), st.lists(st.integers(0, 2), max_size=4))
def test_word_prefix_nesting(u, tail):
    p = build_partition([0.0, 0.2, 0.7, 1.0])
    lo_u, hi_u = word_interval(p, u)
    lo_v, hi_v = word_interval(p, u + tail)
    slack = 1e-12
    assert lo_u - slack <= lo_v <= hi_v <= hi_u + slack


def test_oscillation_examples():
    ident = make_sampled((0, 1), 16, lambda t: t)
    assert oscillation(ident, (0, 1)) == 1.0
    assert oscillation(make_sampled((0, 1), 16, 3.0), (0.2, 0.9)) == 0.0
    step = make_sampled((0, 1), 16, lambda t: np.where(t < 0.4, 1.0, 3.0))
    assert oscillation(step, (0.25, 0.75)) == 2.0


def test_oscillation_empty_interval():
    with pytest.raises(ValidationError):
        oscillation(make_sampled((0, 1), 8), (0.01, 0.02))


def test_oscillation_half_open():
    step = make_sampled((0, 1), 8, lambda t: np.where(t < 0.5, 0.0, 1.0))
    assert oscillation(step, (0.0, 0.5), closed=False) == 0.0
    assert oscillation(step, (0.0, 0.5)) == 1.0


@settings(max_examples=100)
@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_oscillation_monotone(a, b, c, d):
    lo, lo2, hi2, hi = sorted((a, b, c, d))
    h = SampledFunction(0.0, 1.0, np.random.default_rng(0).normal(size=65))
    try:
        inner = oscillation(h, (lo2, hi2))
    except ValidationError:
        return
    assert inner <= oscillation(h, (lo, hi))


def geometric_sum(alpha, delta, C, p, wI, lenI):
    return delta ** p * wI + C * lenI * sum(alpha ** i * delta ** (p - 1 - i) for i in range(p))


def test_bound_equal_case():
    assert bound_value(0.5, 0.5, 1.0, 3, 1.0, 1.0) == pytest.approx(7 / 8, abs=1e-15)


def test_bound_delta_below_alpha():
    assert bound_value(0.5, 0.25, 1.0, 2, 1.0, 1.0) == pytest.approx(13 / 16, abs=1e-15)


@given(st.floats(0.01, 0.99), st.floats(0.0, 0.99), st.floats(0, 5), st.integers(1, 30),
       st.floats(0, 10), st.floats(0.01, 10))
def test_bound_matches_geometric_sum(alpha, delta, C, p, wI, lenI):
    expected = geometric_sum(alpha, delta, C, p, wI, lenI)
    assert bound_value(alpha, delta, C, p, wI, lenI) == pytest.approx(expected, rel=1e-9, abs=1e-12)


@given(st.floats(0.01, 0.99), st.floats(0.0, 0.99), st.floats(0, 5), st.floats(0, 10), st.floats(0.01, 10))
def test_bound_eventually_non_increasing(alpha, delta, C, wI, lenI):
    vals = [bound_value(alpha, delta, C, p, wI, lenI) for p in range(1, 400)]
    tail = vals[200:]
    assert all(b <= a * (1 + 1e-12) + 1e-300 for a, b in zip(tail, tail[1:]))
    assert vals[-1] <= vals[0]


def test_bound_requires_small_delta():
    with pytest.raises(AdmissibilityError):
        oscillation_bound(example3_system(), 2, 1.0, 1.0)


def test_oscillation_vs_bound_example4(example4_solution):
    rows = oscillation_vs_bound(example4_solution.system, example4_solution.f, 8)
    assert len(rows) == sum(2 ** p for p in range(1, 9))
    assert not [r for r in rows if r.exceeded]


def test_oscillation_vs_bound_affine():
    sys_ = affine_system()
    f, _ = solve_on_grid(sys_, 2 ** 12)
    rows = oscillation_vs_bound(sys_, f, 6)
    h = f.h
    for r in rows:
        # f has slope c_j / a_j = 2 c_j on bin j, the bin of the outer symbol
        slope = 2 * abs(sys_.c[r.word[0]])
        assert slope * (r.hi - r.lo - h) - 1e-12 <= r.measured <= slope * (r.hi - r.lo) + 1e-12
        assert not r.exceeded


def test_riemann_affine_exact():
    rows = riemann_convergence(affine_system(), [16, 32, 64])
    exact = (0.25 + 1.0) + (3.0 * 0.5 - 0.5 * 0.25)
    for K, val, _ in rows:
        assert val == pytest.approx(exact, abs=1e-12)


def test_riemann_example3_converges():
    rows = riemann_convergence(example3_system(), [2 ** 12, 2 ** 13, 2 ** 14])
    assert rows[0][2] is None
    assert rows[-1][2] < 1e-3


def test_riemann_list_increasing():
    with pytest.raises(ValidationError):
        riemann_convergence(affine_system(), [32, 16])
