import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import HYPERBOLIC, LINEAR_HALF, RECIPROCAL, SINE, TANH
from fractalhisto.core_model import ContractionSpec, ModulusSpec
from fractalhisto.errors import DomainError, NonConvergenceError, ValidationError
from fractalhisto.rakotch import (
    banach_witness,
    estimate_beta,
    scalar_fixed_point,
    verify_contraction,
    verify_modulus,
)

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def test_linear_modulus_passes():
    assert verify_modulus(LINEAR_HALF, (0.0, 10.0), 1000).passed


def test_hyperbolic_modulus_passes():
    rep = verify_modulus(HYPERBOLIC)
    assert rep.passed and rep.witness is None


def test_expanding_modulus_fails_with_witness():
    rep = verify_modulus(lambda t: 2 * t, (0.0, 10.0), 100)
    assert not rep.passed
    assert rep.witness is not None and rep.max_violation > 0


def test_modulus_empty_range_rejected():
    with pytest.raises(DomainError):
        verify_modulus(LINEAR_HALF, (1.0, 1.0))


def test_reciprocal_is_rakotch_on_unit_interval():
    assert verify_contraction(RECIPROCAL, (0.0, 1.0), 10_000, seed=0).passed


@pytest.mark.parametrize("k", [0.1, 0.5, 0.9, 0.999])
def test_linear_contraction_passes(k):
    m = ModulusSpec("linear", k)
    assert verify_contraction(ContractionSpec("linear", k, m), n_pairs=2000).passed


@pytest.mark.parametrize("spec", [SINE, TANH, RECIPROCAL])
def test_catalog_contractions_pass_default_range(spec):
    assert verify_contraction(spec).passed


def test_expanding_map_fails():
    rep = verify_contraction(lambda x: 2 * x, (-1.0, 1.0), 500, psi=lambda t: t / 2)
    assert not rep.passed


def test_contraction_report_deterministic():
    a = verify_contraction(RECIPROCAL, (0.0, 1.0), 3000, seed=5)
    b = verify_contraction(RECIPROCAL, (0.0, 1.0), 3000, seed=5)
    assert a.to_dict() == b.to_dict()


def test_contraction_needs_pairs():
    with pytest.raises(ValidationError):
        verify_contraction(SINE, n_pairs=0)


def test_reciprocal_not_banach():
    w = banach_witness(RECIPROCAL, 0.9, (0.0, 1.0))
    assert w is not None
    u, v = w
    assert u == 0.0 and 0 < v < 0.2
    assert abs(RECIPROCAL(u) - RECIPROCAL(v)) > 0.9 * abs(u - v)


def test_half_slope_witness_by_k():
    half = ContractionSpec("linear", 0.5, LINEAR_HALF)
    assert banach_witness(half, 0.6) is None
    assert banach_witness(half, 0.4) is not None


def test_banach_witness_k_range():
    with pytest.raises(ValidationError):
        banach_witness(SINE, 1.0)


def test_golden_ratio_fixed_point():
    x, n = scalar_fixed_point(RECIPROCAL, 0.0, 1e-12)
    assert x == pytest.approx(GOLDEN, abs=1e-11)
    assert n > 1


@pytest.mark.parametrize("spec, x0", [(ContractionSpec("linear", 0.5, LINEAR_HALF), 1.0), (SINE, 1.0)])
def test_fixed_point_at_origin(spec, x0):
    x, _ = scalar_fixed_point(spec, x0, 1e-12)
    assert abs(x) <= 1e-11


def test_scalar_nonconvergence_carries_state():
    with pytest.raises(NonConvergenceError) as info:
        scalar_fixed_point(RECIPROCAL, 0.0, 1e-12, max_iter=3)
    assert info.value.residual > 1e-12
    assert info.value.last is not None


@settings(max_examples=40)
@given(st.sampled_from([SINE, TANH, RECIPROCAL]), st.floats(-10, 10), st.floats(-10, 10))
def test_fixed_point_independent_of_start(spec, a, b):
    lo = spec.default_range()[0]
    a, b = max(a, lo), max(b, lo)
    tol = 1e-12
    xa, _ = scalar_fixed_point(spec, a, tol)
    xb, _ = scalar_fixed_point(spec, b, tol)
    assert abs(xa - xb) <= 10 * tol


def test_estimate_beta_linear_exact():
    assert estimate_beta(LINEAR_HALF) == 0.5
    assert estimate_beta(ModulusSpec("linear", 0.37)) == 0.37


def test_estimate_beta_hyperbolic():
    b = estimate_beta(HYPERBOLIC)
    assert 1.0 - 1e-6 <= b <= 1.0


def _dense_sup(psi):
    ts = np.geomspace(1e-12, 20.0, 200_001)
    return float(np.max(psi(ts) / ts))


def test_estimate_beta_test_only_modulus():
    psi = lambda t: t / (2.0 + t * t)  # noqa: E731
    oracle = _dense_sup(psi)
    assert oracle == pytest.approx(0.5, abs=1e-12)
    assert estimate_beta(psi) == pytest.approx(oracle, abs=1e-6)


@given(st.floats(0.01, 0.99))
def test_estimate_beta_matches_linear_k(k):
    assert estimate_beta(ModulusSpec("linear", k)) == pytest.approx(k, rel=1e-15)
