"""Checks for the closed-form constants and the fundamental solution."""

import math

import pytest
from hypothesis import given, settings, strategies as hs

from fracgreen import (
    FracParams,
    Regime,
    b_const,
    c_const,
    constants,
    fundamental,
    green_kernel_const,
    kernel_coeff,
    torsion_scale,
)
from _oracles import B_CONST, C_CONST, KAPPA, TORSION_SCALE

REL = 1e-13


def _close(a, b, rel=REL):
    return abs(a - b) <= rel * max(1.0, abs(b))


@pytest.mark.parametrize("key", sorted(C_CONST))
def test_normalisation_constant_matches_reference(key):
    N, s = key
    assert _close(c_const(FracParams(N, s)), C_CONST[key])


@pytest.mark.parametrize("key", sorted(B_CONST))
def test_fundamental_coefficient_matches_reference(key):
    N, s = key
    assert _close(b_const(FracParams(N, s)), B_CONST[key])


@pytest.mark.parametrize("key", sorted(TORSION_SCALE))
def test_torsion_scale_matches_reference(key):
    N, s = key
    assert _close(torsion_scale(FracParams(N, s)), TORSION_SCALE[key])


@pytest.mark.parametrize("key", sorted(KAPPA))
def test_green_prefactor_matches_reference(key):
    N, s = key
    assert _close(green_kernel_const(FracParams(N, s)), KAPPA[key])


def test_torsion_scale_is_one_at_the_logarithmic_point():
    assert abs(torsion_scale(FracParams(1, 0.5)) - 1.0) < 1e-15


def test_kernel_coefficient_is_negative_in_the_growth_regime():
    # Closed form via the Gamma function at a negative argument.
    expected = math.pi ** -0.5 * 4.0 ** -0.75 * math.gamma(-0.25) / math.gamma(0.75)
    value = kernel_coeff(FracParams(1, 0.75))
    assert value < 0
    assert _close(value, expected)


def test_regime_classification():
    assert FracParams(1, 0.25).regime is Regime.POWER_DECAY
    assert FracParams(1, 0.5).regime is Regime.LOGARITHMIC
    assert FracParams(1, 0.75).regime is Regime.POWER_GROWTH
    assert FracParams(2, 0.3).regime is Regime.POWER_DECAY
    assert FracParams(3, 0.5).regime is Regime.POWER_DECAY


def test_fundamental_solution_logarithmic_closed_form():
    p = FracParams(1, 0.5)
    for r in (0.1, 0.3, 0.9, 2.5):
        assert _close(fundamental(p, r), -math.log(r) / math.pi)


def test_fundamental_solution_power_decay_closed_form():
    p = FracParams(1, 0.25)
    for r in (0.1, 0.4, 1.7):
        assert _close(fundamental(p, r), B_CONST[(1, 0.25)] * r ** -0.5)


@pytest.mark.parametrize("bad", [(0, 0.5), (1, 0.0), (1, 1.0), (1, -0.2), (1, 1.3)])
def test_parameter_validation(bad):
    N, s = bad
    with pytest.raises((ValueError, TypeError)):
        FracParams(N, s)


def test_constant_bundle_is_consistent_with_the_individual_functions():
    p = FracParams(2, 0.3)
    bundle = constants(p)
    assert bundle.c_ns == c_const(p)
    assert bundle.b_ns == b_const(p)
    assert bundle.torsion_scale == pytest.approx(torsion_scale(p), rel=1e-14)
    assert bundle.gamma_sq == pytest.approx(math.gamma(1.0 + p.s) ** 2, rel=1e-14)


@settings(max_examples=60, deadline=None)
@given(s=hs.floats(min_value=0.05, max_value=0.95))
def test_prefactor_algebra_reduces_to_the_order_parameter(s):
    # Gamma(1+s)^2 * kappa * 4^s / s equals s identically in 1D.
    p = FracParams(1, s)
    value = math.gamma(1.0 + s) ** 2 * green_kernel_const(p) * 4.0 ** s / s
    assert abs(value - s) < 1e-12


@settings(max_examples=40, deadline=None)
@given(s=hs.floats(min_value=0.05, max_value=0.45))
def test_normalisation_and_fundamental_coefficients_are_positive_in_decay(s):
    p = FracParams(1, s)
    assert c_const(p) > 0
    assert b_const(p) > 0
