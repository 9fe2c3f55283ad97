"""Checks for the built-in identity verifiers and their report objects."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as hs

from fracgreen import (
    Ball,
    CapabilityError,
    FracParams,
    IdentityReport,
    Interval,
    PohozaevFunction,
    SourceTerm,
    check_dedu,
    check_grad_green_l1,
    check_green_bounds,
    check_pohozaev,
    check_robin_grad,
    check_robin_symmetry,
    check_thm11_high,
    check_thm11_low,
    check_thm15,
    green_trace,
    solve_linear,
)
from conftest import identity_source, ones_source
from _oracles import DEDU_LHS_HALF, FOUR_OVER_3PI

UNIT = Interval(-1.0, 1.0)


def smooth_bump(center, width):
    def fn(z):
        arr = np.asarray(z, dtype=float)
        t = (arr - center) / width
        out = np.zeros_like(arr)
        inside = np.abs(t) < 1.0
        out[inside] = np.exp(-1.0 / (1.0 - t[inside] ** 2))
        return out if arr.ndim else float(out)
    return fn


# ---------------------------------------------------------------- reports

def test_report_rejects_inconsistent_pass_flags():
    with pytest.raises(ValueError):
        IdentityReport("dedu", {}, 1.0, 1.0, 0.5, 1.0, False, 0.0)
    with pytest.raises(ValueError):
        IdentityReport("dedu", {}, 1.0, 1.0, 2.0, 1.0, True, 0.0)


def test_report_rejects_unknown_identities_and_nonfinite_fields():
    with pytest.raises(ValueError):
        IdentityReport("nonsense", {}, 1.0, 1.0, 0.0, 1.0, True, 0.0)
    with pytest.raises(ValueError):
        IdentityReport("dedu", {}, float("nan"), 1.0, 0.0, 1.0, True, 0.0)
    with pytest.raises(ValueError):
        IdentityReport("dedu", {}, 1.0, float("inf"), 0.0, 1.0, True, 0.0)


def test_report_serialisation_schema():
    rep = check_dedu(FracParams(1, 0.5), UNIT, 0.5)
    payload = rep.to_json_dict()
    assert sorted(payload) == [
        "identity", "lhs", "params", "passed", "residual", "rhs",
        "runtimeMs", "tolerance",
    ]
    assert payload["runtimeMs"] >= 0.0
    assert isinstance(payload["lhs"], list)
    assert payload["passed"] is True


@settings(max_examples=80, deadline=None)
@given(
    residual=hs.floats(min_value=0.0, max_value=10.0),
    tolerance=hs.floats(min_value=0.0, max_value=10.0),
)
def test_report_pass_flag_always_mirrors_the_residual_comparison(residual, tolerance):
    ok = residual <= tolerance
    rep = IdentityReport("dedu", {}, 0.0, 0.0, residual, tolerance, ok, 0.1)
    assert rep.passed == (rep.residual <= rep.tolerance)
    with pytest.raises(ValueError):
        IdentityReport("dedu", {}, 0.0, 0.0, residual, tolerance, not ok, 0.1)


def test_any_checker_with_an_impossible_tolerance_reports_failure():
    rep = check_robin_grad(FracParams(1, 0.5), UNIT, 0.5, 0, tol=1e-18)
    assert rep.passed is False
    assert rep.residual > rep.tolerance


# ------------------------------------------- boundary-derivative identity

def test_boundary_derivative_identity_matches_the_closed_form():
    rep = check_dedu(FracParams(1, 0.5), UNIT, 0.5)
    assert rep.passed
    assert rep.residual < 1e-9
    assert rep.lhs[0] == pytest.approx(DEDU_LHS_HALF, rel=1e-9)
    assert rep.rhs[0] == pytest.approx(DEDU_LHS_HALF, rel=1e-9)


def test_boundary_derivative_identity_on_the_planar_ball():
    rep = check_dedu(FracParams(2, 0.3), Ball(np.zeros(2), 1.0), np.array([0.4, 0.0]))
    assert rep.passed
    assert rep.residual < 1e-4


def test_boundary_derivative_identity_is_odd_under_reflection():
    p = FracParams(1, 0.25)
    plus = check_dedu(p, UNIT, 0.6)
    minus = check_dedu(p, UNIT, -0.6)
    assert plus.lhs[0] == pytest.approx(-minus.lhs[0], rel=1e-12)
    assert plus.rhs[0] == pytest.approx(-minus.rhs[0], rel=1e-10)


# --------------------------------------------- paired-gradient identity

def test_paired_gradient_identity_is_symmetric_under_argument_swap():
    p = FracParams(1, 0.25)
    a = check_thm15(p, UNIT, 0.2, 0.5, 0)
    b = check_thm15(p, UNIT, 0.5, 0.2, 0)
    assert a.passed and b.passed
    assert a.lhs == pytest.approx(b.lhs, rel=1e-13)


def test_paired_gradient_identity_flips_sign_under_reflection():
    p = FracParams(1, 0.25)
    a = check_thm15(p, UNIT, 0.2, 0.5, 0)
    b = check_thm15(p, UNIT, -0.2, -0.5, 0)
    assert a.lhs == pytest.approx(-b.lhs, rel=1e-13)
    assert a.rhs == pytest.approx(-b.rhs, rel=1e-13)


def test_paired_gradient_identity_respects_coordinate_permutations():
    p = FracParams(3, 0.5)
    ball = Ball(np.zeros(3), 1.0)
    x = np.array([0.2, 0.1, -0.3])
    y = np.array([-0.1, 0.4, 0.2])
    base = check_thm15(p, ball, x, y, 0)
    perm = [2, 0, 1]
    moved = check_thm15(p, ball, x[perm], y[perm], 1)
    assert base.lhs == pytest.approx(moved.lhs, rel=1e-13)
    assert base.passed and moved.passed


def test_paired_gradient_identity_rejects_bad_inputs():
    with pytest.raises(ValueError):
        check_thm15(FracParams(1, 0.25), UNIT, 0.3, 0.3, 0)
    with pytest.raises(ValueError):
        check_thm15(FracParams(1, 0.75), UNIT, 0.2, 0.5, 0)
    with pytest.raises(ValueError):
        check_thm15(FracParams(1, 0.25), UNIT, 0.2, 0.5, 1)


# -------------------------------------------- interior-core derivative

def test_interior_core_gradient_matches_the_closed_form():
    rep = check_robin_grad(FracParams(1, 0.5), UNIT, 0.5, 0)
    assert rep.passed
    assert rep.residual < 1e-6
    assert rep.rhs == pytest.approx(FOUR_OVER_3PI, rel=1e-10)


def test_interior_core_gradient_on_the_planar_ball():
    rep = check_robin_grad(FracParams(2, 0.3), Ball(np.zeros(2), 1.0),
                           np.array([0.3, 0.0]), 0)
    assert rep.passed
    assert rep.residual < 1e-3


def test_trace_mass_concentrates_at_the_nearer_endpoint():
    p = FracParams(1, 0.5)
    for x in (0.2, 0.5, 0.8):
        tr = green_trace(p, UNIT, x)
        nodes = tr.rule.nodes.ravel()
        right = tr.values[int(np.argmax(nodes))]
        left = tr.values[int(np.argmin(nodes))]
        assert right > left


def test_interior_core_is_stationary_at_the_center():
    first = check_robin_symmetry(FracParams(1, 0.5), Interval(-0.5, 1.5), 0)
    assert first.passed
    assert first.residual < 1e-8
    ball = Ball(np.zeros(2), 1.0)
    p2 = FracParams(2, 0.3)
    for j in (0, 1):
        rep = check_robin_symmetry(p2, ball, j)
        assert rep.passed
    mixed = check_robin_symmetry(p2, ball, 0, i=1)
    assert mixed.passed
    with pytest.raises(ValueError):
        check_robin_symmetry(p2, ball, 0, i=0)


# ------------------------------------------------- integration identity

def test_integral_balance_for_the_explicit_profile_pair():
    p = FracParams(1, 0.5)
    v = PohozaevFunction.torsion(p, UNIT)
    rep = check_pohozaev(p, UNIT, v, v, 0)
    assert rep.passed
    assert rep.residual < 1e-6


def test_integral_balance_for_two_disjoint_bumps():
    p = FracParams(1, 0.5)
    v = PohozaevFunction.compactly_supported(p, UNIT, smooth_bump(-0.35, 0.25), (-0.6, -0.1))
    w = PohozaevFunction.compactly_supported(p, UNIT, smooth_bump(0.3, 0.2), (0.1, 0.5))
    rep = check_pohozaev(p, UNIT, v, w, 0, n_nodes=224)
    assert rep.passed
    assert rep.residual < 1e-3


def test_integral_balance_for_profile_against_odd_solution():
    p = FracParams(1, 0.5)
    sol = solve_linear(p, UNIT, identity_source, 1.0 / 256)
    rep = check_pohozaev(p, UNIT, PohozaevFunction.torsion(p, UNIT),
                         PohozaevFunction.from_solution(sol), 0, tol=5e-3)
    assert rep.passed
    assert rep.residual < 5e-3


# -------------------------------- volume representations of derivatives

def test_derivative_volume_representation_high_order():
    rep = check_thm11_high(FracParams(1, 0.75), UNIT, identity_source, 0.3)
    assert rep.passed
    assert rep.residual < 1e-3


def test_derivative_volume_representation_high_order_rejects_bad_inputs():
    with pytest.raises(CapabilityError):
        check_thm11_high(FracParams(2, 0.7), Ball(np.zeros(2), 1.0),
                         lambda x: 1.0, np.zeros(2))
    with pytest.raises(ValueError):
        check_thm11_high(FracParams(1, 0.4), UNIT, ones_source, 0.2)


def test_derivative_volume_representation_low_order():
    st = SourceTerm("semilinear", lambda x, q: np.asarray(x, float) - q,
                    partial_h=lambda x, q: np.ones_like(np.asarray(x, float)),
                    partial_q=lambda x, q: -np.ones_like(np.asarray(x, float)))
    rep = check_thm11_low(FracParams(1, 0.5), UNIT, st, 0.2)
    assert rep.passed
    assert rep.residual < 5e-3


def test_derivative_volume_representation_low_order_needs_partials():
    bare = SourceTerm("semilinear", lambda x, q: np.asarray(x, float) - q)
    with pytest.raises(ValueError):
        check_thm11_low(FracParams(1, 0.5), UNIT, bare, 0.2)
    st = SourceTerm("semilinear", lambda x, q: np.asarray(x, float),
                    partial_h=lambda x, q: np.ones_like(np.asarray(x, float)),
                    partial_q=lambda x, q: np.zeros_like(np.asarray(x, float)))
    with pytest.raises(ValueError):
        check_thm11_low(FracParams(1, 0.75), UNIT, st, 0.2)


def test_derivative_volume_representation_low_order_reports_both_signs_on_failure():
    st = SourceTerm("semilinear", lambda x, q: np.asarray(x, float),
                    partial_h=lambda x, q: np.ones_like(np.asarray(x, float)),
                    partial_q=lambda x, q: np.zeros_like(np.asarray(x, float)))
    rep = check_thm11_low(FracParams(1, 0.4), UNIT, st, 0.2, h=1.0 / 128)
    assert not rep.passed
    assert "residualPlus" in rep.params and "residualMinus" in rep.params


# ------------------------------------------------- bounds and dichotomy

def test_green_bounds_hold_on_seeded_samples():
    rep = check_green_bounds(FracParams(1, 0.25), UNIT, sample_count=2000, seed=5)
    assert rep.passed
    assert rep.residual == 0.0
    assert rep.params["gradientViolations"] == 0


def test_green_bounds_runs_are_deterministic_for_a_fixed_seed():
    a = check_green_bounds(FracParams(1, 0.25), UNIT, sample_count=500, seed=9)
    b = check_green_bounds(FracParams(1, 0.25), UNIT, sample_count=500, seed=9)
    assert a.params["envelopeLow"] == b.params["envelopeLow"]
    assert a.params["envelopeHigh"] == b.params["envelopeHigh"]
    assert a.residual == b.residual


def test_green_bounds_requires_the_decay_regime():
    with pytest.raises(ValueError):
        check_green_bounds(FracParams(1, 0.75), UNIT, sample_count=10)


def test_shell_gradient_dichotomy_between_low_and_high_order():
    low = check_grad_green_l1(FracParams(1, 0.25), UNIT, 0.2, levels=6)
    assert low.passed
    assert low.params["expected"] == "divergent"
    sums = low.params["sums"]
    assert all(b > a for a, b in zip(sums, sums[1:]))
    high = check_grad_green_l1(FracParams(1, 0.75), UNIT, 0.2, levels=6)
    assert high.passed
    assert high.params["expected"] == "convergent"


def test_shell_gradient_divergence_rate_matches_theory():
    # Level-to-level relative growth of the diverging sums approaches
    # 2^(1-2s) - 1; for s = 1/4 that is sqrt(2) - 1 ~ 0.414.
    rep = check_grad_green_l1(FracParams(1, 0.25), UNIT, 0.2, levels=8)
    changes = rep.params["relativeChanges"]
    assert changes[-1] == pytest.approx(math.sqrt(2.0) - 1.0, abs=0.02)
