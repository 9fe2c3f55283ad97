"""Acceptance battery: one check per numbered criterion, one report line each.

Each test measures its own wall time where the criterion includes a budget,
and prints a single `[PASS]`/`[FAIL]` line directly to the terminal.
"""

import math
import time

import numpy as np
import pytest

from fracgreen import (
    Ball,
    FracParams,
    Interval,
    PohozaevFunction,
    SQUARED_PROFILE,
    SourceTerm,
    a_constant,
    check_dedu,
    check_grad_green_l1,
    check_green_bounds,
    check_pohozaev,
    check_robin_grad,
    check_robin_symmetry,
    check_thm11_high,
    check_thm11_low,
    check_thm15,
    green_value,
    solve_linear,
    torsion_scale,
)
from conftest import identity_source, ones_source
from _oracles import FOUR_OVER_3PI, torsion_exact
from test_identities import smooth_bump

UNIT = Interval(-1.0, 1.0)


@pytest.fixture
def announce(capsys):
    def _announce(number, description, ok, detail):
        line = "[%s] criterion %2d: %s  (%s)" % (
            "PASS" if ok else "FAIL", number, description, detail)
        with capsys.disabled():
            print(line)
        assert ok, line
    return _announce


def test_criterion_01_universal_cutoff_constant(announce):
    worst = 0.0
    slowest = 0.0
    for s in (0.25, 0.5, 0.75):
        t0 = time.perf_counter()
        est = a_constant(FracParams(1, s), budget=2)
        slowest = max(slowest, time.perf_counter() - t0)
        worst = max(worst, abs(est.value + 2.0))
    base = a_constant(FracParams(1, 0.5), budget=2)
    other = a_constant(FracParams(1, 0.5), SQUARED_PROFILE, budget=2)
    gap = abs(base.value - other.value)
    bars = base.error_bar + other.error_bar
    ok = worst <= 1e-2 and slowest < 60.0 and gap <= bars
    announce(1, "cutoff constant equals -2 and ignores the profile", ok,
             "max|a+2|=%.2e, profile gap=%.2e <= bars=%.2e, slowest=%.1fs"
             % (worst, gap, bars, slowest))


def test_criterion_02_explicit_profile_solves(announce):
    sup_fine = 0.0
    slowest = 0.0
    rates = []
    noise = True
    for s in (0.25, 0.5, 0.75):
        p = FracParams(1, s)
        scale = torsion_scale(p)
        errors = []
        for h in (1.0 / 64, 1.0 / 128, 1.0 / 256):
            t0 = time.perf_counter()
            sol = solve_linear(p, UNIT, ones_source, h)
            dt = time.perf_counter() - t0
            xs = np.asarray(sol.u.points).ravel()
            exact = np.array([torsion_exact(scale, s, x) for x in xs])
            errors.append(float(np.max(np.abs(sol.u.values - exact))))
            if h == 1.0 / 256:
                sup_fine = max(sup_fine, errors[-1])
                slowest = max(slowest, dt)
        if max(errors) >= 1e-12:
            noise = False
            rates.append(math.log2(errors[0] / errors[2]) / 2.0)
    order_ok = noise or all(r >= 1.0 for r in rates)
    ok = sup_fine < 1e-4 and order_ok and slowest < 30.0
    announce(2, "unit-source solves match the closed form and refine", ok,
             "sup err=%.2e, %s, slowest=%.1fs"
             % (sup_fine,
                "errors at machine noise" if noise else
                "min rate=%.2f" % min(rates), slowest))


def test_criterion_03_boundary_derivative_identity(announce):
    t0 = time.perf_counter()
    worst = 0.0
    for s in (0.25, 0.5, 0.75):
        p = FracParams(1, s)
        for x in np.linspace(-0.8, 0.8, 9):
            rep = check_dedu(p, UNIT, float(x), tol=1e-6)
            worst = max(worst, rep.residual)
            assert rep.passed
    ball = check_dedu(FracParams(2, 0.3), Ball(np.zeros(2), 1.0),
                      np.array([0.4, 0.0]), order=128, tol=1e-3)
    total = time.perf_counter() - t0
    ok = worst < 1e-6 and ball.passed and total < 10.0
    announce(3, "boundary derivative matches the trace pairing", ok,
             "interval worst=%.2e, ball residual=%.2e, total=%.1fs"
             % (worst, ball.residual, total))


def test_criterion_04_interior_derivative_high_order(announce):
    p = FracParams(1, 0.75)
    worst = 0.0
    for x in (-0.6, -0.3, 0.0, 0.3, 0.6):
        rep = check_thm11_high(p, UNIT, identity_source, x)
        worst = max(worst, rep.residual)
    unit = check_thm11_high(p, UNIT, ones_source, 0.4)
    closed = -2.0 * p.s * torsion_scale(p) * 0.4 * (1.0 - 0.16) ** (p.s - 1.0)
    agree = abs(unit.rhs - closed)
    ok = worst < 1e-3 and agree < 2e-3
    announce(4, "interior derivative, high-order volume form", ok,
             "worst residual=%.2e, unit-source gap=%.2e" % (worst, agree))


def test_criterion_05_interior_derivative_low_order(announce):
    st = SourceTerm("semilinear", lambda x, q: np.asarray(x, float),
                    partial_h=lambda x, q: np.ones_like(np.asarray(x, float)),
                    partial_q=lambda x, q: np.zeros_like(np.asarray(x, float)))
    worst = 0.0
    for s in (0.4, 0.5):
        p = FracParams(1, s)
        for x in (-0.6, -0.3, 0.0, 0.3, 0.6):
            rep = check_thm11_low(p, UNIT, st, x)
            worst = max(worst, rep.residual)
            assert rep.passed, (s, x, rep.residual)
    ok = worst < 5e-3
    announce(5, "interior derivative, low-order volume form", ok,
             "worst residual=%.2e" % worst)


def test_criterion_06_paired_gradient_identity(announce):
    t0 = time.perf_counter()
    rng = np.random.default_rng(0)
    p1 = FracParams(1, 0.25)
    worst_interval = 0.0
    pairs = 0
    while pairs < 10:
        x, y = rng.uniform(-0.9, 0.9, size=2)
        if abs(x - y) < 0.1:
            continue
        rep = check_thm15(p1, UNIT, float(x), float(y), 0)
        worst_interval = max(worst_interval, rep.residual)
        pairs += 1
    p3 = FracParams(3, 0.5)
    ball = Ball(np.zeros(3), 1.0)
    worst_ball = 0.0
    pairs = 0
    while pairs < 5:
        x = rng.uniform(-0.55, 0.55, size=3)
        y = rng.uniform(-0.55, 0.55, size=3)
        if np.linalg.norm(x - y) < 0.2:
            continue
        rep = check_thm15(p3, ball, x, y, int(pairs % 3), tol=1e-3)
        worst_ball = max(worst_ball, rep.residual)
        pairs += 1
    total = time.perf_counter() - t0
    ok = worst_interval < 1e-5 and worst_ball < 1e-3 and total < 60.0
    announce(6, "summed source-point gradients match the trace pairing", ok,
             "interval worst=%.2e, ball worst=%.2e, total=%.1fs"
             % (worst_interval, worst_ball, total))


def test_criterion_07_interior_core_gradient(announce):
    rep = check_robin_grad(FracParams(1, 0.5), UNIT, 0.5, 0)
    closed_gap = abs(rep.rhs - FOUR_OVER_3PI)
    sweep_ok = True
    worst_sweep = 0.0
    for x in np.linspace(-0.9, 0.9, 19):
        r = check_robin_grad(FracParams(1, 0.5), UNIT, float(x), 0)
        sweep_ok = sweep_ok and r.passed
        worst_sweep = max(worst_sweep, r.residual)
    ball = check_robin_grad(FracParams(2, 0.3), Ball(np.zeros(2), 1.0),
                            np.array([0.3, 0.0]), 0, tol=1e-3)
    ok = (rep.residual < 1e-6 and closed_gap < 1e-6 and sweep_ok
          and ball.passed)
    announce(7, "interior-core gradient matches the squared-trace pairing", ok,
             "closed-form gap=%.2e, sweep worst=%.2e, ball residual=%.2e"
             % (closed_gap, worst_sweep, ball.residual))


def test_criterion_08_interior_core_is_stationary_at_the_center(announce):
    first = check_robin_symmetry(FracParams(1, 0.5), UNIT, 0, tol=1e-6)
    p2 = FracParams(2, 0.3)
    ball = Ball(np.zeros(2), 1.0)
    firsts = [check_robin_symmetry(p2, ball, j, tol=1e-6) for j in (0, 1)]
    mixed = check_robin_symmetry(p2, ball, 0, i=1, tol=1e-5)
    worst_first = max([first.residual] + [r.residual for r in firsts])
    ok = first.passed and all(r.passed for r in firsts) and mixed.passed
    announce(8, "center of the domain is a critical point of the core", ok,
             "worst first-derivative=%.2e, mixed=%.2e"
             % (worst_first, mixed.residual))


def test_criterion_09_integral_balance(announce):
    p = FracParams(1, 0.5)
    v = PohozaevFunction.compactly_supported(
        p, UNIT, smooth_bump(-0.35, 0.25), (-0.6, -0.1))
    w = PohozaevFunction.compactly_supported(
        p, UNIT, smooth_bump(0.3, 0.2), (0.1, 0.5))
    bumps = check_pohozaev(p, UNIT, v, w, 0, n_nodes=224)
    sol = solve_linear(p, UNIT, identity_source, 1.0 / 256)
    mixed = check_pohozaev(p, UNIT, PohozaevFunction.torsion(p, UNIT),
                           PohozaevFunction.from_solution(sol), 0, tol=5e-3)
    ok = bumps.passed and bumps.residual < 1e-3 and mixed.passed
    announce(9, "translation balance of the weighted volume terms", ok,
             "bump residual=%.2e, profile/odd residual=%.2e"
             % (bumps.residual, mixed.residual))


def test_criterion_10_bounds_and_gradient_dichotomy(announce):
    p = FracParams(1, 0.25)
    bounds = check_green_bounds(p, UNIT, sample_count=10000, seed=0)
    low = check_grad_green_l1(p, UNIT, 0.2)
    high = check_grad_green_l1(FracParams(1, 0.75), UNIT, 0.2)
    ok = (bounds.passed and bounds.params["gradientViolations"] == 0
          and low.passed and low.params["expected"] == "divergent"
          and high.passed and high.params["expected"] == "convergent")
    announce(10, "two-sided bounds hold and the shell-gradient dichotomy", ok,
             "violations=%d, envelope spread=%.1f, low change=%.3f, high change=%.4f"
             % (bounds.params["gradientViolations"],
                bounds.params["envelopeHigh"] / max(bounds.params["envelopeLow"], 1e-300),
                low.params["relativeChanges"][-1],
                high.params["relativeChanges"][-1]))


def test_criterion_11_structural_invariants(announce):
    # Representative algebraic invariants; the full property suites run as
    # part of this same session and the whole run carries the time budget.
    p = FracParams(1, 0.5)
    h = 1.0 / 64
    sa = solve_linear(p, UNIT, ones_source, h)
    sb = solve_linear(p, UNIT, lambda x: np.cos(np.asarray(x, float)), h)
    sc = solve_linear(p, UNIT,
                      lambda x: 3.0 * ones_source(x) - 2.0 * np.cos(np.asarray(x, float)), h)
    lin_gap = float(np.max(np.abs(sc.u.values - 3.0 * sa.u.values + 2.0 * sb.u.values)))
    rng = np.random.default_rng(13)
    sym_gap = 0.0
    for _ in range(5):
        x, y = rng.uniform(-0.9, 0.9, size=2)
        if abs(x - y) < 1e-3:
            continue
        g1 = green_value(p, UNIT, x, y).value
        g2 = green_value(p, UNIT, y, x).value
        sym_gap = max(sym_gap, abs(g1 - g2) / max(abs(g1), 1e-300))
    r1 = check_dedu(p, UNIT, 0.5)
    r2 = check_dedu(p, UNIT, 0.5)
    deterministic = (r1.lhs[0] == r2.lhs[0] and r1.rhs[0] == r2.rhs[0]
                     and r1.residual == r2.residual)
    ok = lin_gap < 1e-12 and sym_gap < 1e-13 and deterministic
    announce(11, "structural invariants (linearity, symmetry, determinism)", ok,
             "linearity gap=%.1e, symmetry gap=%.1e, reruns identical=%s"
             % (lin_gap, sym_gap, deterministic))
