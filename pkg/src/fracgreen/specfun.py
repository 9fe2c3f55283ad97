"""Gamma function, fractional-order parameters, and the free-space kernel.

Everything downstream (Green functions, solvers, identity checks) pulls its
constants from here.  The gamma function is implemented locally (Lanczos)
so the constant layer has no special-function dependency.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

# Lanczos coefficients, g = 7 (classic 9-term double-precision set).
_LANCZOS_G = 7.0
_LANCZOS_C = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def _gamma(x):
    # Reflection sends arguments below 1/2 to the accurate branch; negative
    # non-integer arguments are permitted here (internal continuation use).
    if x < 0.5:
        if x == math.floor(x):
            raise ValueError("gamma pole at %r" % (x,))
        return math.pi / (math.sin(math.pi * x) * _gamma(1.0 - x))
    z = x - 1.0
    acc = _LANCZOS_C[0]
    for i in range(1, 9):
        acc += _LANCZOS_C[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * math.exp(-t) * acc


def gamma_fn(x):
    """Gamma(x) for x > 0; relative accuracy ~1e-13."""
    if x <= 0.0:
        raise ValueError("gamma_fn requires a positive argument, got %r" % (x,))
    return _gamma(float(x))


class Regime(Enum):
    """Shape of the free-space kernel r -> fundamental(p, r)."""

    POWER_DECAY = "power-decay"    # N > 2s: falls like r^(2s-N)
    LOGARITHMIC = "logarithmic"    # N = 2s = 1: -(1/pi) log r
    POWER_GROWTH = "power-growth"  # N = 1, s > 1/2: grows like r^(2s-1)


_REGIME_TOL = 1e-12


@dataclass(frozen=True)
class FracParams:
    """Dimension N and order s in (0,1) of the operator."""

    N: int
    s: float

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ValueError("dimension N must be a positive integer, got %r" % (self.N,))
        if not (0.0 < self.s < 1.0):
            raise ValueError("order s must lie in (0,1), got %r" % (self.s,))

    @property
    def regime(self):
        gap = self.N - 2.0 * self.s
        if gap > _REGIME_TOL:
            return Regime.POWER_DECAY
        if gap < -_REGIME_TOL:
            return Regime.POWER_GROWTH
        return Regime.LOGARITHMIC


@dataclass(frozen=True)
class ConstantSet:
    """Derived constants for one (N, s) pair.

    b_ns is None outside the power-decay regime (the kernel is then
    logarithmic or a growing power; see fundamental()).
    """

    c_ns: float
    b_ns: float | None
    gamma_sq: float
    torsion_scale: float


def c_const(p):
    """Normalization making the operator the Fourier multiplier |xi|^(2s).

    c = s 4^s Gamma((N+2s)/2) / (pi^(N/2) Gamma(1-s)).  Checked against a
    Fourier-side quadrature oracle in the operator tests.
    """
    s, N = p.s, p.N
    return (
        s * 4.0 ** s * _gamma((N + 2.0 * s) / 2.0)
        / (math.pi ** (N / 2.0) * _gamma(1.0 - s))
    )


def b_const(p):
    """Riesz kernel constant pi^(-N/2) 4^(-s) Gamma((N-2s)/2) / Gamma(s).

    Only defined in the power-decay regime N > 2s.
    """
    s, N = p.s, p.N
    if p.regime is not Regime.POWER_DECAY:
        raise ValueError(
            "b_const needs N > 2s; (N=%d, s=%g) is in the %s regime"
            % (N, s, p.regime.value)
        )
    return (
        math.pi ** (-N / 2.0) * 4.0 ** (-s)
        * _gamma((N - 2.0 * s) / 2.0) / _gamma(s)
    )


def kernel_coeff(p):
    """Coefficient of the power-law free-space kernel, any power regime.

    In the power-growth regime this is the analytic continuation of
    b_const through the reflection formula (a negative number); it is the
    constant that makes the interval Green function's regular part finite
    on the diagonal.  Raises in the logarithmic regime.
    """
    if p.regime is Regime.POWER_DECAY:
        return b_const(p)
    if p.regime is Regime.POWER_GROWTH:
        s = p.s
        return math.pi ** (-0.5) * 4.0 ** (-s) * _gamma(0.5 - s) / _gamma(s)
    raise ValueError("logarithmic regime has no power coefficient")


def fundamental(p, r):
    """Free-space kernel at distance r > 0.

    Power regimes: coeff * r^(2s-N); logarithmic regime: -(1/pi) log r.
    Accepts scalars or arrays; every entry must be positive.
    """
    rr = np.asarray(r, dtype=float)
    if np.any(rr <= 0.0):
        raise ValueError("fundamental requires strictly positive distance")
    if p.regime is Regime.LOGARITHMIC:
        out = -np.log(rr) / math.pi
    else:
        out = kernel_coeff(p) * rr ** (2.0 * p.s - p.N)
    return float(out) if np.isscalar(r) else out


def torsion_scale(p):
    """Constant g with g (r^2 - |x|^2)^s solving the unit-source problem
    on the ball of radius r."""
    s, N = p.s, p.N
    return _gamma(N / 2.0) / (4.0 ** s * _gamma((N + 2.0 * s) / 2.0) * _gamma(1.0 + s))


def green_kernel_const(p):
    """kappa = Gamma(N/2) / (4^s pi^(N/2) Gamma(s)^2), the ball Green
    function's overall scale."""
    s, N = p.s, p.N
    return _gamma(N / 2.0) / (4.0 ** s * math.pi ** (N / 2.0) * _gamma(s) ** 2)


def constants(p):
    """Bundle of all derived constants for p."""
    b = b_const(p) if p.regime is Regime.POWER_DECAY else None
    g1s = _gamma(1.0 + p.s)
    return ConstantSet(
        c_ns=c_const(p),
        b_ns=b,
        gamma_sq=g1s * g1s,
        torsion_scale=torsion_scale(p),
    )
