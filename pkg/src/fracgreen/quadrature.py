"""Shared quadrature machinery.

Small collection of fixed rules used throughout the package: Gauss-Jacobi
rules on (0,1) for endpoint-power weights, Gauss-Legendre panels, a
double-exponential (tanh-sinh) rule for integrands with endpoint
singularities of unknown exponent, and iterated Richardson extrapolation.
"""

import functools
import math

import numpy as np
from scipy.special import roots_jacobi, roots_legendre


@functools.lru_cache(maxsize=256)
def gauss_jacobi_01(n, beta):
    """Nodes/weights (u, w) with  int_0^1 u^beta g(u) du = sum w_i g(u_i).

    beta > -1.  The power-law factor is part of the weight, so g only has
    to be smooth.
    """
    x, w = roots_jacobi(n, 0.0, float(beta))
    u = 0.5 * (x + 1.0)
    # weight on [-1,1] is (1+x)^beta = (2u)^beta, dx = 2 du
    return u, w * 2.0 ** (-(beta + 1.0))


@functools.lru_cache(maxsize=64)
def gauss_legendre_01(n):
    """Nodes/weights on (0,1) for smooth integrands."""
    x, w = roots_legendre(n)
    return 0.5 * (x + 1.0), 0.5 * w


def panel_gl(f, edges, n=24):
    """Composite Gauss-Legendre over the panels defined by `edges`.

    `f` must accept numpy arrays.  Panels of zero length are skipped.
    """
    u, w = gauss_legendre_01(n)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        width = b - a
        total += width * np.dot(w, f(a + width * u))
    return total


@functools.lru_cache(maxsize=8)
def _de_raw(K, h):
    k = np.arange(-K, K + 1)
    theta = 0.5 * math.pi * np.sinh(k * h)
    t = np.tanh(theta)
    w = h * 0.5 * math.pi * np.cosh(k * h) / np.cosh(theta) ** 2
    keep = w > 1e-300
    return t[keep], w[keep]


def de_rule(a, b, K=44, h=0.072):
    """tanh-sinh rule on (a,b); robust for integrable endpoint singularities.

    Default resolution gives ~1e-12 for algebraic/log endpoint behaviour.
    Nodes never touch the endpoints exactly.
    """
    t, w = _de_raw(K, h)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return mid + half * t, half * w


def de_integrate(f, a, b, K=44, h=0.072):
    x, w = de_rule(a, b, K, h)
    return float(np.dot(w, f(x)))


def richardson(values, exponents):
    """Iterated Richardson limit of T(d), T(d/2), T(d/4), ...

    `values[k]` is the estimate at step d * 2^-k; `exponents` is the ladder
    of correction orders to eliminate, smallest first.  Returns the final
    diagonal value and an error indicator (last diagonal increment).
    """
    row = list(values)
    delta = math.inf
    for p in exponents:
        if len(row) < 2:
            break
        fac = 2.0 ** p
        nxt = [(fac * row[k + 1] - row[k]) / (fac - 1.0) for k in range(len(row) - 1)]
        delta = abs(nxt[-1] - row[-1])
        row = nxt
    return row[-1], delta
