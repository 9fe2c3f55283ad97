"""Closed-form Green machinery on intervals and balls.

The ball Green function is the classical kernel

    G(x,y) = kappa |x-y|^(2s-N) * I(r0),   I(r) = int_0^r t^(s-1)(1+t)^(-N/2) dt,
    r0 = (1-|x|^2)(1-|y|^2)/|x-y|^2,

on the unit ball, with the logarithmic closed form in the borderline case
N = 2s = 1, and everything else (general center/radius, regular part,
Robin function, boundary trace, spatial gradients) derived from it by
scaling and analytic differentiation.  All kernel-integral evaluation goes
through Gauss-Jacobi rules that carry the endpoint powers exactly, so the
same code path is accurate from r0 ~ 1e-12 up to r0 = inf.
"""

import math
from dataclasses import dataclass

import numpy as np

from .domain import BoundaryRule, Interval
from .quadrature import gauss_jacobi_01, richardson
from .specfun import Regime, green_kernel_const, kernel_coeff, fundamental

_NJ = 40          # Gauss-Jacobi resolution for the kernel integral
_DIAG_TOL = 1e-13


class NumericalError(RuntimeError):
    """Raised when an extrapolation or quadrature fails to settle."""


@dataclass
class GreenEval:
    """Green function value and y-gradient at one point pair."""

    value: float
    grad_y: np.ndarray
    singular: bool = False


@dataclass
class TraceField:
    """Boundary values of w/delta^s at the nodes of a boundary rule."""

    rule: BoundaryRule
    values: np.ndarray

    def __len__(self):
        return len(self.values)


# ----------------------------------------------------------------------
# kernel integral

def _jacobi_sum(x, beta, N):
    """int_0^x v^beta g(v) dv for g(v) = (1+v)^(-N/2), x in [0,1]."""
    u, w = gauss_jacobi_01(_NJ, beta)
    xx = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros_like(xx)
    pos = xx > 0.0
    if np.any(pos):
        xs = xx[pos]
        out[pos] = xs ** (beta + 1.0) * (
            w[None, :] * (1.0 + xs[:, None] * u[None, :]) ** (-0.5 * N)
        ).sum(axis=1)
    return out


def _phi_sum(x, q, N):
    """int_0^x v^q phi(v) dv with phi(v) = ((1+v)^(-N/2) - 1)/v (smooth)."""
    u, w = gauss_jacobi_01(_NJ, q)
    xx = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros_like(xx)
    pos = xx > 0.0
    if np.any(pos):
        xs = xx[pos]
        v = xs[:, None] * u[None, :]
        phi = np.expm1(-0.5 * N * np.log1p(v)) / v
        out[pos] = xs ** (q + 1.0) * (w[None, :] * phi).sum(axis=1)
    return out


def kernel_integral(N, s, r):
    """I(r) = int_0^r t^(s-1) (1+t)^(-N/2) dt, vectorized in r >= 0.

    r = inf is allowed when N > 2s (the integral converges there).
    Not meant for the borderline N = 2s, which uses log closed forms.
    """
    q = 0.5 * N - s
    if abs(q) < 1e-12:
        raise ValueError("kernel_integral not used in the borderline regime")
    rr = np.atleast_1d(np.asarray(r, dtype=float))
    out = _jacobi_sum(np.minimum(rr, 1.0), s - 1.0, N)
    big = rr > 1.0
    if np.any(big):
        inv = np.where(np.isinf(rr[big]), 0.0, 1.0 / rr[big])
        if q > 0.0:
            out[big] += _jacobi_sum(1.0, q - 1.0, N)[0] - _jacobi_sum(inv, q - 1.0, N)
        else:
            if np.any(np.isinf(rr[big])):
                raise ValueError("kernel integral diverges at r=inf for N < 2s")
            # int_1^r = divergent power part (exact) + smooth remainder
            out[big] += (inv ** q - 1.0) / (-q)
            out[big] += _phi_sum(1.0, q, N)[0] - _phi_sum(inv, q, N)
    return out if np.ndim(r) else float(out[0])


def kernel_tail(N, s, r):
    """int_r^inf t^(s-1) (1+t)^(-N/2) dt for N > 2s, vectorized, r=inf ok."""
    q = 0.5 * N - s
    if q <= 0.0:
        raise ValueError("kernel_tail requires N > 2s")
    rr = np.atleast_1d(np.asarray(r, dtype=float))
    inv = np.where(np.isinf(rr), 0.0, 1.0 / np.maximum(rr, 1.0))
    out = _jacobi_sum(inv, q - 1.0, N)
    small = rr < 1.0
    if np.any(small):
        out[small] += _jacobi_sum(1.0, s - 1.0, N)[0] - _jacobi_sum(rr[small], s - 1.0, N)
    return out if np.ndim(r) else float(out[0])


# ----------------------------------------------------------------------
# unit-ball closed forms (vectorized over the second point)

def _split(p, d):
    """Unit coordinates: center, radius, and the regime bits."""
    if isinstance(d, Interval):
        center = d.center
        radius = d.radius
    else:
        center = d.center
        radius = d.radius
    return center, radius


def _to_unit(d, pts):
    center, radius = _split(None, d)
    return (np.asarray(pts, dtype=float) - center) / radius


def _pair_geometry(xu, Yu):
    diff = Yu - xu[None, :]
    dist = np.sqrt((diff ** 2).sum(axis=1))
    ax2 = max(1.0 - float((xu ** 2).sum()), 0.0)
    ay2 = 1.0 - (Yu ** 2).sum(axis=1)
    return diff, dist, ax2, ay2


def _green_unit(p, xu, Yu):
    """G on the unit ball; zero for exterior y; inf marks the diagonal."""
    diff, dist, ax2, ay2 = _pair_geometry(xu, Yu)
    val = np.zeros(len(Yu))
    inside = ay2 > 0.0
    if ax2 <= 0.0 or not np.any(inside):
        return val
    diag = inside & (dist <= _DIAG_TOL)
    work = inside & ~diag
    if np.any(work):
        dd = dist[work]
        if p.regime is Regime.LOGARITHMIC:
            top = 1.0 - xu[0] * Yu[work, 0] + np.sqrt(ax2 * ay2[work])
            val[work] = np.log(top / dd) / math.pi
        else:
            r0 = ax2 * ay2[work] / dd ** 2
            kap = green_kernel_const(p)
            val[work] = kap * dd ** (2.0 * p.s - p.N) * kernel_integral(p.N, p.s, r0)
    if np.any(diag):
        if p.regime is Regime.POWER_GROWTH:
            # finite diagonal value in the growth regime
            kap = green_kernel_const(p)
            val[diag] = kap * (ax2 * ay2[diag]) ** (p.s - 0.5) / (p.s - 0.5)
        else:
            val[diag] = np.inf
    return val


def _grad_green_unit(p, xu, Yu):
    """Gradient of G with respect to y on the unit ball."""
    diff, dist, ax2, ay2 = _pair_geometry(xu, Yu)
    grad = np.zeros_like(Yu)
    inside = (ay2 > 0.0) & (dist > _DIAG_TOL)
    if ax2 <= 0.0 or not np.any(inside):
        return grad
    dd = dist[inside]
    dv = diff[inside]
    yv = Yu[inside]
    if p.regime is Regime.LOGARITHMIC:
        root = np.sqrt(ax2 * ay2[inside])
        top = 1.0 - xu[0] * yv[:, 0] + root
        dtop = -xu[0] - yv[:, 0] * np.sqrt(ax2 / ay2[inside])
        grad[inside, 0] = (dtop / top - dv[:, 0] / dd ** 2) / math.pi
        return grad
    s, N = p.s, p.N
    kap = green_kernel_const(p)
    r0 = ax2 * ay2[inside] / dd ** 2
    Ival = kernel_integral(N, s, r0)
    Iprime = r0 ** (s - 1.0) * (1.0 + r0) ** (-0.5 * N)
    # dr0/dy_i = -2 ax2 (y_i d^2 + ay2 (y-x)_i)/d^4
    dr0 = -2.0 * ax2 * (yv * dd[:, None] ** 2 + ay2[inside, None] * dv) / dd[:, None] ** 4
    term1 = (2.0 * s - N) * dd ** (2.0 * s - N - 2.0) * Ival
    grad[inside] = kap * (term1[:, None] * dv + (dd ** (2.0 * s - N) * Iprime)[:, None] * dr0)
    return grad


def _regular_unit(p, xu, Yu):
    """H = F - G on the unit ball, continuous through the diagonal."""
    diff, dist, ax2, ay2 = _pair_geometry(xu, Yu)
    s, N = p.s, p.N
    out = np.zeros(len(Yu))
    if p.regime is Regime.LOGARITHMIC:
        # H = -(1/pi) log(1 - x y + sqrt((1-x^2)(1-y^2))): exact, no
        # diagonal cancellation
        top = 1.0 - xu[0] * Yu[:, 0] + np.sqrt(ax2 * np.maximum(ay2, 0.0))
        return -np.log(top) / math.pi
    kap = green_kernel_const(p)
    exterior = ay2 <= 0.0
    diag = ~exterior & (dist <= _DIAG_TOL)
    work = ~exterior & ~diag
    if np.any(work):
        dd = dist[work]
        if p.regime is Regime.POWER_DECAY:
            r0 = ax2 * ay2[work] / dd ** 2
            out[work] = kap * dd ** (2.0 * s - N) * kernel_tail(N, s, r0)
        else:
            out[work] = kernel_coeff(p) * dd ** (2.0 * s - N) - _green_unit(p, xu, Yu[work])
    if np.any(diag):
        out[diag] = kap * (ax2 * np.maximum(ay2[diag], 0.0)) ** (s - 0.5 * N) / (0.5 * N - s)
    if np.any(exterior):
        out[exterior] = kernel_coeff(p) * dist[exterior] ** (2.0 * s - N)
    return out


def _trace_unit(p, xu, Su):
    """Limit of G(x,y)/delta(y)^s at boundary points (unit ball)."""
    diff = Su - xu[None, :]
    dist2 = (diff ** 2).sum(axis=1)
    ax2 = max(1.0 - float((xu ** 2).sum()), 0.0)
    kap = green_kernel_const(p)
    return (kap * 2.0 ** p.s / p.s) * ax2 ** p.s * dist2 ** (-0.5 * p.N)


# ----------------------------------------------------------------------
# public, domain-aware surface

def _prep(d, x, Y):
    xu = _to_unit(d, np.atleast_1d(np.asarray(x, dtype=float)))
    YY = np.asarray(Y, dtype=float)
    single = YY.ndim <= 1
    Yu = _to_unit(d, YY.reshape(1, -1) if single else YY)
    return xu, Yu, single


def green_batch(p, d, x, Y):
    """Green function values G(x, y_k); zero outside the domain."""
    xu, Yu, single = _prep(d, x, Y)
    scale = d.radius ** (2.0 * p.s - p.N)
    val = scale * _green_unit(p, xu, Yu)
    return float(val[0]) if single else val


def grad_green_y_batch(p, d, x, Y):
    """Gradients d/dy_i G(x, y_k), shape (M, dim)."""
    xu, Yu, single = _prep(d, x, Y)
    scale = d.radius ** (2.0 * p.s - p.N - 1.0)
    g = scale * _grad_green_unit(p, xu, Yu)
    return g[0] if single else g


def regular_batch(p, d, x, Y):
    """Regular part H(x, y_k) = F - G, extended through the diagonal."""
    xu, Yu, single = _prep(d, x, Y)
    if p.regime is Regime.LOGARITHMIC:
        val = _regular_unit(p, xu, Yu) - math.log(d.radius) / math.pi
    else:
        val = d.radius ** (2.0 * p.s - p.N) * _regular_unit(p, xu, Yu)
    return float(val[0]) if single else val


def green_value(p, d, x, y):
    """Value/gradient bundle of the Green function at one pair."""
    xu, Yu, _ = _prep(d, x, y)
    dist = float(np.sqrt(((Yu - xu[None, :]) ** 2).sum()))
    singular = dist <= _DIAG_TOL and d.contains(x)
    value = green_batch(p, d, x, y)
    if singular and not np.isfinite(value):
        return GreenEval(value=math.inf, grad_y=np.full(d.dim, math.nan), singular=True)
    grad = grad_green_y_batch(p, d, x, y)
    return GreenEval(value=value, grad_y=grad, singular=singular)


def regular_part(p, d, x, y):
    return regular_batch(p, d, x, y)


def robin(p, d, x):
    """Diagonal value H(x,x) of the regular part."""
    xu = _to_unit(d, np.atleast_1d(np.asarray(x, dtype=float)))
    ax2 = 1.0 - float((xu ** 2).sum())
    if ax2 <= 0.0:
        raise ValueError("robin needs an interior point")
    if p.regime is Regime.LOGARITHMIC:
        return -math.log(2.0 * d.radius * ax2) / math.pi
    kap = green_kernel_const(p)
    unit = kap * ax2 ** (2.0 * p.s - p.N) / (0.5 * p.N - p.s)
    return d.radius ** (2.0 * p.s - p.N) * unit


def green_trace(p, d, x, rule=None, method="analytic", tol=1e-7):
    """Boundary trace field of G(x, .)/delta^s.

    method 'analytic' uses the closed form; 'extrapolate' walks in along
    the normal with geometric steps and Richardson-extrapolates, raising
    NumericalError if the diagonal stops settling.
    """
    if rule is None:
        rule = d.boundary_rule(128 if d.dim > 1 else 1)
    if method == "analytic":
        xu = _to_unit(d, np.atleast_1d(np.asarray(x, dtype=float)))
        Su = _to_unit(d, rule.nodes)
        vals = d.radius ** (p.s - p.N) * _trace_unit(p, xu, Su)
        return TraceField(rule=rule, values=vals)
    if method != "extrapolate":
        raise ValueError("unknown trace method %r" % (method,))

    deltas = [1e-2 * 2.0 ** (-k) for k in range(9)]
    ladder = _richardson_ladder(p.s)
    vals = np.empty(len(rule))
    for j in range(len(rule)):
        sigma = rule.nodes[j]
        nu = rule.normals[j]
        seq = []
        for dl in deltas:
            y = sigma - dl * nu
            seq.append(green_batch(p, d, x, y) / dl ** p.s)
        limit, err = richardson(seq, ladder)
        if not np.isfinite(limit) or err > tol * max(1.0, abs(limit)):
            raise NumericalError(
                "trace extrapolation stalled at node %d (last increment %.3e)" % (j, err)
            )
        vals[j] = limit
    return TraceField(rule=rule, values=vals)


def _richardson_ladder(s):
    lead = min(1.0, 2.0 - 2.0 * s)
    ladder = [lead, 1.0, 2.0, 3.0, 4.0]
    out = []
    for e in ladder:
        if all(abs(e - o) > 1e-9 for o in out):
            out.append(e)
    return out


def grad_green_x(p, d, x, y, i, method="analytic"):
    """d/dx_i of G(y, x) (derivative in the second slot of G(y, .))."""
    if method == "analytic":
        g = grad_green_y_batch(p, d, y, x)
        return float(g[i])
    if method != "fd":
        raise ValueError("unknown method %r" % (method,))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    h = 1e-4 * d.signed_distance(x)
    if h <= 0.0:
        raise NumericalError("finite-difference step underflow at the boundary")
    e = np.zeros_like(x)
    e[i] = 1.0
    f = lambda t: green_batch(p, d, y, x + t * e)
    return float((f(-2 * h) - 8 * f(-h) + 8 * f(h) - f(2 * h)) / (12 * h))


def green_l1_gradient(p, d, x, h):
    """Midpoint sum of |d/dz G(x,z)| over the interior grid at mesh h."""
    pts = d.interior_grid(h)
    g = grad_green_y_batch(p, d, x, pts)
    n_axis = int(round(2.0 * d.radius / h))
    cell = (2.0 * d.radius / n_axis) ** d.dim
    return float(np.abs(g).sum() * cell)
