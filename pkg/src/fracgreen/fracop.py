"""Pointwise fractional Laplacian, quadratic forms, and the cutoff constant.

The principal value is always removed by symmetrization: pairing z and
2x - z turns the kernel singularity into an integrable second difference.
Panels of a tanh-sinh rule between known breakpoints (domain endpoints,
kinks of the argument function) deal with endpoint singularities of
whatever exponent shows up.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import hyp2f1

from .domain import Ball, Interval
from .quadrature import de_rule, gauss_jacobi_01, gauss_legendre_01
from .specfun import FracParams, Regime, c_const, fundamental

_SQ2 = math.sqrt(2.0)


class CapabilityError(NotImplementedError):
    pass


# ----------------------------------------------------------------------
# grid functions and cutoff profiles

@dataclass
class GridFunction:
    """Function sampled at interior grid points, zero outside the domain."""

    domain: object
    h: float
    points: np.ndarray
    values: np.ndarray
    exterior_zero: bool = True

    @classmethod
    def from_callable(cls, domain, h, fn):
        pts = domain.interior_grid(h)
        arg = pts[:, 0] if domain.dim == 1 else pts
        return cls(domain=domain, h=h, points=pts, values=np.asarray(fn(arg), dtype=float))

    def __post_init__(self):
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid function carries non-finite values")


def _smoothstep(x):
    # C-infinity step: 0 for x<=0, 1 for x>=1
    x = np.asarray(x, dtype=float)
    lo = x <= 0.0
    hi = x >= 1.0
    mid = ~(lo | hi)
    out = np.zeros_like(x)
    out[hi] = 1.0
    if np.any(mid):
        xm = x[mid]
        a = np.exp(-1.0 / xm)
        b = np.exp(-1.0 / (1.0 - xm))
        out[mid] = a / (a + b)
    return out


@dataclass(frozen=True)
class CutoffProfile:
    """Smooth transition profile: 1 on [-1,1], 0 outside (-2,2)."""

    name: str
    power: int = 1

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return _smoothstep(2.0 - np.abs(t)) ** self.power


DEFAULT_PROFILE = CutoffProfile(name="smoothstep")
SQUARED_PROFILE = CutoffProfile(name="smoothstep-squared", power=2)


# ----------------------------------------------------------------------
# pointwise operator

def _edges_1d(d, x, breakpoints):
    """Breakpoints of t -> u(x +- t): distances from x to every kink."""
    kinks = {d.a, d.b}
    kinks.update(breakpoints)
    T = max(d.b - x, x - d.a)
    cuts = sorted({abs(k - x) for k in kinks if 0.0 < abs(k - x) < T})
    edges = [0.0] + cuts + [T]
    # keep panels short so the rule resolves mid-panel structure
    refined = [edges[0]]
    for e in edges[1:]:
        while e - refined[-1] > 2.0:
            refined.append(refined[-1] + 2.0)
        refined.append(e)
    return refined, T


def _pair_integral_1d(p, d, diff_fn, x, tail_coeff, breakpoints):
    """int_0^T diff_fn(t) t^(-1-2s) dt + exact exterior tail.

    diff_fn is the symmetrized numerator (a second difference, O(t^2) at
    the origin).  Its floating-point noise floor would be amplified by
    the kernel at the clustered nodes of an endpoint rule, so the first
    half-panel integrates diff/t^2 against the weight t^(1-2s) with
    Gauss-Jacobi nodes, which stay at moderate distance from zero.
    """
    s = p.s
    edges, T = _edges_1d(d, x, breakpoints)
    h1 = 0.5 * edges[1]
    uj, wj = gauss_jacobi_01(32, 1.0 - 2.0 * s)
    tj = h1 * uj
    total = h1 ** (2.0 - 2.0 * s) * float(np.dot(wj, diff_fn(tj) / tj ** 2))
    for a, b in zip([h1] + edges[1:-1], edges[1:]):
        t, w = de_rule(a, b)
        total += float(np.dot(w, diff_fn(t) * t ** (-1.0 - 2.0 * s)))
    total += tail_coeff * T ** (-2.0 * s) / s
    return total


def apply_frac_lap(p, d, u, x, breakpoints=()):
    """(-Delta)^s u at interior x for exterior-zero u (callable on arrays).

    Near/far fields are one symmetrized integral over t = |z - x| with
    panel breaks at the domain endpoints and any declared kinks of u; the
    exterior, where u vanishes identically, contributes an exact power
    tail.  Supported in dimensions 1 and 2.
    """
    if d.dim == 1:
        x = float(np.atleast_1d(np.asarray(x, dtype=float))[0])
        if not d.contains(x):
            raise ValueError("operator evaluation needs an interior point")
        ux = float(u(np.array([x]))[0])

        def second_diff(t):
            return 2.0 * ux - u(x + t) - u(x - t)

        val = _pair_integral_1d(p, d, second_diff, x, ux, breakpoints)
        return c_const(p) * val
    if d.dim == 2:
        return _apply_frac_lap_2d(p, d, u, x)
    raise CapabilityError("pointwise operator implemented for dim 1 and 2")


def _circle_mean(d, u, x, rho, n=64):
    """Average of u over the circle of radius rho about x, zero outside d."""
    v = x - d.center
    dv = float(np.linalg.norm(v))
    r = d.radius
    if rho <= r - dv:
        th = 2.0 * math.pi * (np.arange(n) + 0.5) / n
        pts = x[None, :] + rho * np.stack([np.cos(th), np.sin(th)], axis=1)
        return float(np.mean(u(pts)))
    if rho >= r + dv:
        return 0.0
    # partial arc: integrate over the inside sector only
    w = (r * r - dv * dv - rho * rho) / (2.0 * rho * dv)
    psi = math.acos(max(-1.0, min(1.0, w)))
    half = math.pi - psi
    if half <= 0.0:
        return 0.0
    base = math.atan2(-v[1], -v[0])
    g, gw = gauss_legendre_01(32)
    th = base - half + 2.0 * half * g
    pts = x[None, :] + rho * np.stack([np.cos(th), np.sin(th)], axis=1)
    return float(2.0 * half * np.dot(gw, u(pts)) / (2.0 * math.pi))


def _apply_frac_lap_2d(p, d, u, x):
    x = np.asarray(x, dtype=float)
    if not d.contains(x):
        raise ValueError("operator evaluation needs an interior point")
    ux = float(u(x[None, :])[0])
    dv = float(np.linalg.norm(x - d.center))
    rho1 = d.radius - dv
    rho2 = d.radius + dv
    s = p.s
    edges = [0.0]
    for e in (rho1, rho2):
        while e - edges[-1] > 2.0:
            edges.append(edges[-1] + 2.0)
        if e > edges[-1]:
            edges.append(e)
    # Jacobi first half-panel: (ux - mean)/rho^2 is smooth and cancellation-safe
    h1 = 0.5 * edges[1]
    uj, wj = gauss_jacobi_01(32, 1.0 - 2.0 * s)
    tj = h1 * uj
    gj = np.array([(ux - _circle_mean(d, u, x, rho)) / rho ** 2 for rho in tj])
    total = h1 ** (2.0 - 2.0 * s) * float(np.dot(wj, gj))
    for a, b in zip([h1] + edges[1:-1], edges[1:]):
        t, w = de_rule(a, b)
        vals = np.array([ux - _circle_mean(d, u, x, rho) for rho in t])
        total += float(np.dot(w, vals * t ** (-1.0 - 2.0 * s)))
    total += ux * rho2 ** (-2.0 * s) / (2.0 * s)
    return c_const(p) * 2.0 * math.pi * total


def interaction_form(p, d, u, v, x, breakpoints=()):
    """Pointwise interaction (carre-du-champ) form of the product rule."""
    if d.dim != 1:
        raise CapabilityError("interaction form implemented on the line only")
    x = float(np.atleast_1d(np.asarray(x, dtype=float))[0])
    if not d.contains(x):
        raise ValueError("interaction form needs an interior point")
    ux = float(u(np.array([x]))[0])
    vx = float(v(np.array([x]))[0])

    def pair(t):
        up, um = u(x + t), u(x - t)
        vp, vm = v(x + t), v(x - t)
        return (ux - up) * (vx - vp) + (ux - um) * (vx - vm)

    val = _pair_integral_1d(p, d, pair, x, ux * vx, breakpoints)
    return c_const(p) * val


# ----------------------------------------------------------------------
# energy form (product integration on the pair grid)

def _g2(t, s):
    return np.abs(t) ** (3.0 - 2.0 * s) / ((2.0 - 2.0 * s) * (3.0 - 2.0 * s))


def _exterior_weight(a, b, s, xs, h):
    """Per-cell weight for the exterior strip integral of u v.

    Midpoint values of [(b-y)^(-2s) + (y-a)^(-2s)]/(2s).  Under the
    boundary behaviour u ~ dist^s the power of the weight cancels the
    power of the product exactly, so the divergent-looking cells next to
    the endpoints carry the correct finite mass.
    """
    return h * ((b - xs) ** (-2.0 * s) + (xs - a) ** (-2.0 * s)) / (2.0 * s)


def energy_form(p, u, v):
    """Bilinear energy of two grid functions on a shared interval grid.

    Pair-cell kernel moments are exact (second antiderivative of the
    kernel); the diagonal uses central-difference slopes; the exterior
    strip, where both functions vanish, integrates to a closed form.
    """
    if u.domain.dim != 1:
        raise CapabilityError("energy form implemented on the line only")
    if v.domain is not u.domain and (
        v.domain.a != u.domain.a or v.domain.b != u.domain.b or len(v.values) != len(u.values)
    ):
        raise ValueError("energy form needs matching grids")
    s = p.s
    xs = u.points[:, 0]
    h = xs[1] - xs[0]
    uu, vv = u.values, v.values
    n = len(xs)
    # pairwise slopes (u_i-u_j)(v_i-v_j)/(x_i-x_j)^2 with derivative diagonal
    du = uu[:, None] - uu[None, :]
    dv = vv[:, None] - vv[None, :]
    dx = xs[:, None] - xs[None, :]
    dist = np.abs(dx)
    M = _g2(dist + h, s) - 2.0 * _g2(dist, s) + _g2(np.maximum(dist - h, -dist - h), s)
    with np.errstate(divide="ignore", invalid="ignore"):
        f = du * dv / dx ** 2
    up = np.pad(uu, 1)  # exterior-zero ghosts
    vp = np.pad(vv, 1)
    su = (up[2:] - up[:-2]) / (2.0 * h)
    sv = (vp[2:] - vp[:-2]) / (2.0 * h)
    np.fill_diagonal(f, su * sv)
    inner = float((f * M).sum())
    a, b = u.domain.a, u.domain.b
    ext = float(np.dot(uu * vv, _exterior_weight(a, b, s, xs, h)))
    return 0.5 * c_const(p) * (inner + 2.0 * ext)


# ----------------------------------------------------------------------
# the universal cutoff constant

@dataclass
class ConstantEstimate:
    value: float
    error_bar: float
    evaluations: int = 0

    def __iter__(self):
        return iter((self.value, self.error_bar))


def _transition_moment(profile, fn, m=64):
    """int_1^sqrt(2) profile(w^2) fn(w) dw."""
    g, w = gauss_legendre_01(m)
    ww = 1.0 + (_SQ2 - 1.0) * g
    return float((_SQ2 - 1.0) * np.dot(w, profile(ww * ww) * fn(ww)))


def _sing_half_integral(p, q, e, order):
    """int_0^e q(v) F(v) dv with q smooth; F carries the kernel singularity."""
    if p.regime is Regime.LOGARITHMIC:
        v, w = de_rule(0.0, e)
        return float(np.dot(w, q(v) * (-np.log(v) / math.pi)))
    from .specfun import kernel_coeff

    uj, wj = gauss_jacobi_01(order, 2.0 * p.s - 1.0)
    return kernel_coeff(p) * e ** (2.0 * p.s) * float(np.dot(wj, q(e * uj)))


def _profile_F_integral(p, q, lo, hi, marks, order):
    """int_lo^hi q(y) F(|y|) dy; panels touching 0 work in local coordinates."""
    edges = sorted(
        {lo, hi} | {m for m in marks if lo < m < hi} | ({0.0} if lo < 0.0 < hi else set())
    )
    g, wg = gauss_legendre_01(order)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if b - a < 1e-14:
            continue
        if a == 0.0:
            total += _sing_half_integral(p, q, b, order)
        elif b == 0.0:
            total += _sing_half_integral(p, lambda v: q(-v), -a, order)
        else:
            yy = a + (b - a) * g
            total += float((b - a) * np.dot(wg, q(yy) * fundamental(p, np.abs(yy))))
    return total


def _inner_profile_diff(p, profile, t, order):
    """D(t) = int (rho(y^2)-rho((y+t)^2)) (F(y+t)-F(y)) dy for t > 0."""
    marks_a = (-1.0, 1.0, -_SQ2, _SQ2, t - 1.0, t + 1.0, t - _SQ2, t + _SQ2)
    term_a = _profile_F_integral(
        p,
        lambda w: profile((w - t) ** 2) - profile(w * w),
        -_SQ2,
        _SQ2 + t,
        marks_a,
        order,
    )
    marks_b = (-1.0, 1.0, -_SQ2, _SQ2, -t - 1.0, -t + 1.0, -t - _SQ2, -t + _SQ2)
    term_b = _profile_F_integral(
        p,
        lambda y: profile(y * y) - profile((y + t) ** 2),
        -_SQ2 - t,
        _SQ2,
        marks_b,
        order,
    )
    return term_a - term_b


def _a_constant_1d(p, profile, order, T=48.0):
    s = p.s
    c = c_const(p)
    # small-t panel: D(t)/t^2 is smooth, the rest of the power is a Jacobi weight
    eps0 = 0.25
    uj, wj = gauss_jacobi_01(24, 1.0 - 2.0 * s)
    tj = eps0 * uj
    small = eps0 ** (2.0 - 2.0 * s) * float(
        np.dot(wj, [_inner_profile_diff(p, profile, t, order) / t ** 2 for t in tj])
    )
    # mid panels up to T
    edges = [eps0, _SQ2 - 1.0, 0.75, 1.0, _SQ2, 2.0, 1.0 + _SQ2, 2.0 * _SQ2, 4.0, 8.0, 16.0, 32.0, T]
    edges = sorted(e for e in edges if eps0 <= e <= T)
    mid = 0.0
    g, wg = gauss_legendre_01(order)
    for a, b in zip(edges[:-1], edges[1:]):
        if b - a < 1e-12:
            continue
        tt = a + (b - a) * g
        vals = np.array([_inner_profile_diff(p, profile, t, order) for t in tt])
        mid += float((b - a) * np.dot(wg, vals / tt ** (1.0 + 2.0 * s)))
    # analytic moment tail beyond T
    M0 = 2.0 * (1.0 + _transition_moment(profile, lambda w: np.ones_like(w)))
    M2 = 2.0 * (1.0 / 3.0 + _transition_moment(profile, lambda w: w * w))
    if p.regime is Regime.LOGARITHMIC:
        Mlog = 2.0 * (-1.0 + _transition_moment(profile, np.log))
        tail = (
            -2.0 * M0 * (math.log(T) + 1.0) / T + 2.0 * Mlog / T + M2 / (3.0 * T ** 3)
        ) / math.pi
    else:
        from .specfun import kernel_coeff

        bc = kernel_coeff(p)
        MF = 2.0 * bc * (1.0 / (2.0 * s) + _transition_moment(profile, lambda w: w ** (2.0 * s - 1.0)))
        tail = (
            2.0 * bc * M0 / T
            + bc * (2.0 * s - 1.0) * (2.0 * s - 2.0) * M2 / (3.0 * T ** 3)
            - MF * T ** (-2.0 * s) / s
        )
    # the half-line pieces double; the neglected tail terms are O((1/T)^2) relative
    return 2.0 * c * (small + mid + tail), abs(2.0 * c * tail) * 6.0 / T ** 2


def _angular_kernel(s, r, rho):
    """int_0^2pi (r^2 + rho^2 - 2 r rho cos)^(-(1+s)) dtheta."""
    A = r * r + rho * rho
    m = (2.0 * r * rho / A) ** 2
    return 2.0 * math.pi * A ** (-(1.0 + s)) * hyp2f1(0.5 * (1.0 + s), 0.5 * (2.0 + s), 1.0, m)


def _a_constant_2d(p, profile, order, R=64.0):
    s = p.s
    c = c_const(p)
    bc = fundamental(p, 1.0)  # 2d kernel coefficient
    uj, wj = gauss_jacobi_01(order, 1.0 - 2.0 * s)  # diagonal panels
    ur, wr = gauss_jacobi_01(order, 2.0 * s - 1.0)  # kernel singularity at r=0
    g, wg = gauss_legendre_01(order)

    def f(r):
        return bc * r ** (2.0 * s - 2.0)

    def inner(r):
        # int over rho > r of rho (P(r)-P(rho)) (f(rho)-f(r)) W drho;
        # the profile difference vanishes below rho=1 whenever r <= 1
        Pr = float(profile(np.array([r * r]))[0])
        fr = f(r)
        cuts = [e for e in (1.0, 1.2, _SQ2, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0, 48.0, R) if e > max(r, 1.0) + 1e-12]
        total = 0.0
        if r > 1.0:
            w_len = min(cuts[0] - r, 1.0)
            q = w_len * uj
            rr = r + q
            gq = rr * (Pr - profile(rr * rr)) * (f(rr) - fr) * _angular_kernel(s, r, rr)
            total += w_len ** (2.0 - 2.0 * s) * float(np.dot(wj, gq * q ** (2.0 * s - 1.0)))
            start = r + w_len
        else:
            start = 1.0
        for a2, b2 in zip([start] + cuts[:-1], cuts):
            if b2 <= start + 1e-12:
                continue
            a2 = max(a2, start)
            rr = a2 + (b2 - a2) * g
            P = profile(rr * rr)
            W = _angular_kernel(s, r, rr)
            total += float((b2 - a2) * np.dot(wg, rr * (Pr - P) * (f(rr) - fr) * W))
        return total

    # outer: Jacobi panel absorbs the f(r) blowup, then ordinary panels
    e0 = 0.5
    r0 = e0 * ur
    outer = e0 ** (2.0 * s) * float(
        np.dot(wr, np.array([inner(r) for r in r0]) * r0 ** (2.0 - 2.0 * s))
    )
    for a2, b2 in ((0.5, 1.0), (1.0, 1.2), (1.2, _SQ2)):
        rr = a2 + (b2 - a2) * g
        vals = np.array([inner(r) for r in rr])
        outer += float((b2 - a2) * np.dot(wg, rr * vals))
    # analytic moments of the rho > R remainder (P=1 below r=1, transition above)
    gt, wt = gauss_legendre_01(48)
    rt = 1.0 + (_SQ2 - 1.0) * gt
    Pt = profile(rt * rt)
    Mr0 = 0.5 + float((_SQ2 - 1.0) * np.dot(wt, rt * Pt))
    Mrf = bc * (1.0 / (2.0 * s) + float((_SQ2 - 1.0) * np.dot(wt, rt ** (2.0 * s - 1.0) * Pt)))
    tail = 2.0 * math.pi * (bc * Mr0 / (2.0 * R * R) - Mrf * R ** (-2.0 * s) / (2.0 * s))
    value = c * 2.0 * math.pi * 2.0 * (outer + tail)
    return value, abs(c * 2.0 * math.pi * 2.0 * tail) * 6.0 / R ** 2


def a_constant(p, profile=DEFAULT_PROFILE, budget=2):
    """Universal cutoff constant; returns a ConstantEstimate (value, bar).

    `budget` sets the refinement level; the error bar combines the
    level-to-level difference with the analytic tail bound.
    """
    if p.N == 1:
        runner = _a_constant_1d
    elif p.N == 2:
        runner = _a_constant_2d
    else:
        raise CapabilityError("cutoff constant supported for N in {1, 2}")
    orders = {0: 12, 1: 16, 2: 20, 3: 28}
    lo = orders.get(max(0, budget - 1), 28)
    hi = orders.get(budget, 28 + 8 * (budget - 3))
    v1, t1 = runner(p, profile, lo)
    v2, t2 = runner(p, profile, hi)
    return ConstantEstimate(value=v2, error_bar=abs(v2 - v1) + t2)
