"""Dirichlet solver by Green convolution, on the interval.

u(x) = int G(x,z) f(z) dz is evaluated with product-integration weights:
per grid cell the singular free-space part integrates exactly (closed
antiderivative) and the smooth regular part by a two-node rule.  The
same row of weights evaluates the solution at off-grid points, which is
what the boundary-trace extrapolation walks on.  Semilinear problems run
Picard on the grid values with automatic damping.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .domain import Interval
from .fracop import CapabilityError, GridFunction
from .greenfn import NumericalError, TraceField, _richardson_ladder, green_batch, regular_batch
from .quadrature import gauss_jacobi_01, gauss_legendre_01, richardson
from .specfun import FracParams, Regime, kernel_coeff

_GL2_OFF = 0.5 / math.sqrt(3.0)


class ConvergenceError(RuntimeError):
    pass


@dataclass
class SourceTerm:
    """Right-hand side; either f(x) or f(x, u)."""

    kind: str  # "pureSpace" | "semilinear"
    evaluator: object
    partial_h: object = None
    partial_q: object = None

    def __post_init__(self):
        if self.kind not in ("pureSpace", "semilinear"):
            raise ValueError("unknown source kind %r" % (self.kind,))

    @classmethod
    def pure(cls, fn):
        return cls(kind="pureSpace", evaluator=fn)

    @classmethod
    def coupled(cls, fn, partial_h=None, partial_q=None):
        return cls(kind="semilinear", evaluator=fn, partial_h=partial_h, partial_q=partial_q)

    def __call__(self, x, u=None):
        if self.kind == "pureSpace":
            return np.asarray(self.evaluator(x), dtype=float)
        return np.asarray(self.evaluator(x, u), dtype=float)


@dataclass
class Solution:
    u: GridFunction
    trace: TraceField
    iterations: int
    residual: float
    params: FracParams = None
    domain: Interval = None
    source_values: np.ndarray = None
    source_at: object = None
    h: float = None

    def evaluate(self, x):
        """Green-representation value at an arbitrary interior point.

        Subtracted form f(x)*Q(x) + sum_j W_j(x)(f_j - f(x)), so the
        leading boundary behaviour comes from the near-exact Green mass
        Q and survives division by delta^s.  Accepts a scalar or an array
        of points (evaluated one by one).
        """
        arr = np.asarray(x, dtype=float)
        if arr.ndim > 0 and arr.size != 1:
            return np.array([self.evaluate(float(t)) for t in arr.ravel()]).reshape(
                arr.shape
            )
        x = float(arr.ravel()[0])
        if not self.domain.contains(x):
            return 0.0
        # within rounding distance of the boundary the Green mass degenerates;
        # the value there is O(delta^s) ~ 0 anyway
        if min(x - self.domain.a, self.domain.b - x) < 1e-12 * (
            self.domain.b - self.domain.a
        ):
            return 0.0
        xs = self.u.points[:, 0]
        row = _weight_row(self.params, self.domain, x, xs, self.h)
        fx = float(self.source_at(x))
        q = _green_mass(self.params, self.domain, x)
        return fx * q + float(np.dot(row, self.source_values)) - fx * float(row.sum())


def _fund_antideriv(p, w):
    """Antiderivative of fundamental(|t|) as a function of t, odd in w."""
    w = np.asarray(w, dtype=float)
    if p.regime is Regime.LOGARITHMIC:
        aw = np.abs(w)
        return np.where(aw > 0.0, (w - w * np.log(np.maximum(aw, 1e-300))) / math.pi, 0.0)
    coeff = kernel_coeff(p)
    return coeff * np.sign(w) * np.abs(w) ** (2.0 * p.s) / (2.0 * p.s)


def _weight_row(p, d, x, centers, h):
    """Weights W_j(x) with sum_j W_j(x) f_j ~ int G(x,z) f(z) dz."""
    F = _fund_antideriv(p, x - centers + 0.5 * h) - _fund_antideriv(p, x - centers - 0.5 * h)
    zg = np.concatenate([centers - _GL2_OFF * h, centers + _GL2_OFF * h])
    H = regular_batch(p, d, x, zg[:, None])
    n = len(centers)
    return F - 0.5 * h * (H[:n] + H[n:])


def _weight_matrix(p, d, xs, h):
    return np.vstack([_weight_row(p, d, x, xs, h) for x in xs])


def _graded_edges(lo, hi, step_lo, step_hi):
    """Panel edges with sizes growing geometrically away from both ends."""
    mid = 0.5 * (lo + hi)
    left = [lo]
    t, st = lo, step_lo
    while t + st < mid:
        t += st
        left.append(t)
        st *= 2.0
    right = [hi]
    t, st = hi, step_hi
    while t - st > mid:
        t -= st
        right.append(t)
        st *= 2.0
    return left + right[::-1]


def _green_mass(p, d, x):
    """Q(x) = int_a^b G(x,z) dz.

    Three-zone quadrature: a diagonal window where the free-space part
    integrates exactly and the regular part is smooth; Jacobi panels in
    the boundary weight dist(z)^s at each endpoint, applied to the ratio
    G/dist^s which stays smooth; graded smooth panels in between.  All
    panel sizes follow the local variation scale, so the result keeps
    relative accuracy arbitrarily close to the boundary.
    """
    s = p.s
    da, db = x - d.a, d.b - x
    w = 0.25 * min(da, db)
    gl, wl = gauss_legendre_01(16)
    uj, wj = gauss_jacobi_01(40, s)
    # diagonal window
    total = 2.0 * float(_fund_antideriv(p, w))
    for lo, hi in ((x - w, x), (x, x + w)):
        z = lo + (hi - lo) * gl
        total -= float((hi - lo) * np.dot(wl, regular_batch(p, d, x, z[:, None])))
    # boundary panels: G/dist^s against the Jacobi weight
    for endpoint, sign, dist in ((d.a, 1.0, da), (d.b, -1.0, db)):
        e = 0.5 * dist
        v = e * uj
        G = green_batch(p, d, x, (endpoint + sign * v)[:, None])
        total += e ** (1.0 + s) * float(np.dot(wj, G * v ** (-s)))
        # graded gap between the boundary panel and the diagonal window
        gap_lo, gap_hi = e, dist - w
        edges = _graded_edges(gap_lo, gap_hi, e, w) if gap_hi > gap_lo else [gap_lo]
        for za, zb in zip(edges[:-1], edges[1:]):
            z = endpoint + sign * (za + (zb - za) * gl)
            total += float((zb - za) * np.dot(wl, green_batch(p, d, x, z[:, None])))
    return total


def _apply_green(p, d, xs, W, Q, fv, rowsums):
    return fv * Q + W @ fv - fv * rowsums


def _as_source(f, kind="pureSpace"):
    if isinstance(f, SourceTerm):
        return f
    return SourceTerm(kind=kind, evaluator=f)


def _interp_source(xs, fv):
    def at(x):
        out = np.interp(x, xs, fv)
        return float(out) if np.ndim(out) == 0 else out

    return at


def _finish(p, d, xs, h, uv, fv, source_at, iterations, residual, trace_tol):
    pts = xs[:, None]
    sol = Solution(
        u=GridFunction(domain=d, h=h, points=pts, values=uv),
        trace=None,
        iterations=iterations,
        residual=residual,
        params=p,
        domain=d,
        source_values=fv,
        source_at=source_at,
        h=h,
    )
    sol.trace = solution_trace(sol, d, p, tol=trace_tol)
    return sol


def solve_linear(p, d, f, h, trace_tol=1e-3):
    """Dirichlet problem (-Lap)^s u = f(x), u = 0 outside the interval."""
    if d.dim != 1:
        raise CapabilityError("solver implemented on intervals")
    src = _as_source(f)
    if src.kind != "pureSpace":
        raise ValueError("solve_linear needs a pure-space source")
    xs = d.interior_grid(h)[:, 0]
    step = xs[1] - xs[0]
    fv = src(xs)
    if not np.all(np.isfinite(fv)):
        raise ValueError("source not finite on the grid")
    W = _weight_matrix(p, d, xs, step)
    Q = np.array([_green_mass(p, d, x) for x in xs])
    uv = _apply_green(p, d, xs, W, Q, fv, W.sum(axis=1))

    def source_at(x):
        out = np.asarray(src(np.atleast_1d(np.asarray(x, dtype=float))))
        return float(out.ravel()[0]) if np.ndim(x) == 0 else out

    return _finish(p, d, xs, step, uv, fv, source_at, 1, 0.0, trace_tol)


def solve_semilinear(p, d, f, h, max_iter=200, tol=1e-10, trace_tol=1e-3):
    """Picard iteration u <- G * f(., u); damped when contraction is unclear."""
    if d.dim != 1:
        raise CapabilityError("solver implemented on intervals")
    src = _as_source(f, kind="semilinear")
    if src.kind != "semilinear":
        raise ValueError("solve_semilinear needs a coupled source")
    xs = d.interior_grid(h)[:, 0]
    step = xs[1] - xs[0]
    W = _weight_matrix(p, d, xs, step)
    Q = np.array([_green_mass(p, d, x) for x in xs])
    rowsums = W.sum(axis=1)
    norm_w = float(np.abs(W).sum(axis=1).max())
    damped = True
    if src.partial_q is not None:
        # a-priori contraction: Lipschitz bound times the Green mass
        f0 = src(xs, np.zeros_like(xs))
        base = np.abs(_apply_green(p, d, xs, W, Q, f0, rowsums)).max()
        M = 2.0 * base + 1.0
        L = max(
            float(np.abs(np.asarray(src.partial_q(xs, np.full_like(xs, q)), dtype=float)).max())
            for q in np.linspace(-M, M, 9)
        )
        damped = L * norm_w >= 1.0
    theta = 0.5 if damped else 1.0
    uv = np.zeros_like(xs)
    prev_res = math.inf
    bad = 0
    for k in range(1, max_iter + 1):
        fv = src(xs, uv)
        new = (1.0 - theta) * uv + theta * _apply_green(p, d, xs, W, Q, fv, rowsums)
        res = float(np.abs(new - uv).max())
        uv = new
        if res <= tol:
            fv = src(xs, uv)
            return _finish(p, d, xs, step, uv, fv, _interp_source(xs, fv), k, res, trace_tol)
        if damped and res > prev_res:
            bad += 1
            if bad >= 3:
                raise ConvergenceError(
                    "residual grew for %d consecutive damped steps (last %g)" % (bad, res)
                )
        else:
            bad = 0
        prev_res = res
    raise ConvergenceError("no convergence in %d iterations (residual %g)" % (max_iter, res))


def solution_trace(sol, d, p, tol=1e-3):
    """Boundary values of u/delta^s by Richardson walk along the inward normal."""
    rule = d.boundary_rule()
    deltas = d.radius * 1e-2 * 0.5 ** np.arange(9)
    ladder = _richardson_ladder(p.s)
    values = np.empty(len(rule))
    for i in range(len(rule)):
        node = rule.nodes[i]
        inward = -rule.normals[i]
        seq = []
        for dk in deltas:
            x = node + dk * inward
            seq.append(sol.evaluate(x[0]) / dk ** p.s)
        limit, increment = richardson(np.array(seq), ladder)
        if not (abs(increment) <= tol * max(1.0, abs(limit))):
            raise NumericalError(
                "trace extrapolation did not settle at boundary node %d (increment %g)"
                % (i, increment)
            )
        values[i] = limit
    return TraceField(rule=rule, values=values)
