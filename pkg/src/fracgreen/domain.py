"""Geometry: intervals and N-balls, signed distance, normals, boundary rules.

Points are numpy arrays of shape (dim,); the interval also accepts bare
floats.  Boundary rules always store nodes/normals as (M, dim) arrays and
weights as (M,), so boundary sums look the same in every dimension.
"""

import math
from dataclasses import dataclass

import numpy as np

from .quadrature import gauss_legendre_01

_ON_BOUNDARY_TOL = 1e-10


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class BoundaryRule:
    """Discretization of the surface measure: nodes, weights, unit normals."""

    nodes: np.ndarray    # (M, dim)
    weights: np.ndarray  # (M,)
    normals: np.ndarray  # (M, dim)

    def __len__(self):
        return len(self.weights)


def _as_point(x, dim):
    a = np.atleast_1d(np.asarray(x, dtype=float))
    if a.shape != (dim,):
        raise GeometryError("expected a point of dimension %d, got shape %s" % (dim, a.shape))
    return a


class Interval:
    """Open interval (a, b) on the line."""

    kind = "interval"
    dim = 1

    def __init__(self, a=-1.0, b=1.0):
        if not a < b:
            raise GeometryError("interval needs a < b, got (%r, %r)" % (a, b))
        self.a = float(a)
        self.b = float(b)

    @property
    def center(self):
        return np.array([0.5 * (self.a + self.b)])

    @property
    def radius(self):
        return 0.5 * (self.b - self.a)

    def signed_distance(self, x):
        x = float(np.asarray(x).reshape(()) if np.ndim(x) == 0 else _as_point(x, 1)[0])
        return min(x - self.a, self.b - x)

    def contains(self, x):
        return self.signed_distance(x) > 0.0

    def outward_normal(self, sigma):
        s = float(np.asarray(sigma).reshape(()) if np.ndim(sigma) == 0 else _as_point(sigma, 1)[0])
        scale = max(1.0, abs(self.a), abs(self.b))
        if abs(s - self.a) <= _ON_BOUNDARY_TOL * scale:
            return np.array([-1.0])
        if abs(s - self.b) <= _ON_BOUNDARY_TOL * scale:
            return np.array([1.0])
        raise GeometryError("%r is not a boundary point of (%g, %g)" % (sigma, self.a, self.b))

    def boundary_rule(self, order=1):
        # The boundary is two points; the rule is exact.
        nodes = np.array([[self.a], [self.b]])
        weights = np.array([1.0, 1.0])
        normals = np.array([[-1.0], [1.0]])
        return BoundaryRule(nodes, weights, normals)

    def interior_grid(self, h):
        n = int(round((self.b - self.a) / h))
        if n < 2:
            raise GeometryError("mesh %g leaves fewer than 2 cells in (%g, %g)" % (h, self.a, self.b))
        step = (self.b - self.a) / n
        return (self.a + step * (np.arange(n) + 0.5)).reshape(-1, 1)

    def __repr__(self):
        return "Interval(%g, %g)" % (self.a, self.b)


class Ball:
    """Open ball in R^N, N >= 2 (use Interval for the line)."""

    kind = "ball"

    def __init__(self, center, radius, dim=None):
        c = np.atleast_1d(np.asarray(center, dtype=float))
        if dim is None:
            dim = len(c)
        if len(c) == 1 and dim > 1:
            c = np.full(dim, c[0])
        if c.shape != (dim,):
            raise GeometryError("center shape %s does not match dim %d" % (c.shape, dim))
        if dim < 2:
            raise GeometryError("Ball requires dim >= 2; use Interval on the line")
        if radius <= 0:
            raise GeometryError("radius must be positive, got %r" % (radius,))
        self.center = c
        self.radius = float(radius)
        self.dim = int(dim)

    def signed_distance(self, x):
        x = _as_point(x, self.dim)
        return self.radius - float(np.linalg.norm(x - self.center))

    def contains(self, x):
        return self.signed_distance(x) > 0.0

    def outward_normal(self, sigma):
        sigma = _as_point(sigma, self.dim)
        v = sigma - self.center
        r = np.linalg.norm(v)
        if abs(r - self.radius) > _ON_BOUNDARY_TOL * max(1.0, self.radius):
            raise GeometryError("point at radius %g is not on the sphere of radius %g" % (r, self.radius))
        return v / r

    def boundary_rule(self, order=32):
        if order < 1:
            raise GeometryError("rule order must be >= 1")
        if self.dim == 2:
            # trapezoid rule on the circle: spectrally accurate for smooth
            # periodic integrands
            th = 2.0 * math.pi * np.arange(order) / order
            normals = np.stack([np.cos(th), np.sin(th)], axis=1)
            nodes = self.center + self.radius * normals
            weights = np.full(order, 2.0 * math.pi * self.radius / order)
            return BoundaryRule(nodes, weights, normals)
        if self.dim == 3:
            # product rule: Gauss-Legendre in the polar cosine, trapezoid
            # in azimuth
            u, wu = gauss_legendre_01(order)
            ct = 2.0 * u - 1.0          # cos(theta) on (-1,1)
            wt = 2.0 * wu
            M = 2 * order
            ph = 2.0 * math.pi * np.arange(M) / M
            st = np.sqrt(1.0 - ct ** 2)
            normals = np.stack(
                [
                    np.outer(st, np.cos(ph)).ravel(),
                    np.outer(st, np.sin(ph)).ravel(),
                    np.outer(ct, np.ones(M)).ravel(),
                ],
                axis=1,
            )
            nodes = self.center + self.radius * normals
            weights = (self.radius ** 2 * 2.0 * math.pi / M) * np.outer(wt, np.ones(M)).ravel()
            return BoundaryRule(nodes, weights, normals)
        raise GeometryError("boundary rules implemented for dim 2 and 3 only")

    def interior_grid(self, h):
        n = int(round(2.0 * self.radius / h))
        if n < 2:
            raise GeometryError("mesh %g is too coarse for radius %g" % (h, self.radius))
        step = 2.0 * self.radius / n
        axis = -self.radius + step * (np.arange(n) + 0.5)
        grids = np.meshgrid(*([axis] * self.dim), indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=1) + self.center
        keep = np.linalg.norm(pts - self.center, axis=1) < self.radius
        pts = pts[keep]
        if len(pts) == 0:
            raise GeometryError("mesh %g produced no interior points" % (h,))
        return pts

    def __repr__(self):
        return "Ball(center=%s, radius=%g, dim=%d)" % (self.center.tolist(), self.radius, self.dim)


def make_domain(kind, **kw):
    """Factory used by the CLI config: make_domain('interval', a=-1, b=1)
    or make_domain('ball', center=0, radius=1, dim=2)."""
    if kind == "interval":
        return Interval(kw.get("a", -1.0), kw.get("b", 1.0))
    if kind == "ball":
        return Ball(kw.get("center", 0.0), kw.get("radius", 1.0), kw.get("dim", 2))
    raise GeometryError("unknown domain kind %r" % (kind,))
