"""Euclidean plane with exact rational-quadratic coordinates.

Points carry QNum coordinates so tape constructions (whose cross-strip
offsets live in Q(sqrt(4p-1))) stay exact end to end.  Geodesics store a
rational direction vector plus its exact squared norm; eval(t) divides by
the norm only when the norm is itself a QNum with an exact square root,
which holds for every construction line we emit (axis-parallel and
tan-half-angle directions).  Otherwise eval falls back to floats, which the
exact decision paths never touch: all certification goes through dist_sq.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from ..exactnum import QNum, exact_sqrt, qnum
from .base import (COMPLETE, EXACT, Domain, DirectionAtPoint, Geodesic,
                   ModelSpace, NoGeodesic, SpaceError, UnsupportedOperation,
                   rational_circle_dirs, sqrt_any)


@dataclass(frozen=True)
class EPoint:
    x: object
    y: object
    space_id: str = "E2"

    def __iter__(self):
        return iter((self.x, self.y))


def _q(v):
    return v if isinstance(v, QNum) else qnum(v)


class ELine(Geodesic):
    """Unit-speed line p0 + t * (dx, dy)/|d|, direction stored unnormalized."""

    def __init__(self, space, p0: EPoint, dx, dy, domain: Domain = COMPLETE):
        self.space = space
        self.p0 = p0
        self.dx = _q(dx)
        self.dy = _q(dy)
        n2 = self.dx * self.dx + self.dy * self.dy
        if n2.sign() == 0:
            raise SpaceError("zero direction")
        self.norm2 = n2
        self.norm = exact_sqrt(n2)  # QNum or None
        self.domain = domain

    def eval(self, t) -> EPoint:
        self._check_domain(t)
        if self.norm is not None and not isinstance(t, float):
            s = _q(t) / self.norm
            return EPoint(self.p0.x + s * self.dx, self.p0.y + s * self.dy)
        n = math.sqrt(float(self.norm2))
        s = float(t) / n
        return EPoint(float(self.p0.x) + s * float(self.dx),
                      float(self.p0.y) + s * float(self.dy))

    def shift(self, delta) -> "ELine":
        q0 = self.eval(delta)
        lo = None if self.domain.lo is None else self.domain.lo - delta
        hi = None if self.domain.hi is None else self.domain.hi - delta
        return ELine(self.space, q0, self.dx, self.dy, Domain(lo, hi))

    def ideal(self, sign: int):
        if sign > 0 and self.domain.hi is not None:
            return None
        if sign < 0 and self.domain.lo is not None:
            return None
        return EIdeal(self.dx * sign, self.dy * sign)

    def param_of(self, p: EPoint):
        """Parameter of a point assumed on the line (projection otherwise)."""
        wx, wy = p.x - self.p0.x, p.y - self.p0.y
        dot = wx * self.dx + wy * self.dy
        if self.norm is not None and not (
            isinstance(wx, float) or isinstance(wy, float)
        ):
            return dot / self.norm
        return float(dot) / math.sqrt(float(self.norm2))


@dataclass(frozen=True)
class EIdeal:
    """Boundary point = direction class; stored unnormalized, exact."""

    dx: object
    dy: object

    def _key(self):
        # normalize by max-abs component, exact
        ax, ay = abs(self.dx), abs(self.dy)
        m = ax if ax >= ay else ay
        return (self.dx / m, self.dy / m)


class PlaneChart:
    """Exact isometric chart: point(a, b) = origin + a u + b n, n = left normal."""

    def __init__(self, space, origin: EPoint, ux, uy):
        self.space = space
        self.origin = origin
        self.ux, self.uy = ux, uy

    def point(self, a, b) -> EPoint:
        a, b = _q(a), _q(b)
        return EPoint(self.origin.x + a * self.ux - b * self.uy,
                      self.origin.y + a * self.uy + b * self.ux)

    def line(self, b) -> "ELine":
        """Complete horizontal a -> point(a, b)."""
        return ELine(self.space, self.point(0, b), self.ux, self.uy)


class EuclideanPlane(ModelSpace):
    kind = "euclidean_plane"
    numeric_mode = EXACT
    space_id = "E2"

    def point(self, x, y) -> EPoint:
        return EPoint(_q(x), _q(y))

    # -- metric --------------------------------------------------------------
    def dist_sq(self, p, q):
        dx, dy = p.x - q.x, p.y - q.y
        return dx * dx + dy * dy

    def distance(self, p, q):
        return sqrt_any(self.dist_sq(p, q))

    # -- geodesics -------------------------------------------------------------
    def geodesic_through(self, p, q) -> ELine:
        dx, dy = q.x - p.x, q.y - p.y
        if (dx * dx + dy * dy).sign() == 0:
            raise NoGeodesic("coincident points")
        return ELine(self, p, dx, dy)

    def geodesic_to_ideal(self, p, xi: EIdeal) -> ELine:
        return ELine(self, p, xi.dx, xi.dy, Domain(qnum(0), None))

    def geodesic_between_ideals(self, xi_neg: EIdeal, xi_pos: EIdeal,
                                anchor=None) -> ELine:
        # exists iff the directions are opposite; then any anchor works
        if not self.ideal_eq(EIdeal(-xi_neg.dx, -xi_neg.dy), xi_pos):
            raise NoGeodesic("ideal points not opposite in the plane")
        base = anchor if anchor is not None else self.point(0, 0)
        return ELine(self, base, xi_pos.dx, xi_pos.dy)

    # -- boundary ----------------------------------------------------------------
    def busemann(self, xi: EIdeal, base, x):
        """b(x) = -<x - base, u>, u the unit vector toward xi; exact when
        |xi| has an exact root."""
        n2 = xi.dx * xi.dx + xi.dy * xi.dy
        n = exact_sqrt(n2)
        wx, wy = x.x - base.x, x.y - base.y
        dot = wx * xi.dx + wy * xi.dy
        if n is not None and not (isinstance(wx, float) or isinstance(wy, float)):
            return -(dot / n)
        return -float(dot) / math.sqrt(float(n2))

    def ideal_eq(self, xi: EIdeal, eta: EIdeal) -> bool:
        cross = xi.dx * eta.dy - xi.dy * eta.dx
        dot = xi.dx * eta.dx + xi.dy * eta.dy
        return cross.sign() == 0 and dot.sign() > 0

    def tits_distance(self, xi, eta):
        n1 = math.sqrt(float(xi.dx * xi.dx + xi.dy * xi.dy))
        n2 = math.sqrt(float(eta.dx * eta.dx + eta.dy * eta.dy))
        c = (float(xi.dx * eta.dx + xi.dy * eta.dy)) / (n1 * n2)
        return math.acos(max(-1.0, min(1.0, c)))

    # -- local geometry -----------------------------------------------------------
    def project(self, x, c: ELine):
        wx, wy = x.x - c.p0.x, x.y - c.p0.y
        dot = wx * c.dx + wy * c.dy
        if c.norm is not None and not (isinstance(wx, float) or isinstance(wy, float)):
            t = dot / c.norm
        else:
            t = float(dot) / math.sqrt(float(c.norm2))
        if c.domain.lo is not None and t < c.domain.lo:
            t = c.domain.lo
        if c.domain.hi is not None and t > c.domain.hi:
            t = c.domain.hi
        return t, c.eval(t)

    def angle(self, u: DirectionAtPoint, v: DirectionAtPoint) -> float:
        du = u.ray
        dv = v.ray
        dot = float(du.dx * dv.dx + du.dy * dv.dy)
        nn = math.sqrt(float(du.norm2)) * math.sqrt(float(dv.norm2))
        return math.acos(max(-1.0, min(1.0, dot / nn)))

    def has_unique_inverse_direction(self, u: DirectionAtPoint) -> bool:
        return True

    def lerp(self, p, q, w):
        w = _q(w)
        return EPoint(p.x + w * (q.x - p.x), p.y + w * (q.y - p.y))

    def flat_chart(self, c: ELine) -> "PlaneChart":
        if c.norm is None:
            raise UnsupportedOperation(
                "flat chart needs an axis direction of exact unit norm")
        return PlaneChart(self, c.eval(qnum(0)),
                          c.dx / c.norm, c.dy / c.norm)

    # -- proposal helpers -------------------------------------------------------
    def perturb(self, z, eta, count, rng):
        eta = Fraction(eta).limit_denominator(10**6)
        out = []
        n_rand = count // 3
        for c, s in rational_circle_dirs(count - n_rand, n_rand, rng):
            out.append(EPoint(z.x + qnum(eta * c), z.y + qnum(eta * s)))
            if len(out) >= count:
                break
        return out

    def sphere_sample(self, y, radius, count, rng):
        r = Fraction(radius).limit_denominator(10**6)
        return [EPoint(y.x + qnum(r * c), y.y + qnum(r * s))
                for c, s in rational_circle_dirs(count, 0, rng)][:count]

    def random_point(self, rng):
        return self.point(Fraction(int(rng.integers(-800, 801)), 100),
                          Fraction(int(rng.integers(-800, 801)), 100))

    def random_geodesic(self, rng):
        p = self.random_point(rng)
        c, s = rational_circle_dirs(2, 1, rng)[-1]
        return ELine(self, p, c, s)

    def bounds_flat_strip(self, c: ELine) -> bool:
        return True

    def unit_parallel_candidate(self, c: ELine) -> Optional[ELine]:
        n = c.norm
        if n is None:
            return None
        # left normal, unit length
        nx, ny = -c.dy / n, c.dx / n
        return ELine(self, EPoint(c.p0.x + nx, c.p0.y + ny), c.dx, c.dy, c.domain)
