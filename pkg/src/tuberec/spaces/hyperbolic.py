"""Hyperbolic plane on the hyperboloid x0^2 = 1 + x1^2 + x2^2, x0 > 0.

Float mode throughout.  Conventions that the rest of the package leans on:

  <p,q>        = -p0 q0 + p1 q1 + p2 q2          (signature -++)
  d(p,q)       = 2 asinh(sqrt(<p-q, p-q>)/2)      stable near p = q
  ideal(theta) = (1, cos theta, sin theta)        null ray representative
  line(n-, n+) c(s) = (e^s n+ + e^-s n-)/sqrt(-2<n+,n->)
  busemann     b(x) = log(<x,n> / <base,n>)       decreases toward n at unit rate

Intersection of two lines is the double Lorentz cross product of their null
endpoint pairs, normalized back to the sheet.  These formulas were pinned
against finite-difference and composition identities before anything else
was built on them; change signs here and the scissors displacement law
silently flips.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .base import (COMPLETE, FLOAT, Domain, DirectionAtPoint, Geodesic,
                   ModelSpace, NoGeodesic, SpaceError, float_circle_dirs)


def mink(u, v) -> float:
    return float(-u[0] * v[0] + u[1] * v[1] + u[2] * v[2])


def ideal_vec(theta: float) -> np.ndarray:
    return np.array([1.0, math.cos(theta), math.sin(theta)])


def lorentz_cross(u, v) -> np.ndarray:
    """w with <w,u> = <w,v> = 0; Euclidean cross with the 0-component flipped."""
    c = np.cross(u, v)
    return np.array([-c[0], c[1], c[2]])


def normalize_point(v) -> np.ndarray:
    q = mink(v, v)
    if q >= 0:
        raise SpaceError("vector not timelike")
    w = v / math.sqrt(-q)
    return w if w[0] > 0 else -w


@dataclass(frozen=True)
class HPoint:
    v: np.ndarray
    space_id: str = "H2"

    def __iter__(self):
        return iter(self.v)


@dataclass(frozen=True)
class HIdeal:
    """Null direction, scale-free: stored with v0 = 1."""

    v: np.ndarray

    @staticmethod
    def of(theta: float) -> "HIdeal":
        return HIdeal(ideal_vec(theta))

    @property
    def theta(self) -> float:
        return math.atan2(self.v[2], self.v[1])


class HLine(Geodesic):
    """c(s) = (e^(t+shift) n+ + e^-(t+shift) n-)/norm, unit speed."""

    def __init__(self, space, n_neg: np.ndarray, n_pos: np.ndarray,
                 shift: float = 0.0, domain: Domain = COMPLETE):
        self.space = space
        g = mink(n_neg, n_pos)
        if g >= 0:
            raise NoGeodesic("endpoints do not span a geodesic")
        self.n_neg = n_neg
        self.n_pos = n_pos
        self.norm = math.sqrt(-2.0 * g)
        self.pshift = shift
        self.domain = domain

    def eval(self, t) -> HPoint:
        self._check_domain(t)
        s = float(t) + self.pshift
        return HPoint((math.exp(s) * self.n_pos + math.exp(-s) * self.n_neg)
                      / self.norm)

    def shift(self, delta) -> "HLine":
        lo = None if self.domain.lo is None else self.domain.lo - delta
        hi = None if self.domain.hi is None else self.domain.hi - delta
        return HLine(self.space, self.n_neg, self.n_pos,
                     self.pshift + float(delta), Domain(lo, hi))

    def ideal(self, sign: int) -> Optional[HIdeal]:
        if sign > 0:
            if self.domain.hi is not None:
                return None
            return HIdeal(self.n_pos / self.n_pos[0])
        if self.domain.lo is not None:
            return None
        return HIdeal(self.n_neg / self.n_neg[0])

    def param_of(self, x: HPoint) -> float:
        """Parameter of a point on the line (its projection otherwise)."""
        a = mink(x.v, self.n_neg)   # ~ e^s g / norm with g = <n+,n-> < 0
        b = mink(x.v, self.n_pos)   # ~ e^-s g / norm
        if a >= 0 or b >= 0:
            raise SpaceError("point not in the line's span")
        return 0.5 * math.log(a / b) - self.pshift


class HyperbolicPlane(ModelSpace):
    kind = "hyperbolic_plane"
    numeric_mode = FLOAT
    space_id = "H2"

    def point(self, x1: float, x2: float) -> HPoint:
        """Point from the chart (x1, x2) -> (sqrt(1+x1^2+x2^2), x1, x2)."""
        return HPoint(np.array([math.sqrt(1 + x1 * x1 + x2 * x2),
                                float(x1), float(x2)]))

    def ideal(self, theta: float) -> HIdeal:
        return HIdeal.of(theta)

    # -- metric ---------------------------------------------------------------
    def dist_sq(self, p, q):
        d = self.distance(p, q)
        return d * d

    def distance(self, p, q) -> float:
        w = p.v - q.v
        s = mink(w, w)
        return 2.0 * math.asinh(0.5 * math.sqrt(max(s, 0.0)))

    def lerp(self, p, q, w):
        """sinh-weighted interpolation, valid for any real weight.

        Deliberately bypasses the HLine representation: the null-vector
        form amplifies its sheet defect by e^(2s), which wrecks chain
        points hung off deep ray points, while the coefficients here stay
        tame and the result renormalizes cleanly."""
        self.check_same_space(p, q)
        d = self.distance(p, q)
        if d == 0.0:
            return p
        t = float(w)
        sd = math.sinh(d)
        v = (math.sinh((1.0 - t) * d) / sd) * p.v + (math.sinh(t * d) / sd) * q.v
        return HPoint(normalize_point(v))

    # -- geodesics ---------------------------------------------------------------
    def geodesic_through(self, p, q) -> HLine:
        if self.distance(p, q) < 1e-14:
            raise NoGeodesic("coincident points")
        w = lorentz_cross(p.v, q.v)       # spacelike normal of the plane
        # null directions in the plane: p cosh(t) + u sinh(t) degenerate ends
        u = lorentz_cross(w, p.v)
        u = u / math.sqrt(mink(u, u))
        if mink(u, q.v) < mink(-u, q.v):
            # pick u pointing from p toward q: <u, q> = sinh d > 0 required
            u = -u
        n_pos = p.v + u
        n_neg = p.v - u
        line = HLine(self, n_neg, n_pos)
        # param 0 at p
        return line.shift(line.param_of(p))

    def geodesic_to_ideal(self, p, xi: HIdeal) -> HLine:
        n = xi.v
        denom = mink(p.v, n)              # negative
        w = -n / denom - p.v              # unit tangent at p toward xi
        n_pos = p.v + w
        n_neg = p.v - w
        line = HLine(self, n_neg, n_pos, domain=COMPLETE)
        line = line.shift(line.param_of(p))
        return HLine(self, line.n_neg, line.n_pos, line.pshift,
                     Domain(0.0, None))

    def geodesic_between_ideals(self, xi_neg: HIdeal, xi_pos: HIdeal,
                                anchor=None) -> HLine:
        if self.ideal_eq(xi_neg, xi_pos):
            raise NoGeodesic("equal ideal endpoints")
        line = HLine(self, xi_neg.v, xi_pos.v)
        if anchor is not None:
            t, _ = self.project(anchor, line)
            line = line.shift(t)
        return line

    # -- boundary --------------------------------------------------------------
    def busemann(self, xi: HIdeal, base, x) -> float:
        return math.log(mink(x.v, xi.v) / mink(base.v, xi.v))

    def ideal_eq(self, xi: HIdeal, eta: HIdeal) -> bool:
        return (abs(xi.v[1] / xi.v[0] - eta.v[1] / eta.v[0]) < 1e-12
                and abs(xi.v[2] / xi.v[0] - eta.v[2] / eta.v[0]) < 1e-12)

    def tits_distance(self, xi, eta):
        return math.pi if not self.ideal_eq(xi, eta) else 0.0

    # -- local geometry ------------------------------------------------------------
    def project(self, x, c: HLine):
        """Nearest point on c: t* = artanh(<x,w>/ -<x,p>) from any carrier
        point p with unit tangent w."""
        p = c.eval(0.0).v
        w = (c.n_pos * math.exp(c.pshift) - c.n_neg * math.exp(-c.pshift)) / c.norm
        num = mink(x.v, w)
        den = -mink(x.v, p)
        r = num / den
        r = max(min(r, 1 - 1e-15), -1 + 1e-15)
        t = math.atanh(r)
        if c.domain.lo is not None and t < c.domain.lo:
            t = float(c.domain.lo)
        if c.domain.hi is not None and t > c.domain.hi:
            t = float(c.domain.hi)
        return t, c.eval(t)

    def angle(self, u: DirectionAtPoint, v: DirectionAtPoint) -> float:
        p = u.base.v

        def tangent(ray: HLine) -> np.ndarray:
            s = ray.pshift
            return (ray.n_pos * math.exp(s) - ray.n_neg * math.exp(-s)) / ray.norm

        tu, tv = tangent(u.ray), tangent(v.ray)
        c = mink(tu, tv)
        return math.acos(max(-1.0, min(1.0, c)))

    def has_unique_inverse_direction(self, u: DirectionAtPoint) -> bool:
        return True

    # -- intersections (used by the scissors builder) ------------------------------
    def intersect_lines(self, l1: HLine, l2: HLine) -> HPoint:
        w1 = lorentz_cross(l1.n_neg, l1.n_pos)
        w2 = lorentz_cross(l2.n_neg, l2.n_pos)
        x = lorentz_cross(w1, w2)
        if mink(x, x) >= 0:
            raise NoGeodesic("lines do not meet")
        return HPoint(normalize_point(x))

    # -- proposal helpers ----------------------------------------------------------
    def _exp(self, p: np.ndarray, w: np.ndarray, r: float) -> np.ndarray:
        return math.cosh(r) * p + math.sinh(r) * w

    def _frame(self, p: np.ndarray):
        """Orthonormal tangent pair at p."""
        e1 = np.array([p[1], p[0], 0.0])
        n = mink(e1, e1)
        e1 = e1 / math.sqrt(n) if n > 1e-18 else np.array([0.0, 1.0, 0.0])
        e2 = lorentz_cross(p, e1)
        e2 = e2 / math.sqrt(mink(e2, e2))
        return e1, e2

    def perturb(self, z, eta, count, rng):
        e1, e2 = self._frame(z.v)
        out = []
        for cth, sth in float_circle_dirs(max(count - count // 3, 1),
                                          count // 3, rng):
            w = cth * e1 + sth * e2
            out.append(HPoint(self._exp(z.v, w, float(eta))))
            if len(out) >= count:
                break
        return out

    def sphere_sample(self, y, radius, count, rng):
        e1, e2 = self._frame(y.v)
        return [HPoint(self._exp(y.v, c * e1 + s * e2, float(radius)))
                for c, s in float_circle_dirs(count, 0, rng)][:count]

    def random_point(self, rng):
        return self.point(float(rng.uniform(-3, 3)), float(rng.uniform(-3, 3)))

    def random_geodesic(self, rng):
        t1 = float(rng.uniform(0, 2 * math.pi))
        t2 = t1 + float(rng.uniform(0.3, 2 * math.pi - 0.3))
        return self.geodesic_between_ideals(HIdeal.of(t1), HIdeal.of(t2))

    def bounds_flat_strip(self, c: HLine) -> bool:
        return False
