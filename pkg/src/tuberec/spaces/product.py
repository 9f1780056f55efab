"""Product of a metric tree with the real line, l2-combined.

Points are (tree point, line coordinate), both exact.  A geodesic has a
direction profile (a_t, a_x) with a_t >= 0 and a_t^2 + a_x^2 = 1: the tree
component runs along a tree geodesic at speed a_t, the line component at
signed rate a_x.  Unit-speed evaluation needs the profile in the coordinate
field, so geodesic_through only accepts point pairs whose distance has an
exact square root (Pythagorean pairs); everything the package constructs is
of that form, and interpolation for arbitrary pairs goes through lerp,
which never normalizes.

Every geodesic here bounds a flat strip, which is the point of including
this space: it is the higher-rank foil to the other three models.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from ..exactnum import QNum, exact_sqrt, qnum
from .base import (COMPLETE, EXACT, Domain, DirectionAtPoint, Geodesic,
                   ModelSpace, NoGeodesic, SpaceError, UnsupportedOperation,
                   rational_circle_dirs)
from .tree import MetricTree, TIdeal, TPath, TPoint, _off, _sgn


@dataclass(frozen=True)
class PPoint:
    tp: TPoint
    x: object
    space_id: str


@dataclass(frozen=True)
class PIdeal:
    """Direction profile at infinity: tree end (when a_t > 0) plus rates."""

    tree_end: Optional[TIdeal]
    a_t: object
    a_x: object


class PGeodesic(Geodesic):
    """c(t) = (ct(tau0 + a_t * t), x0 + a_x * t); ct may be None when a_t = 0."""

    def __init__(self, space, ct: Optional[TPath], tau0, a_t, x0, a_x,
                 fixed_tp: Optional[TPoint] = None,
                 domain: Domain = COMPLETE):
        self.space = space
        self.ct = ct
        self.tau0 = _off(tau0)
        self.a_t = _off(a_t)
        self.a_x = _off(a_x)
        self.x0 = _off(x0)
        self.fixed_tp = fixed_tp
        self.domain = domain
        if _sgn(self.a_t) < 0:
            raise SpaceError("tree rate must be nonnegative")
        if _sgn(self.a_t * self.a_t + self.a_x * self.a_x - 1) != 0:
            raise SpaceError("direction profile must be unit")

    def eval(self, t) -> PPoint:
        t = _off(t)
        self._check_domain(t)
        if self.ct is None:
            tp = self.fixed_tp
        else:
            tp = self.ct.eval(self.tau0 + self.a_t * t)
        return PPoint(tp, self.x0 + self.a_x * t, self.space.space_id)

    def shift(self, delta) -> "PGeodesic":
        d = _off(delta)
        lo = None if self.domain.lo is None else self.domain.lo - d
        hi = None if self.domain.hi is None else self.domain.hi - d
        return PGeodesic(self.space, self.ct, self.tau0 + self.a_t * d,
                         self.a_t, self.x0 + self.a_x * d, self.a_x,
                         self.fixed_tp, Domain(lo, hi))

    def ideal(self, sign: int) -> Optional[PIdeal]:
        if sign > 0 and self.domain.hi is not None:
            return None
        if sign < 0 and self.domain.lo is not None:
            return None
        if _sgn(self.a_t) == 0:
            return PIdeal(None, Fraction(0), self.a_x * sign)
        end = self.ct.ideal(sign)
        if end is None:
            return None
        return PIdeal(end, self.a_t, self.a_x * sign)

    def param_of(self, p: PPoint):
        if _sgn(self.a_x) != 0:
            return (p.x - self.x0) / self.a_x
        return (self.ct.param_of(p.tp) - self.tau0) / self.a_t


class ProductChart:
    """point(a, b) = (tline(tau0 + a_t a - a_x b), x0 + a_x a + a_t b)."""

    def __init__(self, space, tline: TPath, tau0, a_t, x0, a_x):
        self.space = space
        self.tline = tline
        self.tau0 = _off(tau0)
        self.a_t = _off(a_t)
        self.x0 = _off(x0)
        self.a_x = _off(a_x)

    def point(self, a, b) -> PPoint:
        a, b = _off(a), _off(b)
        tp = self.tline.eval(self.tau0 + self.a_t * a - self.a_x * b)
        return PPoint(tp, self.x0 + self.a_x * a + self.a_t * b,
                      self.space.space_id)

    def line(self, b) -> PGeodesic:
        """Complete horizontal a -> point(a, b); rides the full chart axis."""
        b = _off(b)
        return PGeodesic(self.space, self.tline, self.tau0 - self.a_x * b,
                         self.a_t, self.x0 + self.a_t * b, self.a_x)


class TreeCrossLine(ModelSpace):
    kind = "tree_cross_line"
    numeric_mode = EXACT

    def __init__(self, tree: MetricTree):
        self.tree = tree
        self.space_id = f"TxR:{tree.name}"

    def point(self, tp: TPoint, x) -> PPoint:
        return PPoint(tp, _off(x), self.space_id)

    # -- metric -------------------------------------------------------------
    def dist_sq(self, p, q):
        dt = self.tree.distance(p.tp, q.tp)
        dx = p.x - q.x
        return dt * dt + dx * dx

    def distance(self, p, q):
        s = self.dist_sq(p, q)
        r = exact_sqrt(s) if isinstance(s, (QNum, Fraction, int)) else None
        return r if r is not None else math.sqrt(float(s))

    # -- geodesics -----------------------------------------------------------
    def geodesic_through(self, p, q) -> PGeodesic:
        self.check_same_space(p, q)
        dt = self.tree.distance(p.tp, q.tp)
        dx = q.x - p.x
        d2 = dt * dt + dx * dx
        if _sgn(d2) == 0:
            raise NoGeodesic("coincident points")
        d = exact_sqrt(d2)
        if d is None:
            raise UnsupportedOperation(
                "unit-speed product geodesic needs a Pythagorean pair; "
                "use lerp for interpolation")
        if _sgn(dt) == 0:
            return PGeodesic(self, None, 0, 0, p.x, 1 if _sgn(dx) > 0 else -1,
                             fixed_tp=p.tp)
        ct = self.tree.geodesic_through(p.tp, q.tp)
        return PGeodesic(self, ct, 0, dt / d, p.x, dx / d)

    def lerp(self, p, q, w):
        w = _off(w)
        if _sgn(self.tree.distance(p.tp, q.tp)) == 0:
            tp = p.tp
        else:
            tp = self.tree.lerp(p.tp, q.tp, w)
        return PPoint(tp, p.x + w * (q.x - p.x), self.space_id)

    def midpoint(self, p, q):
        return self.lerp(p, q, Fraction(1, 2))

    def geodesic_to_ideal(self, p, xi: PIdeal) -> PGeodesic:
        dom = Domain(Fraction(0), None)
        if xi.tree_end is None or _sgn(_off(xi.a_t)) == 0:
            return PGeodesic(self, None, 0, 0, p.x,
                             1 if _sgn(_off(xi.a_x)) > 0 else -1,
                             fixed_tp=p.tp, domain=dom)
        ct = self.tree.geodesic_to_ideal(p.tp, xi.tree_end)
        return PGeodesic(self, ct, 0, xi.a_t, p.x, xi.a_x, domain=dom)

    def geodesic_between_ideals(self, xi_neg: PIdeal, xi_pos: PIdeal,
                                anchor=None) -> PGeodesic:
        at_n, ax_n = _off(xi_neg.a_t), _off(xi_neg.a_x)
        at_p, ax_p = _off(xi_pos.a_t), _off(xi_pos.a_x)
        if _sgn(at_n - at_p) != 0 or _sgn(ax_n + ax_p) != 0:
            raise NoGeodesic("profiles not opposite")
        if _sgn(at_p) == 0:
            if anchor is None:
                raise NoGeodesic("vertical line needs an anchor tree point")
            return PGeodesic(self, None, 0, 0, anchor.x, ax_p,
                             fixed_tp=anchor.tp)
        if self.tree.ideal_eq(xi_neg.tree_end, xi_pos.tree_end):
            raise NoGeodesic("equal tree ends")
        ct = self.tree.geodesic_between_ideals(xi_neg.tree_end,
                                               xi_pos.tree_end)
        line = PGeodesic(self, ct, 0, at_p, Fraction(0), ax_p)
        if anchor is not None:
            t, _ = self.project(anchor, line)
            line = line.shift(t)
        return line

    # -- boundary -------------------------------------------------------------
    def busemann(self, xi: PIdeal, base, x):
        out = 0
        a_t, a_x = _off(xi.a_t), _off(xi.a_x)
        if xi.tree_end is not None and _sgn(a_t) != 0:
            out = out + a_t * self.tree.busemann(xi.tree_end, base.tp, x.tp)
        out = out - a_x * (x.x - base.x)
        return out

    def ideal_eq(self, xi: PIdeal, eta: PIdeal) -> bool:
        if _sgn(_off(xi.a_t) - _off(eta.a_t)) != 0:
            return False
        if _sgn(_off(xi.a_x) - _off(eta.a_x)) != 0:
            return False
        if xi.tree_end is None or _sgn(_off(xi.a_t)) == 0:
            return eta.tree_end is None or _sgn(_off(eta.a_t)) == 0
        if eta.tree_end is None:
            return False
        return self.tree.ideal_eq(xi.tree_end, eta.tree_end)

    # -- local geometry -----------------------------------------------------------
    def project(self, x, c: PGeodesic):
        """Exact minimization of a piecewise quadratic in one variable."""
        if c.ct is None:
            t = (x.x - c.x0) / c.a_x
        else:
            sigma, _ = self.tree.project(x.tp, c.ct)
            h = self.tree.distance(x.tp, c.ct.eval(sigma))
            # d^2 = (h + |a_t t + tau0 - sigma|)^2 + (dx - a_x t)^2
            dx = x.x - c.x0
            kink = (sigma - c.tau0) / c.a_t if _sgn(c.a_t) != 0 else None
            cands = []
            if kink is not None:
                cands.append(kink)
            for br in (1, -1):
                # t on branch br: a_t t + tau0 - sigma has sign br
                num = c.a_t * (sigma - c.tau0 - br * h) + c.a_x * dx
                cand = num  # a_t^2 + a_x^2 = 1
                if kink is None or _sgn((cand - kink) * br) >= 0:
                    cands.append(cand)

            def f(t):
                u = c.a_t * t + c.tau0 - sigma
                if _sgn(u) < 0:
                    u = -u
                return (h + u) * (h + u) + (dx - c.a_x * t) ** 2

            t = min(cands, key=lambda cd: f(cd)) if len(cands) > 1 else cands[0]
            # exact argmin among candidates
            best = None
            for cd in cands:
                val = f(cd)
                if best is None or _sgn(val - best[0]) < 0:
                    best = (val, cd)
            t = best[1]
        if c.domain.lo is not None and _sgn(t - c.domain.lo) < 0:
            t = c.domain.lo
        if c.domain.hi is not None and _sgn(t - c.domain.hi) > 0:
            t = c.domain.hi
        return t, c.eval(t)

    def angle(self, u: DirectionAtPoint, v: DirectionAtPoint) -> float:
        cu, cv = u.ray, v.ray
        dot = float(cu.a_x) * float(cv.a_x)
        if _sgn(cu.a_t) != 0 and _sgn(cv.a_t) != 0:
            du = cu.ct.direction_at(cu.tau0)
            dv = cv.ct.direction_at(cv.tau0)
            tree_cos = 1.0 if self.tree.angle(du, dv) < 1e-9 else -1.0
            dot += float(cu.a_t) * float(cv.a_t) * tree_cos
        return math.acos(max(-1.0, min(1.0, dot)))

    def has_unique_inverse_direction(self, u: DirectionAtPoint) -> bool:
        c = u.ray
        if _sgn(c.a_t) == 0:
            return True
        tp = u.base.tp
        if tp.kind != "v":
            return True
        return self.tree._degree(tp.cid) == 2

    # -- proposal helpers ------------------------------------------------------------
    def perturb(self, z, eta, count, rng):
        eta = Fraction(eta).limit_denominator(10**6)
        out = []
        for cth, sth in rational_circle_dirs(count, 0, rng):
            if cth == 0:
                out.append(PPoint(z.tp, z.x + eta * sth, self.space_id))
                continue
            rad = eta * abs(cth)
            for tp in self.tree.sphere(z.tp, rad)[:2]:
                out.append(PPoint(tp, z.x + eta * sth, self.space_id))
            if len(out) >= count:
                break
        return out[:count] if len(out) >= 4 else out

    def sphere_sample(self, y, radius, count, rng):
        r = Fraction(radius).limit_denominator(10**6)
        out = []
        for cth, sth in rational_circle_dirs(count, 0, rng):
            if cth == 0:
                out.append(PPoint(y.tp, y.x + r * sth, self.space_id))
                continue
            for tp in self.tree.sphere(y.tp, r * abs(cth))[:2]:
                out.append(PPoint(tp, y.x + r * sth, self.space_id))
        if len(out) > count:
            idx = rng.permutation(len(out))[:count]
            out = [out[i] for i in idx]
        return out

    def random_point(self, rng):
        return PPoint(self.tree.random_point(rng),
                      Fraction(int(rng.integers(-48, 49)), 8), self.space_id)

    def random_geodesic(self, rng):
        # Pythagorean profile keeps unit-speed evaluation exact
        profiles = [(Fraction(3, 5), Fraction(4, 5)),
                    (Fraction(4, 5), Fraction(3, 5)),
                    (Fraction(5, 13), Fraction(12, 13)),
                    (Fraction(12, 13), Fraction(5, 13)),
                    (Fraction(1), Fraction(0)),
                    (Fraction(8, 17), Fraction(15, 17))]
        a_t, a_x = profiles[int(rng.integers(0, len(profiles)))]
        if rng.random() < 0.5:
            a_x = -a_x
        ct = self.tree.random_geodesic(rng)
        x0 = Fraction(int(rng.integers(-16, 17)), 4)
        return PGeodesic(self, ct, 0, a_t, x0, a_x)

    def bounds_flat_strip(self, c: PGeodesic) -> bool:
        return True

    def flat_chart(self, c: PGeodesic) -> "ProductChart":
        if c.ct is None:
            return ProductChart(self, self.tree.line_through(c.fixed_tp),
                                Fraction(0), c.a_t, c.x0, c.a_x)
        if not c.ct.domain.complete:
            raise UnsupportedOperation("chart axis needs a complete tree line")
        return ProductChart(self, c.ct, c.tau0, c.a_t, c.x0, c.a_x)

    def unit_parallel_candidate(self, c: PGeodesic) -> Optional[PGeodesic]:
        if c.ct is None:
            other = self.tree.sphere(c.fixed_tp, Fraction(1))[0]
            return PGeodesic(self, None, 0, 0, c.x0, c.a_x,
                             fixed_tp=other, domain=c.domain)
        if not c.ct.domain.complete:
            return None
        # shift by the unit normal (-a_x, a_t) inside the containing plane
        return PGeodesic(self, c.ct, c.tau0 - c.a_x, c.a_t,
                         c.x0 + c.a_t, c.a_x, None, c.domain)
