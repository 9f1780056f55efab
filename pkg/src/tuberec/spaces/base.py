"""Shared surface of the model spaces.

Every space exposes the same operation set over space-tagged points,
geodesics, and ideal boundary points: distance (exact by squared-distance
comparison in exact_rational mode), geodesics through points / to and
between ideal points, Busemann functions, nearest-point projection, angles,
and the sampled CAT(0) comparison check.  Spaces also provide the proposal
helpers the oracle's witness channel needs (chains, perturbation grids,
sphere samples); those may use full model knowledge, certification never
does.

Two numeric modes.  exact_rational (euclidean and both tree kinds) keeps
coordinates in Q or a single quadratic extension and decides every metric
comparison exactly.  float_with_tolerance (hyperbolic) carries float64
coordinates; decision procedures near a unit sphere are the oracle's
problem, flagged through its boundary band.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from ..exactnum import QNum, exact_sqrt, qnum

EXACT = "exact_rational"
FLOAT = "float_with_tolerance"


class SpaceError(Exception):
    """Base for model-space contract violations."""


class SpaceMismatch(SpaceError):
    """Operands tagged with different spaces or modes."""


class UnsupportedOperation(SpaceError):
    """Operation outside this space kind's supported scope."""


class NoGeodesic(SpaceError):
    """Requested ideal endpoints admit no connecting geodesic."""


class OffCarrier(SpaceError):
    """A point required to lie on a geodesic does not."""


def as_exact(t):
    """Parameter/coordinate coercion for exact mode (floats refused)."""
    if isinstance(t, QNum):
        return t
    return qnum(t)


def sqrt_any(x):
    """sqrt returning QNum when exact, float when not (or when x is float)."""
    if isinstance(x, QNum):
        r = exact_sqrt(x)
        return r if r is not None else math.sqrt(float(x))
    return math.sqrt(x)


@dataclass(frozen=True)
class Domain:
    """Parameter range of a geodesic; None bound = unbounded."""

    lo: object = None
    hi: object = None

    def contains(self, t, slack=0) -> bool:
        if self.lo is not None and t < self.lo - slack:
            return False
        if self.hi is not None and t > self.hi + slack:
            return False
        return True

    @property
    def complete(self) -> bool:
        return self.lo is None and self.hi is None


COMPLETE = Domain(None, None)


@dataclass(frozen=True)
class DirectionAtPoint:
    """Germ of a unit-speed ray: ray.eval(0) is the base point."""

    base: object
    ray: object  # Geodesic with domain [0, +inf) or larger


class Geodesic:
    """Unit-speed parametrized geodesic; subclasses hold space-specific data."""

    space: "ModelSpace"
    domain: Domain

    def eval(self, t):
        raise NotImplementedError

    def shift(self, delta) -> "Geodesic":
        """Reparametrized copy: c'(t) = c(t + delta)."""
        raise NotImplementedError

    def ideal(self, sign: int):
        """Ideal endpoint at +inf (sign=+1) or -inf (-1); None if bounded."""
        raise NotImplementedError

    def _check_domain(self, t):
        if not self.domain.contains(t):
            raise SpaceError(f"parameter {t} outside domain {self.domain}")

    def direction_at(self, t) -> DirectionAtPoint:
        return DirectionAtPoint(self.eval(t), self.shift(t))


class ModelSpace:
    kind: str
    numeric_mode: str
    space_id: str

    # -- metric ------------------------------------------------------------
    def distance(self, p, q):
        raise NotImplementedError

    def dist_sq(self, p, q):
        """Squared distance; exact (QNum) in exact mode."""
        raise NotImplementedError

    def dist_cmp(self, p, q, rhs) -> int:
        """sign(d(p,q) - rhs) for rational rhs >= 0; exact in exact mode."""
        if self.numeric_mode == EXACT:
            r = as_exact(rhs)
            return (self.dist_sq(p, q) - r * r).sign()
        d = self.distance(p, q) - float(rhs)
        return (d > 0) - (d < 0)

    def check_same_space(self, *points):
        for p in points:
            if getattr(p, "space_id", None) != self.space_id:
                raise SpaceMismatch(f"point {p!r} not tagged for {self.space_id}")

    # -- geodesics -----------------------------------------------------------
    def geodesic_through(self, p, q) -> Geodesic:
        raise NotImplementedError

    def geodesic_to_ideal(self, p, xi) -> Geodesic:
        raise NotImplementedError

    def geodesic_between_ideals(self, xi_neg, xi_pos, anchor=None) -> Geodesic:
        raise NotImplementedError

    # -- boundary ------------------------------------------------------------
    def busemann(self, xi, base, x):
        raise NotImplementedError

    def ideal_eq(self, xi, eta) -> bool:
        raise NotImplementedError

    def tits_distance(self, xi, eta):
        raise UnsupportedOperation(f"tits_distance unsupported for {self.kind}")

    # -- local geometry --------------------------------------------------------
    def project(self, x, c: Geodesic):
        """Nearest-point projection onto c; returns (t, foot)."""
        raise NotImplementedError

    def angle(self, u: DirectionAtPoint, v: DirectionAtPoint) -> float:
        raise NotImplementedError

    def has_unique_inverse_direction(self, u: DirectionAtPoint) -> bool:
        raise NotImplementedError

    # -- proposal helpers (model knowledge allowed) ----------------------------
    def lerp(self, p, q, w):
        """Point at fraction w along the extended geodesic through [p, q];
        exact where the space is."""
        d = self.distance(p, q)
        if self.dist_cmp(p, q, 0) == 0:
            return p
        c = self.geodesic_through(p, q)
        return c.eval(w * d)

    def midpoint(self, p, q):
        return self.lerp(p, q, Fraction(1, 2))

    def flat_chart(self, c: "Geodesic"):
        """Isometric chart (a, b) -> X of a flat plane with axis c at b = 0."""
        raise UnsupportedOperation(f"no flat charts in {self.kind}")

    def perturb(self, z, eta, count, rng) -> list:
        """~count points at distance <= eta from z, spread over directions."""
        raise NotImplementedError

    def sphere_sample(self, y, radius, count, rng) -> list:
        raise NotImplementedError

    def random_point(self, rng):
        raise NotImplementedError

    def random_geodesic(self, rng) -> Geodesic:
        raise NotImplementedError

    def bounds_flat_strip(self, c: Geodesic) -> bool:
        """Ground truth: does c bound a flat strip of positive width."""
        raise NotImplementedError

    def unit_parallel_candidate(self, c: Geodesic) -> Optional[Geodesic]:
        """A geodesic parallel to c at distance exactly 1, if one exists."""
        return None

    # -- sampled CAT(0) comparison ----------------------------------------------
    def comparison_check(self, a, b, c, rng, samples: int = 32) -> float:
        """Max over sampled side pairs of d_X - d_E2 against the comparison
        triangle; nonpositive (up to tolerance) iff CAT(0) holds on samples."""
        la = float(self.distance(b, c))
        lb = float(self.distance(a, c))
        lc = float(self.distance(a, b))
        if min(la, lb, lc) == 0.0:
            return 0.0
        # comparison triangle in the plane
        ax, ay = 0.0, 0.0
        bx, by = lc, 0.0
        cx = (lb * lb + lc * lc - la * la) / (2 * lc)
        cy = math.sqrt(max(lb * lb - cx * cx, 0.0))
        sides = [
            ((a, b), (ax, ay), (bx, by)),
            ((b, c), (bx, by), (cx, cy)),
            ((a, c), (ax, ay), (cx, cy)),
        ]
        worst = -math.inf
        for _ in range(samples):
            i, j = rng.integers(0, 3), rng.integers(0, 3)
            # rational side fractions keep exact-mode evaluation exact
            si = Fraction(int(rng.integers(0, 1025)), 1024)
            sj = Fraction(int(rng.integers(0, 1025)), 1024)
            (ends_i, pi0, pi1) = sides[i]
            (ends_j, pj0, pj1) = sides[j]
            xi = self.lerp(ends_i[0], ends_i[1], si)
            xj = self.lerp(ends_j[0], ends_j[1], sj)
            fi, fj = float(si), float(sj)
            ei = (pi0[0] + fi * (pi1[0] - pi0[0]), pi0[1] + fi * (pi1[1] - pi0[1]))
            ej = (pj0[0] + fj * (pj1[0] - pj0[0]), pj0[1] + fj * (pj1[1] - pj0[1]))
            de = math.hypot(ei[0] - ej[0], ei[1] - ej[1])
            worst = max(worst, float(self.distance(xi, xj)) - de)
        return worst


def rational_circle_dirs(n_fixed: int, n_random: int, rng) -> list[tuple[Fraction, Fraction]]:
    """Rational points on the unit circle via tan-half-angle; exact length 1."""
    ts = [Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4),
          Fraction(1), Fraction(3, 2), Fraction(2), Fraction(4)]
    dirs: list[tuple[Fraction, Fraction]] = []
    for t in ts[: max(n_fixed // 2, 1)]:
        c = (1 - t * t) / (1 + t * t)
        s = 2 * t / (1 + t * t)
        dirs.append((c, s))
        dirs.append((-c, -s))
    for _ in range(n_random):
        t = Fraction(int(rng.integers(-64, 65)), int(rng.integers(1, 33)))
        c = (1 - t * t) / (1 + t * t)
        s = 2 * t / (1 + t * t)
        if rng.random() < 0.5:
            c, s = -c, -s
        dirs.append((c, s))
    return dirs[: n_fixed + n_random]


def float_circle_dirs(n_fixed: int, n_random: int, rng) -> list[tuple[float, float]]:
    dirs = []
    for k in range(n_fixed):
        th = 2 * math.pi * k / n_fixed
        dirs.append((math.cos(th), math.sin(th)))
    for _ in range(n_random):
        th = float(rng.uniform(0, 2 * math.pi))
        dirs.append((math.cos(th), math.sin(th)))
    return dirs
