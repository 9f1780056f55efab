"""Axial displacement on rank-one lines.

Two constructions live here.  Shadows: the set of directions behind a point
as seen from an observer, together with equal-radius continuation samples
and a continuity probe measuring how fast the continuation moves when the
observed point slides along a sphere.  Scissors: a four-line asymptotic
cycle around a hyperbolic line whose induced self-map translates the line
by a small controllable amount.  The translation length is computed three
ways (horofunction formula, composed transfer cycle, counting oracle) and
the agreement of the three is what the reconstruction procedure leans on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .exactnum import exact_sqrt
from .horo import chain_map, chain_transfer, make_chain
from .oracle import BoundaryAmbiguous
from .sequences import make_rsequence, rank_classify
from .spaces.base import NoGeodesic, SpaceError
from .spaces.hyperbolic import (HIdeal, HLine, HPoint, HyperbolicPlane,
                                lorentz_cross, mink)


class RankOneError(Exception):
    pass


def _require_distinct(space, y, x0):
    if space.dist_cmp(y, x0, 0) == 0:
        raise RankOneError("shadow is undefined for coincident observer and point")


# ---------------------------------------------------------------------------
# shadows

def shadow_member(space, y, x0, z) -> bool:
    """Is z behind x0 as seen from y, i.e. x0 on the segment or ray [y, z]?

    z may be a point or a boundary ideal.  Exact in the exact spaces;
    the hyperbolic test works to a 1e-9 band.
    """
    _require_distinct(space, y, x0)
    kind = space.kind
    if kind == "euclidean_plane":
        w1x, w1y = x0.x - y.x, x0.y - y.y
        if hasattr(z, "dx"):            # ideal direction
            if w1x * z.dy - w1y * z.dx != 0:
                return False
            return w1x * z.dx + w1y * z.dy >= 0
        w2x, w2y = z.x - y.x, z.y - y.y
        if w1x * w2y - w1y * w2x != 0:
            return False
        dot = w1x * w2x + w1y * w2y
        return 0 <= dot <= w2x * w2x + w2y * w2y
    if kind == "hyperbolic_plane":
        d_yx = space.distance(y, x0)
        if isinstance(z, HIdeal):
            ray = space.geodesic_to_ideal(y, z)
            return space.distance(ray.eval(d_yx), x0) <= 1e-9
        d_xz = space.distance(x0, z)
        d_yz = space.distance(y, z)
        return d_yx + d_xz <= d_yz + 1e-9
    if kind == "metric_tree":
        d_yx = space.distance(y, x0)
        if hasattr(z, "ray_id"):        # tree end
            ray = space.geodesic_to_ideal(y, z)
            return space.dist_cmp(ray.eval(d_yx), x0, 0) == 0
        if space.dist_cmp(y, z, 0) == 0:
            return False
        if d_yx > space.distance(y, z):
            return False
        path = space.geodesic_through(y, z)
        return space.dist_cmp(path.eval(d_yx), x0, 0) == 0
    if kind == "tree_cross_line":
        return _product_shadow_member(space, y, x0, z)
    raise RankOneError(f"no shadow rule for {kind}")


def _product_shadow_member(space, y, x0, z) -> bool:
    tree = space.tree
    dt_yx = tree.distance(y.tp, x0.tp)
    dx_yx = x0.x - y.x
    if hasattr(z, "tree_end"):          # ideal profile
        # (dt_yx, dx_yx) must be a nonnegative multiple of the rates, and the
        # tree component must actually head toward the named end.
        if dt_yx * z.a_x != dx_yx * z.a_t:
            return False
        if z.a_t == 0:
            return dt_yx == 0 and dx_yx * z.a_x >= 0
        if z.tree_end is None:
            return False
        ray = tree.geodesic_to_ideal(y.tp, z.tree_end)
        return tree.dist_cmp(ray.eval(dt_yx), x0.tp, 0) == 0
    dt_yz = tree.distance(y.tp, z.tp)
    dx_yz = z.x - y.x
    if dt_yz == 0 and dx_yz == 0:
        return False
    # one shared affine fraction s for both components
    if dt_yz == 0:
        if dt_yx != 0:
            return False
        s = Fraction(dx_yx) / Fraction(dx_yz)
    else:
        if dt_yx > dt_yz:
            return False
        s = Fraction(dt_yx) / Fraction(dt_yz)
        if dx_yx != s * dx_yz:
            return False
    if not (0 <= s <= 1):
        return False
    if dt_yz != 0:
        path = tree.geodesic_through(y.tp, z.tp)
        if tree.dist_cmp(path.eval(dt_yx), x0.tp, 0) != 0:
            return False
    return True


def spherical_shadow_sample(space, y, x0, rho, count: int = 8) -> list:
    """Points at distance rho behind x0: d(x0, z) = rho, d(y, z) = d(y, x0) + rho.

    Uniquely determined in the riemannian planes (single continuation);
    finite sets in the tree and the product, capped at count.
    """
    _require_distinct(space, y, x0)
    if not rho > 0:
        raise RankOneError("radius must be positive")
    kind = space.kind
    if kind == "euclidean_plane":
        dx, dy = x0.x - y.x, x0.y - y.y
        n2 = dx * dx + dy * dy
        s = None
        try:
            root = exact_sqrt(n2)
        except (TypeError, ValueError):
            root = None
        if root is not None and not isinstance(rho, float):
            s = rho / root          # exact rho / d(y, x0)
        if s is None:
            s = float(rho) / math.sqrt(float(n2))
        from .spaces.euclidean import EPoint
        return [EPoint(x0.x + (x0.x - y.x) * s, x0.y + (x0.y - y.y) * s)]
    if kind == "hyperbolic_plane":
        d = space.distance(y, x0)
        return [space.lerp(y, x0, (d + float(rho)) / d)]
    if kind == "metric_tree":
        d = space.distance(y, x0)
        out = [z for z in space.sphere(x0, rho)
               if space.dist_cmp(y, z, d + rho) == 0]
        return out[:count]
    if kind == "tree_cross_line":
        return _product_shadow_sample(space, y, x0, rho, count)
    raise RankOneError(f"no shadow rule for {kind}")


def _product_shadow_sample(space, y, x0, rho, count: int) -> list:
    tree = space.tree
    dt = tree.distance(y.tp, x0.tp)
    dx = x0.x - y.x
    d2 = dt * dt + dx * dx
    root = exact_sqrt(d2)
    if root is None:
        raise RankOneError("product continuation needs an exactly "
                           "representable base distance")
    r_t = rho * dt / root
    r_x = rho * dx / root
    from .spaces.product import PPoint
    if r_t == 0:
        return [PPoint(x0.tp, x0.x + r_x, space.space_id)]
    candidates = tree.sphere(x0.tp, r_t)
    out = []
    for tp in candidates:
        if tree.dist_cmp(y.tp, tp, dt + r_t) == 0:
            out.append(PPoint(tp, x0.x + r_x, space.space_id))
    return out[:count]


@dataclass(frozen=True)
class ShadowProbeRow:
    delta: float        # requested perturbation budget
    chord: float        # achieved input separation, <= delta
    eps: float          # resulting continuation separation


def shadow_continuity_probe(space, y, x0, rho, deltas) -> list[ShadowProbeRow]:
    """Slide x0 along the sphere around y by at most delta and measure how far
    the rho-continuation moves.  Rows come back in the order of deltas."""
    _require_distinct(space, y, x0)
    kind = space.kind
    rows = []
    z0 = spherical_shadow_sample(space, y, x0, rho)[0]
    if kind == "euclidean_plane":
        wdx, wdy = x0.x - y.x, x0.y - y.y
        radius = math.sqrt(float(wdx * wdx + wdy * wdy))
        for delta in deltas:
            # rational tan-half rotation about y, angle ~ delta / radius
            t = Fraction(float(delta) / (2.02 * radius)).limit_denominator(10 ** 9)
            den = 1 + t * t
            cos_f, sin_f = (1 - t * t) / den, 2 * t / den
            wx, wy = x0.x - y.x, x0.y - y.y
            from .spaces.euclidean import EPoint
            x1 = EPoint(y.x + cos_f * wx - sin_f * wy,
                        y.y + sin_f * wx + cos_f * wy)
            chord = float(space.distance(x0, x1))
            z1 = spherical_shadow_sample(space, y, x1, rho)[0]
            rows.append(ShadowProbeRow(float(delta), chord,
                                       float(space.distance(z0, z1))))
        return rows
    if kind == "hyperbolic_plane":
        radius = space.distance(y, x0)
        p = y.v
        w = (x0.v - math.cosh(radius) * p) / math.sinh(radius)
        e2 = lorentz_cross(p, w)
        e2 = e2 / math.sqrt(mink(e2, e2))
        for delta in deltas:
            phi = float(delta) / (1.02 * math.sinh(radius))
            wrot = math.cos(phi) * w + math.sin(phi) * e2
            x1 = HPoint(math.cosh(radius) * p + math.sinh(radius) * wrot)
            chord = space.distance(x0, x1)
            z1 = spherical_shadow_sample(space, y, x1, rho)[0]
            rows.append(ShadowProbeRow(float(delta), chord,
                                       space.distance(z0, z1)))
        return rows
    if kind in ("metric_tree", "tree_cross_line"):
        # discrete sphere: report the worst continuation move among the
        # admissible perturbations, 0.0 when the budget moves nothing
        base = space.tree if kind == "tree_cross_line" else space
        radius = space.distance(y, x0)
        for delta in deltas:
            worst_chord, worst_eps = 0.0, 0.0
            if kind == "metric_tree":
                peers = space.sphere(y, radius)
            else:
                peers = []
            for x1 in peers:
                ch = space.distance(x0, x1)
                if 0 < float(ch) <= float(delta):
                    z1s = spherical_shadow_sample(space, y, x1, rho)
                    for z1 in z1s:
                        worst_chord = max(worst_chord, float(ch))
                        worst_eps = max(worst_eps, float(space.distance(z0, z1)))
            rows.append(ShadowProbeRow(float(delta), worst_chord, worst_eps))
        return rows
    raise RankOneError(f"no shadow rule for {kind}")


def euclidean_shadow_growth(delta, radius, rho) -> float:
    """Closed form for the euclidean continuation move: the continuation map
    is the homothety of ratio (radius + rho)/radius centered at the observer,
    so chords scale by exactly that ratio."""
    return float(delta) * (float(radius) + float(rho)) / float(radius)


# ---------------------------------------------------------------------------
# scissors

@dataclass(frozen=True)
class Scissors:
    """Four-line asymptotic cycle around a base line of the hyperbolic plane.

    a runs theta_neg -> theta_pos.  The outer ends open by eps_pos past
    theta_pos (giving xi) and by eps_neg past theta_neg (giving eta), both
    on the same side of a.  b = (theta_neg, xi), c = (eta, theta_pos),
    d = (eta, xi), and x is the crossing of b and c.
    """
    space: HyperbolicPlane
    a: HLine
    b: HLine
    c: HLine
    d: HLine
    x: HPoint
    th_neg: HIdeal
    th_pos: HIdeal
    eta: HIdeal
    xi: HIdeal
    eps_pos: float
    eps_neg: float

    def chain(self):
        """Transfer cycle a -> c -> d -> b -> a with the shared ends pinned."""
        return make_chain(self.space, [self.a, self.c, self.d, self.b, self.a],
                          ideals=[self.th_pos, self.eta, self.xi, self.th_neg])

    def descriptor(self) -> dict:
        return {
            "theta_neg": self.th_neg.theta,
            "theta_pos": self.th_pos.theta,
            "eta": self.eta.theta,
            "xi": self.xi.theta,
            "eps_pos": self.eps_pos,
            "eps_neg": self.eps_neg,
            "center": [float(self.x.v[1]), float(self.x.v[2])],
        }


def _plane_residual(line: HLine, x: HPoint) -> float:
    # relative to the crossing's coordinate scale, else far crossings fail
    # on pure conditioning
    n = lorentz_cross(line.n_neg, line.n_pos)
    n = n / math.sqrt(mink(n, n))
    return abs(mink(x.v, n)) / float(x.v[0])


def make_scissors(space: HyperbolicPlane, a: HLine, eps_pos: float,
                  eps_neg: float, *, angle_min: float = 1e-6,
                  residual_tol: float = 1e-12) -> Scissors:
    if not (0 < eps_pos <= 0.7 and 0 < eps_neg <= 0.7):
        raise RankOneError("openings must lie in (0, 0.7]")
    th_neg, th_pos = a.ideal(-1), a.ideal(1)
    xi = space.ideal(th_pos.theta + eps_pos)
    eta = space.ideal(th_neg.theta - eps_neg)
    return _assemble(space, a, th_neg, th_pos, eta, xi,
                     eps_pos, eps_neg, angle_min, residual_tol)


def _assemble(space, a, th_neg, th_pos, eta, xi, eps_pos, eps_neg,
              angle_min, residual_tol) -> Scissors:
    for p, q in ((th_neg, xi), (eta, th_pos), (eta, xi)):
        if space.ideal_eq(p, q):
            raise RankOneError("degenerate scissors: coincident ends")
    b = space.geodesic_between_ideals(th_neg, xi)
    c = space.geodesic_between_ideals(eta, th_pos)
    d = space.geodesic_between_ideals(eta, xi)
    try:
        x = space.intersect_lines(b, c)
    except NoGeodesic as e:
        raise RankOneError("blades do not cross") from e
    # the crossing of nearly parallel planes carries cancellation noise
    # ~ 1e-16/eps; a genuinely misplaced point sits far above this floor
    res_tol = max(residual_tol, 1e-14 / min(eps_pos, eps_neg))
    for line in (b, c):
        if _plane_residual(line, x) > res_tol:
            raise RankOneError("crossing point off its blades")
    ang = space.angle(b.direction_at(b.param_of(x)),
                      c.direction_at(c.param_of(x)))
    ang = min(ang, math.pi - ang)
    if ang <= angle_min:
        raise RankOneError("blades cross too shallowly")
    return Scissors(space, a, b, c, d, x, th_neg, th_pos, eta, xi,
                    float(eps_pos), float(eps_neg))


def _boost_ideal(line: HLine, s: float, ideal: HIdeal) -> HIdeal:
    """Translate an ideal by s along line (hyperbolic boost fixing its ends)."""
    p = line.eval(0.0).v
    w = (line.n_pos * math.exp(line.pshift)
         - line.n_neg * math.exp(-line.pshift)) / line.norm
    ch, sh = math.cosh(s), math.sinh(s)
    v = ideal.v
    al = -mink(v, p)
    be = mink(v, w)
    out = v + ((ch - 1.0) * al + sh * be) * p + ((ch - 1.0) * be + sh * al) * w
    return HIdeal(out / out[0])


def _recentered(space, base, sc: Scissors, angle_min=1e-6,
                residual_tol=1e-12) -> Scissors:
    """Slide the whole configuration along its base line so the crossing sits
    over parameter 0.  Boosts are isometries fixing the base ends, so the
    displacement is untouched."""
    t_x, _ = space.project(sc.x, base)
    xi = _boost_ideal(base, -t_x, sc.xi)
    eta = _boost_ideal(base, -t_x, sc.eta)
    return _assemble(space, base, sc.th_neg, sc.th_pos, eta, xi,
                     sc.eps_pos, sc.eps_neg, angle_min, residual_tol)


def find_scissors(space: HyperbolicPlane, a: HLine, x0: HPoint,
                  offset_bound: float, *, eps0: float = 0.3,
                  shrink: float = 0.5, max_rounds: int = 60) -> Scissors:
    """Scissors around a whose crossing lies within offset_bound of x0 but
    off the line itself.  x0 must be on a."""
    if not offset_bound > 0:
        raise RankOneError("offset bound must be positive")
    t0 = a.param_of(x0)
    if space.distance(a.eval(t0), x0) > 1e-9:
        raise RankOneError("anchor point is not on the line")
    base = a.shift(t0)
    eps = eps0
    for _ in range(max_rounds):
        sc = _recentered(space, base, make_scissors(space, base, eps, eps))
        h = space.distance(sc.x, x0)
        if 0 < h <= offset_bound:
            return sc
        eps *= shrink
    raise RankOneError("could not close in on the anchor point")


def displacement_formula(sc: Scissors) -> float:
    """Sum of the four horofunctions of the cycle ends at the crossing,
    normalized on a at the shared pair and on d at the outer pair."""
    space = sc.space
    base_a = sc.a.eval(0.0)
    base_d = sc.d.eval(0.0)
    val = (space.busemann(sc.th_neg, base_a, sc.x)
           + space.busemann(sc.th_pos, base_a, sc.x)
           + space.busemann(sc.eta, base_d, sc.x)
           + space.busemann(sc.xi, base_d, sc.x))
    return val


def displacement_composed(sc: Scissors) -> float:
    """Translation length of the transfer cycle; the cycle must come back
    orientation-true."""
    tm = chain_map(sc.chain())
    if tm.scale != 1:
        raise RankOneError("transfer cycle reversed orientation")
    return tm.offset


def scissors_translate(sc: Scissors, m):
    """Image of a point of a under one turn of the cycle."""
    return chain_transfer(sc.chain(), m)


def displacement_oracle(session, sc: Scissors, x0, n: int) -> Fraction:
    """Certified lower estimate floor(d(x0, T^n x0))/n from the counting
    oracle; lands in (delta - 1/n, delta] for translation length delta."""
    if n < 1:
        raise RankOneError("need at least one turn")
    t0 = sc.a.param_of(x0)
    step = displacement_composed(sc)
    yn = sc.a.eval(t0 + n * step)
    fl = session.floor_distance(x0, yn)
    if fl is None:
        raise RankOneError("counting oracle gave up")
    return Fraction(fl, n)


@dataclass(frozen=True)
class DisplacementRecord:
    scissors: dict
    delta_formula: float
    delta_composed: float
    delta_oracle: Optional[float]
    n_used: Optional[int]

    def as_dict(self) -> dict:
        return {
            "scissors": self.scissors,
            "delta_formula": self.delta_formula,
            "delta_composed": self.delta_composed,
            "delta_oracle": self.delta_oracle,
            "n_used": self.n_used,
        }


def displacement_record(sc: Scissors, session=None, x0=None,
                        n: int = 0) -> DisplacementRecord:
    oracle = None
    if session is not None and n > 0:
        probe = x0 if x0 is not None else sc.a.eval(0.0)
        oracle = float(displacement_oracle(session, sc, probe, n))
    return DisplacementRecord(sc.descriptor(), displacement_formula(sc),
                              displacement_composed(sc), oracle,
                              n if oracle is not None else None)


def find_scissors_with_displacement(space: HyperbolicPlane, a: HLine,
                                    x0: HPoint, target, *,
                                    f_tol: float = 1e-10,
                                    sweep: int = 32) -> Scissors:
    """Scissors around a with displacement within f_tol of target, recentered
    at x0.  The reachable range is estimated by a coarse sweep first; targets
    above half its top are refused."""
    target = float(target)
    if not target > 0:
        raise RankOneError("target displacement must be positive")
    t0 = a.param_of(x0)
    base = a.shift(t0)

    def delta_of(eps: float) -> float:
        return displacement_formula(make_scissors(space, base, eps, eps))

    lo, hi = 1e-6, 0.6

    def sweep_prefix(lo_: float):
        # stop at the first infeasible eps: blades stop crossing only when
        # the aperture outgrows the line's asymptotic gap, and that is
        # monotone in eps
        grid_ = np.geomspace(lo_, hi, sweep)
        vals_ = []
        for e in grid_:
            try:
                vals_.append(delta_of(float(e)))
            except RankOneError:
                break
        return grid_, vals_

    grid, vals = sweep_prefix(lo)
    if not vals:
        raise RankOneError("no feasible scissors on the sweep range")
    cap = max(vals) / 2.0
    if target > cap:
        raise RankOneError(
            f"target {target:.3g} above reachable displacement {cap:.3g}")
    while vals[0] > target:
        lo /= 4.0
        if lo < 1e-12:
            raise RankOneError("target displacement too small to bracket")
        grid, vals = sweep_prefix(lo)
    k = max(i for i in range(len(vals)) if vals[i] <= target)
    if vals[k] == target:
        eps_star = float(grid[k])
    else:
        k2 = min(k + 1, len(vals) - 1)
        s = brentq(lambda u: delta_of(math.exp(u)) - target,
                   math.log(float(grid[k])), math.log(float(grid[k2])),
                   xtol=1e-15, rtol=8.9e-16, maxiter=256)
        eps_star = math.exp(s)
    sc = _recentered(space, base, make_scissors(space, base, eps_star, eps_star))
    got = displacement_formula(sc)
    if abs(got - target) > f_tol:
        raise RankOneError(f"root polish missed: |{got:.3e} - {target:.3e}|")
    return sc


# ---------------------------------------------------------------------------
# reconstruction along a rank-one line

@dataclass(frozen=True)
class RankOneReconstruction:
    value: float
    exact: Optional[Fraction]
    bracket: tuple          # (lo, hi], floats
    integer_part: int
    grid: int               # fractional resolution q, bracket width 1/q
    iterations: int
    queries: int
    record: DisplacementRecord


def reconstruct_rankone(session, a: HLine, t1, t2, tol: float = 1e-6,
                        oracle_turns: int = 0) -> RankOneReconstruction:
    """Distance between a(t1) and a(t2) from the unit oracle alone.

    The integer part comes from certified counting chains.  The fractional
    part is bisected on a 1/q grid, q = ceil(2/tol), where the grid itself
    is produced by a scissors cycle tuned to displacement 1/q: each probe
    asks one unit query against the grid point one step short of the
    candidate distance.
    """
    if not 0 < tol < 1:
        raise RankOneError("tolerance must lie in (0, 1)")
    space = session.space
    verdict = rank_classify(session, make_rsequence(a, t1), window=2, k_max=8)
    if verdict.label != "rank_one":
        raise RankOneError(f"line does not look rank one: {verdict.label}")
    q0 = session.n_queries
    if t2 < t1:
        t1, t2 = t2, t1
    x, y = a.eval(t1), a.eval(t2)
    if space.distance(x, y) <= 0:
        raise RankOneError("coincident endpoints")

    q = int(math.ceil(2.0 / tol))
    sc = find_scissors_with_displacement(space, a, x, Fraction(1, q))
    # oracle_turns counts whole units of certified travel for the record's
    # counting leg.  Raw turns would be vacuous against delta = 1/q, and a
    # whole multiple of q lands every chain link in the float band; the
    # extra half grid step keeps the travelled distance off the integers.
    n_rec = oracle_turns * q + (q + 1) // 2 if oracle_turns > 0 else 0
    record = displacement_record(sc, session if oracle_turns > 0 else None,
                                 x, n_rec)

    def probe_leq(w) -> bool:
        # band reads as closed; the slack this adds is the band width,
        # orders below any usable tolerance
        try:
            return session.unit_query(w, y)
        except BoundaryAmbiguous:
            return True

    d0 = session.floor_distance(x, y)
    if d0 is None:
        # the distance sits inside the float band of an integer, where the
        # chain certificates honestly refuse; fall back to locating the
        # least integer cover by plain unit probes
        j = 1
        while j <= 4096 and not probe_leq(a.eval(t1 + (j - 1))):
            j += 1
        if j > 4096:
            raise RankOneError("no integer cover within range")
        d0 = j - 1

    # grid point for step k sits at parameter t1 + (d0 - 1) + k/q; the
    # scissors certify the 1/q translation, the rational parameter keeps
    # the k-fold iterate from accumulating the 1e-10 tuning slack
    def below(k: int) -> bool:
        return probe_leq(a.eval(t1 + (d0 - 1) + Fraction(k, q)))

    iters = 0
    if below(0):
        # floor certificate says d >= d0, this probe says d <= d0
        value = float(d0)
        return RankOneReconstruction(value, Fraction(d0), (value, value),
                                     d0, q, 1, session.n_queries - q0, record)
    lo_k, hi_k = 0, q
    while hi_k - lo_k > 1:
        mid = (lo_k + hi_k) // 2
        iters += 1
        if below(mid):
            hi_k = mid
        else:
            lo_k = mid
    lo_val = d0 + Fraction(lo_k, q)
    hi_val = d0 + Fraction(hi_k, q)
    mid_val = (lo_val + hi_val) / 2
    return RankOneReconstruction(float(mid_val), None,
                                 (float(lo_val), float(hi_val)),
                                 d0, q, iters, session.n_queries - q0, record)


# ---------------------------------------------------------------------------
# plotting support

def scissors_polylines(sc: Scissors, span: float = 6.0,
                       samples: int = 65) -> list:
    """Chart traces of the four lines and the crossing, for CSV export.
    Coordinates are the (x1, x2) chart of the hyperboloid."""
    out = []
    for label, line in (("a", sc.a), ("b", sc.b), ("c", sc.c), ("d", sc.d)):
        t0 = line.param_of(sc.x) if label in ("b", "c") else 0.0
        pts = []
        for i in range(samples):
            t = t0 - span / 2 + span * i / (samples - 1)
            p = line.eval(t)
            pts.append((float(p.v[1]), float(p.v[2])))
        out.append((label, pts))
    out.append(("x", [(float(sc.x.v[1]), float(sc.x.v[2]))]))
    return out
