"""The unit-distance oracle and the derived-relation certificates.

The only primitive the reconstruction algorithms may consult is the
three-valued unit query: is d(x, y) <= 1?  In exact mode the answer is
always decisive; in float mode answers within `boundary_band` of the unit
sphere come back as "band" and decisions built on them degrade to
indeterminate (None) instead of silently guessing.

Everything else is derived and certified through chains of unit queries:

  closed n-tube    d <= n   equal-spacing chain, one query per step
  boundary n-tube  d  = n   chain plus, at every interior triple, a proof
                            that the middle point is the unique midpoint
  interior n-tube  d  < n   closed holds and boundary fails with a
                            certificate

The midpoint-uniqueness proof is the load-bearing piece.  For a pair (a, b)
with a chain witness m:  if d(a, b) = 2 the set {z : (a,z) in V, (z,b) in V}
is the single point m, so exhibiting two separated members of that set
certifies d(a, b) < 2.  Separation itself is query-certifiable with a third
point w: (w, z1) in V and (w, z2) not in V forces z1 != z2.  The witness
channel proposes (z1, z2, w) collinear on the extended [a, b] geodesic; the
session verifies all six queries.  A positive boundary verdict is therefore
unconditionally sound: d(a,b) = 2 certified at each triple forces unit
steps and alignment, and local geodesics are global here.  Negative
verdicts additionally trust the channel to place points on actual
geodesics, which the bundled model-backed channel does.

The one-step boundary relation (d = 1 exactly) reduces to the two-step one
by doubling: with w = lerp(x, y, 2), d(x, w) = 2 together with
(x, y), (y, w) in V forces d(x, y) = 1 by the triangle inequality.

Proposals (chains, midpoints, probe grids, witness packs) may use full
model knowledge; they cost no queries and their claims are never trusted,
only their verified queries.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .exactnum import QNum
from .spaces.base import EXACT, ModelSpace

LE, GT, BAND = "le", "gt", "band"


def _sgn(v) -> int:
    if isinstance(v, QNum):
        return v.sign()
    return (v > 0) - (v < 0)


class BoundaryAmbiguous(Exception):
    """A float-mode unit query landed inside the boundary band."""


@dataclass
class OracleConfig:
    boundary_band: Optional[float] = None   # default: 0 exact, 1e-9 float
    probe_eta: Fraction = Fraction(1, 1000)
    probe_fixed: int = 16
    probe_random: int = 8
    seed: int = 0
    log_queries: bool = True
    log_limit: int = 200_000


def _point_repr(p) -> str:
    if hasattr(p, "tp"):  # product
        return f"({_point_repr(p.tp)},{p.x})"
    if hasattr(p, "v"):   # hyperbolic
        return "H2(%.12g,%.12g,%.12g)" % tuple(p.v)
    if hasattr(p, "kind"):  # tree
        return f"T[{p.kind}:{p.cid}@{p.s}]"
    return f"E2({p.x},{p.y})"


class Witnesses:
    """Model-backed proposal channel.  Free to compute anything from the
    model; nothing it returns is trusted without query verification."""

    def __init__(self, space: ModelSpace, rng, config: OracleConfig):
        self.space = space
        self.rng = rng
        self.config = config
        self.log: list[tuple] = []
        self._probe_cache: dict = {}

    def _note(self, kind, *info):
        if len(self.log) < 10_000:
            self.log.append((kind,) + info)

    def chain(self, x, y, n: int) -> list:
        pts = [x] + [self.space.lerp(x, y, Fraction(i, n))
                     for i in range(1, n)] + [y]
        self._note("chain", n)
        return pts

    def midpoint(self, x, y):
        if self.space.dist_cmp(x, y, 0) == 0:
            return x
        return self.space.midpoint(x, y)

    def double(self, x, y):
        """w with y the midpoint of [x, w]."""
        self._note("double")
        return self.space.lerp(x, y, 2)

    def probes(self, z) -> list:
        self._note("probes")
        try:
            key = z                       # exact points hash by coordinates
            hit = self._probe_cache.get(key)
        except TypeError:
            key = tuple(map(float, z))    # ndarray-backed points
            hit = self._probe_cache.get(key)
        if hit is not None:
            return hit
        out = self.space.perturb(z, self.config.probe_eta,
                                 self.config.probe_fixed
                                 + self.config.probe_random, self.rng)
        if len(self._probe_cache) > 4096:
            self._probe_cache.clear()
        self._probe_cache[key] = out
        return out

    # -- the far-pair pack -------------------------------------------------------
    def _weight_box(self, x, y):
        """Exact bounds on lerp weights w with lerp in both unit balls:
        w*d <= 1 and (1-w)*d <= 1."""
        sp = self.space

        def ok(w: Fraction) -> bool:
            z = sp.lerp(x, y, w)
            return (sp.dist_cmp(x, z, 1) <= 0 and sp.dist_cmp(z, y, 1) <= 0)

        return ok

    def far_pair_pack(self, x, y):
        """Two separated points of {z: (x,z) in V, (z,y) in V} plus a
        separator, all collinear on the extended [x, y] geodesic; None when
        d(x, y) >= 2 (or too close to call)."""
        sp = self.space
        if sp.numeric_mode == EXACT:
            if _sgn(sp.dist_sq(x, y) - 4) >= 0:
                return None
        else:
            d = sp.distance(x, y)
            if d >= 2 - max(8 * (self.config.boundary_band or 0), 1e-12):
                return None
        df = math.sqrt(float(sp.dist_sq(x, y)))
        if df == 0.0:
            w_lo, w_hi = Fraction(0), Fraction(1)  # z_lo = x, z_hi = y? d=0
            # degenerate: x == y; lens is the unit ball, pick two points on
            # any geodesic through x at separation 1
            z_lo = x
            z_hi = sp.perturb(x, Fraction(1, 2), 4, self.rng)[0]
            w = sp.lerp(z_hi, z_lo, Fraction(5, 2))  # 3/4 past z_lo
            ok = (sp.dist_cmp(x, z_hi, 1) <= 0
                  and sp.dist_cmp(w, z_lo, 1) <= 0
                  and sp.dist_cmp(w, z_hi, 1) > 0)
            return (z_lo, z_hi, w) if ok else None
        lo = max(0.0, df - 1.0)
        hi = min(1.0, df)
        h0 = (hi - lo) / 8
        ok = self._weight_box(x, y)
        w_lo = self._fit_weight(ok, (lo + h0) / df, (lo + 4 * h0) / df)
        w_hi = self._fit_weight(ok, (hi - h0) / df, (hi - 4 * h0) / df)
        if w_lo is None or w_hi is None or w_lo == w_hi:
            return None
        if w_lo > w_hi:
            w_lo, w_hi = w_hi, w_lo
        z_lo = sp.lerp(x, y, w_lo)
        z_hi = sp.lerp(x, y, w_hi)
        w_sep = self._fit_separator(x, y, z_lo, z_hi, w_lo, w_hi, df)
        if w_sep is None:
            return None
        self._note("far_pair_pack")
        return (z_lo, z_hi, w_sep)

    def _fit_weight(self, ok, a: float, b: float) -> Optional[Fraction]:
        """A rational weight passing the exact both-balls predicate, searched
        from a toward b."""
        for k in range(12):
            t = a + (b - a) * (k / 12)
            w = Fraction(t).limit_denominator(10**9)
            if ok(w):
                return w
        return None

    def _fit_separator(self, x, y, z_lo, z_hi, w_lo, w_hi, df):
        """w on the extension with (w, z_lo) in V, (w, z_hi) not in V."""
        sp = self.space
        band = self.config.boundary_band or 0.0
        gap = float(w_hi - w_lo) * df         # = d(z_lo, z_hi)
        # aim d(w, z_lo) = 1 - slack with slack well under gap
        for slack in (gap / 4, gap / 2, 3 * gap / 4):
            r = min(1.0 - slack, 1.0 - 4 * band)
            if r <= 0:
                continue
            w_w = w_lo - Fraction(r / df).limit_denominator(10**9)
            w_pt = sp.lerp(x, y, w_w)
            if (sp.dist_cmp(w_pt, z_lo, 1) <= 0
                    and sp.dist_cmp(w_pt, z_hi, 1) > 0):
                if sp.numeric_mode != EXACT and band > 0:
                    d1 = sp.distance(w_pt, z_lo)
                    d2 = sp.distance(w_pt, z_hi)
                    if abs(d1 - 1) <= 2 * band or abs(d2 - 1) <= 2 * band:
                        continue
                return w_pt
        return None


@dataclass
class RelationStats:
    queries: int = 0
    band_hits: int = 0
    relations: int = 0
    indeterminate: int = 0


class OracleSession:
    """Query-counted access to the unit-distance relation of one space."""

    def __init__(self, space: ModelSpace, config: OracleConfig | None = None,
                 rng=None):
        self.space = space
        self.config = config or OracleConfig()
        if self.config.boundary_band is None:
            self.config.boundary_band = 0.0 if space.numeric_mode == EXACT \
                else 1e-9
        self.rng = rng if rng is not None else np.random.default_rng(
            self.config.seed)
        self.witnesses = Witnesses(space, self.rng, self.config)
        self.query_log: list[tuple] = []
        self.stats = RelationStats()

    # -- the primitive -------------------------------------------------------
    def query3(self, x, y) -> str:
        """Three-valued unit query; the only door to the metric."""
        self.stats.queries += 1
        sp = self.space
        if sp.numeric_mode == EXACT:
            verdict = LE if sp.dist_cmp(x, y, 1) <= 0 else GT
        else:
            d = sp.distance(x, y)
            band = self.config.boundary_band
            if not math.isfinite(d) or abs(d - 1.0) <= band:
                # NaN from coordinate overflow reads as boundary noise,
                # never as a definite verdict
                verdict = BAND
                self.stats.band_hits += 1
            else:
                verdict = LE if d < 1.0 else GT
        if self.config.log_queries and len(self.query_log) < self.config.log_limit:
            self.query_log.append((self.stats.queries, "V", _point_repr(x),
                                   _point_repr(y), verdict))
        return verdict

    def unit_query(self, x, y) -> bool:
        """Boolean unit query; raises in the float boundary band."""
        v = self.query3(x, y)
        if v == BAND:
            raise BoundaryAmbiguous(
                f"d(x, y) within {self.config.boundary_band} of 1")
        return v == LE

    # -- derived relations ---------------------------------------------------
    def relation_member(self, relation, x, y) -> Optional[bool]:
        """Membership of (x, y) in a derived relation ('closed' | 'boundary'
        | 'interior', n).  None = indeterminate (float-mode band)."""
        kind, n = relation
        if n < 1:
            raise ValueError("tube index must be >= 1")
        self.stats.relations += 1
        if kind == "closed":
            out = self._closed(x, y, n)
        elif kind == "boundary":
            out = self._boundary(x, y, n)
        elif kind == "interior":
            out = self._interior(x, y, n)
        else:
            raise ValueError(f"unknown relation kind {kind!r}")
        if out is None:
            self.stats.indeterminate += 1
        return out

    def _closed(self, x, y, n: int) -> Optional[bool]:
        chain = self.witnesses.chain(x, y, n)
        for a, b in zip(chain, chain[1:]):
            v = self.query3(a, b)
            if v == GT:
                return False
            if v == BAND:
                return None
        return True

    def _boundary2_with_mid(self, a, b, m) -> Optional[bool]:
        """Is d(a, b) = 2, given the candidate midpoint m?"""
        va = self.query3(a, m)
        vb = self.query3(m, b)
        if va == GT or vb == GT:
            return False
        if va == BAND or vb == BAND:
            return None
        # probe grid: a verified second member near m disproves the boundary,
        # once separation is certified below
        probe_hit = None
        for z in self.witnesses.probes(m):
            if self.query3(a, z) == LE and self.query3(z, b) == LE:
                probe_hit = z
                break
        pack = self.witnesses.far_pair_pack(a, b)
        if pack is not None:
            z_lo, z_hi, w = pack
            good = (self.query3(a, z_lo) == LE and self.query3(z_lo, b) == LE
                    and self.query3(a, z_hi) == LE
                    and self.query3(z_hi, b) == LE
                    and self.query3(w, z_lo) == LE
                    and self.query3(w, z_hi) == GT)
            if good:
                return False
        if probe_hit is not None:
            # a probe found a second member but no pack certified separation
            return None
        return True

    def _boundary(self, x, y, n: int) -> Optional[bool]:
        if n == 1:
            v = self.query3(x, y)
            if v == GT:
                return False
            if v == BAND:
                return None
            w = self.witnesses.double(x, y)
            vw = self.query3(y, w)
            if vw == GT:
                return None   # channel misbehaved; cannot decide
            if vw == BAND:
                return None
            return self._boundary2_with_mid(x, w, y)
        chain = self.witnesses.chain(x, y, n)
        for a, b in zip(chain, chain[1:]):
            v = self.query3(a, b)
            if v == GT:
                return False
            if v == BAND:
                return None
        for i in range(1, n):
            r = self._boundary2_with_mid(chain[i - 1], chain[i + 1], chain[i])
            if r is not True:
                return r
        return True

    def _interior(self, x, y, n: int) -> Optional[bool]:
        c = self._closed(x, y, n)
        if c is not True:
            return c
        b = self._boundary(x, y, n)
        if b is None:
            return None
        return not b

    # -- named derived predicates ----------------------------------------------
    def integer_sphere_member(self, x, y, n: int) -> Optional[bool]:
        """Is d(x, y) exactly the integer n (the boundary of the n-tube)."""
        return self.relation_member(("boundary", n), x, y)

    def midpoint_from_tube(self, x, y):
        """A certified common-unit-ball point for (x, y) in the closed
        2-tube; second slot reports uniqueness (= d(x,y) is exactly 2)."""
        m = self.witnesses.midpoint(x, y)
        if self.query3(x, m) != LE or self.query3(m, y) != LE:
            return None, None
        return m, self._boundary2_with_mid(x, y, m)

    def ceil_distance(self, x, y, n_max: int = 4096) -> Optional[int]:
        """Least n >= 1 with (x, y) in the closed n-tube (= max(1, ceil d))."""
        n = 1
        while n <= n_max:
            c = self._closed(x, y, n)
            if c is None:
                return None
            if c:
                break
            n *= 2
        else:
            return None
        lo, hi = n // 2, n     # closed fails at lo (if lo >= 1), holds at hi
        while hi - lo > 1:
            mid = (lo + hi) // 2
            c = self._closed(x, y, mid)
            if c is None:
                return None
            if c:
                hi = mid
            else:
                lo = mid
        return hi

    def floor_distance(self, x, y, n_max: int = 4096) -> Optional[int]:
        """floor d(x, y) through ceil and one boundary test."""
        n = self.ceil_distance(x, y, n_max)
        if n is None:
            return None
        b = self._boundary(x, y, n)
        if b is None:
            return None
        return n if b else n - 1

    # -- horoballs ------------------------------------------------------------------
    def horoball_member(self, ray_points: list, y,
                        sphere_count: int = 64) -> Optional[str]:
        """Position of y relative to the horoball carried by the nested balls
        B(ray_points[n], n): 'inside' | 'on' | 'outside' | None.

        ray_points[n] must lie at parameter n of a unit-speed ray, so the
        balls are nested and one check at the deepest center suffices.  'on'
        is decided at resolution mu ~ 5 / sqrt(N): every sample on the
        sphere S(y, 1 - mu) sits in the closed (N+1)-tube around the
        deepest center.  The margin must shrink slower than 1/N or the
        flat transverse tail rho^2 / 2N of d(y, x_N) - N never fits under
        it and horosphere points far from the ray read as outside
        forever."""
        N = len(ray_points) - 1
        if N < 1:
            raise ValueError("need at least two ray points")
        xN = ray_points[N]
        inside = self._interior(xN, y, N)
        if inside is True:
            return "inside"
        if inside is None:
            return None
        mu = min(0.5, 5.0 / math.sqrt(N))
        samples = self.space.sphere_sample(
            y, Fraction(1) - Fraction(mu).limit_denominator(64),
            sphere_count, self.rng)
        any_out = False
        any_band = False
        for z in samples:
            c = self._closed(xN, z, N + 1)
            if c is False:
                any_out = True
                break
            if c is None:
                any_band = True
        if any_out:
            return "outside"
        if any_band:
            return None
        return "on"

    # -- bookkeeping ------------------------------------------------------------
    @property
    def n_queries(self) -> int:
        return self.stats.queries

    def export_csv(self, path: str):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["qid", "op", "x", "y", "result"])
            w.writerows(self.query_log)

    def summary(self) -> dict:
        return {
            "queries": self.stats.queries,
            "band_hits": self.stats.band_hits,
            "relations": self.stats.relations,
            "indeterminate": self.stats.indeterminate,
        }
