"""Metric trees: finite combinatorial core, rational edge lengths, boundary
rays.  Everything is exact; this space refuses float coordinates outright.

A tree is given in a small plain-text format, one declaration per line:

    # comment (blank lines ignored)
    vertex NAME
    edge ID U V LENGTH     # LENGTH a positive rational like 3 or 5/2
    ray ID VERTEX          # isometric copy of [0, inf) glued at VERTEX

Validity: connected, acyclic, every vertex has total degree >= 2 counting
rays, and there are at least two rays (so at least two ends and every
geodesic extends to a complete one).

Points are tagged by carrier: a vertex, an edge at offset s from its first
endpoint (0 < s < length), or a ray at offset s > 0 from its base vertex.
Offsets may be Fractions or QNums, so cross-strip coordinates living in a
quadratic extension pass through unchanged.  Distances are path sums, never
square roots, hence always stay in the carrier field.

Projection onto a geodesic uses the fact that t -> d(x, c(t)) is a unit
slope V in a tree: two evaluations at the clamped extremes recover the
minimizing parameter exactly, including the clamped cases.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from ..exactnum import QNum
from .base import (COMPLETE, EXACT, Domain, DirectionAtPoint, Geodesic,
                   ModelSpace, NoGeodesic, SpaceError)


def _off(v):
    if isinstance(v, (QNum, Fraction)):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    raise SpaceError(f"tree offsets must be exact rationals, got {type(v).__name__}")


def _sgn(x) -> int:
    if isinstance(x, QNum):
        return x.sign()
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class TPoint:
    kind: str   # "v" | "e" | "r"
    cid: str
    s: object
    space_id: str


@dataclass(frozen=True)
class TIdeal:
    """An end of the tree: one ray, one ideal point."""

    ray_id: str


# geodesic segment: (t0, t1, kind, cid, s0, s1), |s1 - s0| = t1 - t0
class TPath(Geodesic):
    def __init__(self, space, segments, head=None, tail=None,
                 domain: Domain = None):
        self.space = space
        self.segments = segments
        self.head = head    # (t_lo, ray_id, s_at_lo): s grows as t decreases
        self.tail = tail    # (t_hi, ray_id, s_at_hi): s grows as t increases
        if domain is None:
            lo = None if head is not None else segments[0][0]
            hi = None if tail is not None else segments[-1][1]
            domain = Domain(lo, hi)
        self.domain = domain

    def eval(self, t) -> TPoint:
        t = _off(t)
        self._check_domain(t)
        if self.head is not None and t <= self.head[0]:
            t0, rid, s0 = self.head
            return self.space.ray_point(rid, s0 + (t0 - t))
        if self.tail is not None and t >= self.tail[0]:
            t0, rid, s0 = self.tail
            return self.space.ray_point(rid, s0 + (t - t0))
        for (t0, t1, kind, cid, s0, s1) in self.segments:
            if t0 <= t <= t1:
                sgn = 1 if _sgn(s1 - s0) > 0 else -1
                s = s0 + (t - t0) * sgn
                if kind == "e":
                    return self.space.edge_point(cid, s)
                return self.space.ray_point(cid, s)
        raise SpaceError(f"parameter {t} not covered by path segments")

    def shift(self, delta) -> "TPath":
        d = _off(delta)
        segs = [(t0 - d, t1 - d, k, c, s0, s1)
                for (t0, t1, k, c, s0, s1) in self.segments]
        head = None if self.head is None else (self.head[0] - d,) + self.head[1:]
        tail = None if self.tail is None else (self.tail[0] - d,) + self.tail[1:]
        lo = None if self.domain.lo is None else self.domain.lo - d
        hi = None if self.domain.hi is None else self.domain.hi - d
        return TPath(self.space, segs, head, tail, Domain(lo, hi))

    def ideal(self, sign: int) -> Optional[TIdeal]:
        if sign > 0:
            return TIdeal(self.tail[1]) if self.tail is not None else None
        return TIdeal(self.head[1]) if self.head is not None else None

    def param_of(self, x: TPoint):
        t, foot = self.space.project(x, self)
        if self.space.dist_cmp(x, foot, 0) != 0:
            raise SpaceError("point not on path")
        return t


class MetricTree(ModelSpace):
    kind = "metric_tree"
    numeric_mode = EXACT

    def __init__(self, name: str = "tree"):
        self.name = name
        self.space_id = f"T:{name}"
        self.vertices: list[str] = []
        self.edges: dict[str, tuple[str, str, Fraction]] = {}
        self.rays: dict[str, str] = {}
        self.adj: dict[str, list[tuple[str, str, Fraction]]] = {}

    # -- construction ---------------------------------------------------------
    def add_vertex(self, name: str):
        if name in self.adj:
            raise SpaceError(f"duplicate vertex {name!r}")
        self.vertices.append(name)
        self.adj[name] = []

    def add_edge(self, eid: str, u: str, v: str, length):
        length = Fraction(length)
        if eid in self.edges:
            raise SpaceError(f"duplicate edge id {eid!r}")
        if u not in self.adj or v not in self.adj or u == v:
            raise SpaceError(f"edge {eid!r} endpoints invalid")
        if length <= 0:
            raise SpaceError(f"edge {eid!r} needs positive length")
        self.edges[eid] = (u, v, length)
        self.adj[u].append((eid, v, length))
        self.adj[v].append((eid, u, length))

    def add_ray(self, rid: str, v: str):
        if rid in self.rays:
            raise SpaceError(f"duplicate ray id {rid!r}")
        if v not in self.adj:
            raise SpaceError(f"ray {rid!r} at unknown vertex {v!r}")
        self.rays[rid] = v

    def validate(self):
        if not self.vertices:
            raise SpaceError("empty tree")
        if len(self.edges) != len(self.vertices) - 1:
            raise SpaceError("edge count must be vertex count - 1 (tree)")
        seen = set()
        stack = [self.vertices[0]]
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            stack.extend(w for _, w, _ in self.adj[v] if w not in seen)
        if seen != set(self.vertices):
            raise SpaceError("tree not connected")
        if len(self.rays) < 2:
            raise SpaceError("need at least two rays (two ends)")
        for v in self.vertices:
            deg = len(self.adj[v]) + sum(1 for r in self.rays.values() if r == v)
            if deg < 2:
                raise SpaceError(f"vertex {v!r} has degree {deg} < 2")
        return self

    def to_text(self) -> str:
        lines = [f"vertex {v}" for v in self.vertices]
        lines += [f"edge {e} {u} {v} {l}"
                  for e, (u, v, l) in sorted(self.edges.items())]
        lines += [f"ray {r} {v}" for r, v in sorted(self.rays.items())]
        return "\n".join(lines) + "\n"

    def ends(self) -> list[str]:
        return sorted(self.rays)

    # -- points ------------------------------------------------------------------
    def vertex_point(self, name: str) -> TPoint:
        if name not in self.adj:
            raise SpaceError(f"unknown vertex {name!r}")
        return TPoint("v", name, Fraction(0), self.space_id)

    def edge_point(self, eid: str, s) -> TPoint:
        u, v, ln = self.edges[eid]
        s = _off(s)
        if _sgn(s) < 0 or _sgn(s - ln) > 0:
            raise SpaceError(f"offset {s} outside edge {eid!r}")
        if _sgn(s) == 0:
            return self.vertex_point(u)
        if _sgn(s - ln) == 0:
            return self.vertex_point(v)
        return TPoint("e", eid, s, self.space_id)

    def ray_point(self, rid: str, s) -> TPoint:
        s = _off(s)
        if _sgn(s) < 0:
            raise SpaceError(f"negative ray offset {s}")
        if _sgn(s) == 0:
            return self.vertex_point(self.rays[rid])
        return TPoint("r", rid, s, self.space_id)

    # -- vertex-level paths ---------------------------------------------------------
    def _vertex_path(self, a: str, b: str) -> list[tuple[str, str, str, Fraction]]:
        """Edges (eid, frm, to, length) along the unique path a -> b."""
        if a == b:
            return []
        parent: dict[str, tuple[str, str, Fraction]] = {a: None}
        stack = [a]
        while stack:
            v = stack.pop()
            if v == b:
                break
            for eid, w, ln in self.adj[v]:
                if w not in parent:
                    parent[w] = (v, eid, ln)
                    stack.append(w)
        if b not in parent:
            raise SpaceError(f"no path {a!r} -> {b!r}")
        out = []
        v = b
        while v != a:
            u, eid, ln = parent[v]
            out.append((eid, u, v, ln))
            v = u
        out.reverse()
        return out

    def _vdist(self, a: str, b: str) -> Fraction:
        return sum((ln for _, _, _, ln in self._vertex_path(a, b)), Fraction(0))

    def _exits(self, p: TPoint) -> list[tuple[object, str]]:
        """(cost to reach vertex, vertex) options for leaving p's carrier."""
        if p.kind == "v":
            return [(Fraction(0), p.cid)]
        if p.kind == "r":
            return [(p.s, self.rays[p.cid])]
        u, v, ln = self.edges[p.cid]
        return [(p.s, u), (ln - p.s, v)]

    # -- metric -------------------------------------------------------------------
    def distance(self, p, q):
        self.check_same_space(p, q)
        if p.kind == q.kind and p.cid == q.cid:
            d = q.s - p.s
            return d if _sgn(d) >= 0 else -d
        best = None
        for cp, vp in self._exits(p):
            for cq, vq in self._exits(q):
                tot = cp + self._vdist(vp, vq) + cq
                if best is None or _sgn(tot - best) < 0:
                    best = tot
        return best

    def dist_sq(self, p, q):
        d = self.distance(p, q)
        return d * d

    # -- geodesics ---------------------------------------------------------------
    def _segments_between(self, p: TPoint, q: TPoint):
        """Segment list for the geodesic [p, q] with t starting at 0."""
        if p.kind == q.kind and p.cid == q.cid:
            d = q.s - p.s
            if _sgn(d) == 0:
                raise NoGeodesic("coincident points")
            return [(Fraction(0), abs(d), p.kind, p.cid, p.s, q.s)]
        best = None
        for cp, vp in self._exits(p):
            for cq, vq in self._exits(q):
                tot = cp + self._vdist(vp, vq) + cq
                if best is None or _sgn(tot - best[0]) < 0:
                    best = (tot, cp, vp, cq, vq)
        _, cp, vp, cq, vq = best
        segs = []
        t = Fraction(0)
        if p.kind != "v" and _sgn(cp) > 0:
            # leave p's carrier toward vp
            if p.kind == "e":
                u, v, ln = self.edges[p.cid]
                s_end = Fraction(0) if vp == u else ln
            else:
                s_end = Fraction(0)
            segs.append((t, t + cp, p.kind, p.cid, p.s, s_end))
            t = t + cp
        for eid, frm, to, ln in self._vertex_path(vp, vq):
            u, v, _ = self.edges[eid]
            s0, s1 = (Fraction(0), ln) if frm == u else (ln, Fraction(0))
            segs.append((t, t + ln, "e", eid, s0, s1))
            t = t + ln
        if q.kind != "v" and _sgn(cq) > 0:
            if q.kind == "e":
                u, v, ln = self.edges[q.cid]
                s_start = Fraction(0) if vq == u else ln
            else:
                s_start = Fraction(0)
            segs.append((t, t + cq, q.kind, q.cid, s_start, q.s))
        return segs

    def geodesic_through(self, p, q) -> TPath:
        self.check_same_space(p, q)
        segs = self._segments_between(p, q)
        return TPath(self, segs)

    def geodesic_to_ideal(self, p, xi: TIdeal) -> TPath:
        rid = xi.ray_id
        r = self.rays[rid]
        if p.kind == "r" and p.cid == rid:
            return TPath(self, [], head=None, tail=(Fraction(0), rid, p.s),
                         domain=Domain(Fraction(0), None))
        rv = self.vertex_point(r)
        if self.dist_cmp(p, rv, 0) == 0:
            return TPath(self, [], tail=(Fraction(0), rid, Fraction(0)),
                         domain=Domain(Fraction(0), None))
        segs = self._segments_between(p, rv)
        top = segs[-1][1]
        return TPath(self, segs, tail=(top, rid, Fraction(0)),
                     domain=Domain(Fraction(0), None))

    def geodesic_between_ideals(self, xi_neg: TIdeal, xi_pos: TIdeal,
                                anchor=None) -> TPath:
        r1, r2 = xi_neg.ray_id, xi_pos.ray_id
        if r1 == r2:
            raise NoGeodesic("equal ends")
        v1, v2 = self.rays[r1], self.rays[r2]
        head = (Fraction(0), r1, Fraction(0))
        if v1 == v2:
            line = TPath(self, [], head=head,
                         tail=(Fraction(0), r2, Fraction(0)), domain=COMPLETE)
        else:
            segs = self._segments_between(self.vertex_point(v1),
                                          self.vertex_point(v2))
            line = TPath(self, segs, head=head,
                         tail=(segs[-1][1], r2, Fraction(0)), domain=COMPLETE)
        if anchor is not None:
            t, _ = self.project(anchor, line)
            line = line.shift(t)
        return line

    # -- boundary ------------------------------------------------------------------
    def busemann(self, xi: TIdeal, base, x):
        rid = xi.ray_id
        r = self.vertex_point(self.rays[rid])

        def h(y):
            on = y.s if (y.kind == "r" and y.cid == rid) else Fraction(0)
            return self.distance(y, r) - 2 * on

        return h(x) - h(base)

    def ideal_eq(self, xi: TIdeal, eta: TIdeal) -> bool:
        return xi.ray_id == eta.ray_id

    def tits_distance(self, xi, eta):
        return 0.0 if self.ideal_eq(xi, eta) else float("inf")

    # -- local geometry ----------------------------------------------------------
    def project(self, x, c: TPath):
        """Exact: t -> d(x, c(t)) is |t - t*| + h, so two evaluations pin t*,
        and the same formula lands on the clamped endpoint when t* is outside."""
        if c.domain.lo is not None and c.domain.hi is not None:
            ref = (c.domain.lo + c.domain.hi) / 2
        elif c.domain.lo is not None:
            ref = c.domain.lo
        elif c.domain.hi is not None:
            ref = c.domain.hi
        else:
            ref = Fraction(0)
        big = 2 * self.distance(x, c.eval(ref)) + 1
        tlo = ref - big if c.domain.lo is None else c.domain.lo
        if c.domain.lo is not None and _sgn(ref - big - c.domain.lo) > 0:
            tlo = ref - big
        thi = ref + big if c.domain.hi is None else c.domain.hi
        if c.domain.hi is not None and _sgn(ref + big - c.domain.hi) < 0:
            thi = ref + big
        dlo = self.distance(x, c.eval(tlo))
        dhi = self.distance(x, c.eval(thi))
        t = (tlo + thi + dlo - dhi) / 2
        if _sgn(t - tlo) < 0:
            t = tlo
        if _sgn(t - thi) > 0:
            t = thi
        return t, c.eval(t)

    def _germ_key(self, d: DirectionAtPoint):
        ray = d.ray
        if ray.segments:
            t0, t1, kind, cid, s0, s1 = ray.segments[0]
            return (kind, cid, _sgn(s1 - s0))
        if ray.tail is not None:
            return ("r", ray.tail[1], 1)
        return ("r", ray.head[1], -1)

    def angle(self, u: DirectionAtPoint, v: DirectionAtPoint) -> float:
        if self.dist_cmp(u.base, v.base, 0) != 0:
            raise SpaceError("angle needs a common base point")
        return 0.0 if self._germ_key(u) == self._germ_key(v) else math.pi

    def _degree(self, vname: str) -> int:
        return len(self.adj[vname]) + sum(1 for r in self.rays.values()
                                          if r == vname)

    def has_unique_inverse_direction(self, u: DirectionAtPoint) -> bool:
        p = u.base
        if p.kind != "v":
            return True
        return self._degree(p.cid) == 2

    # -- germs and exact spheres -----------------------------------------------------
    def _germs_at(self, p: TPoint):
        if p.kind == "v":
            out = []
            for eid, other, ln in self.adj[p.cid]:
                u, v, _ = self.edges[eid]
                out.append(("e", eid, 1 if p.cid == u else -1))
            for rid, base in self.rays.items():
                if base == p.cid:
                    out.append(("r", rid, 1))
            return out
        return [(p.kind, p.cid, 1), (p.kind, p.cid, -1)]

    def sphere(self, y: TPoint, radius) -> list[TPoint]:
        """Every point at distance exactly radius from y (a finite set)."""
        r = _off(radius)
        if _sgn(r) <= 0:
            raise SpaceError("radius must be positive")
        out: list[TPoint] = []
        # state: (point, remaining budget, germ to follow from it)
        stack = [(y, r, g) for g in self._germs_at(y)]

        def s_of(pt: TPoint, kind, cid):
            if pt.kind == "v":
                if kind == "e":
                    u, v, ln = self.edges[cid]
                    return Fraction(0) if pt.cid == u else ln
                return Fraction(0)
            return pt.s

        while stack:
            pt, rem, (kind, cid, dirn) = stack.pop()
            s = s_of(pt, kind, cid)
            if kind == "r":
                if dirn > 0:
                    out.append(self.ray_point(cid, s + rem))
                    continue
                room = s
                target_vertex = self.rays[cid]
            else:
                u, v, ln = self.edges[cid]
                room = (ln - s) if dirn > 0 else s
                target_vertex = v if dirn > 0 else u
            c = _sgn(rem - room)
            if c < 0:
                out.append(self.edge_point(cid, s + dirn * rem) if kind == "e"
                           else self.ray_point(cid, s - rem))
            elif c == 0:
                out.append(self.vertex_point(target_vertex))
            else:
                w = self.vertex_point(target_vertex)
                back = (kind, cid, -dirn)
                for g in self._germs_at(w):
                    if g != back:
                        stack.append((w, rem - room, g))
        # dedupe (different routes cannot meet in a tree, but vertices can repeat
        # when radius hits one exactly from two germs of the same carrier)
        seen, uniq = set(), []
        for p_ in out:
            k = (p_.kind, p_.cid, p_.s)
            if k not in seen:
                seen.add(k)
                uniq.append(p_)
        return uniq

    # -- proposal helpers ----------------------------------------------------------
    def perturb(self, z, eta, count, rng):
        eta = Fraction(eta).limit_denominator(10**6)
        pts = self.sphere(z, eta) + self.sphere(z, eta / 2)
        if len(pts) > count:
            idx = rng.permutation(len(pts))[:count]
            pts = [pts[i] for i in idx]
        return pts

    def sphere_sample(self, y, radius, count, rng):
        pts = self.sphere(y, Fraction(radius).limit_denominator(10**6))
        if len(pts) > count:
            idx = rng.permutation(len(pts))[:count]
            pts = [pts[i] for i in idx]
        return pts

    def _walk(self, p: TPoint, germ, rho) -> TPoint:
        """Point at distance rho from p along germ, continuing deterministically
        (rays preferred) at branch vertices."""
        kind, cid, dirn = germ
        rem = rho
        pt = p
        while True:
            if pt.kind == "v":
                if kind == "e":
                    u, v, ln = self.edges[cid]
                    s = Fraction(0) if pt.cid == u else ln
                else:
                    s = Fraction(0)
            else:
                s = pt.s
            if kind == "r" and dirn > 0:
                return self.ray_point(cid, s + rem)
            if kind == "e":
                u, v, ln = self.edges[cid]
                room = (ln - s) if dirn > 0 else s
                target = v if dirn > 0 else u
            else:
                room = s
                target = self.rays[cid]
            c = _sgn(rem - room)
            if c < 0:
                return (self.edge_point(cid, s + dirn * rem) if kind == "e"
                        else self.ray_point(cid, s - rem))
            if c == 0:
                return self.vertex_point(target)
            rem = rem - room
            pt = self.vertex_point(target)
            back = (kind, cid, -dirn)
            nxt = None
            for g in self._germs_at(pt):
                if g == back:
                    continue
                if g[0] == "r" and g[2] > 0:
                    nxt = g
                    break
                if nxt is None:
                    nxt = g
            kind, cid, dirn = nxt

    def _walk_beyond(self, a: TPoint, b: TPoint, rho) -> TPoint:
        """Point at distance rho past a on a geodesic extension of [b, a]."""
        toward_b = self._germ_key(self.geodesic_through(a, b).direction_at(
            Fraction(0)))
        for g in self._germs_at(a):
            if g != toward_b:
                return self._walk(a, g, rho)
        raise SpaceError("no extension germ (degree < 2?)")

    def lerp(self, p, q, w):
        """Affine point on the extended geodesic through [p, q]; w outside
        [0, 1] walks past an endpoint (branch choice deterministic)."""
        w = _off(w)
        if self.dist_cmp(p, q, 0) == 0:
            return p
        d = self.distance(p, q)
        if _sgn(w) >= 0 and _sgn(w - 1) <= 0:
            return self.geodesic_through(p, q).eval(w * d)
        if _sgn(w) < 0:
            return self._walk_beyond(p, q, -w * d)
        return self._walk_beyond(q, p, (w - 1) * d)

    def _end_beyond(self, p: TPoint, germ) -> str:
        """Walk the germ forward until a ray; returns its id."""
        kind, cid, dirn = germ
        while True:
            if kind == "r" and dirn > 0:
                return cid
            if kind == "r":
                v = self.rays[cid]
            else:
                u, w, _ = self.edges[cid]
                v = w if dirn > 0 else u
            back = (kind, cid, -dirn)
            nxt = None
            for g in self._germs_at(self.vertex_point(v)):
                if g == back:
                    continue
                if g[0] == "r" and g[2] > 0:
                    return g[1]
                if nxt is None:
                    nxt = g
            kind, cid, dirn = nxt

    def line_through(self, p: TPoint) -> TPath:
        """Some complete geodesic through p (ends chosen deterministically)."""
        germs = self._germs_at(p)
        e_pos = self._end_beyond(p, germs[0])
        e_neg = self._end_beyond(p, germs[1])
        line = self.geodesic_between_ideals(TIdeal(e_neg), TIdeal(e_pos))
        t, _ = self.project(p, line)
        return line.shift(t)

    def random_point(self, rng):
        carriers = ([("e", e) for e in sorted(self.edges)]
                    + [("r", r) for r in sorted(self.rays)])
        kind, cid = carriers[int(rng.integers(0, len(carriers)))]
        if kind == "e":
            ln = self.edges[cid][2]
            return self.edge_point(cid, ln * Fraction(int(rng.integers(1, 16)), 16))
        return self.ray_point(cid, Fraction(int(rng.integers(0, 41)), 8))

    def random_geodesic(self, rng):
        ends = self.ends()
        i = int(rng.integers(0, len(ends)))
        j = int(rng.integers(0, len(ends) - 1))
        if j >= i:
            j += 1
        return self.geodesic_between_ideals(TIdeal(ends[i]), TIdeal(ends[j]))

    def bounds_flat_strip(self, c: TPath) -> bool:
        return False


DEFAULT_TREE_TEXT = """\
# two branch vertices, four ends
vertex p
vertex q
edge e0 p q 3/2
ray r0 p
ray r1 p
ray r2 q
ray r3 q
"""


def parse_tree(text: str, name: str = "tree") -> MetricTree:
    t = MetricTree(name)
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "vertex" and len(parts) == 2:
                t.add_vertex(parts[1])
            elif parts[0] == "edge" and len(parts) == 5:
                t.add_edge(parts[1], parts[2], parts[3], Fraction(parts[4]))
            elif parts[0] == "ray" and len(parts) == 3:
                t.add_ray(parts[1], parts[2])
            else:
                raise SpaceError(f"unrecognized declaration {parts[0]!r}")
        except (ValueError, ZeroDivisionError) as e:
            raise SpaceError(f"line {lineno}: {e}") from e
        except SpaceError as e:
            raise SpaceError(f"line {lineno}: {e}") from e
    return t.validate()


def default_tree(name: str = "tree") -> MetricTree:
    return parse_tree(DEFAULT_TREE_TEXT, name)
