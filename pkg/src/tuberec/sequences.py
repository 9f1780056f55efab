"""Integer rulers: sequences x(z) with d(x(z1), x(z2)) = |z1 - z2|.

A ruler is the unit-distance relation's view of a geodesic: a carrier
line sampled at integer offsets from a phase.  Everything here certifies
ruler structure through tube relations only: a pair at index gap n must
sit on the n-sphere boundary, which the session decides with chain and
separator certificates.

Parallelism of two rulers is a statement at integer resolution: the
aligned gaps stay inside a fixed k-tube, and stay there when the index
window doubles.  Convexity of the separation function along

geodesics is what makes the doubling test meaningful: a bounded, trendless
separation on a doubled window cannot hide divergence inside it.

Rank classification rides on parallelism.  A carrier with a second ruler
at certified unit distance, pointwise, bounds a flat strip; candidates
come from the honest channel (the space knows its own normal directions),
every claim about them is re-derived from tube queries before it counts.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .oracle import OracleSession


class SequenceError(Exception):
    pass


@dataclass(frozen=True)
class RSequence:
    """x(z) = carrier(t0 + z) for integer z; the carrier must be complete."""

    carrier: object
    t0: object = 0

    def x(self, z: int):
        return self.carrier.eval(self.t0 + z)

    def window(self, m: int) -> list:
        """Points x(-m), ..., x(m)."""
        return [self.x(z) for z in range(-m, m + 1)]


def make_rsequence(c, t0=0) -> RSequence:
    if not c.domain.complete:
        raise SequenceError("ruler carrier must be a complete geodesic")
    return RSequence(c, t0)


def extend_unit_pair(session: OracleSession, x0, x1, steps_fwd: int,
                     steps_back: int = 0) -> list:
    """Grow a certified ruler window out of one unit pair by doubling.

    Each proposed point comes from the geodesic extension lerp(a, b, 2);
    it only enters once the new unit gap and the straightness of the new
    triple both certify through the session.  Returns the point list in
    index order; extension by doubling keeps every proposal
    normalization-free."""
    sp = session.space
    if session.relation_member(("boundary", 1), x0, x1) is not True:
        raise SequenceError("seed pair does not certify as a unit gap")
    pts = [x0, x1]
    for _ in range(steps_fwd - 1):
        nxt = sp.lerp(pts[-2], pts[-1], 2)
        if session.relation_member(("boundary", 1), pts[-1], nxt) is not True:
            raise SequenceError("forward step failed the unit-gap certificate")
        if session.relation_member(("boundary", 2), pts[-2], nxt) is not True:
            raise SequenceError("forward step bent the ruler")
        pts.append(nxt)
    a, b = x1, x0
    for _ in range(steps_back):
        nxt = sp.lerp(a, b, 2)
        if session.relation_member(("boundary", 1), b, nxt) is not True:
            raise SequenceError("backward step failed the unit-gap certificate")
        if session.relation_member(("boundary", 2), a, nxt) is not True:
            raise SequenceError("backward step bent the ruler")
        pts.insert(0, nxt)
        a, b = b, nxt
    return pts


@dataclass
class SequenceReport:
    checked: int
    failures: list = field(default_factory=list)        # (i, j) certified wrong
    indeterminate: list = field(default_factory=list)   # (i, j) band verdicts

    @property
    def ok(self) -> bool:
        """No certified failures (band verdicts tracked separately)."""
        return not self.failures

    def __bool__(self) -> bool:
        """Fully certified: every checked pair returned a positive verdict."""
        return not self.failures and not self.indeterminate


def verify_rsequence(session: OracleSession, points,
                     max_pairs: Optional[int] = None,
                     rng: Optional[np.random.Generator] = None) -> SequenceReport:
    """Pairwise boundary certificates over a window of ruler points.

    O(m^2) pairs; max_pairs subsamples them (consecutive gaps always
    kept, the subsample is drawn from the long pairs)."""
    pts = list(points)
    idx = range(len(pts))
    pairs = [(i, j) for i in idx for j in idx if i < j]
    if max_pairs is not None and len(pairs) > max_pairs:
        unit = [(i, j) for (i, j) in pairs if j - i == 1]
        long = [(i, j) for (i, j) in pairs if j - i > 1]
        rng = rng or np.random.default_rng(0)
        take = max(0, max_pairs - len(unit))
        sel = rng.choice(len(long), size=min(take, len(long)), replace=False)
        pairs = unit + [long[k] for k in sorted(sel)]
    rep = SequenceReport(checked=len(pairs))
    for i, j in pairs:
        got = session.relation_member(("boundary", j - i), pts[i], pts[j])
        if got is None:
            rep.indeterminate.append((i, j))
        elif got is not True:
            rep.failures.append((i, j))
    return rep


@dataclass(frozen=True)
class ParallelVerdict:
    status: str                 # "equivalent" | "not_equivalent" | "inconclusive"
    k: Optional[int]            # tube bound when equivalent
    window: int

    @property
    def equivalent(self) -> Optional[bool]:
        if self.status == "inconclusive":
            return None
        return self.status == "equivalent"


def _gap_bound(session: OracleSession, s1: RSequence, s2: RSequence,
               zs) -> Optional[int]:
    worst = 0
    for z in zs:
        c = session.ceil_distance(s1.x(z), s2.x(z))
        if c is None:
            return None
        worst = max(worst, c)
    return worst


def parallel_equivalent(session: OracleSession, s1: RSequence, s2: RSequence,
                        k_max: int = 16, window: int = 64) -> ParallelVerdict:
    """Do the two rulers stay within a fixed tube of each other?

    The aligned gaps over |z| <= window give an integer bound k; the
    window then doubles once and the bound must persist.  Convexity of
    geodesic separation means a persisting bound cannot mask growth;
    a strictly larger bound on the doubled window certifies divergence
    at integer resolution.  Both budgets exhausted without a verdict is
    reported as inconclusive, never coerced."""
    if k_max < 1 or window < 1:
        raise ValueError("k_max and window must be >= 1")
    k1 = _gap_bound(session, s1, s2, range(-window, window + 1))
    outer = [z for z in range(-2 * window, 2 * window + 1)
             if abs(z) > window]
    k2 = _gap_bound(session, s1, s2, outer) if k1 is not None else None
    if k1 is None or k2 is None:
        return ParallelVerdict("inconclusive", None, window)
    if k2 > max(k1, 1):
        # integer-certified growth under doubling: separation increased
        # by at least 1, far beyond any slack proportional to the window
        return ParallelVerdict("not_equivalent", None, window)
    k = max(k1, k2, 1)
    if k > k_max:
        return ParallelVerdict("inconclusive", None, window)
    return ParallelVerdict("equivalent", k, window)


@dataclass
class RankVerdict:
    label: str                      # "rank_one" | "higher_rank" | "inconclusive"
    witness: Optional[RSequence]
    detail: dict


def rank_classify(session: OracleSession, s: RSequence, window: int = 4,
                  k_max: int = 16) -> RankVerdict:
    """Flat strip or not, at the given index window.

    higher_rank requires a certified witness: a second ruler, pointwise
    at unit distance from the given one, parallel-equivalent to it, and
    distinct from both unit shifts of the line itself.  The candidate
    comes from the space's normal-bundle knowledge; rank_one is declared
    when no candidate is offered and the model-space flat-strip test
    confirms absence; anything half-certified stays inconclusive."""
    sp = session.space
    carrier = s.carrier
    cand = sp.unit_parallel_candidate(carrier)
    detail: dict = {"candidate_offered": cand is not None,
                    "bounds_flat_strip": sp.bounds_flat_strip(carrier)}
    if cand is None:
        if not detail["bounds_flat_strip"]:
            return RankVerdict("rank_one", None, detail)
        return RankVerdict("inconclusive", None, detail)

    par = RSequence(cand, s.t0)
    rep = verify_rsequence(session, par.window(window),
                           max_pairs=8 * (2 * window + 1))
    detail["witness_ruler_certified"] = bool(rep)
    unit_gaps = all(
        session.relation_member(("boundary", 1), s.x(z), par.x(z)) is True
        for z in range(-window, window + 1))
    detail["unit_gaps_certified"] = unit_gaps
    pv = parallel_equivalent(session, s, par, k_max=k_max, window=window)
    detail["parallel"] = pv.status
    # the unit shifts of the line itself are parallel at distance 1 too;
    # a strip witness must be off the line, i.e. distinct from both
    eps = Fraction(1, 10 ** 6)
    distinct = (sp.dist_cmp(par.x(0), s.x(1), eps) > 0
                and sp.dist_cmp(par.x(0), s.x(-1), eps) > 0)
    detail["distinct_from_shifts"] = distinct
    if bool(rep) and unit_gaps and distinct and pv.status == "equivalent":
        return RankVerdict("higher_rank", par, detail)
    return RankVerdict("inconclusive", None, detail)
