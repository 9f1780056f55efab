"""Horofunction bookkeeping for asymptotic geodesics.

Two geodesics with a common ideal end carry a canonical correspondence:
match points by Busemann level.  Since the level moves at unit rate along
both lines, the correspondence is affine in the parameters, with slope
+1 or -1 depending on which end of each line the shared ideal sits at.
Chains of pairwise-asymptotic lines compose these maps; a cycle back to
the starting line is how translation-like behavior gets measured without
any group acting.

Chains are explicit data (lines plus the ideal glueing each consecutive
pair), never inferred on the fly: two lines can share both ends, and then
the glueing ideal is a genuine choice.

The oracle-facing half replaces Busemann values with horoball membership:
nested integer balls along a line decide the level of a point to integer
resolution, using tube queries only.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .oracle import OracleSession
from .spaces.base import ModelSpace, OffCarrier


class NotAsymptotic(Exception):
    pass


def asymptotic_side(space: ModelSpace, c, xi) -> int:
    """+1 if xi is the forward end of c, -1 if the backward end."""
    fwd = c.ideal(1)
    if fwd is not None and space.ideal_eq(fwd, xi):
        return 1
    bwd = c.ideal(-1)
    if bwd is not None and space.ideal_eq(bwd, xi):
        return -1
    raise NotAsymptotic("geodesic has no end at the given ideal")


def shared_ideal(space: ModelSpace, c1, c2):
    """First common ideal end of the two lines, with its sides."""
    for s1 in (1, -1):
        e1 = c1.ideal(s1)
        if e1 is None:
            continue
        for s2 in (1, -1):
            e2 = c2.ideal(s2)
            if e2 is not None and space.ideal_eq(e1, e2):
                return e1, s1, s2
    raise NotAsymptotic("geodesics share no ideal end")


@dataclass(frozen=True)
class TransferMap:
    """Affine parameter correspondence t -> scale*t + offset, scale = +-1."""

    scale: int
    offset: object

    def apply(self, t):
        return self.scale * t + self.offset

    def compose(self, inner: "TransferMap") -> "TransferMap":
        """self after inner."""
        return TransferMap(self.scale * inner.scale,
                           self.scale * inner.offset + self.offset)

    def inverse(self) -> "TransferMap":
        return TransferMap(self.scale, -self.scale * self.offset)


def transfer_between(space: ModelSpace, c_from, c_to, xi=None) -> TransferMap:
    """Level-preserving parameter map from c_from to c_to.

    With sides s1, s2 at the shared ideal, the level of c_from(t) is
    L = L0 - s1 t, and the parameter on c_to at that level is
    s2 (Delta + s1 t) where Delta is the level difference of the two
    time-zero points.
    """
    if xi is None:
        xi, s1, s2 = shared_ideal(space, c_from, c_to)
    else:
        s1 = asymptotic_side(space, c_from, xi)
        s2 = asymptotic_side(space, c_to, xi)
    base = c_from.eval(0)
    delta = space.busemann(xi, base, c_to.eval(0))
    return TransferMap(s1 * s2, s2 * delta)


def _param_on(space: ModelSpace, c, m, tol=Fraction(1, 10 ** 9)):
    """Parameter of m on c, insisting that m really lies on the carrier."""
    t = c.param_of(m)
    if space.dist_cmp(c.eval(t), m, tol) > 0:
        raise OffCarrier("point does not lie on the geodesic")
    return t


def transfer(space: ModelSpace, c_from, c_to, m, xi=None):
    """The point of c_to at the same Busemann level as m on c_from."""
    tm = transfer_between(space, c_from, c_to, xi)
    return c_to.eval(tm.apply(_param_on(space, c_from, m)))


def normalize_pair(space: ModelSpace, c1, c2, xi=None):
    """Reparametrize c2 so equal parameters mean equal Busemann levels.

    Returns the pair (c1, c2') with c2' a shift of c2; on the result the
    level transfer is parameter copy (up to the side signs)."""
    if xi is None:
        xi, _, s2 = shared_ideal(space, c1, c2)
    else:
        s2 = asymptotic_side(space, c2, xi)
    delta = space.busemann(xi, c1.eval(0), c2.eval(0))
    return c1, c2.shift(s2 * delta)


@dataclass(frozen=True)
class ChainLink:
    """Glueing data for one consecutive pair: the shared ideal and which
    end of each line it occupies."""

    ideal: object
    side_prev: int
    side_next: int


@dataclass(frozen=True)
class AsymptoticChain:
    """Lines a0, ..., an glued consecutively at explicit shared ideals."""

    space: ModelSpace
    lines: tuple
    links: tuple

    def __len__(self):
        return len(self.lines)

    def describe(self) -> dict:
        """JSON-ready structural summary (sides and ideal labels)."""
        return {
            "length": len(self.lines),
            "links": [{"ideal": repr(l.ideal),
                       "side_prev": l.side_prev,
                       "side_next": l.side_next} for l in self.links],
        }


def make_chain(space: ModelSpace, lines, ideals=None) -> AsymptoticChain:
    """Assemble and validate a chain from lines and optional pinned ideals.

    Without ideals the shared end of each consecutive pair is discovered;
    pinning matters when a pair shares both ends."""
    if len(lines) < 2:
        raise ValueError("a chain needs at least two lines")
    if ideals is not None and len(ideals) != len(lines) - 1:
        raise ValueError("need one glueing ideal per consecutive pair")
    links = []
    for k in range(len(lines) - 1):
        if ideals is None:
            xi, sp, sn = shared_ideal(space, lines[k], lines[k + 1])
        else:
            xi = ideals[k]
            sp = asymptotic_side(space, lines[k], xi)
            sn = asymptotic_side(space, lines[k + 1], xi)
        links.append(ChainLink(xi, sp, sn))
    return AsymptoticChain(space, tuple(lines), tuple(links))


def chain_map(chain: AsymptoticChain) -> TransferMap:
    """Composite level-transfer parameter map from a0 to an."""
    total: Optional[TransferMap] = None
    for k, link in enumerate(chain.links):
        step = transfer_between(chain.space, chain.lines[k],
                                chain.lines[k + 1], link.ideal)
        total = step if total is None else step.compose(total)
    return total


def chain_transfer(chain: AsymptoticChain, m):
    """Push the point m on a0 through every link; lands on an."""
    t = _param_on(chain.space, chain.lines[0], m)
    return chain.lines[-1].eval(chain_map(chain).apply(t))


class LevelChain:
    """Nested integer balls along a complete line, for level decisions.

    The horoball at level m is the limit of the balls of radius n around
    line.eval(n - m); membership verdicts for it need nothing but tube
    queries.  depth controls both the certification budget and the
    transverse reach: a point at transverse offset rho needs roughly
    rho^2 < depth before its verdict stabilizes.
    """

    def __init__(self, space: ModelSpace, line, depth: int = 12):
        if not line.domain.complete:
            raise ValueError("level chains need a complete line")
        self.space = space
        self.line = line
        self.depth = depth
        self.xi = line.ideal(1)

    def ray_points(self, level=0):
        return [self.line.eval(n - level) for n in range(self.depth + 1)]

    def verdict(self, session: OracleSession, y, level=0) -> Optional[str]:
        return session.horoball_member(self.ray_points(level), y)

    def level_ceiling(self, session: OracleSession, y,
                      span: int = 8) -> Optional[int]:
        """Smallest integer level whose horoball reads as containing y.

        Linear scan; sound because the level horoballs nest.  None when
        y stays outside every level in [-span, span] or a verdict fails
        to resolve."""
        for m in range(-span, span + 1):
            v = self.verdict(session, y, m)
            if v is None:
                return None
            if v != "outside":
                return m
        return None
