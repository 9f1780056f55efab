"""Tape layout law, index arithmetic, strip sections, and flat
reconstruction.

The enumeration block re-derives the whole layout in bare rational
arithmetic and checks the packaged index law against brute force for
every order up to 12 and every denominator up to 6; the oracle-facing
tests then certify the same structure through tube queries.
"""
import math
from fractions import Fraction
from math import gcd

import pytest

from tuberec.exactnum import exact_sqrt, qnum
from tuberec.flatstrip import (FlatStrip, OffParallelSet, StripError,
                               _anti_step, _col_offset, build_tape,
                               make_strip, min_tape_order,
                               parallel_set_sections, rational_index,
                               rational_point, reconstruct_flat,
                               section_below, section_below_oracle,
                               section_order, tape_width, tape_width_sq)
from tuberec.oracle import OracleConfig, OracleSession
from tuberec.sequences import make_rsequence
from tuberec.spaces import TIdeal, make_space


def session(kind):
    return OracleSession(make_space(kind), OracleConfig(seed=11))


def euclid_strip(width=3):
    E = make_space("euclidean_plane")
    c = E.geodesic_through(E.point(0, 0), E.point(Fraction(3, 5), Fraction(4, 5)))
    return E, make_strip(E, c, width)


# -------------------------------------------------- exact layout enumeration
def _u(p):
    return Fraction(2 * p - 1, 2 * p)


def _vsq(p):
    return Fraction(4 * p - 1, 4 * p * p)


def _flat_dsq(p, i1, j1, z1, i2, j2, z2):
    da = _col_offset(p, i1, j1) + z1 - _col_offset(p, i2, j2) - z2
    return da * da + (i1 - i2) ** 2 * _vsq(p)


def _brute_index(p, q):
    hits = [(j, z) for j in range(1, p + 1)
            for z in range(-8 * p, 8 * p + 1)
            if _col_offset(p, 0, j) + z == q]
    assert len(hits) == 1, (p, q, hits)
    return hits[0]


@pytest.mark.parametrize("p", range(1, 13))
def test_layout_enumeration_exact(p):
    # width law, squared, as bare rationals
    assert tape_width_sq(p) == 9 * _vsq(p)

    # first family: the column quadruple is an isometric copy of
    # four collinear unit-spaced points
    for j in range(1, p + 1):
        for a in range(4):
            for b in range(a + 1, 4):
                assert _flat_dsq(p, a, j, 0, b, j, 0) == (b - a) ** 2

    # second family: every anti-diagonal resolves inside the index set
    # and is again unit-spaced collinear
    for j0 in range(1, p + 1):
        idx = (0, j0, 0)
        chain = [idx]
        for _ in range(3):
            idx = _anti_step(p, *idx)
            assert 0 <= idx[0] <= 3 and 1 <= idx[1] <= p
            chain.append(idx)
        for a in range(4):
            for b in range(a + 1, 4):
                assert _flat_dsq(p, *chain[a], *chain[b]) == (b - a) ** 2
        # the step really is (-u, +v) in chart coordinates
        for (i1, j1, z1), (i2, j2, z2) in zip(chain, chain[1:]):
            da = (_col_offset(p, i2, j2) + z2) - (_col_offset(p, i1, j1) + z1)
            assert da == -_u(p) and i2 == i1 + 1

    # base subdivision: the row-0 anchors partition [0, 2p-1] into
    # p(2p-1) equal parts of length 1/p
    vals = sorted({_col_offset(p, 0, j) + z
                   for j in range(1, p + 1)
                   for z in range(-4 * p, 4 * p + 1)
                   if 0 <= _col_offset(p, 0, j) + z <= 2 * p - 1})
    assert vals == [Fraction(l, p) for l in range(p * (2 * p - 1) + 1)]

    # the marks called out in the layout: (p-r, 3-2p+2r) sits at (r+1)/p
    for r in range(p - 1):
        assert _col_offset(p, 0, p - r) + (3 - 2 * p + 2 * r) == Fraction(r + 1, p)

    # index law against brute force: every denominator dividing p up to 6,
    # every reduced q in (0, 3), and a signed band beyond it
    for n in range(1, 7):
        if p % n:
            continue
        for m in range(-3 * n + 1, 3 * n):
            if m <= 0 and n == 1 and m == 0:
                pass
            q = Fraction(m, n)
            if q.denominator != n:
                continue
            j, z = rational_index(p, q)
            assert 1 <= j <= p
            assert _col_offset(p, 0, j) + z == q
            assert (j, z) == _brute_index(p, q)


def test_rational_index_worked_examples():
    assert rational_index(3, Fraction(2, 3)) == (2, -1)
    assert rational_index(4, Fraction(1, 2)) == (3, -3)
    for q in (1, 2, 5):
        assert rational_index(6, Fraction(q)) == (1, q)
    with pytest.raises(StripError):
        rational_index(4, Fraction(1, 3))


def test_min_tape_order_examples():
    assert min_tape_order(3) == 0
    assert min_tape_order(1) == 8
    assert min_tape_order(exact_sqrt(Fraction(27, 4))) == 0   # exact equality fits
    assert min_tape_order(2.598076) == 1                      # just below 3 sqrt(3)/2
    _, strip = euclid_strip(width=1)
    assert min_tape_order(strip) == 8


def test_tape_width_spot_values():
    assert abs(tape_width(1) - 3 * math.sqrt(3) / 2) < 1e-15
    assert abs(tape_width(2) - 3 * math.sqrt(7) / 4) < 1e-15
    assert abs(tape_width(100) - 3 * math.sqrt(399) / 200) < 1e-15


# ------------------------------------------------------------- built tapes
def test_build_tape_certifies_and_measures_width():
    s = session("euclidean_plane")
    E = s.space
    c = E.geodesic_through(E.point(0, 0), E.point(Fraction(3, 5), Fraction(4, 5)))
    strip = make_strip(E, c, 3)
    base = make_rsequence(c, 0)
    for p in (1, 2, 3):
        tape = build_tape(s, strip, base, p)
        assert tape.certified_quadruples == 2 * p
        top = tape.point(3, 1, 0)
        foot = strip.chart.point(_col_offset(p, 3, 1), 0)
        assert E.dist_sq(top, foot) == tape_width_sq(p)
        assert abs(float(E.distance(top, foot)) - tape_width(p)) < 1e-9


def test_build_tape_rejects_narrow_strip():
    s = session("euclidean_plane")
    E, strip = euclid_strip(width=1)
    base = make_rsequence(strip.lower, 0)
    with pytest.raises(StripError):
        build_tape(s, strip, base, 8)     # s(8) = 1.0458... > 1


def test_build_tape_product_width_one():
    s = session("tree_cross_line")
    P = s.space
    T = P.tree
    line = P.geodesic_through(P.point(T.vertex_point("p"), 0),
                              P.point(T.vertex_point("p"), 1))
    strip = make_strip(P, line, 1)
    base = make_rsequence(line, 0)
    tape = build_tape(s, strip, base, 9, certify="spot", spot_columns=(1, 5))
    assert tape.certified_quadruples == 4
    with pytest.raises(StripError):
        build_tape(s, strip, base, 8)


def test_rational_point_lands_at_the_right_distance():
    s = session("euclidean_plane")
    E, strip = euclid_strip()
    base = make_rsequence(strip.lower, 0)
    tape = build_tape(s, strip, base, 6)
    for q in (Fraction(5, 2), Fraction(2, 3), Fraction(-4, 3), Fraction(7)):
        pt, (j, z) = rational_point(tape, q)
        assert 1 <= j <= tape.p
        assert E.dist_cmp(pt, base.x(0), abs(q)) == 0
        assert E.dist_cmp(pt, strip.lower.eval(q), 0) == 0


# ---------------------------------------------------------------- sections
def test_sections_label_and_order_euclidean():
    E, strip = euclid_strip()
    c = strip.lower
    probes = [c.eval(2), strip.chart.point(2, 1), c.eval(-1), c.eval(Fraction(7, 2))]
    labels = parallel_set_sections(E, c, probes)
    assert labels[0] == labels[1]            # same section, different height
    assert labels[0].beta_minus == 2 and labels[0].beta_plus == -2
    so = section_order(E, c, probes)
    assert so.order == (2, 0, 1, 3)


def test_sections_reject_off_parallel_probe():
    T = make_space("metric_tree")
    c = T.geodesic_between_ideals(TIdeal("r1"), TIdeal("r0"))
    with pytest.raises(OffParallelSet):
        parallel_set_sections(T, c, [T.ray_point("r2", 1)])


def test_section_below_and_oracle_agree():
    s = session("euclidean_plane")
    E = s.space
    c = E.geodesic_through(E.point(0, 0), E.point(1, 0))
    x, y = E.point(0, 0), E.point(1, 3)
    assert section_below(E, x, y, c) is True
    assert section_below(E, y, x, c) is False
    assert section_below(E, x, E.point(0, 2), c) is False    # equal sections
    assert section_below_oracle(s, x, y, c) is True
    assert section_below_oracle(s, y, x, c) is False


def test_section_below_oracle_product():
    s = session("tree_cross_line")
    P = s.space
    T = P.tree
    line = P.geodesic_through(P.point(T.vertex_point("p"), 0),
                              P.point(T.vertex_point("p"), 1))
    x = P.point(T.vertex_point("q"), 0)
    y = P.point(T.vertex_point("p"), 2)
    assert section_below_oracle(s, x, y, line) is True
    assert section_below_oracle(s, y, x, line) is False


# ------------------------------------------------------------ reconstruction
def test_reconstruct_flat_rational_is_exact():
    s = session("euclidean_plane")
    E = s.space
    c = E.geodesic_through(E.point(1, 2), E.point(1 + Fraction(5, 13),
                                                  2 + Fraction(12, 13)))
    rec = reconstruct_flat(s, c, Fraction(1, 3), Fraction(7, 6))
    assert rec.exact and rec.value == Fraction(5, 6)
    assert rec.tape_orders == [6]
    rec2 = reconstruct_flat(s, c, Fraction(3, 2), Fraction(-1, 4))
    assert rec2.exact and rec2.value == Fraction(7, 4)


def test_reconstruct_flat_rational_product():
    s = session("tree_cross_line")
    P = s.space
    T = P.tree
    line = P.geodesic_through(P.point(T.vertex_point("p"), 0),
                              P.point(T.vertex_point("p"), 1))
    rec = reconstruct_flat(s, line, Fraction(-2, 3), Fraction(1, 2))
    assert rec.exact and rec.value == Fraction(7, 6)


def test_reconstruct_flat_brackets_sqrt2():
    s = session("euclidean_plane")
    E = s.space
    c = E.geodesic_through(E.point(0, 0), E.point(Fraction(3, 5), Fraction(4, 5)))
    rec = reconstruct_flat(s, c, 0, exact_sqrt(2), tol=1e-6)
    assert not rec.exact
    lo, hi = rec.bracket
    assert hi - lo <= Fraction(1, 10 ** 6)
    assert lo < exact_sqrt(2) <= hi
    assert abs(rec.value - math.sqrt(2)) <= 1e-6
    assert rec.iterations <= 16


def test_reconstruct_flat_rejects_rank_one_carrier():
    s = session("metric_tree")
    T = s.space
    c = T.geodesic_between_ideals(TIdeal("r1"), TIdeal("r0"))
    with pytest.raises(StripError):
        reconstruct_flat(s, c, 0, Fraction(1, 2))
