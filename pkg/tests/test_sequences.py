"""Integer rulers, parallel equivalence at integer resolution, and the
rank dichotomy they certify."""
from fractions import Fraction

import numpy as np
import pytest

from tuberec.oracle import OracleConfig, OracleSession
from tuberec.sequences import (ParallelVerdict, RSequence, SequenceError,
                               extend_unit_pair, make_rsequence,
                               parallel_equivalent, rank_classify,
                               verify_rsequence)
from tuberec.spaces import make_space


def session(kind):
    return OracleSession(make_space(kind), OracleConfig(seed=3))


# ------------------------------------------------------------------- rulers
def test_rsequence_samples_carrier_at_integer_offsets():
    E = make_space("euclidean_plane")
    line = E.geodesic_through(E.point(0, 0), E.point(1, 0))
    s = make_rsequence(line, Fraction(1, 2))
    assert s.x(0) == E.point(Fraction(1, 2), 0)
    assert s.x(-2) == E.point(Fraction(-3, 2), 0)
    assert len(s.window(3)) == 7
    assert s.window(1)[1] == s.x(0)


def test_make_rsequence_rejects_incomplete_carrier():
    from tuberec.spaces.tree import TIdeal
    T = make_space("metric_tree")
    ray = T.geodesic_to_ideal(T.vertex_point("p"), TIdeal("r0"))
    with pytest.raises(SequenceError):
        make_rsequence(ray, 0)


def test_extend_unit_pair_walks_a_pythagorean_line():
    s = session("euclidean_plane")
    E = s.space
    x0 = E.point(0, 0)
    x1 = E.point(Fraction(3, 5), Fraction(4, 5))
    pts = extend_unit_pair(s, x0, x1, steps_fwd=5, steps_back=2)
    assert len(pts) == 8
    assert E.dist_cmp(pts[0], pts[-1], 7) == 0
    assert pts[2] == E.point(0, 0)


def test_extend_unit_pair_rejects_non_unit_seed():
    s = session("euclidean_plane")
    E = s.space
    with pytest.raises(SequenceError):
        extend_unit_pair(s, E.point(0, 0), E.point(2, 0), steps_fwd=3)


def test_extend_unit_pair_through_tree_branch_vertex():
    s = session("metric_tree")
    T = s.space
    # start on r1, step through p, across the edge, out along r2
    x0 = T.ray_point("r1", 2)
    x1 = T.ray_point("r1", 1)
    pts = extend_unit_pair(s, x0, x1, steps_fwd=5)
    assert T.dist_cmp(pts[0], pts[5], 5) == 0
    # vertex p sits at parameter 2 along the walk
    assert T.dist_cmp(pts[2], T.vertex_point("p"), 0) == 0


def test_verify_rsequence_certifies_straight_window():
    s = session("euclidean_plane")
    E = s.space
    line = E.geodesic_through(E.point(0, 0), E.point(Fraction(3, 5), Fraction(4, 5)))
    seq = make_rsequence(line)
    rep = verify_rsequence(s, seq.window(3))
    assert bool(rep) and rep.ok
    assert rep.checked == 21 and not rep.indeterminate


def test_verify_rsequence_flags_bent_and_stretched_windows():
    s = session("euclidean_plane")
    E = s.space
    bent = [E.point(0, 0), E.point(1, 0), E.point(1, 1)]
    rep = verify_rsequence(s, bent)
    assert not rep.ok and (0, 2) in rep.failures
    stretched = [E.point(0, 0), E.point(1, 0), E.point(Fraction(5, 2), 0)]
    rep2 = verify_rsequence(s, stretched)
    assert (1, 2) in rep2.failures


def test_verify_rsequence_subsample_keeps_unit_gaps():
    s = session("euclidean_plane")
    E = s.space
    line = E.geodesic_through(E.point(0, 0), E.point(1, 0))
    pts = make_rsequence(line).window(6)     # 13 points, 78 pairs
    rep = verify_rsequence(s, pts, max_pairs=20,
                           rng=np.random.default_rng(1))
    assert rep.ok
    assert rep.checked <= 12 + 20  # 12 unit gaps always present
    assert rep.checked >= 12


# ------------------------------------------------------- parallel equivalence
def test_parallel_equivalent_same_ruler_is_k1():
    s = session("euclidean_plane")
    E = s.space
    line = E.geodesic_through(E.point(0, 0), E.point(1, 0))
    seq = make_rsequence(line)
    v = parallel_equivalent(s, seq, seq, window=4)
    assert v.status == "equivalent" and v.k == 1 and v.equivalent is True


def test_parallel_equivalent_unit_shift_is_k1():
    s = session("euclidean_plane")
    E = s.space
    line = E.geodesic_through(E.point(0, 0), E.point(1, 0))
    v = parallel_equivalent(s, make_rsequence(line), make_rsequence(line, 1),
                            window=4)
    assert v.status == "equivalent" and v.k == 1


def test_parallel_equivalent_offset_lines():
    s = session("euclidean_plane")
    E = s.space
    a = E.geodesic_through(E.point(0, 0), E.point(1, 0))
    b = E.geodesic_through(E.point(0, Fraction(7, 2)), E.point(1, Fraction(7, 2)))
    v = parallel_equivalent(s, make_rsequence(a), make_rsequence(b), window=4)
    assert v.status == "equivalent" and v.k == 4


def test_parallel_equivalent_detects_crossing_lines():
    s = session("euclidean_plane")
    E = s.space
    a = E.geodesic_through(E.point(0, 0), E.point(1, 0))
    b = E.geodesic_through(E.point(0, 0), E.point(Fraction(3, 5), Fraction(4, 5)))
    v = parallel_equivalent(s, make_rsequence(a), make_rsequence(b), window=4)
    assert v.status == "not_equivalent" and v.equivalent is False


def test_parallel_equivalent_diverging_hyperbolic_lines():
    s = session("hyperbolic_plane")
    H = s.space
    a = H.geodesic_between_ideals(H.ideal(np.pi), H.ideal(0.0))
    b = H.geodesic_between_ideals(H.ideal(np.pi), H.ideal(0.05))
    v = parallel_equivalent(s, make_rsequence(a), make_rsequence(b), window=4)
    assert v.status == "not_equivalent"


def test_parallel_equivalent_inconclusive_when_k_budget_too_small():
    s = session("euclidean_plane")
    E = s.space
    a = E.geodesic_through(E.point(0, 0), E.point(1, 0))
    b = E.geodesic_through(E.point(0, 9), E.point(1, 9))
    v = parallel_equivalent(s, make_rsequence(a), make_rsequence(b),
                            window=4, k_max=5)
    assert v.status == "inconclusive" and v.equivalent is None


# ----------------------------------------------------------------- rank split
@pytest.mark.parametrize("kind", ["euclidean_plane", "tree_cross_line"])
def test_rank_classify_higher_rank(kind):
    s = session(kind)
    line = s.space.random_geodesic(np.random.default_rng(5))
    verdict = rank_classify(s, make_rsequence(line), window=3)
    assert verdict.label == "higher_rank"
    assert verdict.witness is not None
    assert verdict.detail["unit_gaps_certified"]
    assert verdict.detail["distinct_from_shifts"]
    assert verdict.detail["parallel"] == "equivalent"


def test_rank_classify_higher_rank_vertical_product_line():
    s = session("tree_cross_line")
    P = s.space
    T = P.tree
    line = P.geodesic_through(P.point(T.vertex_point("q"), 0),
                              P.point(T.vertex_point("q"), 1))
    verdict = rank_classify(s, make_rsequence(line), window=3)
    assert verdict.label == "higher_rank"


@pytest.mark.parametrize("kind", ["hyperbolic_plane", "metric_tree"])
def test_rank_classify_rank_one(kind):
    s = session(kind)
    line = s.space.random_geodesic(np.random.default_rng(5))
    verdict = rank_classify(s, make_rsequence(line), window=3)
    assert verdict.label == "rank_one"
    assert verdict.witness is None
    assert not verdict.detail["bounds_flat_strip"]
