"""Model space sanity: metrics, geodesics, Busemann functions, projections.

Exact-mode spaces are tested for exactness (== on QNum/Fraction), the
hyperbolic plane against 1e-10 scale tolerances.
"""
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tuberec.exactnum import QNum, qnum
from tuberec.spaces import (EuclideanPlane, HyperbolicPlane, TIdeal,
                            TreeCrossLine, default_tree, make_space,
                            parse_tree)
from tuberec.spaces.hyperbolic import HIdeal, mink
from tuberec.spaces.tree import DEFAULT_TREE_TEXT

RNG = np.random.default_rng(20240817)

rationals = st.fractions(min_value=-8, max_value=8, max_denominator=64)


# ---------------------------------------------------------------- euclidean
class TestEuclidean:
    E = EuclideanPlane()

    def test_distance_exact(self):
        p = self.E.point(0, 0)
        q = self.E.point(3, 4)
        assert self.E.distance(p, q) == 5
        assert self.E.dist_sq(p, q) == 25
        assert self.E.dist_cmp(p, q, 5) == 0
        assert self.E.dist_cmp(p, q, Fraction(49, 10)) > 0
        assert self.E.dist_cmp(p, q, 6) < 0

    def test_geodesic_unit_speed(self):
        p = self.E.point(1, 2)
        q = self.E.point(4, 6)
        c = self.E.geodesic_through(p, q)
        assert self.E.distance(c.eval(0), p) == 0
        assert self.E.distance(c.eval(5), q) == 0
        assert self.E.dist_sq(c.eval(Fraction(1, 3)), c.eval(2)) == qnum(Fraction(25, 9))

    def test_lerp_matches_eval(self):
        p = self.E.point(Fraction(1, 2), 0)
        q = self.E.point(Fraction(7, 2), 4)
        m = self.E.midpoint(p, q)
        assert self.E.dist_sq(p, m) == self.E.dist_sq(q, m)
        assert self.E.dist_cmp(p, m, Fraction(5, 2)) == 0

    def test_busemann_unit_rate(self):
        xi = self.E.geodesic_through(self.E.point(0, 0), self.E.point(1, 0)).ideal(1)
        base = self.E.point(0, 0)
        c = self.E.geodesic_to_ideal(base, xi)
        for t in (Fraction(1), Fraction(5, 2), Fraction(19, 3)):
            assert self.E.busemann(xi, base, c.eval(t)) == -t

    def test_projection(self):
        c = self.E.geodesic_through(self.E.point(0, 0), self.E.point(1, 0))
        t, foot = self.E.project(self.E.point(3, 7), c)
        assert t == 3 and foot.y == 0

    def test_chart_isometric(self):
        c = self.E.geodesic_through(self.E.point(0, 0), self.E.point(3, 4))
        ch = self.E.flat_chart(c)
        p = ch.point(Fraction(2), Fraction(1, 2))
        q = ch.point(Fraction(-1), Fraction(5, 2))
        assert self.E.dist_sq(p, q) == qnum(9 + 4)

    @given(ax=rationals, ay=rationals, bx=rationals, by=rationals,
           cx=rationals, cy=rationals)
    @settings(derandomize=True, max_examples=60)
    def test_triangle_inequality_exact(self, ax, ay, bx, by, cx, cy):
        E = self.E
        a, b, c = E.point(ax, ay), E.point(bx, by), E.point(cx, cy)
        # (d(a,b) + d(b,c))^2 >= d(a,c)^2 via squared forms only
        ab, bc, ac = E.dist_sq(a, b), E.dist_sq(b, c), E.dist_sq(a, c)
        lhs = ab + bc - ac
        # d(a,c) <= d(a,b) + d(b,c)  <=>  (ac - ab - bc)^2 <= 4 ab bc when ac > ab + bc
        if lhs.sign() < 0:
            assert ((ac - ab - bc) * (ac - ab - bc) - 4 * ab * bc).sign() <= 0

    def test_comparison_check_flat(self):
        a, b, c = self.E.point(0, 0), self.E.point(4, 1), self.E.point(1, 3)
        assert abs(self.E.comparison_check(a, b, c, RNG)) <= 1e-10


# ---------------------------------------------------------------- hyperbolic
class TestHyperbolic:
    H = HyperbolicPlane()

    def test_point_on_sheet(self):
        p = self.H.point(0.7, -1.3)
        assert abs(mink(p.v, p.v) + 1) < 1e-12

    def test_distance_symmetry_and_identity(self):
        p = self.H.point(0.3, 0.4)
        q = self.H.point(-1.0, 2.0)
        assert self.H.distance(p, p) == 0
        assert abs(self.H.distance(p, q) - self.H.distance(q, p)) < 1e-14

    def test_geodesic_unit_speed(self):
        p = self.H.point(0.0, 0.0)
        q = self.H.point(1.5, -0.7)
        c = self.H.geodesic_through(p, q)
        d = self.H.distance(p, q)
        assert self.H.distance(c.eval(0.0), p) < 1e-12
        assert self.H.distance(c.eval(d), q) < 1e-12
        for t1, t2 in [(0.0, 1.0), (-2.0, 1.5), (0.25, 0.75)]:
            assert abs(self.H.distance(c.eval(t1), c.eval(t2)) - abs(t2 - t1)) < 1e-10

    def test_ray_to_ideal_and_busemann(self):
        xi = HIdeal.of(0.9)
        base = self.H.point(0.2, -0.1)
        c = self.H.geodesic_to_ideal(base, xi)
        assert self.H.distance(c.eval(0.0), base) < 1e-12
        b5 = self.H.busemann(xi, base, c.eval(5.0))
        assert abs(b5 + 5.0) < 1e-10
        # 1-Lipschitz on random pairs
        rng = np.random.default_rng(7)
        for _ in range(50):
            x = self.H.point(*rng.uniform(-2, 2, 2))
            y = self.H.point(*rng.uniform(-2, 2, 2))
            lhs = abs(self.H.busemann(xi, base, x) - self.H.busemann(xi, base, y))
            assert lhs <= self.H.distance(x, y) + 1e-10

    def test_line_between_ideals_hits_both(self):
        xi, eta = HIdeal.of(0.3), HIdeal.of(2.1)
        c = self.H.geodesic_between_ideals(xi, eta)
        far_pos = c.eval(30.0)
        far_neg = c.eval(-30.0)
        # direction converges to the ideal representatives
        assert abs(far_pos.v[1] / far_pos.v[0] - math.cos(2.1)) < 1e-8
        assert abs(far_neg.v[1] / far_neg.v[0] - math.cos(0.3)) < 1e-8

    def test_projection_perpendicular(self):
        c = self.H.geodesic_between_ideals(HIdeal.of(0.0), HIdeal.of(math.pi))
        x = self.H.point(0.4, 1.7)
        t, foot = self.H.project(x, c)
        d0 = self.H.distance(x, foot)
        for dt in (-1e-3, 1e-3):
            assert self.H.distance(x, c.eval(t + dt)) > d0

    def test_intersect_lines(self):
        l1 = self.H.geodesic_between_ideals(HIdeal.of(0.0), HIdeal.of(math.pi))
        l2 = self.H.geodesic_between_ideals(HIdeal.of(math.pi / 2),
                                            HIdeal.of(-math.pi / 2))
        x = self.H.intersect_lines(l1, l2)
        assert abs(x.v[0] - 1.0) < 1e-12  # they cross at the sheet's apex

    def test_comparison_nonpositive(self):
        a = self.H.point(0.0, 0.0)
        b = self.H.point(2.0, 0.5)
        c = self.H.point(-0.5, 1.5)
        assert self.H.comparison_check(a, b, c, RNG, samples=64) <= 1e-9


# ---------------------------------------------------------------- metric tree
class TestTree:
    T = default_tree()

    def test_parse_roundtrip(self):
        text = self.T.to_text()
        again = parse_tree(text, "again")
        assert again.to_text() == text

    def test_validation_rejects_bad_trees(self):
        from tuberec.spaces import SpaceError
        with pytest.raises(SpaceError):
            parse_tree("vertex a\nvertex b\nedge e a b 1\nray r a\n")  # deg(b)=1
        with pytest.raises(SpaceError):
            parse_tree("vertex a\nray r0 a\nray r1 a\nray r2 a\nvertex b\n")
        with pytest.raises(SpaceError):
            parse_tree("vertex a\nedge e a a 1\nray r0 a\nray r1 a\n")

    def test_distances_exact(self):
        T = self.T
        p = T.ray_point("r0", Fraction(1, 2))
        q = T.ray_point("r2", Fraction(1, 3))
        assert T.distance(p, q) == Fraction(1, 2) + Fraction(3, 2) + Fraction(1, 3)
        m = T.edge_point("e0", Fraction(3, 4))
        assert T.distance(p, m) == Fraction(1, 2) + Fraction(3, 4)
        assert T.distance(m, m) == 0

    def test_geodesic_eval_breakpoints(self):
        T = self.T
        p = T.ray_point("r0", 1)
        q = T.ray_point("r3", 2)
        c = T.geodesic_through(p, q)
        d = T.distance(p, q)
        assert d == 1 + Fraction(3, 2) + 2
        assert T.distance(c.eval(1), T.vertex_point("p")) == 0
        assert T.distance(c.eval(1 + Fraction(3, 2)), T.vertex_point("q")) == 0
        mid = c.eval(d / 2)
        assert T.distance(p, mid) == d / 2

    def test_line_between_ends_and_busemann(self):
        T = self.T
        line = T.geodesic_between_ideals(TIdeal("r0"), TIdeal("r2"))
        xi = line.ideal(1)
        assert xi.ray_id == "r2"
        base = line.eval(0)
        for t in (Fraction(-2), Fraction(0), Fraction(7, 3)):
            assert T.busemann(xi, base, line.eval(t)) == -t
        # off-line point: busemann = distance to the merge point corrected
        y = T.ray_point("r1", 2)
        assert T.busemann(xi, base, y) == T.distance(y, base)

    def test_projection_exact(self):
        T = self.T
        line = T.geodesic_between_ideals(TIdeal("r0"), TIdeal("r2"))
        y = T.ray_point("r1", Fraction(5, 2))
        t, foot = T.project(y, line)
        assert T.distance(y, foot) == Fraction(5, 2)
        assert foot == T.vertex_point("p")

    def test_sphere_exact(self):
        T = self.T
        pts = T.sphere(T.vertex_point("p"), Fraction(2))
        # r0, r1 at offset 2, and past q (1/2 into each of r2, r3)
        assert len(pts) == 4
        for s in pts:
            assert T.distance(T.vertex_point("p"), s) == 2

    def test_qnum_offsets_pass_through(self):
        T = self.T
        s = qnum(Fraction(1, 2)) + QNum(0, Fraction(1, 4), 3)
        p = T.ray_point("r0", s)
        q = T.ray_point("r0", Fraction(2))
        assert T.distance(p, q) == Fraction(2) - s

    def test_comparison_nonpositive(self):
        T = self.T
        a = T.ray_point("r0", 2)
        b = T.ray_point("r2", 1)
        c = T.ray_point("r1", Fraction(3, 2))
        assert float(T.comparison_check(a, b, c, RNG, samples=48)) <= 1e-12


# ---------------------------------------------------------------- tree x line
class TestProduct:
    X = TreeCrossLine(default_tree())

    def test_distance_pythagoras(self):
        X = self.X
        p = X.point(X.tree.ray_point("r0", 3), 0)
        q = X.point(X.tree.ray_point("r0", 0), 4)
        assert X.dist_sq(p, q) == 25
        assert X.distance(p, q) == 5

    def test_geodesic_unit_speed_exact(self):
        X = self.X
        p = X.point(X.tree.ray_point("r0", 3), 0)
        q = X.point(X.tree.ray_point("r0", 0), 4)
        c = X.geodesic_through(p, q)
        r = c.eval(Fraction(5, 2))
        assert X.dist_sq(p, r) == Fraction(25, 4)
        assert X.dist_sq(q, r) == Fraction(25, 4)

    def test_lerp_exact_for_non_pythagorean(self):
        X = self.X
        p = X.point(X.tree.ray_point("r0", 1), 0)
        q = X.point(X.tree.ray_point("r2", 1), 1)
        m = X.midpoint(p, q)
        assert X.dist_sq(p, m) == X.dist_sq(q, m)

    def test_busemann_along_ray(self):
        X = self.X
        line = X.random_geodesic(np.random.default_rng(3))
        xi = line.ideal(1)
        base = line.eval(0)
        for t in (Fraction(1), Fraction(9, 4)):
            b = X.busemann(xi, base, line.eval(t))
            assert _as_float(b) == pytest.approx(-float(t), abs=1e-12)

    def test_projection(self):
        X = self.X
        ct = X.tree.geodesic_between_ideals(TIdeal("r0"), TIdeal("r2"))
        line = X.geodesic_between_ideals(
            _profile_ideal(ct, -1), _profile_ideal(ct, +1))
        y = X.point(X.tree.ray_point("r1", 2), 3)
        t, foot = X.project(y, line)
        d0 = X.dist_sq(y, foot)
        for dt in (Fraction(-1, 7), Fraction(1, 7)):
            assert X.dist_sq(y, line.eval(t + dt)) - d0 > 0

    def test_chart_isometric(self):
        X = self.X
        c = X.random_geodesic(np.random.default_rng(11))
        ch = X.flat_chart(c)
        pts = [(Fraction(0), Fraction(0)), (Fraction(3), Fraction(1)),
               (Fraction(-2), Fraction(5, 2))]
        for (a1, b1) in pts:
            for (a2, b2) in pts:
                lhs = X.dist_sq(ch.point(a1, b1), ch.point(a2, b2))
                rhs = (a1 - a2) ** 2 + (b1 - b2) ** 2
                assert (qnum(0) + lhs) == rhs

    def test_comparison_nonpositive(self):
        X = self.X
        rng = np.random.default_rng(5)
        a, b, c = (X.random_point(rng) for _ in range(3))
        assert float(X.comparison_check(a, b, c, rng, samples=48)) <= 1e-12


def _as_float(v):
    return float(v)


def _profile_ideal(ct, sign):
    from tuberec.spaces.product import PIdeal
    end = ct.ideal(sign)
    return PIdeal(end, Fraction(1), Fraction(0))


# ---------------------------------------------------------------- factory
def test_make_space_kinds():
    for kind in ("euclidean_plane", "hyperbolic_plane", "metric_tree",
                 "tree_cross_line"):
        sp = make_space(kind)
        assert sp.kind == kind
    with pytest.raises(ValueError):
        make_space("flat_torus")


def test_make_space_custom_tree():
    text = DEFAULT_TREE_TEXT.replace("3/2", "7/3")
    sp = make_space("metric_tree", tree_text=text)
    p = sp.vertex_point("p")
    q = sp.vertex_point("q")
    assert sp.distance(p, q) == Fraction(7, 3)
