"""Homology layer: separating grid, certified lifts, rank and weight
oracles, chain reduction round-trips.

Cell counts and ranks are frozen from hand computations (Euler
characteristics, annulus/path retracts, 2g + punctures - 1 counts); the
lift layer's own certificates (fiber cardinality, face cancellation,
Euler formula per component) run implicitly on every build here.
"""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curveperiods.algnum import rational_field as Q
from curveperiods.betti import (
    SiteSet,
    base_graph_for,
    genus_from_monodromy,
    homology_representation,
    lift_curve,
    sites_of,
)
from curveperiods.curve import INF, CurveComponent, PlaneCurve, places_over
from curveperiods.derham import MarkedCurve, cohomology_basis
from curveperiods.errors import BoundaryMeetsPoles, UnresolvedEndpoint


def qp(*cs):
    return [Q.element(Fraction(c)) for c in cs]


def p1_line():
    # P = y - x
    return PlaneCurve([CurveComponent(Q, [qp(0, -1), qp(1)])])


def conic_circle():
    # y^2 = 1 - x^2
    return PlaneCurve([CurveComponent(Q, [qp(-1, 0, 1), qp(), qp(1)])])


def elliptic():
    # y^2 = x^3 + 1
    return PlaneCurve([CurveComponent(Q, [qp(-1, 0, 0, -1), qp(), qp(1)])])


def hyper5():
    # y^2 = x^5 - 1
    return PlaneCurve([CurveComponent(Q, [qp(1, 0, 0, 0, 0, -1), qp(), qp(1)])])


def pl(curve, x):
    return places_over(curve, 0, Q.element(Fraction(x)))


# ---------------------------------------------------------------------------
# base graph geometry


class TestBaseGraph:
    def test_two_branch_sites(self):
        # two real sites, one cut between and two outer cuts each way:
        # a 2x1 cell grid has 6 corners, 7 walls, 2 cells + outer face
        ss = SiteSet()
        ss.add_branch(Q.element(-1), 0)
        ss.add_branch(Q.element(1), 0)
        g = base_graph_for(ss)
        assert len(g.vertices) == 6
        assert len(g.edges) == 7
        assert len(g.faces) == 3
        kinds = sorted(f.kind for f in g.faces)
        assert kinds == ["outer", "site", "site"]

    def test_marked_site_gets_whisker(self):
        c = p1_line()
        X = MarkedCurve(c, markings=[pl(c, 2)[0]])
        g = base_graph_for(sites_of(X))
        tips = [v for v in g.vertices if v.is_tip]
        assert len(tips) == 1
        whiskers = [e for e in g.edges if e.kind == "whisker"]
        assert len(whiskers) == 1
        # the marked cell's face walk runs in and back out of the slit
        face = g.site_face(("q", Fraction(2)))
        wsteps = [d for d in face.walk if g.edges[d[0]].kind == "whisker"]
        assert len(wsteps) == 2

    def test_puncture_meeting_marking_rejected(self):
        c = p1_line()
        with pytest.raises(BoundaryMeetsPoles):
            ss = sites_of(MarkedCurve(c))
            ss.add_puncture(pl(c, 0)[0])
            ss.add_marking(pl(c, 0)[0])
            ss.finalize()

    def test_avoided_value_isolated(self):
        c = p1_line()
        X = MarkedCurve(c, markings=[pl(c, 0)[0], pl(c, 1)[0]])
        g = base_graph_for(sites_of(X, avoid=[Q.element(Fraction(1, 2))]))
        # the avoided value owns a cell, so no edge passes through it
        face = g.site_face(("q", Fraction(1, 2)))
        assert face.kind == "site"

    def test_close_sites_separated(self):
        ss = SiteSet()
        ss.add_branch(Q.element(Fraction(1, 1000)), 0)
        ss.add_branch(Q.element(Fraction(2, 1000)), 0)
        g = base_graph_for(ss)
        assert len([f for f in g.faces if f.kind == "site"]) == 2


# ---------------------------------------------------------------------------
# lifted complexes


class TestLift:
    def test_line_marked_stats(self):
        c = p1_line()
        X = MarkedCurve(c, markings=[pl(c, 0)[0], pl(c, 1)[0]])
        lift = lift_curve(X, base_graph_for(sites_of(X)))
        s = lift.comp_stats[0]
        assert (s["vertices"], s["edges"], s["faces"]) == (8, 9, 3)
        assert s["genus"] == 0

    def test_circle_ram_lift(self):
        c = conic_circle()
        X = MarkedCurve(c, markings=[pl(c, 1)[0], pl(c, -1)[0]])
        g = base_graph_for(sites_of(X))
        lift = lift_curve(X, g)
        s = lift.comp_stats[0]
        assert s["genus"] == 0
        assert (s["vertices"], s["edges"]) == (14, 18)
        # each ramified endpoint contributes one tip and two sector edges
        assert len(lift.a_vertices()) == 2
        assert sum(1 for e in lift.edges if e.kind == "whisker_ram") == 4
        assert all(f.kept for f in lift.faces)
        # double cover: twice as many grid lifts as base grid walls
        base_grid = sum(1 for e in g.edges if e.kind == "grid")
        assert sum(1 for e in lift.edges if e.kind == "grid") == 2 * base_grid

    def test_circle_punctured_at_infinity(self):
        c = conic_circle()
        X = MarkedCurve(c, punctures=places_over(c, 0, INF))
        lift = lift_curve(X, base_graph_for(sites_of(X)))
        omitted = [f for f in lift.faces if not f.kept]
        assert len(omitted) == 2
        keys = {f.omit_place.key() for f in omitted}
        assert keys == {q.key() for q in places_over(c, 0, INF)}

    def test_elliptic_punctured_stats(self):
        c = elliptic()
        X = MarkedCurve(c, punctures=pl(c, 2))
        lift = lift_curve(X, base_graph_for(sites_of(X)))
        s = lift.comp_stats[0]
        assert s["genus"] == 1
        assert len([f for f in lift.faces if not f.kept]) == 2

    def test_euler_formula(self):
        c = elliptic()
        X = MarkedCurve(c, punctures=pl(c, 2))
        lift = lift_curve(X, base_graph_for(sites_of(X)))
        s = lift.comp_stats[0]
        assert s["vertices"] - s["edges"] + s["faces"] == 2 - 2 * s["genus"]

    def test_face_rows_cancel(self):
        c = conic_circle()
        X = MarkedCurve(c, punctures=places_over(c, 0, INF))
        lift = lift_curve(X, base_graph_for(sites_of(X)))
        cover = {}
        for f in lift.faces:
            for k, v in f.row.items():
                cover[k] = cover.get(k, 0) + v
        assert not any(cover.values())

    def test_monodromy_genus_hyper5(self):
        assert genus_from_monodromy(hyper5(), 0) == 2


# ---------------------------------------------------------------------------
# homology ranks and weights


class TestHomology:
    def test_marked_line_path(self):
        c = p1_line()
        X = MarkedCurve(c, markings=[pl(c, 0)[0], pl(c, 1)[0]])
        rep = homology_representation(X)
        assert rep.rank == 1 and rep.weights == [0]
        bd = rep.basis[0].boundary()
        assert sorted(bd.weights.values()) == [-1, 1]
        assert {p.key() for p in bd.weights} == \
            {pl(c, 0)[0].key(), pl(c, 1)[0].key()}

    def test_twice_punctured_line_annulus(self):
        c = p1_line()
        X = MarkedCurve(c, punctures=[pl(c, 0)[0], places_over(c, 0, INF)[0]])
        rep = homology_representation(X)
        assert rep.rank == 1 and rep.weights == [-2]
        assert not rep.basis[0].boundary().weights

    def test_once_punctured_line_trivial(self):
        c = p1_line()
        rep = homology_representation(MarkedCurve(c, punctures=[pl(c, 0)[0]]))
        assert rep.rank == 0

    def test_bare_line_trivial(self):
        rep = homology_representation(MarkedCurve(p1_line()))
        assert rep.rank == 0 and rep.kernel_rows == []

    def test_circle_relative_path(self):
        c = conic_circle()
        X = MarkedCurve(c, markings=[pl(c, 1)[0], pl(c, -1)[0]])
        rep = homology_representation(X)
        assert rep.rank == 1 and rep.weights == [0]
        assert sorted(rep.basis[0].boundary().weights.values()) == [-1, 1]

    def test_circle_punctured_at_infinity(self):
        c = conic_circle()
        X = MarkedCurve(c, punctures=places_over(c, 0, INF))
        rep = homology_representation(X)
        assert rep.rank == 1 and rep.weights == [-2]

    def test_elliptic_compact(self):
        rep = homology_representation(MarkedCurve(elliptic()))
        assert rep.rank == 2 and rep.weights == [-1, -1]
        for b in rep.basis:
            assert not b.boundary().weights

    def test_elliptic_punctured(self):
        c = elliptic()
        rep = homology_representation(MarkedCurve(c, punctures=pl(c, 2)))
        assert rep.rank == 3
        assert sorted(rep.weights) == [-2, -1, -1]
        assert rep.weight_rank(-2) == 1
        assert rep.weight_rank(-1) == 3
        assert rep.weight_rank(0) == 3

    def test_hyper5_rank_pair(self):
        rep = homology_representation(MarkedCurve(hyper5()))
        assert rep.rank == 4 and rep.weights == [-1] * 4
        c = hyper5()
        rep = homology_representation(MarkedCurve(c, punctures=pl(c, 0)))
        assert rep.rank == 5
        assert sorted(rep.weights) == [-2, -1, -1, -1, -1]

    def test_general_tag_punctured(self):
        # y^2 + xy - 1: rational, two places over 0
        c = PlaneCurve([CurveComponent(Q, [qp(-1), qp(0, 1), qp(1)])])
        assert c.components[0].tag == "general"
        rep = homology_representation(MarkedCurve(c, punctures=pl(c, 0)))
        assert rep.rank == 1 and rep.weights == [-2]

    def test_rank_matches_derham_dimension(self):
        c = elliptic()
        X = MarkedCurve(c, punctures=pl(c, 2))
        rep = homology_representation(X)
        assert rep.rank == cohomology_basis(X).dimension()
        c = conic_circle()
        X = MarkedCurve(c, markings=[pl(c, 1)[0], pl(c, -1)[0]])
        rep = homology_representation(X)
        assert rep.rank == cohomology_basis(X).dimension()

    def test_kernel_rows_are_closed(self):
        c = elliptic()
        rep = homology_representation(MarkedCurve(c, punctures=pl(c, 2)))
        for row in rep.kernel_rows:
            ch = rep.chain(dict(enumerate(row)))
            assert not ch.boundary().weights

    def test_coordinate_roundtrip(self):
        c = elliptic()
        rep = homology_representation(MarkedCurve(c, punctures=pl(c, 2)))
        rng = random.Random(7)
        nk = len(rep._k_basis)
        for _ in range(12):
            a = [rng.randint(-5, 5) for _ in range(rep.rank)]
            b = [rng.randint(-3, 3) for _ in range(nk)]
            ch = rep.from_coordinates(a, b)
            aa, bb = rep.coordinates(ch)
            assert aa == a and bb == b

    def test_boundary_telescopes(self):
        c = p1_line()
        X = MarkedCurve(c, markings=[pl(c, 0)[0], pl(c, 1)[0], pl(c, 2)[0]])
        rep = homology_representation(X)
        assert rep.rank == 2 and rep.weights == [0, 0]
        total = rep.basis[0].add(rep.basis[1])
        lhs = total.boundary().weights
        rhs = rep.basis[0].boundary().add(rep.basis[1].boundary()).weights
        assert lhs == rhs
        assert sum(lhs.values()) == 0

    def test_open_chain_rejected(self):
        c = elliptic()
        rep = homology_representation(MarkedCurve(c, punctures=pl(c, 2)))
        grid = next(i for i, e in enumerate(rep.lift.edges)
                    if e.kind == "grid")
        with pytest.raises(UnresolvedEndpoint):
            rep.chain({grid: 1}).boundary()


@settings(max_examples=15, deadline=None)
@given(st.sets(st.integers(min_value=-6, max_value=6), min_size=1, max_size=4))
def test_line_marking_rank_property(marks):
    # P^1 rel k points retracts to a star: rank k - 1, all weight zero
    c = p1_line()
    X = MarkedCurve(c, markings=[pl(c, x)[0] for x in sorted(marks)])
    rep = homology_representation(X)
    assert rep.rank == len(marks) - 1
    assert rep.weights == [0] * (len(marks) - 1)
    for b in rep.basis:
        assert sum(b.boundary().weights.values()) == 0
