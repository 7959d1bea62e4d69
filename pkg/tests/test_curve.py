"""Curve-layer tests: places, residues, divisors, linear systems.

Oracle values are frozen from independent computations (partial fractions,
Riemann-Hurwitz counts, order bookkeeping at infinity); the heavier checks
are property-style over seeded random inputs.
"""

import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from curveperiods.algnum import rational_field as Q
from curveperiods.arith import ComplexBall
from curveperiods.curve import (
    INF,
    CurveComponent,
    Differential,
    Divisor,
    FFElem,
    PlaneCurve,
    RatFunc,
    Series,
    branch_locus,
    divisor_of,
    genus,
    linear_system,
    places_over,
    poles_of,
    residual_divisor,
    residue_at,
)
from curveperiods.curve.series import eval_poly, hensel_y_series, one_plus_root
from curveperiods.curve import fpoly
from curveperiods.errors import (
    ExpansionOrderExceeded,
    InconsistentInput,
    UnsupportedClass,
)


def qp(*cs):
    return [Q.element(Fraction(c)) for c in cs]


def p1_line():
    # P = y - x
    return CurveComponent(Q, [qp(0, -1), qp(1)])


def conic_circle():
    # y^2 = 1 - x^2
    return CurveComponent(Q, [qp(-1, 0, 1), qp(), qp(1)])


def elliptic():
    # y^2 = x^3 + 1
    return CurveComponent(Q, [qp(-1, 0, 0, -1), qp(), qp(1)])


def hyper5():
    # y^2 = x^5 - 1
    return CurveComponent(Q, [qp(1, 0, 0, 0, 0, -1), qp(), qp(1)])


# ---------------------------------------------------------------------------
# series primitives


class TestSeries:
    def test_window_mul(self):
        t = Series.variable(Q, 6)
        s = t.mul(t)
        assert s.coeff(2).equals(1)
        assert s.coeff(3).is_zero()
        with pytest.raises(ExpansionOrderExceeded):
            s.coeff(7)

    def test_laurent_inverse(self):
        # 1/(t^2 (1 - t)) = t^-2 (1 + t + t^2 + ...)
        t2 = Series.monomial(Q, 2, 8)
        one = Series.constant(Q, 1, 8)
        s = t2.mul(one.sub(Series.variable(Q, 8)))
        inv = s.inverse()
        assert inv.coeff(-2).equals(1)
        assert inv.coeff(-1).equals(1)
        assert inv.coeff(0).equals(1)

    def test_one_plus_root_square(self):
        # sqrt(1 + t): coefficients 1, 1/2, -1/8, 1/16
        w = Series.variable(Q, 8)
        s = one_plus_root(w, 2, 8)
        assert s.coeff(0).equals(1)
        assert s.coeff(1).equals(Fraction(1, 2))
        assert s.coeff(2).equals(Fraction(-1, 8))
        assert s.coeff(3).equals(Fraction(1, 16))

    def test_hensel_sqrt(self):
        # y^2 = 1 + t around y0 = 1
        T = 8
        one = Series.constant(Q, 1, T)
        t = Series.variable(Q, T)
        coeffs = [one.add(t).neg(), Series.constant(Q, 0, T), one]
        y = hensel_y_series(Q, coeffs, Q.element(1), T)
        sq = y.mul(y)
        assert sq.coeff(0).equals(1)
        assert sq.coeff(1).equals(1)
        for k in range(2, 6):
            assert sq.coeff(k).is_zero()


# ---------------------------------------------------------------------------
# tags and validation


class TestModel:
    def test_tags(self):
        assert p1_line().tag == "genus0"
        assert conic_circle().tag == "genus0"
        assert elliptic().tag == "superelliptic"
        assert CurveComponent(Q, [qp(-1), qp(0, -1), qp(1)]).tag == "general"

    def test_reducible_rejected(self):
        # y^2 - x^2 = (y-x)(y+x)
        with pytest.raises(InconsistentInput):
            CurveComponent(Q, [qp(0, 0, -1), qp(), qp(1)], tag="general")

    def test_squarefree_required(self):
        # y^2 = x^2 (x+1) is a superelliptic shape with a square factor
        with pytest.raises(InconsistentInput):
            CurveComponent(Q, [qp(0, 0, -1, -1), qp(), qp(1)], tag="superelliptic")

    def test_ffelem_inverse_roundtrip(self):
        comp = elliptic()
        f = FFElem.y(comp).add(FFElem.x(comp)).add(FFElem.const(comp, 2))
        g = f.inverse()
        assert f.mul(g).equals(FFElem.const(comp, 1))

    def test_total_derivative_on_curve(self):
        # on y^2 = x^3 + 1: dy/dx = 3x^2 / (2y)
        comp = elliptic()
        fy = FFElem.y(comp)
        lhs = fy.dx_total()
        three_x2 = FFElem.from_ratfunc(comp, RatFunc(Q, qp(0, 0, Fraction(3, 2))))
        rhs = three_x2.div(fy)
        assert lhs.equals(rhs)


# ---------------------------------------------------------------------------
# branch locus and genus


class TestBranchGenus:
    def test_circle_branch(self):
        crv = PlaneCurve([conic_circle()])
        bl = branch_locus(crv, 0)
        finite = sorted(b.coords[0] for b in bl if b is not INF)
        assert finite == [Fraction(-1), Fraction(1)]
        assert not any(b is INF for b in bl)

    def test_hyper5_branch(self):
        crv = PlaneCurve([hyper5()])
        bl = branch_locus(crv, 0)
        finite = [b for b in bl if b is not INF]
        assert len(finite) == 5
        assert any(b is INF for b in bl)
        for b in finite:
            # every finite branch value is a fifth root of unity
            fifth = b.mul(b).mul(b).mul(b).mul(b)
            assert fifth.equals(1)

    def test_p1_poly_branch_empty(self):
        # y = x^3
        comp = CurveComponent(Q, [qp(0, 0, 0, -1), qp(1)])
        assert branch_locus(PlaneCurve([comp]), 0) == []

    def test_genus_values(self):
        assert genus(PlaneCurve([elliptic()]), 0) == 1
        assert genus(PlaneCurve([hyper5()]), 0) == 2
        assert genus(PlaneCurve([p1_line()]), 0) == 0
        assert genus(PlaneCurve([conic_circle()]), 0) == 0

    def test_branch_shift_invariance(self):
        # y^2 = x(x-1)(x-3) vs the same curve in x+1
        f0 = [Fraction(0), Fraction(3), Fraction(-4), Fraction(1)]
        x = sympy.Symbol("x")
        expr = sum(sympy.Rational(c) * x ** i for i, c in enumerate(f0))
        shifted = sympy.Poly(expr.subs(x, x + 1), x).all_coeffs()[::-1]
        c1 = CurveComponent(Q, [qp(*[-c for c in f0]), qp(), qp(1)])
        c2 = CurveComponent(
            Q, [[Q.element(Fraction(-sympy.Rational(c).p, sympy.Rational(c).q)) for c in shifted], qp(), qp(1)]
        )
        b1 = {b.coords[0] for b in branch_locus(PlaneCurve([c1]), 0) if b is not INF}
        b2 = {b.coords[0] for b in branch_locus(PlaneCurve([c2]), 0) if b is not INF}
        assert b1 == {Fraction(0), Fraction(1), Fraction(3)}
        assert b2 == {v - 1 for v in b1}


# ---------------------------------------------------------------------------
# residues


class TestResidues:
    def test_dx_over_x(self):
        comp = p1_line()
        crv = PlaneCurve([comp])
        f = FFElem.from_ratfunc(comp, RatFunc(Q, qp(1), qp(0, 1)))
        om = Differential.on(0, f)
        p0 = places_over(crv, 0, Q.element(0))[0]
        pinf = places_over(crv, 0, INF)[0]
        assert residue_at(crv, om, p0).equals(1)
        assert residue_at(crv, om, pinf).equals(-1)

    def test_regular_point_zero(self):
        comp = conic_circle()
        crv = PlaneCurve([comp])
        om = Differential.on(0, FFElem.y(comp).inverse())
        p = [
            q for q in places_over(crv, 0, Q.element(0))
            if q.y is not None and q.y.equals(1)
        ][0]
        assert residue_at(crv, om, p).is_zero()

    def test_partial_fraction_residues(self):
        comp = p1_line()
        crv = PlaneCurve([comp])
        f = FFElem.from_ratfunc(comp, RatFunc(Q, qp(1), qp(-1, 0, 1)))
        d = residual_divisor(crv, Differential.on(0, f))
        got = {p.x.coords[0]: w for p, w in d.weights.items()}
        assert set(got) == {Fraction(1), Fraction(-1)}
        assert got[Fraction(1)].equals(Fraction(1, 2))
        assert got[Fraction(-1)].equals(Fraction(-1, 2))

    def test_exact_form_empty(self):
        comp = p1_line()
        crv = PlaneCurve([comp])
        d = residual_divisor(crv, Differential.on(0, FFElem.const(comp, 1)))
        assert len(d.weights) == 0

    def test_gaussian_poles(self):
        # x dx/(x^2+1): 1/2 at x = +-i, -1 at infinity
        comp = p1_line()
        crv = PlaneCurve([comp])
        f = FFElem.from_ratfunc(comp, RatFunc(Q, qp(0, 1), qp(1, 0, 1)))
        d = residual_divisor(crv, Differential.on(0, f))
        inf_w = [w for p, w in d.weights.items() if p.x is INF]
        fin_w = [(p, w) for p, w in d.weights.items() if p.x is not INF]
        assert len(inf_w) == 1 and inf_w[0].equals(-1)
        assert len(fin_w) == 2
        for p, w in fin_w:
            sq = p.x.mul(p.x)
            assert sq.equals(-1)
            assert w.equals(Fraction(1, 2))


def _random_ratfunc(comp, rng, max_deg=2):
    while True:
        num = [Q.element(rng.randint(-3, 3)) for _ in range(rng.randint(1, max_deg + 1))]
        den = [Q.element(rng.randint(-3, 3)) for _ in range(rng.randint(1, max_deg + 1))]
        nf = fpoly.trim(list(num))
        df = fpoly.trim(list(den))
        if nf and df:
            return RatFunc(comp.field, num, den)


class TestResidueTheorem:
    """Residues over all places sum to zero, 200 random differentials."""

    def _check(self, crv, omega):
        d = residual_divisor(crv, omega)
        # independent numeric cross-check of the exact zero-sum
        for ci in omega.parts:
            acc = ComplexBall.zero(160)
            for p, w in d.weights.items():
                if p.comp == ci:
                    acc = acc.add(w.embed(160))
            assert acc.contains_zero()

    def test_p1_batch(self):
        comp = p1_line()
        crv = PlaneCurve([comp])
        rng = random.Random(1001)
        for _ in range(120):
            f = FFElem.from_ratfunc(comp, _random_ratfunc(comp, rng, 3))
            self._check(crv, Differential.on(0, f))

    def test_conic_batch(self):
        comp = conic_circle()
        crv = PlaneCurve([comp])
        rng = random.Random(1002)
        for _ in range(50):
            c0 = _random_ratfunc(comp, rng, 2)
            c1 = _random_ratfunc(comp, rng, 1)
            f = FFElem(comp, [c0, c1])
            self._check(crv, Differential.on(0, f))

    def test_elliptic_batch(self):
        comp = elliptic()
        crv = PlaneCurve([comp])
        rng = random.Random(1003)
        for _ in range(30):
            c0 = _random_ratfunc(comp, rng, 2)
            c1 = _random_ratfunc(comp, rng, 1)
            f = FFElem(comp, [c0, c1])
            self._check(crv, Differential.on(0, f))


# ---------------------------------------------------------------------------
# divisors of functions


class TestDivisors:
    def test_x_on_p1(self):
        comp = p1_line()
        crv = PlaneCurve([comp])
        d = divisor_of(crv, 0, FFElem.x(comp))
        entries = {(p.x is INF, p.x.coords[0] if p.x is not INF else None): w
                   for p, w in d.weights.items()}
        assert entries == {
            (False, Fraction(0)): Fraction(1),
            (True, None): Fraction(-1),
        }

    def test_moebius_quotient(self):
        comp = p1_line()
        crv = PlaneCurve([comp])
        f = FFElem.from_ratfunc(comp, RatFunc(Q, qp(-1, 1), qp(1, 1)))
        d = divisor_of(crv, 0, f)
        got = {p.x.coords[0]: w for p, w in d.weights.items()}
        assert got == {Fraction(1): Fraction(1), Fraction(-1): Fraction(-1)}

    def test_y_on_elliptic(self):
        comp = elliptic()
        crv = PlaneCurve([comp])
        d = divisor_of(crv, 0, FFElem.y(comp))
        inf_part = [(p, w) for p, w in d.weights.items() if p.x is INF]
        zeros = [(p, w) for p, w in d.weights.items() if p.x is not INF]
        assert len(inf_part) == 1 and inf_part[0][1] == -3
        assert len(zeros) == 3
        for p, w in zeros:
            assert w == 1 and p.kind == "ram"
            cube = p.x.mul(p.x).mul(p.x)
            assert cube.equals(-1)

    def test_degree_zero_and_multiplicative(self):
        comp = elliptic()
        crv = PlaneCurve([comp])
        f = FFElem.x(comp).add(FFElem.const(comp, 3))
        g = FFElem.y(comp).add(FFElem.x(comp))
        df = divisor_of(crv, 0, f)
        dg = divisor_of(crv, 0, g)
        dfg = divisor_of(crv, 0, f.mul(g))
        assert df.degree(0) == 0 and dg.degree(0) == 0 and dfg.degree(0) == 0
        s = df.add(dg)
        assert set(s.weights) == set(dfg.weights)
        for k, w in s.weights.items():
            assert dfg.weights[k] == w

    def test_poles_of_dx(self):
        comp = p1_line()
        crv = PlaneCurve([comp])
        ps = poles_of(crv, Differential.on(0, FFElem.const(comp, 1)))
        assert len(ps) == 1 and ps[0].x is INF


@settings(max_examples=40, deadline=None)
@given(
    nc=st.lists(st.integers(-4, 4), min_size=1, max_size=4),
    dc=st.lists(st.integers(-4, 4), min_size=1, max_size=4),
)
def test_divisor_degree_zero_p1(nc, dc):
    comp = p1_line()
    crv = PlaneCurve([comp])
    num = fpoly.trim([Q.element(c) for c in nc])
    den = fpoly.trim([Q.element(c) for c in dc])
    if not num or not den:
        return
    f = FFElem.from_ratfunc(comp, RatFunc(Q, num, den))
    if f.is_zero():
        return
    d = divisor_of(crv, 0, f)
    assert d.degree(0) == 0


# ---------------------------------------------------------------------------
# linear systems


class TestLinearSystems:
    def test_p1_double_pole(self):
        comp = p1_line()
        crv = PlaneCurve([comp])
        p0 = places_over(crv, 0, Q.element(0))[0]
        ls = linear_system(crv, 0, Divisor({p0: 2}))
        assert ls.dimension() == 3
        # every basis element times x^2 is a polynomial of degree <= 2
        x2 = RatFunc(Q, qp(0, 0, 1))
        for e in ls.elements:
            rf = e.coords[0].mul(x2)
            assert fpoly.degree(rf.den) == 0
            assert fpoly.degree(rf.num) <= 2

    def test_p1_zero_minus_pole(self):
        comp = p1_line()
        crv = PlaneCurve([comp])
        p0 = places_over(crv, 0, Q.element(0))[0]
        p1 = places_over(crv, 0, Q.element(1))[0]
        ls = linear_system(crv, 0, Divisor({p0: 1, p1: -1}))
        assert ls.dimension() == 1
        rf = ls.elements[0].coords[0]
        # f = c (x-1)/x
        q, r = fpoly.divmod_poly(Q, rf.num, qp(-1, 1))
        assert not r and fpoly.degree(q) == 0

    def test_weierstrass_3inf(self):
        comp = elliptic()
        crv = PlaneCurve([comp])
        pinf = places_over(crv, 0, INF)[0]
        ls = linear_system(crv, 0, Divisor({pinf: 3}))
        assert ls.dimension() == 3
        mono = set()
        for e in ls.elements:
            c0, c1 = e.coords
            if not c1.is_zero():
                mono.add("y")
            elif fpoly.degree(c0.num) == 1:
                mono.add("x")
            else:
                mono.add("1")
        assert mono == {"1", "x", "y"}

    def test_general_tag_rejected(self):
        comp = CurveComponent(Q, [qp(-1), qp(0, -1), qp(1)])
        crv = PlaneCurve([comp])
        p = places_over(crv, 0, Q.element(0))[0]
        with pytest.raises(UnsupportedClass):
            linear_system(crv, 0, Divisor({p: 1}))

    def test_riemann_roch_dimension(self):
        # random effective divisors with deg D > 2g - 2 on genus 1 and 2
        rng = random.Random(77)
        comp = elliptic()
        crv = PlaneCurve([comp])
        g = 1
        pinf = places_over(crv, 0, INF)[0]
        pool = [pinf]
        for x0 in (0, 2, -1):
            pool.extend(places_over(crv, 0, Q.element(x0)))
        for _ in range(6):
            deg_target = rng.randint(1, 4)
            weights = {}
            deg = 0
            while deg < deg_target:
                p = rng.choice(pool)
                weights[p] = weights.get(p, 0) + 1
                deg += 1
            ls = linear_system(crv, 0, Divisor(weights))
            assert ls.dimension() == deg + 1 - g, (weights, ls.dimension())

    def test_riemann_roch_genus2(self):
        comp = hyper5()
        crv = PlaneCurve([comp])
        pinf = places_over(crv, 0, INF)[0]
        p1 = places_over(crv, 0, Q.element(1))[0]  # ram place y=0
        ls = linear_system(crv, 0, Divisor({pinf: 3, p1: 1}))
        assert ls.dimension() == 4 + 1 - 2
        ls2 = linear_system(crv, 0, Divisor({pinf: 4}))
        assert ls2.dimension() == 4 + 1 - 2


# ---------------------------------------------------------------------------
# places over extensions stay distinct


class TestPlaceIdentity:
    def test_conjugate_places_differ(self):
        comp = p1_line()
        crv = PlaneCurve([comp])
        f = FFElem.from_ratfunc(comp, RatFunc(Q, qp(1), qp(1, 0, 1)))
        d = residual_divisor(crv, Differential.on(0, f))
        fin = [p for p in d.weights if p.x is not INF]
        assert len(fin) == 2
        assert fin[0] != fin[1]
        assert len({p.key() for p in fin}) == 2

    def test_fiber_places_distinct(self):
        comp = elliptic()
        crv = PlaneCurve([comp])
        ps = places_over(crv, 0, Q.element(5))
        assert len(ps) == 2
        assert len({p.key() for p in ps}) == 2
