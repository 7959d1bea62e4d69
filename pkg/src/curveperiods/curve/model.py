"""Plane curve components, places, divisors, function-field elements.

A component is P(x, y) = sum_j p_j(x) y^j over a number field K, carrying a
class tag that controls how much symbolic machinery is available:

  genus0          deg_y P = 1, or y^2 = f(x) with deg f <= 2
  superelliptic   y^m = f(x), f squarefree, m >= 2
  general         anything irreducible with dP/dy != 0 (numeric pipeline)

Function-field elements are y-power vectors with rational-function
coordinates; arithmetic reduces modulo P exactly.
"""

from __future__ import annotations

from fractions import Fraction

import sympy

from ..algnum import AlgebraicNumber, adjoin_root
from ..arith import ComplexBall, isolate_roots
from ..errors import (
    DegenerateConfiguration,
    DivisionByZero,
    InconsistentInput,
    UnsupportedClass,
)
from . import fpoly
from .fpoly import RatFunc


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"


INF = _Infinity()


def is_infinite(x):
    return x is INF


# ---------------------------------------------------------------------------


class CurveComponent:
    """One irreducible component: P = sum ycoeffs[j](x) y^j."""

    def __init__(self, field, ycoeffs, tag=None, checked=False):
        self.field = field
        self.ycoeffs = [fpoly.trim(list(c)) for c in ycoeffs]
        while self.ycoeffs and not self.ycoeffs[-1]:
            self.ycoeffs.pop()
        self.deg_y = len(self.ycoeffs) - 1
        if self.deg_y < 1:
            raise InconsistentInput("polynomial must involve y")
        self._sym_cache = {}
        self.tag = tag if tag is not None else self._detect_tag()
        if not checked:
            self._validate()

    # -- tag detection and validation

    def _superelliptic_shape(self):
        """(m, f) if P = y^m - f(x), else None."""
        m = self.deg_y
        if m < 2:
            return None
        lead = self.ycoeffs[m]
        if len(lead) != 1 or not lead[0].equals(1):
            return None
        for j in range(1, m):
            if self.ycoeffs[j]:
                return None
        f = fpoly.neg(self.ycoeffs[0])
        if fpoly.degree(f) < 1:
            return None
        return m, f

    def _detect_tag(self):
        if self.deg_y == 1:
            return "genus0"
        shape = self._superelliptic_shape()
        if shape is not None:
            m, f = shape
            if fpoly.is_squarefree(self.field, f):
                if m == 2 and fpoly.degree(f) <= 2:
                    return "genus0"
                return "superelliptic"
        return "general"

    def _validate(self):
        if self.tag == "genus0":
            if self.deg_y == 1:
                # l(x) y = n(x): irreducible over any extension iff coprime
                g = fpoly.gcd(self.field, self.ycoeffs[1], self.ycoeffs[0])
                if len(g) > 1:
                    raise InconsistentInput("common factor between y-coefficients")
                return
            shape = self._superelliptic_shape()
            if shape is None or shape[0] != 2 or fpoly.degree(shape[1]) > 2:
                raise InconsistentInput("genus0 tag needs deg_y 1 or a conic")
            if not fpoly.is_squarefree(self.field, shape[1]):
                raise InconsistentInput("conic right side must be squarefree")
            return
        if self.tag == "superelliptic":
            shape = self._superelliptic_shape()
            if shape is None:
                raise InconsistentInput("superelliptic tag needs the shape y^m = f(x)")
            if not fpoly.is_squarefree(self.field, shape[1]):
                raise InconsistentInput("superelliptic right side must be squarefree")
            # squarefree nonconstant f makes y^m - f absolutely irreducible
            return
        if self.tag != "general":
            raise InconsistentInput("unknown class tag %r" % (self.tag,))
        if len(self._field_factors()) != 1:
            raise InconsistentInput("polynomial factors over the base field")
        # absolute irreducibility for general models is certified later by
        # monodromy transitivity; over-K irreducibility is checked here

    # -- sympy bridge

    def _symbols(self):
        return sympy.Symbol("x"), sympy.Symbol("y")

    def to_sympy(self):
        key = "poly"
        if key not in self._sym_cache:
            x, y = self._symbols()
            th = self.field.sympy_root()
            expr = sympy.Integer(0)
            for j, cx in enumerate(self.ycoeffs):
                for i, c in enumerate(cx):
                    if not c.is_zero():
                        co = sympy.Integer(0)
                        for k, q in enumerate(c.coords):
                            if q != 0:
                                co += sympy.Rational(q.numerator, q.denominator) * th ** k
                        expr += co * x ** i * y ** j
            self._sym_cache[key] = sympy.expand(expr)
        return self._sym_cache[key]

    def _field_factors(self):
        x, y = self._symbols()
        expr = self.to_sympy()
        if self.field.is_rational:
            p = sympy.Poly(expr, x, y)
        else:
            p = sympy.Poly(expr, x, y, extension=self.field.sympy_root())
        _, factors = p.factor_list()
        return [f for f, _ in factors if f.total_degree() >= 1]

    def discriminant_x_values(self):
        """Exact roots (as K-polynomial factors) of disc_y P and lead coeff.

        Returns a list of (irreducible K-poly ascending coeffs, root balls).
        """
        key = "disc"
        if key in self._sym_cache:
            return self._sym_cache[key]
        x, y = self._symbols()
        expr = self.to_sympy()
        th = None if self.field.is_rational else self.field.sympy_root()
        py = sympy.Poly(expr, y)
        disc = sympy.discriminant(py.as_expr(), y)
        lead = self.ycoeffs[self.deg_y]
        # multiply in the leading coefficient's own roots
        target = sympy.expand(disc)
        out = []
        seen = set()
        for poly_expr in [target]:
            if poly_expr == 0:
                raise DegenerateConfiguration("vanishing discriminant in y")
            if th is None:
                fl = sympy.Poly(poly_expr, x).factor_list()
            else:
                fl = sympy.Poly(poly_expr, x, extension=th).factor_list()
            for f, _m in fl[1]:
                if f.degree() < 1:
                    continue
                cs = _sym_to_fieldpoly(self.field, f, x)
                keyt = tuple((tuple(c.coords)) for c in cs)
                if keyt in seen:
                    continue
                seen.add(keyt)
                out.append(cs)
        if fpoly.degree(lead) >= 1:
            # fiber degenerates where the leading y-coefficient vanishes
            if th is None:
                fl = sympy.Poly(_fieldpoly_to_sym(self.field, lead, x), x).factor_list()
            else:
                fl = sympy.Poly(
                    _fieldpoly_to_sym(self.field, lead, x), x, extension=th
                ).factor_list()
            for f, _m in fl[1]:
                if f.degree() < 1:
                    continue
                cs = _sym_to_fieldpoly(self.field, f, x)
                keyt = tuple((tuple(c.coords)) for c in cs)
                if keyt not in seen:
                    seen.add(keyt)
                    out.append(cs)
        self._sym_cache[key] = out
        return out

    # -- basic evaluation

    def eval_ball(self, xb, yb, prec):
        acc = ComplexBall.zero(prec)
        for cx in reversed(self.ycoeffs):
            acc = acc.mul(yb).add(fpoly.eval_ball(cx, xb, prec))
        return acc

    def dy_ball(self, xb, yb, prec):
        acc = ComplexBall.zero(prec)
        for j in range(self.deg_y, 0, -1):
            acc = acc.mul(yb).add(
                fpoly.eval_ball(self.ycoeffs[j], xb, prec).mul(
                    ComplexBall.from_int(j, prec)
                )
            )
        return acc

    def y_coeffs_at(self, x0):
        """Specialize the y-polynomial at an exact x0."""
        return fpoly.trim(
            [fpoly.eval_alg(self.field, c, x0) for c in self.ycoeffs]
        )

    def lift_to(self, L, lift):
        # irreducibility over the extension is not re-checked; supported
        # tags are absolutely irreducible, general ones are certified later
        yc = [[lift(c) for c in cx] for cx in self.ycoeffs]
        return CurveComponent(L, yc, tag=self.tag, checked=True)

    def __repr__(self):
        return "CurveComponent(deg_y=%d, tag=%s)" % (self.deg_y, self.tag)


def _fieldpoly_to_sym(field, cs, x):
    th = None if field.is_rational else field.sympy_root()
    expr = sympy.Integer(0)
    for i, c in enumerate(cs):
        if c.is_zero():
            continue
        if th is None:
            co = sympy.Rational(c.coords[0].numerator, c.coords[0].denominator)
        else:
            co = sympy.Integer(0)
            for k, q in enumerate(c.coords):
                if q != 0:
                    co += sympy.Rational(q.numerator, q.denominator) * th ** k
        expr += co * x ** i
    return expr


def _sym_to_fieldpoly(field, poly, x):
    """sympy univariate poly (over QQ or QQ<gen>) to an fpoly list."""
    from ..algnum import _expr_to_elem

    cs = poly.all_coeffs()
    cs.reverse()
    if field.is_rational:
        return fpoly.trim(
            [field.element(Fraction(sympy.Rational(c).p, sympy.Rational(c).q)) for c in cs]
        )
    return fpoly.trim([_expr_to_elem(sympy.sympify(c), field) for c in cs])


class PlaneCurve:
    def __init__(self, components):
        assert components
        self.components = list(components)
        self.field = components[0].field
        for c in components:
            assert c.field is self.field, "one ambient field per curve"

    def lift_to(self, L, lift):
        return PlaneCurve([c.lift_to(L, lift) for c in self.components])


# ---------------------------------------------------------------------------
# places


def _alg_key(a):
    """Hashable identity of an algebraic number, stable across conjugate
    field constructions; the value's own minimal polynomial plus a fixed
    root index, so representation in a larger field cannot split it.
    Plain rationals key the same way a rational field element would."""
    if isinstance(a, (int, Fraction)):
        return ("q", Fraction(a))
    return a.identity_key()


class Place:
    """A point of the smooth proper model, identified by exact data.

    kind: "finite" (y exact), "finite_ball" (y isolated by factor + ball),
    "ram" (finite ramified), "inf" (over x = infinity).
    """

    __slots__ = ("comp", "x", "y", "kind", "e", "idx", "ybranch", "data",
                 "_key")

    def __init__(self, comp, x, y, kind, e, idx, ybranch=None, data=None):
        self.comp = comp
        self.x = x
        self.y = y
        self.kind = kind
        self.e = e
        self.idx = idx
        self.ybranch = ybranch
        self.data = data or {}
        self._key = None

    def key(self):
        if self._key is not None:
            return self._key
        if is_infinite(self.x):
            xk = "inf"
        else:
            xk = _alg_key(self.x)
        if self.y is not None:
            yk = _alg_key(self.y)
        else:
            yk = ("idx", self.idx)
        self._key = (self.comp, xk, yk, self.kind)
        return self._key

    def __eq__(self, other):
        if not isinstance(other, Place):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def to_json(self):
        out = {"component": self.comp}
        out["x"] = "inf" if is_infinite(self.x) else self.x.to_json()
        if self.y is not None:
            out["y"] = self.y.to_json()
        elif self.ybranch is not None:
            out["y"] = {"branch": self.ybranch.to_json()}
        return out

    def __repr__(self):
        return "Place(comp=%d, x=%r, y=%r, kind=%s, e=%d)" % (
            self.comp,
            self.x,
            self.y,
            self.kind,
            self.e,
        )


def places_over(curve, comp_idx, x0):
    """All places of the smooth model lying over x = x0 (or INF)."""
    comp = curve.components[comp_idx]
    K = comp.field
    if comp.deg_y == 1:
        if is_infinite(x0):
            return [Place(comp_idx, INF, None, "inf", 1, 0)]
        num, den = fpoly.neg(comp.ycoeffs[0]), comp.ycoeffs[1]
        d = fpoly.eval_alg(K, den, x0)
        if d.is_zero():
            # y runs to infinity over x0; still one place of the model
            return [Place(comp_idx, x0, None, "finite_ball", 1, 0)]
        yv = fpoly.eval_alg(K, num, x0).div(d)
        return [Place(comp_idx, x0, yv, "finite", 1, 0)]

    shape = comp._superelliptic_shape()
    if shape is None:
        return _places_general(curve, comp_idx, x0)
    m, f = shape
    if is_infinite(x0):
        return _places_superelliptic_infinity(comp_idx, K, m, f)
    fx = fpoly.eval_alg(K, f, x0)
    if fx.is_zero():
        return [Place(comp_idx, x0, K.zero(), "ram", m, 0)]
    return _fiber_places(comp_idx, K, m, fx, x0)


def _fiber_places(comp_idx, K, m, fx, x0):
    """Places with y^m = fx (a nonzero field element), unramified."""
    places = []
    idx = 0
    for mp_cs, root_ball, exact in _roots_of_binomial(K, m, fx):
        if exact is not None:
            places.append(Place(comp_idx, x0, exact, "finite", 1, idx))
        else:
            places.append(
                Place(
                    comp_idx, x0, None, "finite_ball", 1, idx,
                    ybranch=root_ball, data={"factor": mp_cs},
                )
            )
        idx += 1
    assert len(places) == m
    return places


def _roots_of_binomial(K, m, a):
    """Roots of y^m = a: list of (K-factor coeffs, ball, exact-or-None)."""
    y = sympy.Symbol("y")
    th = None if K.is_rational else K.sympy_root()
    if K.is_rational:
        q = a.as_rational()
        expr = y ** m - sympy.Rational(q.numerator, q.denominator)
        fl = sympy.Poly(expr, y).factor_list()
    else:
        co = sympy.Integer(0)
        for k, qq in enumerate(a.coords):
            if qq != 0:
                co += sympy.Rational(qq.numerator, qq.denominator) * th ** k
        expr = y ** m - co
        fl = sympy.Poly(expr, y, extension=th).factor_list()
    out = []
    prec = 128
    for fpart, _mult in fl[1]:
        cs = _sym_to_fieldpoly(K, fpart, y)
        cs = fpoly.monic(K, cs)
        if len(cs) == 2:
            out.append((cs, cs[0].neg().embed(prec), cs[0].neg()))
            continue
        balls = _roots_of_fieldpoly(K, cs, prec)
        for b in balls:
            out.append((cs, b, None))
    return out


def _roots_of_fieldpoly(K, cs, prec):
    cb = [c.embed(prec) for c in cs]
    return isolate_roots(cb, prec)


def _places_superelliptic_infinity(comp_idx, K, m, f):
    from math import gcd

    n = fpoly.degree(f)
    d = gcd(m, n)
    lc = f[-1]
    if d == m:
        # unramified at infinity: one place per m-th root of the leading coeff
        places = []
        idx = 0
        for mp_cs, ball, exact in _roots_of_binomial(K, m, lc):
            if exact is not None:
                places.append(
                    Place(comp_idx, INF, None, "inf", 1, idx,
                          data={"c": exact, "n_over_m": n // m})
                )
            else:
                places.append(
                    Place(comp_idx, INF, None, "inf", 1, idx,
                          ybranch=ball, data={"factor": mp_cs, "n_over_m": n // m})
                )
            idx += 1
        return places
    if d == 1:
        return [Place(comp_idx, INF, None, "inf", m, 0)]
    raise UnsupportedClass(
        "infinity with gcd(m, deg f) strictly between 1 and m is not supported"
    )


def _places_general(curve, comp_idx, x0):
    """Smooth unramified finite points of a general model only."""
    comp = curve.components[comp_idx]
    K = comp.field
    if is_infinite(x0):
        raise UnsupportedClass("places over infinity need genus0 or superelliptic")
    spec = comp.y_coeffs_at(x0)
    if fpoly.degree(spec) != comp.deg_y:
        raise UnsupportedClass("degenerate fiber on a general model")
    if not fpoly.is_squarefree(K, spec):
        raise UnsupportedClass("ramified fiber on a general model")
    y = sympy.Symbol("y")
    th = None if K.is_rational else K.sympy_root()
    expr = _fieldpoly_to_sym(K, spec, y)
    if K.is_rational:
        fl = sympy.Poly(expr, y).factor_list()
    else:
        fl = sympy.Poly(expr, y, extension=th).factor_list()
    places = []
    idx = 0
    prec = 128
    for fpart, _m in fl[1]:
        cs = fpoly.monic(K, _sym_to_fieldpoly(K, fpart, y))
        if len(cs) == 2:
            places.append(Place(comp_idx, x0, cs[0].neg(), "finite", 1, idx))
            idx += 1
        else:
            for b in _roots_of_fieldpoly(K, cs, prec):
                places.append(
                    Place(comp_idx, x0, None, "finite_ball", 1, idx,
                          ybranch=b, data={"factor": cs})
                )
                idx += 1
    return places


def place_y_ball(curve, place, prec):
    """A ball containing the y-coordinate (finite kinds only)."""
    if place.y is not None:
        return place.y.embed(prec)
    if place.ybranch is None:
        raise UnsupportedClass("place has no y data")
    cs = place.data.get("factor")
    if cs is None:
        return place.ybranch.at_prec(prec)
    from ..arith import refine_root

    cb = [c.embed(prec) for c in cs]
    return refine_root(cb, place.ybranch.at_prec(max(prec, place.ybranch.prec)), prec)


def exact_place_field(curve, place):
    """(L, lift, x_L, y_L): exact coordinates, extending the field if needed."""
    comp = curve.components[place.comp]
    K = comp.field
    if is_infinite(place.x):
        raise UnsupportedClass("exact coordinates make sense for finite places")
    if place.y is not None:
        return K, (lambda e: e), place.x, place.y
    cs = place.data.get("factor")
    if cs is None:
        raise UnsupportedClass("place carries no algebraic y description")
    L, root, lift = adjoin_root(K, cs, place.ybranch)
    return L, lift, lift(place.x), root


# ---------------------------------------------------------------------------
# divisors


class Divisor:
    """Finite formal sum of places; weights rational or algebraic."""

    def __init__(self, weights=None):
        self.weights = dict(weights or {})
        self._clean()

    def _clean(self):
        drop = [p for p, w in self.weights.items() if _weight_is_zero(w)]
        for p in drop:
            del self.weights[p]

    def add(self, other):
        out = dict(self.weights)
        for p, w in other.weights.items():
            out[p] = _weight_add(out.get(p), w)
        return Divisor(out)

    def neg(self):
        return Divisor({p: _weight_neg(w) for p, w in self.weights.items()})

    def sub(self, other):
        return self.add(other.neg())

    def scale(self, s):
        return Divisor({p: _weight_scale(w, s) for p, w in self.weights.items()})

    def support(self):
        return list(self.weights)

    def degree(self, comp=None):
        total = None
        for p, w in self.weights.items():
            if comp is not None and p.comp != comp:
                continue
            total = w if total is None else _weight_add(total, w)
        return total if total is not None else Fraction(0)

    def is_integral(self):
        return all(
            isinstance(w, int) or (isinstance(w, Fraction) and w.denominator == 1)
            for w in self.weights.values()
        )

    def multiplicity(self, place):
        return self.weights.get(place, Fraction(0))

    def __repr__(self):
        return "Divisor(%r)" % (self.weights,)


def _weight_is_zero(w):
    if isinstance(w, AlgebraicNumber):
        return w.is_zero()
    return w == 0


def _weight_add(a, b):
    if a is None:
        return b
    if isinstance(a, AlgebraicNumber) or isinstance(b, AlgebraicNumber):
        if not isinstance(a, AlgebraicNumber):
            a, b = b, a
        return a.add(b if not isinstance(b, AlgebraicNumber) else b)
    return Fraction(a) + Fraction(b)


def _weight_neg(a):
    if isinstance(a, AlgebraicNumber):
        return a.neg()
    return -a


def _weight_scale(a, s):
    if isinstance(a, AlgebraicNumber):
        return a.mul(s)
    return Fraction(a) * Fraction(s)


# ---------------------------------------------------------------------------
# function-field elements


class FFElem:
    """sum_j coords[j](x) y^j on a fixed component, j < deg_y P."""

    __slots__ = ("comp", "coords")

    def __init__(self, comp, coords):
        self.comp = comp
        m = max(1, comp.deg_y)
        cs = list(coords)
        assert len(cs) <= m or all(c.is_zero() for c in cs[m:])
        cs = cs[:m]
        while len(cs) < m:
            cs.append(RatFunc(comp.field, []))
        self.coords = cs

    @staticmethod
    def const(comp, c):
        f = comp.field
        return FFElem(comp, [RatFunc.const(f, c)])

    @staticmethod
    def x(comp):
        return FFElem(comp, [RatFunc.x(comp.field)])

    @staticmethod
    def y(comp):
        f = comp.field
        if comp.deg_y == 1:
            # y is itself rational in x
            return FFElem(
                comp,
                [RatFunc(f, fpoly.neg(comp.ycoeffs[0]), comp.ycoeffs[1])],
            )
        z = RatFunc(f, [])
        return FFElem(comp, [z, RatFunc.const(f, 1)])

    @staticmethod
    def from_ratfunc(comp, rf):
        return FFElem(comp, [rf])

    def is_zero(self):
        return all(c.is_zero() for c in self.coords)

    def add(self, other):
        other = self._coerce(other)
        return FFElem(
            self.comp, [a.add(b) for a, b in zip(self.coords, other.coords)]
        )

    def sub(self, other):
        return self.add(self._coerce(other).neg())

    def neg(self):
        return FFElem(self.comp, [c.neg() for c in self.coords])

    def mul(self, other):
        other = self._coerce(other)
        f = self.comp.field
        m = max(1, self.comp.deg_y)
        prod = [RatFunc(f, []) for _ in range(2 * m - 1)]
        for i, a in enumerate(self.coords):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coords):
                if not b.is_zero():
                    prod[i + j] = prod[i + j].add(a.mul(b))
        return FFElem(self.comp, _reduce_ypowers(self.comp, prod))

    def inverse(self):
        if self.is_zero():
            raise DivisionByZero("function-field element is zero")
        comp = self.comp
        f = comp.field
        if comp.deg_y == 1:
            return FFElem(comp, [self.coords[0].inverse()])
        pcs = [RatFunc(f, c) for c in comp.ycoeffs]
        g, s = _ratpoly_halfxgcd(list(self.coords), pcs, f)
        assert len(g) == 1 and not g[0].is_zero(), "element shares a factor with P"
        ginv = g[0].inverse()
        s = [c.mul(ginv) for c in s]
        return FFElem(comp, _reduce_ypowers(comp, s))

    def div(self, other):
        return self.mul(self._coerce(other).inverse())

    def pow(self, n):
        if n < 0:
            return self.inverse().pow(-n)
        out = FFElem.const(self.comp, 1)
        base = self
        while n:
            if n & 1:
                out = out.mul(base)
            n >>= 1
            if n:
                base = base.mul(base)
        return out

    def dx_total(self):
        """Total derivative with respect to x: f_x + f_y * y'.

        y' = -P_x/P_y on the curve.
        """
        comp = self.comp
        f = comp.field
        fx = FFElem(comp, [c.derivative() for c in self.coords])
        if comp.deg_y == 1:
            return fx
        fy = FFElem(
            comp,
            [
                self.coords[j].mul(RatFunc.const(f, j))
                for j in range(1, len(self.coords))
            ],
        )
        if fy.is_zero():
            return fx
        px = FFElem(
            comp,
            _reduce_ypowers(
                comp, [RatFunc(f, fpoly.derivative(f, c)) for c in comp.ycoeffs]
            ),
        )
        py_list = [
            RatFunc(f, comp.ycoeffs[j]).mul(RatFunc.const(f, j))
            for j in range(1, comp.deg_y + 1)
        ]
        py = FFElem(comp, _reduce_ypowers(comp, py_list))
        yprime = px.div(py).neg()
        return fx.add(fy.mul(yprime))

    def eval_ball(self, xb, yb, prec):
        acc = ComplexBall.zero(prec)
        for c in reversed(self.coords):
            acc = acc.mul(yb).add(c.eval_ball(xb, prec))
        return acc

    def eval_place_exact(self, x0, y0):
        f = self.comp.field
        acc = f.zero()
        for c in reversed(self.coords):
            acc = acc.mul(y0).add(c.eval_alg(x0))
        return acc

    def common_denominator(self):
        """(numerators per y-power as fpoly lists, shared denominator)."""
        f = self.comp.field
        den = [f.one()]
        for c in self.coords:
            g = fpoly.gcd(f, den, c.den)
            q, _ = fpoly.divmod_poly(f, c.den, g)
            den = fpoly.mul(f, den, q)
        nums = []
        for c in self.coords:
            q, r = fpoly.divmod_poly(f, den, c.den)
            assert not r
            nums.append(fpoly.mul(f, c.num, q))
        return nums, den

    def _coerce(self, v):
        if isinstance(v, FFElem):
            assert v.comp is self.comp
            return v
        if isinstance(v, RatFunc):
            return FFElem(self.comp, [v])
        return FFElem.const(self.comp, v)

    def equals(self, other):
        return self.sub(self._coerce(other)).is_zero()

    def lift_to(self, new_comp, lift):
        f = new_comp.field
        out = []
        for c in self.coords:
            out.append(
                RatFunc(f, [lift(v) for v in c.num], [lift(v) for v in c.den])
            )
        return FFElem(new_comp, out)

    def __repr__(self):
        return "FFElem(%r)" % (self.coords,)


def _reduce_ypowers(comp, coords):
    """Reduce a y-power list modulo P, top down; exact."""
    f = comp.field
    m = comp.deg_y
    lead_inv = RatFunc(f, comp.ycoeffs[m]).inverse()
    work = list(coords)
    while len(work) > m:
        top = work.pop()
        if top.is_zero():
            continue
        factor = top.mul(lead_inv)
        k = len(work) - m
        for j in range(m):
            work[k + j] = work[k + j].sub(factor.mul(RatFunc(f, comp.ycoeffs[j])))
    while len(work) < m:
        work.append(RatFunc(f, []))
    return work


def _ratpoly_trim(p):
    while p and p[-1].is_zero():
        p.pop()
    return p


def _ratpoly_halfxgcd(a, b, field):
    """gcd and the Bezout coefficient of a: (g, s) with s*a = g mod b."""
    zero = RatFunc(field, [])
    one = RatFunc.const(field, 1)
    r0, r1 = _ratpoly_trim(list(a)), _ratpoly_trim(list(b))
    s0, s1 = [one], []
    while r1:
        q, r = _ratpoly_divmod(r0, r1, field)
        r0, r1 = r1, r
        s0, s1 = s1, _ratpoly_sub(s0, _ratpoly_mul(q, s1, field), field)
    return r0, s0


def _ratpoly_divmod(a, b, field):
    a = _ratpoly_trim(list(a))
    b = _ratpoly_trim(list(b))
    assert b
    q = [RatFunc(field, []) for _ in range(max(1, len(a) - len(b) + 1))]
    inv = b[-1].inverse()
    while True:
        _ratpoly_trim(a)
        if len(a) < len(b):
            break
        k = len(a) - len(b)
        fac = a[-1].mul(inv)
        q[k] = q[k].add(fac)
        for i in range(len(b)):
            a[k + i] = a[k + i].sub(fac.mul(b[i]))
        a.pop()
    return _ratpoly_trim(q), _ratpoly_trim(a)


def _ratpoly_mul(a, b, field):
    if not a or not b:
        return []
    out = [RatFunc(field, []) for _ in range(len(a) + len(b) - 1)]
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            if not y.is_zero():
                out[i + j] = out[i + j].add(x.mul(y))
    return _ratpoly_trim(out)


def _ratpoly_sub(a, b, field):
    n = max(len(a), len(b))
    zero = RatFunc(field, [])
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else zero
        y = b[i] if i < len(b) else zero
        out.append(x.sub(y))
    return _ratpoly_trim(out)


class Differential:
    """omega = f dx per component (f an FFElem)."""

    def __init__(self, parts):
        # parts: dict comp_idx -> FFElem
        self.parts = dict(parts)

    @staticmethod
    def on(comp_idx, f):
        return Differential({comp_idx: f})

    def part(self, comp_idx):
        return self.parts.get(comp_idx)

    def add(self, other):
        out = dict(self.parts)
        for k, v in other.parts.items():
            out[k] = v if k not in out else out[k].add(v)
        return Differential(out)

    def scale_elem(self, c):
        return Differential({k: v.mul(c) for k, v in self.parts.items()})

    def neg(self):
        return Differential({k: v.neg() for k, v in self.parts.items()})

    def is_zero(self):
        return all(v.is_zero() for v in self.parts.values())
