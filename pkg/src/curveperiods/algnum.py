"""Exact algebraic numbers with certified complex embeddings.

An element lives in a declared number field Q[x]/(f) and stores rational
power-basis coordinates, so equality and arithmetic are exact. The field
carries one complex ball isolating the chosen root of f; embeddings of
elements at any working precision come from refining that ball.

Heavy exact machinery (factorization over Q, primitive elements,
resultants, characteristic polynomials) is delegated to sympy.
"""

from __future__ import annotations

from fractions import Fraction

import sympy
from sympy import QQ as _SQQ

from .arith import ComplexBall, as_ball, eval_ball_poly, isolate_roots, lll_reduce, refine_root
from .errors import (
    DivisionByZero,
    InconsistentInput,
    PrecisionExhausted,
    ReducibleMinpoly,
)

_x = sympy.Symbol("x")


def _to_fraction(r):
    # sympy Rational and gmpy2 mpq spell their fields differently
    if isinstance(r, Fraction):
        return r
    if hasattr(r, "p"):
        return Fraction(int(r.p), int(r.q))
    return Fraction(int(r.numerator), int(r.denominator))


def _monic(coeffs):
    lead = coeffs[-1]
    assert lead != 0
    if lead == 1:
        return list(coeffs)
    return [c / lead for c in coeffs]


def _int_primitive(coeffs):
    """Clear denominators, divide by content: primitive integer poly."""
    from math import gcd

    den = 1
    for c in coeffs:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in coeffs]
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g > 1:
        ints = [v // g for v in ints]
    return ints


def _sym_poly(coeffs):
    return sympy.Poly(list(reversed(_int_primitive(coeffs))), _x)


def is_irreducible(coeffs):
    """Exact irreducibility over Q (degree >= 1)."""
    poly = _sym_poly(coeffs)
    _, factors = poly.factor_list()
    return len(factors) == 1 and factors[0][1] == 1


def poly_fractions(sym_poly):
    """Ascending Fraction coefficients of a sympy univariate poly."""
    cs = [_to_fraction(sympy.Rational(c)) for c in sym_poly.all_coeffs()]
    cs.reverse()
    return cs


class NumberField:
    """Q[x]/(minpoly) with one fixed complex root as the embedding."""

    def __init__(self, minpoly, gen_ball, check=True):
        self.minpoly = tuple(_monic([Fraction(c) for c in minpoly]))
        self.degree = len(self.minpoly) - 1
        assert self.degree >= 1
        if check and self.degree > 1 and not is_irreducible(list(self.minpoly)):
            raise ReducibleMinpoly("field polynomial factors over Q")
        self._gen_cache = {}
        if self.degree == 1:
            # the single root is exact: x - c
            c = -self.minpoly[0]
            self._gen_exact = c
        else:
            self._gen_exact = None
            b = refine_root(self._mp_balls(gen_ball.prec), gen_ball, gen_ball.prec)
            self._gen_cache[gen_ball.prec] = b
        self._sym_root = None
        self._sym_base = None
        self._sym_scale = None

    def _mp_balls(self, prec):
        return [ComplexBall.from_rational(c, 0, prec) for c in self.minpoly]

    def generator(self, prec):
        """Ball isolating the field generator, radius about 2^-prec."""
        if self._gen_exact is not None:
            return ComplexBall.from_rational(self._gen_exact, 0, prec)
        b = self._gen_cache.get(prec)
        if b is None:
            start = self._gen_cache[max(self._gen_cache)]
            b = refine_root(self._mp_balls(prec + 16), start, prec)
            self._gen_cache[prec] = b
        return b

    @property
    def is_rational(self):
        return self.degree == 1

    def zero(self):
        return AlgebraicNumber(self, [Fraction(0)] * self.degree)

    def one(self):
        return AlgebraicNumber(self, [Fraction(1)] + [Fraction(0)] * (self.degree - 1))

    def gen(self):
        if self.degree == 1:
            return AlgebraicNumber(self, [self._gen_exact])
        coords = [Fraction(0)] * self.degree
        coords[1] = Fraction(1)
        return AlgebraicNumber(self, coords)

    def element(self, value):
        """Coerce an int, Fraction or AlgebraicNumber of this field."""
        if isinstance(value, AlgebraicNumber):
            if value.field is self:
                return value
            if value.field.minpoly == self.minpoly:
                return AlgebraicNumber(self, value.coords)
            raise InconsistentInput("element belongs to a different field")
        q = Fraction(value)
        coords = [q] + [Fraction(0)] * (self.degree - 1)
        return AlgebraicNumber(self, coords)

    def sympy_root(self):
        """The generator as a sympy expression, matched against our ball.

        CRootOf rescales imprimitive polynomials, so the result is either a
        bare CRootOf or rational * CRootOf; the bare root and the scale are
        kept separately for coordinate extraction.
        """
        if self._sym_root is not None:
            return self._sym_root
        if self.degree == 1:
            self._sym_root = sympy.Rational(self._gen_exact)
            self._sym_base = self._sym_root
            self._sym_scale = sympy.Integer(1)
            return self._sym_root
        poly = _sym_poly(list(self.minpoly))
        target = self.generator(96)
        idx = _match_rootof_index(poly, target)
        root = sympy.CRootOf(poly, idx)
        if isinstance(root, sympy.CRootOf):
            scale, base = sympy.Integer(1), root
        else:
            scale, base = root.as_coeff_Mul()
            assert isinstance(base, sympy.CRootOf) and scale.is_Rational
        self._sym_root = root
        self._sym_base = base
        self._sym_scale = scale
        return self._sym_root

    def sympy_base_root(self):
        """The bare CRootOf underlying sympy_root, plus its rational scale;
        generator = scale * base."""
        self.sympy_root()
        return self._sym_base, self._sym_scale

    def canonical_index(self):
        """Index of the generator among the minpoly roots in sympy's fixed
        root ordering; distinguishes conjugate constructions exactly."""
        if self.degree == 1:
            return 0
        self.sympy_root()
        return self._sym_base.index

    def __repr__(self):
        return "NumberField(deg %d)" % self.degree


def _match_rootof_index(sym_poly, ball):
    """Which CRootOf index lands inside the given isolating ball."""
    deg = sym_poly.degree()
    digits = 30
    while digits <= 4000:
        hits = []
        for k in range(deg):
            v = sympy.CRootOf(sym_poly, k).evalf(digits)
            re = Fraction(str(sympy.re(v)))
            im = Fraction(str(sympy.im(v)))
            # evalf is accurate to roughly its digit count; pad generously
        # the pad must dominate evalf error yet stay below root separation
            pad = Fraction(1, 10 ** (digits - 5))
            approx = ComplexBall.from_rational(re, im, ball.prec).widen(float(pad))
            if approx.overlaps(ball):
                hits.append(k)
        if len(hits) == 1:
            return hits[0]
        digits *= 2
    raise PrecisionExhausted("cannot match sympy root order to the embedding")


rational_field = NumberField([0, 1], ComplexBall.zero(64), check=False)


class AlgebraicNumber:
    """Element of a NumberField, exact power-basis coordinates."""

    __slots__ = ("field", "coords", "_ident")

    def __init__(self, field, coords):
        self.field = field
        cs = [Fraction(c) for c in coords]
        assert len(cs) == field.degree
        self.coords = tuple(cs)
        self._ident = None

    def identity_key(self):
        """Hashable identity of the value itself, independent of which
        field construction carries it: own minimal polynomial plus the
        root's index in sympy's fixed ordering."""
        if self._ident is None:
            if self.is_rational():
                self._ident = ("q", self.coords[0])
            else:
                mp, ball = minpoly_of(self)
                idx = _match_rootof_index(_sym_poly(mp), ball)
                self._ident = (tuple(mp), idx)
        return self._ident

    def is_zero(self):
        return all(c == 0 for c in self.coords)

    def is_rational(self):
        return all(c == 0 for c in self.coords[1:])

    def as_rational(self):
        assert self.is_rational()
        if self.field.degree == 1 and self.field._gen_exact != 0:
            # degree-1 field with nonzero generator: coords are plain values
            return self.coords[0]
        return self.coords[0]

    def equals(self, other):
        other = self.field.element(other)
        return self.coords == other.coords

    # ------------------------------------------------------------------
    # arithmetic (exact, mod the field polynomial)

    def add(self, other):
        other = self.field.element(other)
        return AlgebraicNumber(
            self.field, [a + b for a, b in zip(self.coords, other.coords)]
        )

    def sub(self, other):
        other = self.field.element(other)
        return AlgebraicNumber(
            self.field, [a - b for a, b in zip(self.coords, other.coords)]
        )

    def neg(self):
        return AlgebraicNumber(self.field, [-a for a in self.coords])

    def mul(self, other):
        other = self.field.element(other)
        d = self.field.degree
        prod = [Fraction(0)] * (2 * d - 1)
        for i, a in enumerate(self.coords):
            if a == 0:
                continue
            for j, b in enumerate(other.coords):
                if b != 0:
                    prod[i + j] += a * b
        return AlgebraicNumber(self.field, _reduce_mod(prod, self.field.minpoly))

    def inverse(self):
        if self.is_zero():
            raise DivisionByZero("algebraic number is exactly zero")
        if self.is_rational():
            inv = [Fraction(1) / self.coords[0]] + [Fraction(0)] * (self.field.degree - 1)
            return AlgebraicNumber(self.field, inv)
        g, s, _ = _poly_xgcd(list(self.coords), list(self.field.minpoly))
        # g is a nonzero constant since minpoly is irreducible
        assert len(g) == 1 and g[0] != 0
        s = [c / g[0] for c in s]
        s = s[: self.field.degree] + [Fraction(0)] * max(0, self.field.degree - len(s))
        return AlgebraicNumber(self.field, _reduce_mod(s, self.field.minpoly))

    def div(self, other):
        other = self.field.element(other)
        return self.mul(other.inverse())

    def pow(self, n):
        if n < 0:
            return self.inverse().pow(-n)
        result = self.field.one()
        base = self
        while n:
            if n & 1:
                result = result.mul(base)
            n >>= 1
            if n:
                base = base.mul(base)
        return result

    __add__ = add
    __sub__ = sub
    __mul__ = mul
    __truediv__ = div
    __neg__ = neg
    __pow__ = pow

    def __radd__(self, other):
        return self.field.element(other).add(self)

    def __rsub__(self, other):
        return self.field.element(other).sub(self)

    def __rmul__(self, other):
        return self.field.element(other).mul(self)

    def __rtruediv__(self, other):
        return self.field.element(other).div(self)

    def __eq__(self, other):
        if isinstance(other, AlgebraicNumber):
            if other.field is not self.field and other.field.minpoly != self.field.minpoly:
                return NotImplemented
            return self.coords == other.coords
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coords[0] == Fraction(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.field.minpoly, self.coords))

    def __repr__(self):
        return "alg(%s)" % (list(self.coords),)

    # ------------------------------------------------------------------

    def embed(self, prec):
        """Complex ball containing the true value, radius shrinking in prec."""
        if self.is_rational():
            return ComplexBall.from_rational(self.coords[0], 0, prec)
        wp = prec + 8 + 2 * self.field.degree
        g = self.field.generator(wp)
        acc = ComplexBall.zero(wp)
        for c in reversed(self.coords):
            acc = acc.mul(g).add(ComplexBall.from_rational(c, 0, wp))
        return acc.at_prec(prec)

    def to_sympy(self):
        th = self.field.sympy_root()
        expr = sympy.Integer(0)
        for i, c in enumerate(self.coords):
            if c != 0:
                expr += sympy.Rational(c.numerator, c.denominator) * th ** i
        return expr

    def to_json(self):
        mp, ball = minpoly_of(self)
        return {
            "minpoly": [[c.numerator, c.denominator] for c in mp],
            "approx": ball.to_json(),
        }


def _reduce_mod(coeffs, minpoly):
    """Polynomial remainder mod the monic field polynomial, exact."""
    d = len(minpoly) - 1
    work = list(coeffs)
    for i in range(len(work) - 1, d - 1, -1):
        c = work[i]
        if c != 0:
            for j in range(d):
                work[i - d + j] -= c * minpoly[j]
        work.pop()
    while len(work) < d:
        work.append(Fraction(0))
    return work


def _poly_trim(p):
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(a, b):
    a = _poly_trim(list(a))
    b = _poly_trim(list(b))
    assert b, "division by zero polynomial"
    q = [Fraction(0)] * max(1, len(a) - len(b) + 1)
    inv_lead = Fraction(1) / b[-1]
    while True:
        _poly_trim(a)
        if len(a) < len(b):
            break
        k = len(a) - len(b)
        f = a[-1] * inv_lead
        q[k] += f
        for i in range(len(b)):
            a[k + i] -= f * b[i]
        a.pop()
    return _poly_trim(q), _poly_trim(a)


def _poly_xgcd(a, b):
    """Extended gcd in Q[x]: returns (g, s, t) with s a + t b = g."""
    a = _poly_trim([Fraction(c) for c in a])
    b = _poly_trim([Fraction(c) for c in b])
    r0, r1 = a, b
    s0, s1 = [Fraction(1)], []
    t0, t1 = [], [Fraction(1)]
    while r1:
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        t0, t1 = t1, _poly_sub(t0, _poly_mul(q, t1))
    return r0, s0, t0


def _poly_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x != 0:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _poly_trim(out)


def _poly_sub(a, b):
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else Fraction(0)
        y = b[i] if i < len(b) else Fraction(0)
        out.append(x - y)
    return _poly_trim(out)


# ---------------------------------------------------------------------------
# minimal polynomials


def minpoly_of(a):
    """Exact minimal polynomial over Q plus an isolating ball."""
    if a.is_rational():
        q = a.coords[0]
        return [-q, Fraction(1)], ComplexBall.from_rational(q, 0, 128)
    d = a.field.degree
    # characteristic polynomial of multiplication by a on the power basis
    cols = []
    for i in range(d):
        basis = [Fraction(0)] * d
        basis[i] = Fraction(1)
        img = AlgebraicNumber(a.field, basis).mul(a)
        cols.append(img.coords)
    m = sympy.Matrix(
        d, d, lambda r, c: sympy.Rational(cols[c][r].numerator, cols[c][r].denominator)
    )
    charpoly = m.charpoly(_x)
    _, factors = sympy.Poly(charpoly.as_expr(), _x).factor_list()
    candidates = [f for f, _mult in factors if f.degree() >= 1]
    prec = 128
    while True:
        ball = a.embed(prec)
        alive = []
        for f in candidates:
            cs = poly_fractions(f)
            val = eval_ball_poly(
                [ComplexBall.from_rational(c, 0, prec) for c in cs], ball
            )
            if val.contains_zero():
                alive.append((f, cs))
        if len(alive) == 1:
            f, cs = alive[0]
            mono = _monic(cs)
            iso = refine_root(
                [ComplexBall.from_rational(c, 0, prec) for c in mono], ball, prec
            )
            return mono, iso
        if prec > 1 << 14:
            raise PrecisionExhausted("minimal polynomial selection did not separate")
        prec *= 2


# ---------------------------------------------------------------------------
# common field construction (incremental compositum)


class _RefinableRoot:
    """A root of a fixed rational polynomial, sharpened on demand."""

    def __init__(self, coeffs, ball):
        self.coeffs = list(coeffs)
        prec = max(ball.prec, 64)
        self.cache = {prec: refine_root(self._balls(prec), ball, prec)}

    def _balls(self, prec):
        return [ComplexBall.from_rational(c, 0, prec) for c in self.coeffs]

    def at(self, prec):
        b = self.cache.get(prec)
        if b is None:
            start = self.cache[max(self.cache)]
            b = refine_root(self._balls(prec + 16), start, prec)
            self.cache[prec] = b
        return b


def common_field(inputs):
    """One field containing every input; returns (field, elements).

    inputs: list of (minpoly ascending rational coeffs, isolating ComplexBall).
    The returned embeddings agree with the input balls.
    """
    prepared = []
    for mp, ball in inputs:
        cs = _monic([Fraction(c) for c in mp])
        if len(cs) - 1 >= 2 and not is_irreducible(cs):
            raise ReducibleMinpoly("input minimal polynomial factors over Q")
        prepared.append((cs, ball))

    K = rational_field
    elems = []
    for cs, ball in prepared:
        if len(cs) == 2:
            elems.append(K.element(-cs[0]))
            continue
        K, root, lift = _combine(K, cs, _RefinableRoot(cs, ball))
        elems = [lift(e) for e in elems]
        elems.append(root)
    _assert_embeddings_agree(elems, prepared, max(128, K.degree * 16))
    return K, elems


def _identity_lift(e):
    return e


def _combine(K, g, beta):
    """Smallest field over K with a root of g (irreducible over Q).

    beta: _RefinableRoot picking the intended root. Returns (L, root, lift)
    where lift embeds old K elements into L.
    """
    if K.is_rational:
        L = NumberField(g, beta.at(128), check=False)

        def lift_q(e, _L=L):
            return _L.element(e.coords[0])

        return L, L.gen(), lift_q

    inside = _root_in_field(K, g, beta)
    if inside is not None:
        return K, inside, _identity_lift

    return _extend(K, g, beta)


def _root_in_field(K, g, beta):
    """The element of K matching beta, or None if g has no root there."""
    y = sympy.Symbol("y")
    expr = sum(
        sympy.Rational(c.numerator, c.denominator) * y ** i for i, c in enumerate(g)
    )
    _, factors = sympy.Poly(expr, y, extension=K.sympy_root()).factor_list()
    cands = []
    for f, _m in factors:
        if f.degree() != 1:
            continue
        a1, a0 = f.all_coeffs()
        cands.append(_expr_to_elem(a0, K).div(_expr_to_elem(a1, K)).neg())
    if not cands:
        return None
    prec = 128
    while prec <= (1 << 14):
        target = beta.at(prec)
        alive = [c for c in cands if c.embed(prec).overlaps(target)]
        if len(alive) <= 1:
            return alive[0] if alive else None
        prec *= 2
    raise PrecisionExhausted("cannot separate candidate roots inside the field")


def _expr_to_elem(expr, K):
    """A sympy expression polynomial in K's root, as a field element."""
    expr = sympy.sympify(expr)
    if K.degree == 1:
        return K.element(_to_fraction(sympy.Rational(expr)))
    base, scale = K.sympy_base_root()
    if not expr.has(base):
        return K.element(_to_fraction(sympy.Rational(expr)))
    po = sympy.Poly(expr, base)
    cs = [_to_fraction(sympy.Rational(c)) for c in po.all_coeffs()]
    cs.reverse()
    assert len(cs) <= K.degree
    # generator = scale * base, so base^j contributes scale^-j per coordinate
    s = _to_fraction(sympy.Rational(scale))
    coords = [c / s ** j for j, c in enumerate(cs)]
    coords += [Fraction(0)] * (K.degree - len(coords))
    return AlgebraicNumber(K, coords)


def _extend(K, g, beta):
    """Proper extension: primitive element theta = beta + k * alpha."""
    t = sympy.Symbol("t")
    p = list(K.minpoly)
    p_expr = sum(
        sympy.Rational(c.numerator, c.denominator) * t ** i for i, c in enumerate(p)
    )
    for k in range(1, 13):
        shifted = sum(
            sympy.Rational(c.numerator, c.denominator) * (_x - k * t) ** i
            for i, c in enumerate(g)
        )
        res = sympy.resultant(p_expr, sympy.expand(shifted), t)
        _, factors = sympy.Poly(res, _x).factor_list()
        cands = [poly_fractions(f) for f, _m in factors if f.degree() >= 1]

        picked = _select_theta_factor(
            cands, lambda prec, _k=k: beta.at(prec).add(
                K.generator(prec).mul(ComplexBall.from_int(_k, prec))
            )
        )
        if picked is None:
            continue
        fq, theta_ball = picked
        fq = _monic(fq)
        L = NumberField(fq, theta_ball, check=False)

        # gcd(p(t), g(theta - k t)) over L is (t - alpha) for good k
        pl = [L.element(c) for c in p]
        theta = L.gen()
        gl = [L.zero()]
        lin = [theta, L.element(-k)]  # theta - k t
        powers = [[L.one()]]
        for i, c in enumerate(g):
            if i > 0:
                powers.append(_apoly_mul(powers[-1], lin, L))
            if c != 0:
                gl = _apoly_add(gl, [x.mul(L.element(c)) for x in powers[i]], L)
        d = _apoly_gcd(pl, gl, L)
        if len(d) != 2:
            continue
        alpha_L = d[0].div(d[1]).neg()
        beta_L = theta.sub(alpha_L.mul(L.element(k)))

        def lift(e, _L=L, _a=alpha_L, _K=K):
            e = _K.element(e)
            acc = _L.zero()
            for c in reversed(e.coords):
                acc = acc.mul(_a).add(_L.element(c))
            return acc

        # paranoia: the abstract construction must match the embeddings
        wp = max(128, 8 * L.degree)
        if not alpha_L.embed(wp).overlaps(K.generator(wp)):
            continue
        if not beta_L.embed(wp).overlaps(beta.at(wp)):
            continue
        return L, beta_L, lift
    raise PrecisionExhausted("no primitive element found in 12 attempts")


def _select_theta_factor(cands, ball_fn):
    """Unique candidate polynomial vanishing on the shrinking enclosure."""
    prec = 128
    while prec <= (1 << 13):
        target = ball_fn(prec)
        alive = []
        for cs in cands:
            cb = [ComplexBall.from_rational(c, 0, prec) for c in cs]
            try:
                iso = refine_root(cb, target, prec)
            except Exception:
                continue
            alive.append((cs, iso))
        if len(alive) == 1:
            return alive[0]
        if not alive:
            return None
        prec *= 2
    return None


def _apoly_trim(p):
    while p and p[-1].is_zero():
        p.pop()
    return p


def _apoly_add(a, b, L):
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else L.zero()
        y = b[i] if i < len(b) else L.zero()
        out.append(x.add(y))
    return _apoly_trim(out)


def _apoly_mul(a, b, L):
    if not a or not b:
        return []
    out = [L.zero() for _ in range(len(a) + len(b) - 1)]
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j].add(x.mul(y))
    return _apoly_trim(out)


def _apoly_gcd(a, b, L):
    """Monic gcd in L[t] by the Euclidean algorithm."""
    a = _apoly_trim(list(a))
    b = _apoly_trim(list(b))
    while b:
        inv = b[-1].inverse()
        bm = [c.mul(inv) for c in b]
        r = list(a)
        while len(r) >= len(bm):
            r = _apoly_trim(r)
            if len(r) < len(bm):
                break
            f = r[-1]
            k = len(r) - len(bm)
            for i in range(len(bm)):
                r[k + i] = r[k + i].sub(f.mul(bm[i]))
            r.pop()
        a, b = bm, _apoly_trim(r)
    if a:
        inv = a[-1].inverse()
        a = [c.mul(inv) for c in a]
    return a


def _assert_embeddings_agree(elems, prepared, prec):
    for e, (_cs, ball) in zip(elems, prepared):
        if not e.embed(prec).overlaps(ball):
            raise InconsistentInput(
                "computed embedding does not meet the input isolating ball"
            )


def to_common_field(nums):
    """Coerce a list of AlgebraicNumber (possibly mixed fields) into one field."""
    fields = {id(n.field): n.field for n in nums}
    if len(fields) == 1:
        f = nums[0].field
        return f, list(nums)
    inputs = []
    for n in nums:
        mp, ball = minpoly_of(n)
        inputs.append((mp, ball))
    return common_field(inputs)


# ---------------------------------------------------------------------------
# one-step extensions


def adjoin_root(field, coeffs, ball):
    """Adjoin a root of a polynomial with coefficients in `field`.

    coeffs: ascending, AlgebraicNumber entries (or rationals), the ball
    isolates the intended root among the roots of the polynomial. Returns
    (L, root, lift) where lift maps old field elements into L.
    """
    coeffs = [field.element(c) for c in coeffs]
    # annihilator over Q: resultant in the generator variable
    t = sympy.Symbol("t")
    y = sympy.Symbol("y")
    if field.degree == 1:
        g = sympy.Rational(field._gen_exact)
        py = sum(
            sympy.Rational(c.coords[0].numerator, c.coords[0].denominator) * y ** i
            for i, c in enumerate(coeffs)
        )
        ann = sympy.Poly(py, y)
    else:
        fpoly = sum(
            sympy.Rational(c.numerator, c.denominator) * t ** i
            for i, c in enumerate(field.minpoly)
        )
        qpoly = sympy.Integer(0)
        for i, c in enumerate(coeffs):
            ci = sum(
                sympy.Rational(cc.numerator, cc.denominator) * t ** k
                for k, cc in enumerate(c.coords)
            )
            qpoly += ci * y ** i
        ann = sympy.Poly(sympy.resultant(fpoly, qpoly, t), y)
    if ann.degree() < 1:
        raise InconsistentInput("resultant degenerated; no root to adjoin")

    _, factors = ann.factor_list()
    prec = max(128, ball.prec)
    while True:
        alive = []
        for f, _m in factors:
            if f.degree() < 1:
                continue
            cs = poly_fractions(f)
            fb = [ComplexBall.from_rational(c, 0, prec) for c in cs]
            try:
                iso = refine_root(fb, ball.at_prec(prec), prec)
            except Exception:
                continue
            alive.append((cs, iso))
        if len(alive) == 1:
            root_mp, root_ball = alive[0]
            break
        if len(alive) == 0 or prec > 1 << 14:
            raise PrecisionExhausted("cannot attribute the root to one factor")
        prec *= 2

    root_mp = _monic(root_mp)
    if len(root_mp) == 2:
        return field, field.element(-root_mp[0]), _identity_lift

    return _combine(field, root_mp, _RefinableRoot(root_mp, root_ball))


# ---------------------------------------------------------------------------
# heuristic reconstruction of an algebraic number from a ball


def guess_algebraic(ball, max_degree, prec):
    """Integer polynomial of degree <= max_degree likely vanishing at the ball.

    LLL on the lattice of (coefficient vector, scaled real/imag parts of the
    power sums). The result is a guess: the caller must certify it by exact
    means. Returns ascending int coefficients, or None.
    """
    scale = 1 << (prec - 8)
    pows = [as_ball(1, prec)]
    for _ in range(max_degree):
        pows.append(pows[-1].mul(ball))
    rows = []
    for j, p in enumerate(pows):
        row = [0] * (max_degree + 1) + [0, 0]
        row[j] = 1
        row[max_degree + 1] = _scaled_int(p.re, prec - 8)
        row[max_degree + 2] = _scaled_int(p.im, prec - 8)
        rows.append(row)
    reduced = lll_reduce(rows)
    for cand in reduced:
        coeffs = cand[: max_degree + 1]
        if all(c == 0 for c in coeffs):
            continue
        # the scaled residual must be tiny relative to the scale
        if abs(cand[max_degree + 1]) > scale >> (prec // 4):
            continue
        if abs(cand[max_degree + 2]) > scale >> (prec // 4):
            continue
        while coeffs and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        if len(coeffs) < 2:
            continue
        if coeffs[-1] < 0:
            coeffs = [-c for c in coeffs]
        return list(coeffs)
    return None


def _scaled_int(x, bits):
    import gmpy2

    # scale exactly, then round: needs enough precision for the integer part
    ctx = gmpy2.context(precision=max(x.precision + bits, 64))
    return int(gmpy2.mpz(ctx.rint(ctx.mul_2exp(x, bits))))
