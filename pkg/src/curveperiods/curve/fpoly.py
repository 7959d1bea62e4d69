"""Univariate polynomials and rational functions over a NumberField.

Polynomials are plain lists of AlgebraicNumber, ascending, trailing zeros
stripped ([] is the zero polynomial). All arithmetic is exact.
"""

from __future__ import annotations

from fractions import Fraction

from ..arith import ComplexBall
from ..errors import DivisionByZero


def trim(p):
    while p and p[-1].is_zero():
        p.pop()
    return p


def from_fractions(field, fracs):
    return trim([field.element(c) for c in fracs])


def is_zero(p):
    return not p


def degree(p):
    return len(p) - 1 if p else -1


def add(field, a, b):
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else field.zero()
        y = b[i] if i < len(b) else field.zero()
        out.append(x.add(y))
    return trim(out)


def sub(field, a, b):
    return add(field, a, neg(b))


def neg(a):
    return [c.neg() for c in a]


def scale(a, s):
    if s.is_zero():
        return []
    return [c.mul(s) for c in a]


def mul(field, a, b):
    if not a or not b:
        return []
    out = [field.zero() for _ in range(len(a) + len(b) - 1)]
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j].add(x.mul(y))
    return trim(out)


def divmod_poly(field, a, b):
    a = trim(list(a))
    b = trim(list(b))
    if not b:
        raise DivisionByZero("polynomial division by zero")
    q = [field.zero()] * max(1, len(a) - len(b) + 1)
    inv_lead = b[-1].inverse()
    while True:
        trim(a)
        if len(a) < len(b):
            break
        k = len(a) - len(b)
        f = a[-1].mul(inv_lead)
        q[k] = q[k].add(f)
        for i in range(len(b)):
            a[k + i] = a[k + i].sub(f.mul(b[i]))
        a.pop()
    return trim(q), trim(a)


def gcd(field, a, b):
    a = trim(list(a))
    b = trim(list(b))
    while b:
        _, r = divmod_poly(field, a, b)
        a, b = b, r
    if a:
        inv = a[-1].inverse()
        a = [c.mul(inv) for c in a]
    return a


def derivative(field, a):
    return trim([a[i].mul(field.element(i)) for i in range(1, len(a))])


def eval_alg(field, a, v):
    acc = field.zero()
    for c in reversed(a):
        acc = acc.mul(v).add(c)
    return acc


def eval_ball(a, ball, prec):
    acc = ComplexBall.zero(prec)
    for c in reversed(a):
        acc = acc.mul(ball).add(c.embed(prec))
    return acc


def is_squarefree(field, a):
    return len(gcd(field, a, derivative(field, a))) <= 1


def shift_pow(field, a, k):
    """a(x) * x^k for k >= 0."""
    if not a:
        return []
    return [field.zero()] * k + list(a)


def pow_linear(field, x0, n):
    """(x - x0)^n expanded."""
    out = [field.one()]
    lin = [x0.neg(), field.one()]
    for _ in range(n):
        out = mul(field, out, lin)
    return out


def order_at(field, a, x0):
    """Vanishing order of the polynomial at x = x0 (inf for zero poly)."""
    if not a:
        return None
    lin = [x0.neg(), field.one()]
    n = 0
    work = list(a)
    while True:
        q, r = divmod_poly(field, work, lin)
        if r:
            return n
        n += 1
        work = q
        if not work:
            # can only happen for the zero polynomial, excluded above
            return n


def monic(field, a):
    if not a or a[-1].equals(1):
        return list(a)
    inv = a[-1].inverse()
    return [c.mul(inv) for c in a]


def content_free(field, a):
    """Divide by the gcd of rational contents when all coeffs are rational."""
    if not a or not all(c.is_rational() for c in a):
        return list(a)
    fr = [c.as_rational() for c in a]
    from math import gcd as igcd

    num = 0
    den = 1
    for f in fr:
        num = igcd(num, f.numerator)
        den = den * f.denominator // igcd(den, f.denominator)
    if num == 0:
        return list(a)
    g = Fraction(num, den)
    return [field.element(c.as_rational() / g) for c in a]


class RatFunc:
    """num/den with den monic and gcd(num, den) = 1."""

    __slots__ = ("field", "num", "den")

    def __init__(self, field, num, den=None, normalize=True):
        self.field = field
        num = trim(list(num))
        den = trim(list(den)) if den is not None else [field.one()]
        if not den:
            raise DivisionByZero("rational function with zero denominator")
        if normalize and num:
            g = gcd(field, num, den)
            if len(g) > 1:
                num, _ = divmod_poly(field, num, g)
                den, _ = divmod_poly(field, den, g)
        if not num:
            den = [field.one()]
        elif not den[-1].equals(1):
            inv = den[-1].inverse()
            num = [c.mul(inv) for c in num]
            den = [c.mul(inv) for c in den]
        self.num = num
        self.den = den

    @staticmethod
    def const(field, c):
        return RatFunc(field, [field.element(c)], None, normalize=False)

    @staticmethod
    def x(field):
        return RatFunc(field, [field.zero(), field.one()], None, normalize=False)

    def is_zero(self):
        return not self.num

    def is_constant(self):
        return len(self.num) <= 1 and len(self.den) == 1

    def as_element(self):
        assert self.is_constant()
        return self.num[0] if self.num else self.field.zero()

    def add(self, other):
        other = self._coerce(other)
        f = self.field
        n = add(
            f, mul(f, self.num, other.den), mul(f, other.num, self.den)
        )
        return RatFunc(f, n, mul(f, self.den, other.den))

    def sub(self, other):
        return self.add(self._coerce(other).neg())

    def neg(self):
        return RatFunc(self.field, neg(self.num), self.den, normalize=False)

    def mul(self, other):
        other = self._coerce(other)
        f = self.field
        return RatFunc(
            f, mul(f, self.num, other.num), mul(f, self.den, other.den)
        )

    def inverse(self):
        if self.is_zero():
            raise DivisionByZero("rational function is zero")
        return RatFunc(self.field, self.den, self.num)

    def div(self, other):
        return self.mul(self._coerce(other).inverse())

    def derivative(self):
        f = self.field
        n = sub(
            f,
            mul(f, derivative(f, self.num), self.den),
            mul(f, self.num, derivative(f, self.den)),
        )
        return RatFunc(f, n, mul(f, self.den, self.den))

    def _coerce(self, v):
        if isinstance(v, RatFunc):
            return v
        return RatFunc.const(self.field, v)

    def equals(self, other):
        other = self._coerce(other)
        d = self.sub(other)
        return d.is_zero()

    def eval_alg(self, v):
        f = self.field
        den = eval_alg(f, self.den, v)
        if den.is_zero():
            raise DivisionByZero("pole of rational function")
        return eval_alg(f, self.num, v).div(den)

    def eval_ball(self, ball, prec):
        return eval_ball(self.num, ball, prec).div(eval_ball(self.den, ball, prec))

    def order_at(self, x0):
        """ord_{x=x0}: positive for zeros, negative for poles, None for 0."""
        if self.is_zero():
            return None
        up = order_at(self.field, self.num, x0)
        dn = order_at(self.field, self.den, x0)
        return up - dn

    def order_at_infinity(self):
        """ord_{x=inf} = deg den - deg num (None for the zero function)."""
        if self.is_zero():
            return None
        return degree(self.den) - degree(self.num)

    def __repr__(self):
        return "RatFunc(%r / %r)" % (self.num, self.den)
