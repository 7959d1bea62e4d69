"""Complex ball arithmetic on top of gmpy2 (MPFR/MPC).

A ball is a dyadic complex center plus a non-negative dyadic radius. Every
operation returns a ball containing the exact image of every point of the
input balls (inclusion monotonicity). Center arithmetic is done twice, in
round-down and round-up contexts; since MPC rounds componentwise this
brackets the true center and the bracket width is added to the radius, so
no ulp bookkeeping is ever trusted implicitly.

Radius arithmetic always rounds up (53 bits is plenty for an error bound).
"""

from __future__ import annotations

from fractions import Fraction

import gmpy2
from gmpy2 import mpfr, mpc, mpz

from ..errors import DivisionByZero, PrecisionExhausted

DEFAULT_PREC = 128

# radius contexts: fixed low precision, directed rounding
_RU = gmpy2.context(precision=53, round=gmpy2.RoundUp)
_RD = gmpy2.context(precision=53, round=gmpy2.RoundDown)

_ctx_cache = {}


def _ctx(prec, rnd):
    key = (prec, rnd)
    ctx = _ctx_cache.get(key)
    if ctx is None:
        ctx = gmpy2.context(precision=prec, round=rnd, allow_complex=True)
        _ctx_cache[key] = ctx
    return ctx


def _up(prec):
    return _ctx(prec, gmpy2.RoundUp)


def _dn(prec):
    return _ctx(prec, gmpy2.RoundDown)


def _nearest(prec):
    return _ctx(prec, gmpy2.RoundToNearest)


def _fr_to_mpfr_pair(q, prec):
    # bracket a Fraction between two mpfr values
    num = mpfr(q.numerator, prec + 8)
    den = mpfr(q.denominator, prec + 8)
    lo = _dn(prec).div(num, den)
    hi = _up(prec).div(num, den)
    return lo, hi


def _hull_radius(lo, hi):
    # upper bound for hi - lo >= 0; no coercion, the context rounds the result
    return _RU.sub(hi, lo)


def _mneg(x):
    # Python unary minus on an mpfr rounds to the active context; this doesn't
    return gmpy2.context(precision=max(x.precision, 2)).minus(x)


def _mabs(x):
    return x if x >= 0 else _mneg(x)


def _abs_diff_upper(a, b):
    # upper bound for |a - b|: bracket the difference, take the worse endpoint
    dlo = _RD.sub(a, b)
    dhi = _RU.sub(a, b)
    return max(abs(dlo), abs(dhi))


def _abs_diff_lower(a, b):
    dlo = _RD.sub(a, b)
    dhi = _RU.sub(a, b)
    if dlo <= 0 <= dhi:
        return mpfr(0)
    return min(abs(dlo), abs(dhi))


def _box_abs_upper(lo, hi):
    # upper bound for |z| over the component box [lo, hi]
    return _RU.hypot(max(_mabs(lo.real), _mabs(hi.real)),
                     max(_mabs(lo.imag), _mabs(hi.imag)))


class ComplexBall:
    """Immutable complex ball: center (re, im) at `prec` bits, radius `rad`."""

    __slots__ = ("re", "im", "rad", "prec")

    def __init__(self, re, im, rad, prec):
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)
        object.__setattr__(self, "rad", rad)
        object.__setattr__(self, "prec", prec)
        assert rad >= 0 and gmpy2.is_finite(rad), "radius must be finite and >= 0"
        assert gmpy2.is_finite(re) and gmpy2.is_finite(im)

    def __setattr__(self, *args):
        raise AttributeError("ComplexBall is immutable")

    # ------------------------------------------------------------------
    # construction

    @staticmethod
    def from_rational(re, im=0, prec=DEFAULT_PREC):
        re = Fraction(re)
        im = Fraction(im)
        rlo, rhi = _fr_to_mpfr_pair(re, prec)
        ilo, ihi = _fr_to_mpfr_pair(im, prec)
        rad = _RU.add(_hull_radius(rlo, rhi), _hull_radius(ilo, ihi))
        return ComplexBall(rhi, ihi, rad, prec)

    @staticmethod
    def from_int(n, prec=DEFAULT_PREC):
        return ComplexBall.from_rational(Fraction(n), Fraction(0), prec)

    @staticmethod
    def exact_dyadic(re, im, prec=DEFAULT_PREC):
        # re, im already mpfr values representable at prec
        return ComplexBall(mpfr(re, prec), mpfr(im, prec), mpfr(0), prec)

    @staticmethod
    def from_mpc_bracket(lo, hi, extra_rad, prec):
        rad = _RU.add(
            _RU.add(_hull_radius(lo.real, hi.real), _hull_radius(lo.imag, hi.imag)),
            mpfr(extra_rad),
        )
        return ComplexBall(hi.real, hi.imag, rad, prec)

    @staticmethod
    def zero(prec=DEFAULT_PREC):
        return ComplexBall(mpfr(0, prec), mpfr(0, prec), mpfr(0), prec)

    @staticmethod
    def one(prec=DEFAULT_PREC):
        return ComplexBall(mpfr(1, prec), mpfr(0, prec), mpfr(0), prec)

    # ------------------------------------------------------------------
    # views

    def mid(self):
        # precision= keeps the stored components bit for bit; a bare mpc()
        # would re-round them under the ambient 53 bit context
        return mpc(self.re, self.im, precision=self.prec)

    def __repr__(self):
        return "ball(%s + %s j, rad=%s, prec=%d)" % (
            self.re.__format__(".12g"),
            self.im.__format__(".12g"),
            self.rad.__format__(".3g"),
            self.prec,
        )

    def abs_upper(self):
        return _RU.add(_RU.hypot(self.re, self.im), self.rad)

    def abs_lower(self):
        lo = _RD.sub(_RD.hypot(self.re, self.im), self.rad)
        return lo if lo > 0 else mpfr(0)

    def real_interval(self):
        return _RD.sub(self.re, self.rad), _RU.add(self.re, self.rad)

    def imag_interval(self):
        return _RD.sub(self.im, self.rad), _RU.add(self.im, self.rad)

    def contains_zero(self):
        return _RD.hypot(self.re, self.im) <= self.rad

    def excludes_zero(self):
        return _RD.hypot(self.re, self.im) > self.rad

    def contains_rational(self, qre, qim=0):
        """Certified: the exact rational point lies in this ball."""
        p = max(self.prec, 64) + 32
        q = ComplexBall.from_rational(qre, qim, p)
        # distance from our center to the exact point, rounded up
        d = _RU.add(
            _RU.hypot(_abs_diff_upper(self.re, q.re), _abs_diff_upper(self.im, q.im)),
            q.rad,
        )
        return d <= self.rad

    def contains_ball(self, other):
        """Certified: other is a subset of self."""
        d = _RU.hypot(
            _abs_diff_upper(self.re, other.re), _abs_diff_upper(self.im, other.im)
        )
        return _RU.add(d, other.rad) <= self.rad

    def is_disjoint(self, other):
        d = _RD.hypot(
            _abs_diff_lower(self.re, other.re), _abs_diff_lower(self.im, other.im)
        )
        return d > _RU.add(self.rad, other.rad)

    def overlaps(self, other):
        return not self.is_disjoint(other)

    def diameter_le(self, bound):
        return _RU.mul(self.rad, mpfr(2)) <= bound

    # ------------------------------------------------------------------
    # arithmetic

    def _bin(self, other, opname, rad_bound):
        prec = max(self.prec, other.prec)
        a, b = self.mid(), other.mid()
        lo = getattr(_dn(prec), opname)(a, b)
        hi = getattr(_up(prec), opname)(a, b)
        return ComplexBall.from_mpc_bracket(lo, hi, rad_bound, prec)

    def add(self, other):
        other = as_ball(other, self.prec)
        return self._bin(other, "add", _RU.add(self.rad, other.rad))

    def sub(self, other):
        other = as_ball(other, self.prec)
        return self._bin(other, "sub", _RU.add(self.rad, other.rad))

    def mul(self, other):
        # (c1 + r1 D)(c2 + r2 D) lies in c1 c2 + (|c1| r2 + |c2| r1 + r1 r2) D,
        # so the cross terms want the centre magnitudes, not abs_upper
        other = as_ball(other, self.prec)
        ca = _RU.hypot(self.re, self.im)
        cb = _RU.hypot(other.re, other.im)
        r = _RU.add(
            _RU.add(_RU.mul(ca, other.rad), _RU.mul(cb, self.rad)),
            _RU.mul(self.rad, other.rad),
        )
        return self._bin(other, "mul", r)

    def neg(self):
        return ComplexBall(_mneg(self.re), _mneg(self.im), self.rad, self.prec)

    def conj(self):
        return ComplexBall(self.re, _mneg(self.im), self.rad, self.prec)

    def inverse(self):
        m = self.abs_lower()
        if not m > 0:
            raise DivisionByZero("ball contains zero")
        prec = self.prec
        lo = _dn(prec).div(mpc(1), self.mid())
        hi = _up(prec).div(mpc(1), self.mid())
        # |1/z - 1/c| <= r / (|c| (|c| - r)) for |z - c| <= r < |c|;
        # m is already a lower bound for |c| - r
        clo = _RD.hypot(self.re, self.im)
        prop = _RU.div(self.rad, _RD.mul(clo, m))
        return ComplexBall.from_mpc_bracket(lo, hi, prop, prec)

    def div(self, other):
        other = as_ball(other, self.prec)
        return self.mul(other.inverse())

    def mul_2exp(self, k):
        prec = self.prec
        c = _nearest(prec).mul_2exp(self.mid(), k) if k >= 0 else _nearest(prec).div_2exp(self.mid(), -k)
        r = _RU.mul_2exp(self.rad, k) if k >= 0 else _RU.div_2exp(self.rad, -k)
        return ComplexBall(c.real, c.imag, r, prec)

    def mul_i(self):
        # exact multiplication by i
        return ComplexBall(_mneg(self.im), self.re, self.rad, self.prec)

    def pow_int(self, n):
        if n < 0:
            return self.inverse().pow_int(-n)
        result = ComplexBall.one(self.prec)
        base = self
        while n:
            if n & 1:
                result = result.mul(base)
            base = base.mul(base) if n > 1 else base
            n >>= 1
        return result

    def exp(self):
        prec = self.prec
        lo = _dn(prec).exp(self.mid())
        hi = _up(prec).exp(self.mid())
        # |e^z - e^c| <= |e^c| (e^r - 1), |e^c| bounded over the bracket box
        mag = _box_abs_upper(lo, hi)
        prop = _RU.mul(mag, _RU.expm1(self.rad))
        return ComplexBall.from_mpc_bracket(lo, hi, prop, prec)

    def _check_off_cut(self):
        ilo, ihi = self.imag_interval()
        if ilo <= 0 <= ihi:
            rlo, _ = self.real_interval()
            if not rlo > 0:
                raise PrecisionExhausted(
                    "ball meets the branch cut (-inf, 0]; refine before log/sqrt"
                )
        if not self.abs_lower() > 0:
            raise PrecisionExhausted("ball contains zero; no log/sqrt")

    def log(self):
        """Principal branch; ball must avoid the cut (-inf, 0] entirely."""
        self._check_off_cut()
        prec = self.prec
        lo = _dn(prec).log(self.mid())
        hi = _up(prec).log(self.mid())
        m = self.abs_lower()
        mm = _RD.sub(m, self.rad)
        if not mm > 0:
            raise PrecisionExhausted("log: radius as large as modulus")
        # |log z - log c| <= -log(1 - r/|c|) <= r / (|c| - r)
        prop = _RU.div(self.rad, mm)
        return ComplexBall.from_mpc_bracket(lo, hi, prop, prec)

    def sqrt(self):
        self._check_off_cut()
        half = self.log().mul_2exp(-1)
        return half.exp()

    def root_n(self, n):
        """Principal n-th root, ball off the cut."""
        self._check_off_cut()
        lg = self.log()
        scaled = lg.mul(ComplexBall.from_rational(Fraction(1, n), 0, self.prec))
        return scaled.exp()

    # operator sugar (ball op ball, ball op int/Fraction)

    __add__ = add
    __sub__ = sub
    __mul__ = mul
    __truediv__ = div
    __neg__ = neg

    def __radd__(self, other):
        return as_ball(other, self.prec).add(self)

    def __rsub__(self, other):
        return as_ball(other, self.prec).sub(self)

    def __rmul__(self, other):
        return as_ball(other, self.prec).mul(self)

    def __rtruediv__(self, other):
        return as_ball(other, self.prec).div(self)

    # ------------------------------------------------------------------
    # precision management

    def at_prec(self, prec):
        if prec == self.prec:
            return self
        c = _nearest(prec).add(self.mid(), mpc(0))
        # re-rounding the center may move it by at most one ulp each component
        slack = _RU.add(
            _hull_radius(_dn(prec).add(self.re, mpfr(0)), _up(prec).add(self.re, mpfr(0))),
            _hull_radius(_dn(prec).add(self.im, mpfr(0)), _up(prec).add(self.im, mpfr(0))),
        )
        return ComplexBall(c.real, c.imag, _RU.add(self.rad, slack), prec)

    def hull(self, other):
        prec = max(self.prec, other.prec)
        c = _nearest(prec).div(_nearest(prec).add(self.mid(), other.mid()), mpfr(2))
        r1 = _RU.add(
            _RU.hypot(_abs_diff_upper(c.real, self.re), _abs_diff_upper(c.imag, self.im)),
            self.rad,
        )
        r2 = _RU.add(
            _RU.hypot(_abs_diff_upper(c.real, other.re), _abs_diff_upper(c.imag, other.im)),
            other.rad,
        )
        return ComplexBall(c.real, c.imag, max(r1, r2), prec)

    def widen(self, extra):
        return ComplexBall(self.re, self.im, _RU.add(self.rad, mpfr(extra)), self.prec)

    # ------------------------------------------------------------------
    # serialization (bit exact)

    def to_json(self):
        return {
            "re": _dyadic_to_hex(self.re),
            "im": _dyadic_to_hex(self.im),
            "rad": _dyadic_to_hex(self.rad),
            "prec": self.prec,
        }

    @staticmethod
    def from_json(d):
        prec = int(d["prec"])
        return ComplexBall(
            _dyadic_from_hex(d["re"], prec),
            _dyadic_from_hex(d["im"], prec),
            _dyadic_from_hex(d["rad"], 53),
            prec,
        )


def as_ball(v, prec=DEFAULT_PREC):
    if isinstance(v, ComplexBall):
        return v
    if isinstance(v, (int, Fraction)):
        return ComplexBall.from_rational(Fraction(v), 0, prec)
    if isinstance(v, complex):
        return ComplexBall.from_rational(Fraction(v.real), Fraction(v.imag), prec)
    if isinstance(v, tuple) and len(v) == 2:
        return ComplexBall.from_rational(Fraction(v[0]), Fraction(v[1]), prec)
    raise TypeError("cannot coerce %r to ComplexBall" % (v,))


def _dyadic_to_hex(x):
    if x == 0:
        return "0x0p0"
    m, e = x.as_mantissa_exp()
    m = int(m)
    e = int(e)
    # canonical form: odd mantissa, so the string is storage independent
    while m % 2 == 0:
        m >>= 1
        e += 1
    sign = "-" if m < 0 else ""
    return "%s0x%xp%d" % (sign, abs(m), e)


def _dyadic_from_hex(s, prec):
    s = s.strip()
    sign = 1
    if s.startswith("-"):
        sign = -1
        s = s[1:]
    mant, _, exp = s.partition("p")
    m = int(mant, 16) * sign
    e = int(exp)
    need = max(prec, m.bit_length() + 4, 53)
    ctx = _nearest(need)
    val = mpfr(m, need)
    # power-of-two scaling is exact at this precision
    return ctx.mul_2exp(val, e) if e >= 0 else ctx.div_2exp(val, -e)


# ---------------------------------------------------------------------------
# constants


def pi_ball(prec):
    lo = _dn(prec).const_pi()
    hi = _up(prec).const_pi()
    return ComplexBall(hi, mpfr(0, prec), _hull_radius(lo, hi), prec)


def two_pi_i_ball(prec):
    return pi_ball(prec).mul_2exp(1).mul_i()


# ---------------------------------------------------------------------------
# integer extraction


def _integers_in(lo, hi):
    """Integers in the closed real interval [lo, hi] (mpfr endpoints)."""
    if lo > hi:
        return []
    a = int(gmpy2.ceil(lo))
    b = int(gmpy2.floor(hi))
    if b - a > 4:
        return [a, a + 1, a + 2, b]  # representative sample; count is what matters
    return list(range(a, b + 1))


def unique_integer_in(ball):
    """The unique real integer in the ball, or None.

    Returns n iff the ball contains exactly one Gaussian integer and its
    imaginary part is 0. Absence (None) covers both "no integer" and
    "more than one integer".
    """
    rlo, rhi = ball.real_interval()
    ilo, ihi = ball.imag_interval()
    res = _integers_in(rlo, rhi)
    ims = _integers_in(ilo, ihi)
    if len(res) == 1 and len(ims) == 1 and ims[0] == 0:
        return res[0]
    return None


def unique_integer_vector(balls):
    """Apply unique_integer_in componentwise; None if any component fails."""
    out = []
    for b in balls:
        n = unique_integer_in(b)
        if n is None:
            return None
        out.append(n)
    return out
