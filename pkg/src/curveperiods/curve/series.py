"""Truncated Laurent series over a NumberField, plus place expansions.

A Series knows the exact coefficients of t^k for offset <= k < trunc and
nothing beyond; every operation computes the correct window of its result,
so truncation is never silently trusted. Exact inputs (polynomials) are
entered with the working window and zero padding.
"""

from __future__ import annotations

from math import ceil, log2

from ..errors import DivisionByZero, ExpansionOrderExceeded


class Series:
    __slots__ = ("field", "offset", "coeffs", "trunc")

    def __init__(self, field, offset, coeffs, trunc):
        self.field = field
        self.offset = offset
        self.coeffs = list(coeffs)
        self.trunc = trunc
        assert trunc - offset == len(self.coeffs)

    @staticmethod
    def constant(field, c, T):
        c = field.element(c)
        return Series(field, 0, [c] + [field.zero()] * (T - 1), T)

    @staticmethod
    def variable(field, T):
        cs = [field.zero()] * T
        if T > 1:
            cs[1] = field.one()
        return Series(field, 0, cs, T)

    @staticmethod
    def monomial(field, k, T_above):
        """t^k, known up to t^(k + T_above)."""
        cs = [field.zero()] * T_above
        cs[0] = field.one()
        return Series(field, k, cs, k + T_above)

    @staticmethod
    def zero(field, trunc):
        return Series(field, trunc, [], trunc)

    def coeff(self, k):
        """Exact coefficient of t^k; requires k < trunc."""
        if k >= self.trunc:
            raise ExpansionOrderExceeded(
                "coefficient %d beyond window (trunc %d)" % (k, self.trunc)
            )
        if k < self.offset:
            return self.field.zero()
        return self.coeffs[k - self.offset]

    def valuation(self):
        """Exponent of the first nonzero known coefficient, or None."""
        for i, c in enumerate(self.coeffs):
            if not c.is_zero():
                return self.offset + i
        return None

    def strip(self):
        i = 0
        while i < len(self.coeffs) and self.coeffs[i].is_zero():
            i += 1
        return Series(self.field, self.offset + i, self.coeffs[i:], self.trunc)

    def is_zero_window(self):
        return self.valuation() is None

    def add(self, other):
        f = self.field
        off = min(self.offset, other.offset)
        trunc = min(self.trunc, other.trunc)
        if trunc <= off:
            return Series.zero(f, trunc)
        out = []
        for k in range(off, trunc):
            a = self.coeffs[k - self.offset] if self.offset <= k < self.trunc else f.zero()
            b = other.coeffs[k - other.offset] if other.offset <= k < other.trunc else f.zero()
            out.append(a.add(b))
        return Series(f, off, out, trunc)

    def neg(self):
        return Series(self.field, self.offset, [c.neg() for c in self.coeffs], self.trunc)

    def sub(self, other):
        return self.add(other.neg())

    def scale(self, s):
        s = self.field.element(s)
        return Series(self.field, self.offset, [c.mul(s) for c in self.coeffs], self.trunc)

    def mul(self, other):
        f = self.field
        a = self.strip()
        b = other.strip()
        va = a.offset  # valuation if nonzero; else a.trunc, which is honest
        vb = b.offset
        trunc = min(va + b.trunc, vb + a.trunc)
        off = va + vb
        if trunc <= off or not a.coeffs or not b.coeffs:
            return Series.zero(f, trunc)
        out = [f.zero()] * (trunc - off)
        for i, x in enumerate(a.coeffs):
            if x.is_zero():
                continue
            for j, y in enumerate(b.coeffs):
                k = i + j
                if k >= trunc - off:
                    break
                if not y.is_zero():
                    out[k] = out[k].add(x.mul(y))
        return Series(f, off, out, trunc)

    def mul_tpow(self, k):
        return Series(self.field, self.offset + k, self.coeffs, self.trunc + k)

    def inverse(self):
        f = self.field
        a = self.strip()
        v = a.valuation()
        if v is None:
            raise DivisionByZero("inverting a series that is zero to truncation")
        width = a.trunc - v
        lead = a.coeffs[0]
        lead_inv = lead.inverse()
        # u = 1 - a / (lead t^v); then 1/a = lead_inv t^-v (1 + u + u^2 + ...)
        u = [c.mul(lead_inv).neg() for c in a.coeffs[1:]]
        inv = [f.zero()] * width
        inv[0] = f.one()
        acc = [f.one()] + [f.zero()] * (width - 1)
        for _ in range(width - 1):
            nxt = [f.zero()] * width
            for i, x in enumerate(acc):
                if x.is_zero():
                    continue
                for j, y in enumerate(u):
                    k = i + j + 1
                    if k < width:
                        nxt[k] = nxt[k].add(x.mul(y))
            acc = nxt
            if all(c.is_zero() for c in acc):
                break
            for k in range(width):
                inv[k] = inv[k].add(acc[k])
        out = [c.mul(lead_inv) for c in inv]
        return Series(f, -v, out, -v + width)

    def div(self, other):
        return self.mul(other.inverse())

    def pow(self, n):
        assert n >= 0
        result = None
        base = self
        while n:
            if n & 1:
                result = base if result is None else result.mul(base)
            n >>= 1
            if n:
                base = base.mul(base)
        if result is None:
            return Series.constant(self.field, 1, max(1, self.trunc))
        return result

    def derivative(self):
        f = self.field
        out = []
        for k in range(self.offset, self.trunc):
            c = self.coeffs[k - self.offset]
            out.append(c.mul(f.element(k)))
        # the t^0 term of the source contributes nothing; drop exponent by one
        return Series(f, self.offset - 1, out, self.trunc - 1).strip()

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coeffs[:6]):
            if not c.is_zero():
                terms.append("%r t^%d" % (c, self.offset + i))
        return "Series(%s + O(t^%d))" % (" + ".join(terms) or "0", self.trunc)


def eval_poly(field, coeffs, s, T):
    """Polynomial (AlgebraicNumber list, ascending) at a series argument.

    T is the working window for constants; with a Laurent argument the
    result window shrinks accordingly, so pass T inflated by |offset|*deg.
    """
    acc = Series.constant(field, 0, T)
    for c in reversed(coeffs):
        acc = acc.mul(s).add(Series.constant(field, c, T))
    return acc


def eval_ratfunc(rf, s, T):
    num = eval_poly(rf.field, rf.num, s, T) if rf.num else Series.zero(rf.field, T)
    den = eval_poly(rf.field, rf.den, s, T)
    return num.div(den)


def one_plus_root(w, m, T):
    """Series S with S^m = 1 + w, S(0) = 1; w must have positive valuation."""
    f = w.field
    v = w.valuation()
    assert v is None or v >= 1, "tail must vanish at t=0"
    one = Series.constant(f, 1, T)
    target = one.add(w)
    s = one
    minv = f.element(m).inverse()
    steps = ceil(log2(max(2, T))) + 2
    for _ in range(steps):
        # Newton: s <- s - (s^m - target) / (m s^(m-1))
        sm1 = s.pow(m - 1)
        err = sm1.mul(s).sub(target)
        if err.is_zero_window():
            break
        s = s.sub(err.mul(sm1.inverse()).scale(minv))
    assert s.pow(m).sub(target).is_zero_window(), "root iteration did not converge"
    return s


def hensel_y_series(field, ycoeffs_at, y0, T):
    """Solve P(y(t)) = 0 with y(0) = y0, given the y-coefficients as series.

    ycoeffs_at: list of Series (the x-dependence already substituted),
    y0: exact simple root of the t=0 specialization.
    """
    y = Series.constant(field, y0, T)
    steps = ceil(log2(max(2, T))) + 2
    dcoeffs = [
        ycoeffs_at[i].scale(field.element(i)) for i in range(1, len(ycoeffs_at))
    ]
    for _ in range(steps):
        val = _series_horner(field, ycoeffs_at, y, T)
        if val.is_zero_window():
            break
        dval = _series_horner(field, dcoeffs, y, T)
        y = y.sub(val.mul(dval.inverse()))
    val = _series_horner(field, ycoeffs_at, y, T)
    if not val.is_zero_window():
        raise ExpansionOrderExceeded("Newton did not reach the window")
    return y


def _series_horner(field, coeff_series, s, T):
    acc = Series.constant(field, 0, T)
    for c in reversed(coeff_series):
        acc = acc.mul(s).add(c)
    return acc


def newton_invert_branch(field, fcoeffs, x0, m, T):
    """x(t) with f(x(t)) = t^m and x(0) = x0, where f(x0) = 0 simply.

    Used at finite ramified places of y^m = f(x): there y = t is the local
    parameter and x - x0 has valuation m.
    """
    df = [fcoeffs[i].mul(field.element(i)) for i in range(1, len(fcoeffs))]
    tm = Series.monomial(field, m, T)
    x = Series.constant(field, x0, T + m)
    steps = ceil(log2(max(2, T))) + 3
    for _ in range(steps):
        fx = eval_poly(field, fcoeffs, x, T + m)
        err = fx.sub(tm)
        if err.is_zero_window():
            break
        dfx = eval_poly(field, df, x, T + m)
        x = x.sub(err.mul(dfx.inverse()))
    assert eval_poly(field, fcoeffs, x, T + m).sub(tm).is_zero_window()
    return x
