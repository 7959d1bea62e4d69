"""Gauss-Legendre rules with certified nodes and a max-modulus tail bound.

Nodes are roots of the Legendre polynomial: float seeds from the Tricomi
estimate are polished by float Newton, then every positive node is
certified and refined by interval Newton. All evaluation goes through
the three-term recurrence, never expanded coefficients: those grow like
2^n and their cancellation would swamp any fixed working precision,
while recurrence values stay of order one. Negative nodes mirror
positive ones (P_n is even or odd), and each weight
2 / ((1 - x^2) P_n'(x)^2) is a ball evaluated at the node.

The error of the n-point rule is controlled through a Bernstein ellipse.
If the integrand extends analytically to E_rho with modulus at most M,
its Chebyshev coefficients are bounded by 2 M rho^-k; the rule is exact
through degree 2n - 1, it has positive weights summing to 2, and the
integral itself is bounded the same way on the truncated tail, so

    |I - Q_n| <= 8 M rho^(-2n) / (1 - 1/rho).

Rules are cached per (n, prec): node certification is the expensive
step and every straight piece at the same precision reuses it.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import gmpy2
from gmpy2 import mpfr

from ..arith import ComplexBall
from ..errors import NonSimpleRoot, PrecisionExhausted

_RU = gmpy2.context(precision=53, round=gmpy2.RoundUp)
_RD = gmpy2.context(precision=53, round=gmpy2.RoundDown)

# admissible node counts, geometric-ish so the cache stays small
NODE_LADDER = (4, 6, 8, 12, 16, 24, 32, 48, 64, 96, 128,
               192, 256, 384, 512, 768, 1024)


@lru_cache(maxsize=None)
def legendre_coeffs(n):
    """Exact ascending coefficients of P_n via the three-term recurrence."""
    p0 = [Fraction(1)]
    if n == 0:
        return p0
    p1 = [Fraction(0), Fraction(1)]
    for k in range(2, n + 1):
        # k P_k = (2k - 1) x P_{k-1} - (k - 1) P_{k-2}
        nxt = [Fraction(0)] + [c * (2 * k - 1) for c in p1]
        for i, c in enumerate(p0):
            nxt[i] -= (k - 1) * c
        p0, p1 = p1, [c / k for c in nxt]
    return p1


def _float_pn(n, x):
    p0, p1 = 1.0, x
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    return p1, n * (x * p1 - p0) / (x * x - 1.0)


def _float_seeds(n):
    """Newton-polished float approximations of the positive roots of P_n."""
    import math

    out = []
    # Tricomi's estimate indexes roots from the right
    for k in range(1, n // 2 + 1):
        th = math.pi * (4 * k - 1) / (4 * n + 2)
        x = (1.0 - (n - 1) / (8.0 * n ** 3)) * math.cos(th)
        for _ in range(40):
            p, dp = _float_pn(n, x)
            step = p / dp
            x -= step
            if abs(step) < 1e-15:
                break
        out.append(x)
    return sorted(out)


def _pn_dpn(n, xb, prec):
    """(P_n, P_n') at a near-point ball interior to (-1, 1).

    Running the recurrence over a wide ball compounds the interval excess
    exponentially in n, so callers keep xb essentially a point and add an
    explicit curvature term for whatever radius they actually carry.
    """
    p0 = ComplexBall.one(prec)
    p1 = xb
    for k in range(2, n + 1):
        a = ComplexBall.from_rational(Fraction(2 * k - 1, k), 0, prec)
        c = ComplexBall.from_rational(Fraction(k - 1, k), 0, prec)
        p0, p1 = p1, a.mul(xb).mul(p1).sub(c.mul(p0))
    nn = ComplexBall.from_rational(n, 0, prec)
    den = xb.mul(xb).sub(ComplexBall.one(prec))
    return p1, nn.mul(xb.mul(p1).sub(p0)).div(den)


def _curvature_bound(n, r):
    """Upper bound for sup |P_n''| within distance r of [-1, 1].

    P_n has nonnegative Chebyshev coefficients summing to P_n(1) = 1, so
    |P_n| <= rho^n on the Bernstein ellipse E_rho. Cauchy's estimate on
    disks of radius R = 2^-ceil(2 lg n) then bounds the second derivative
    by 2 rho^n / R^2 once E_rho covers the (2r + R)-neighborhood, which
    holds for rho = 1 + sqrt(2s + s^2) with s = 2r + R.
    """
    R = mpfr(2) ** -(2 * (n - 1).bit_length())
    s = _RU.add(_RU.mul(mpfr(2), mpfr(r)), R)
    rho = _RU.add(mpfr(1), _RU.sqrt(_RU.add(_RU.mul(mpfr(2), s),
                                            _RU.mul(s, s))))
    m_up = _RU.pow(rho, n)
    return _RU.div(_RU.mul(mpfr(2), m_up), _RD.mul(R, R))


def _contains_ball(outer, inner):
    ca = ComplexBall(inner.re, inner.im, mpfr(0), inner.prec)
    cb = ComplexBall(outer.re, outer.im, mpfr(0), outer.prec)
    shift = ca.sub(cb).abs_upper()
    return _RU.add(shift, inner.rad) <= outer.rad


def _slope_ball(n, mid, r, prec):
    """Enclosure of P_n' over the ball of radius r about mid, and P_n(mid)."""
    pm, dpm = _pn_dpn(n, mid, prec)
    pad = _RU.mul(_curvature_bound(n, r), mpfr(r))
    dp = ComplexBall(dpm.re, dpm.im, _RU.add(dpm.rad, pad), prec)
    return pm, dp


def _certify_node(n, seed, prec):
    """Interval-Newton contraction of a float seed to a prec-bit node ball.

    The starting radius leaves two orders of headroom over the 1e-14 or
    so accuracy of a polished float seed while keeping the curvature pad
    below the interior slope scale sqrt(n), which the crude sup bound
    times n^4 would otherwise overwhelm near n of a few hundred.
    """
    x = ComplexBall(mpfr(seed, prec), mpfr(0, prec), mpfr("1e-12"), prec)
    contracted = False
    for _ in range(prec):
        mid = ComplexBall(x.re, x.im, mpfr(0), prec)
        pm, dp = _slope_ball(n, mid, x.rad, prec)
        if not dp.excludes_zero():
            break
        nxt = mid.sub(pm.div(dp))
        if not _contains_ball(x, nxt):
            break
        contracted = True
        if nxt.rad >= _RD.mul(x.rad, mpfr("0.5")):
            return nxt
        x = nxt
    if not contracted:
        raise NonSimpleRoot("Legendre node seed failed to contract")
    return x


def _rule_tables(n, prec):
    # interval recurrences lose up to lg(1 + sqrt 2) bits of radius per
    # step, so build the whole table high and round the results down
    wp = prec + (n * 131) // 100 + 64
    pos = [_certify_node(n, seed, wp) for seed in _float_seeds(n)]
    if n % 2:
        pos.insert(0, ComplexBall.zero(wp))
    nodes = [b.neg() for b in reversed(pos[1 if n % 2 else 0:])] + pos
    assert len(nodes) == n, "lost a Legendre node"
    two = ComplexBall.from_rational(2, 0, wp)
    one = ComplexBall.one(wp)
    weights = []
    for b in nodes:
        mid = ComplexBall(b.re, b.im, mpfr(0), wp)
        _, dp = _slope_ball(n, mid, b.rad, wp)
        w = two.div(one.sub(b.mul(b)).mul(dp).mul(dp))
        lo, _ = w.real_interval()
        assert lo > 0, "Gauss weight not certified positive"
        weights.append(w)
    return ([b.at_prec(prec) for b in nodes],
            [w.at_prec(prec) for w in weights])


_rule_cache = {}


def legendre_rule(n, prec):
    """(nodes, weights) of the n-point rule, ascending, certified balls."""
    key = (n, prec)
    got = _rule_cache.get(key)
    if got is None:
        got = _rule_tables(n, prec)
        _rule_cache[key] = got
    return got


def error_factor(rho, n):
    """Upper bound for 8 rho^(-2n) / (1 - 1/rho); multiply by M."""
    num, den = mpfr(rho.numerator), mpfr(rho.denominator)
    # round every intermediate so the final quotient stays an upper bound
    grow = _RD.pow(_RD.div(num, den), 2 * n)
    gap = _RD.sub(mpfr(1), _RU.div(den, num))
    return _RU.div(mpfr(8), _RD.mul(gap, grow))


def pick_node_count(m_bound, rho, tol):
    """Smallest admissible n with the certified error below tol, or None."""
    if not m_bound > 0:
        return NODE_LADDER[0], mpfr(0)
    for n in NODE_LADDER:
        err = _RU.mul(error_factor(rho, n), m_bound)
        if err <= tol:
            return n, err
    return None


def subdivision_floor(prec):
    """Pieces shorter than this fraction of the path stop subdividing."""
    del prec
    return Fraction(1, 1 << 44)


__all__ = [
    "NODE_LADDER",
    "error_factor",
    "legendre_coeffs",
    "legendre_rule",
    "pick_node_count",
    "subdivision_floor",
    "PrecisionExhausted",
]
