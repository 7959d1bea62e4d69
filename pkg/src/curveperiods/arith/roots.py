"""Certified isolation and refinement of roots of complex polynomials.

Approximation is plain Aberth-Ehrlich iteration on midpoints; certification
is a Krawczyk test on a disk around each approximation:

    K(D) = z0 - m p(z0) + (1 - m p'(D)) (D - z0),   m = 1/p'(z0)

K(D) contained in the interior of D proves D holds exactly one (simple)
root. Coefficients are balls, so the certificates remain valid for every
polynomial inside the coefficient boxes.
"""

from __future__ import annotations

import gmpy2
from gmpy2 import mpc, mpfr

from ..errors import NonSimpleRoot, PrecisionExhausted
from .ball import ComplexBall, _RD, _RU, _abs_diff_upper, _nearest, as_ball


def eval_ball_poly(coeffs, z):
    """Horner evaluation; coeffs ascending, entries ComplexBall."""
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc.mul(z).add(c)
    return acc


def diff_ball_poly(coeffs):
    return [c.mul(ComplexBall.from_int(k, c.prec)) for k, c in enumerate(coeffs) if k >= 1]


def cauchy_root_bound(coeffs):
    """Upper bound for |root| of a ball-coefficient polynomial (leading coeff
    must exclude zero): 1 + max |a_i| / |a_n|, rounded up."""
    lead = coeffs[-1].abs_lower()
    assert lead > 0, "leading coefficient must exclude zero"
    worst = mpfr(0)
    for c in coeffs[:-1]:
        worst = max(worst, c.abs_upper())
    return _RU.add(mpfr(1), _RU.div(worst, lead))


def min_root_bound(coeffs):
    """Lower bound for |root|: 0 allowed iff constant coeff may vanish."""
    if not coeffs[0].excludes_zero():
        return mpfr(0)
    rev = list(reversed(coeffs))
    return _RD.div(mpfr(1), cauchy_root_bound(rev))


def _aberth(coeffs_mid, degree, prec, max_iter=220):
    """Aberth-Ehrlich simultaneous iteration on plain mpc midpoints."""
    ctx = _nearest(prec + 32)
    an = coeffs_mid[-1]
    radius = mpfr(1)
    for c in coeffs_mid[:-1]:
        radius = max(radius, ctx.div(abs(c), abs(an)))
    radius = ctx.add(radius, mpfr(1))

    # slightly irregular star of initial guesses breaks symmetric stalls
    zs = []
    pi = ctx.const_pi()
    for k in range(degree):
        theta = ctx.div(ctx.mul(pi, mpfr(2 * k) + mpfr("0.3711")), mpfr(degree))
        zs.append(ctx.mul(radius, mpc(ctx.cos(theta), ctx.sin(theta))))

    def p_and_dp(z):
        p = coeffs_mid[-1]
        dp = mpc(0)
        for c in reversed(coeffs_mid[:-1]):
            dp = ctx.add(ctx.mul(dp, z), p)
            p = ctx.add(ctx.mul(p, z), c)
        return p, dp

    tol = ctx.exp2(mpfr(-(prec + 8)))
    for _ in range(max_iter):
        moved = mpfr(0)
        for i in range(degree):
            p, dp = p_and_dp(zs[i])
            if dp == 0:
                zs[i] = ctx.add(zs[i], mpc(tol, tol))
                moved = mpfr(1)
                continue
            newton = ctx.div(p, dp)
            s = mpc(0)
            for j in range(degree):
                if j != i:
                    d = ctx.sub(zs[i], zs[j])
                    if d != 0:
                        s = ctx.add(s, ctx.div(mpc(1), d))
            denom = ctx.sub(mpc(1), ctx.mul(newton, s))
            step = newton if denom == 0 else ctx.div(newton, denom)
            zs[i] = ctx.sub(zs[i], step)
            moved = max(moved, abs(step))
        if moved < ctx.mul(tol, max(mpfr(1), max(abs(z) for z in zs))):
            break
    return zs


def krawczyk_test(coeffs, disk):
    """Return the Krawczyk image K(disk); caller checks containment."""
    prec = disk.prec
    z0 = ComplexBall(disk.re, disk.im, mpfr(0), prec)
    dcoeffs = diff_ball_poly(coeffs)
    p_at = eval_ball_poly(coeffs, z0)
    dp_at = eval_ball_poly(dcoeffs, z0)
    if not dp_at.excludes_zero():
        raise NonSimpleRoot("derivative vanishes at disk center")
    m = dp_at.inverse()
    dp_disk = eval_ball_poly(dcoeffs, disk)
    one = ComplexBall.one(prec)
    # (D - z0) is the centered disk of the same radius
    centered = ComplexBall(mpfr(0, prec), mpfr(0, prec), disk.rad, prec)
    k = z0.sub(m.mul(p_at)).add(one.sub(m.mul(dp_disk)).mul(centered))
    return k


def _certify_disk(coeffs, disk):
    try:
        k = krawczyk_test(coeffs, disk)
    except NonSimpleRoot:
        return None
    d = _RU.hypot(_abs_diff_upper(k.re, disk.re), _abs_diff_upper(k.im, disk.im))
    if _RU.add(d, k.rad) < disk.rad:
        return k
    return None


def isolate_roots(coeffs, prec):
    """Isolate all roots of a ball-coefficient polynomial.

    Returns deg(poly) pairwise-disjoint certified balls. Raises
    PrecisionExhausted if isolation fails at this precision.
    """
    coeffs = [as_ball(c, prec) for c in coeffs]
    while len(coeffs) > 1 and not coeffs[-1].excludes_zero() and coeffs[-1].rad == 0 \
            and coeffs[-1].re == 0 and coeffs[-1].im == 0:
        coeffs = coeffs[:-1]  # drop exactly-zero leading coefficients
    degree = len(coeffs) - 1
    if degree <= 0:
        return []
    if not coeffs[-1].excludes_zero():
        raise PrecisionExhausted("leading coefficient ball contains zero")

    mids = [c.mid() for c in coeffs]
    approx = _aberth(mids, degree, prec)

    ctx = _nearest(prec)
    balls = []
    for i, z in enumerate(approx):
        sep = None
        for j, w in enumerate(approx):
            if i != j:
                d = abs(ctx.sub(z, w))
                sep = d if sep is None else min(sep, d)
        if sep is None:
            sep = mpfr(1)
        if sep == 0:
            raise PrecisionExhausted("coincident approximations; escalate precision")
        cand = None
        rho = _RD.div(sep, mpfr(3))
        for _ in range(8):
            disk = ComplexBall(mpfr(z.real, prec), mpfr(z.imag, prec), mpfr(rho), prec)
            k = _certify_disk(coeffs, disk)
            if k is not None:
                cand = k
                break
            rho = _RD.div(rho, mpfr(16))
            if rho == 0:
                break
        if cand is None:
            raise PrecisionExhausted("Krawczyk certification failed; escalate precision")
        balls.append(cand)

    for i in range(degree):
        for j in range(i + 1, degree):
            if not balls[i].is_disjoint(balls[j]):
                raise PrecisionExhausted("root enclosures overlap; escalate precision")
    return balls


def refine_root(coeffs, ball, prec):
    """Shrink an isolating ball to relative 2^(-prec+2) (or absolute 2^-prec).

    The input ball must isolate one simple root; Newton polish on the
    midpoint plus a fresh Krawczyk certificate at target precision.
    """
    coeffs = [as_ball(c, max(prec + 32, c.prec if isinstance(c, ComplexBall) else 0))
              for c in coeffs]
    wp = prec + 32
    ctx = _nearest(wp)
    mids = [c.mid() for c in coeffs]
    dmids = [ctx.mul(c, mpfr(k)) for k, c in enumerate(mids) if k >= 1]

    def horner(cs, z):
        acc = cs[-1]
        for c in reversed(cs[:-1]):
            acc = ctx.add(ctx.mul(acc, z), c)
        return acc

    z = ball.mid()
    for _ in range(prec.bit_length() + 20):
        p = horner(mids, z)
        dp = horner(dmids, z)
        if dp == 0:
            raise NonSimpleRoot("Newton derivative vanished")
        step = ctx.div(p, dp)
        z = ctx.sub(z, step)
        if abs(step) < ctx.exp2(mpfr(-(prec + 16))) * max(mpfr(1), abs(z)):
            break

    scale = max(abs(z), mpfr(2) ** (-8))
    rho = _RU.mul(mpfr(2) ** (-prec - 2), max(mpfr(1), scale))
    for _ in range(10):
        disk = ComplexBall(mpfr(z.real, wp), mpfr(z.imag, wp), mpfr(rho), wp)
        k = _certify_disk(coeffs, disk)
        if k is not None:
            # sanity: refined root stays inside the original isolating region
            if ball.overlaps(k):
                return k
            raise NonSimpleRoot("refined root escaped the isolating ball")
        rho = _RU.mul(rho, mpfr(64))
    raise PrecisionExhausted("refinement certification failed")
