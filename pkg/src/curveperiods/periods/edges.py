"""Certified integrals over lifted homology edges.

Grid edges and whiskers into unramified endpoints are single certified
straight integrations. A whisker into a ramified place is split: the
straight part stops a controlled fraction short of the branch point and
the remaining cap is summed from the exact local inverse of f, with the
truncation tail bounded by a Cauchy estimate on a parameter disk the
patch provably covers.

The cap certificate has four ingredients on the disk |t| <= rho, where
t is the local parameter with y = t and f(x(t)) = t^m:

* a Krawczyk contraction of f(x) = s over an x-disk around the branch
  point, uniform in |s| <= rho^m, pinning the analytic inverse x(t)
  inside a strictly smaller region;
* sup |f| over the hull of the remaining x-segment at most rho^m, so
  the continued sheet enters the patch and its parameter stays in the
  t-disk all the way to the tip;
* |x(t) - x0| >= rho^m / sup |f~| on the circle |t| = rho, where
  f = (x - x0) f~, which turns denominator vanishing orders at x0 into
  certified circle lower bounds;
* the coefficient bound |g_k| <= M / rho^k for the pullback integrand
  g(t) dt, with M assembled from the pieces above and applied as a
  geometric tail on top of the exact series head.
"""

from __future__ import annotations

from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

from ..arith import ComplexBall, krawczyk_test, refine_root
from ..curve import fpoly
from ..curve.series import eval_ratfunc, newton_invert_branch
from ..errors import (
    ExpansionOrderExceeded,
    NonSimpleRoot,
    PoleOnPath,
    PrecisionExhausted,
    UnsupportedClass,
)
from .segments import StraightPath, fiber_at, fiber_coeffs, integrate_sheet

_RU = gmpy2.context(precision=53, round=gmpy2.RoundUp)
_RD = gmpy2.context(precision=53, round=gmpy2.RoundDown)

# fraction of the whisker left for the cap; shrinks until the patch
# certificate clears the other zeros and poles near the branch point
H_LADDER = (Fraction(1, 8), Fraction(1, 32), Fraction(1, 128),
            Fraction(1, 512), Fraction(1, 2048))


def _pow_up(x, n):
    out = mpfr(1)
    for _ in range(n):
        out = _RU.mul(out, x)
    return out


def _pow_dn(x, n):
    out = mpfr(1)
    for _ in range(n):
        out = _RD.mul(out, x)
    return out


def _strictly_inside(k, disk):
    shift = ComplexBall(k.re, k.im, mpfr(0), k.prec).sub(
        ComplexBall(disk.re, disk.im, mpfr(0), disk.prec)).abs_upper()
    return _RU.add(shift, k.rad) < disk.rad


def resolve_slot(comp, x_ball, fiber, stored, prec):
    """Index of the fiber enclosure holding the same root as stored."""
    hits = [i for i, b in enumerate(fiber) if b.overlaps(stored)]
    if len(hits) != 1:
        ref = refine_root(fiber_coeffs(comp)(x_ball, prec), stored, prec)
        hits = [i for i, b in enumerate(fiber) if b.overlaps(ref)]
    assert len(hits) == 1, "stored sheet ball did not resolve in the fiber"
    return hits[0]


def integrate_edge(X, lift, ei, omega, prec, tol):
    """Certified ball for the integral of omega over one lifted edge."""
    e = lift.edges[ei]
    part = omega.part(e.comp)
    if part is None or part.is_zero():
        return ComplexBall.zero(prec)
    coords = part.coords
    comp = X.curve.components[e.comp]
    graph = lift.graph
    be = graph.edges[e.base]
    cv = graph.vertices[be.tail]
    start = (cv.re, cv.im)
    if e.kind == "grid":
        hv = graph.vertices[be.head]
        path = StraightPath(start, (hv.re, hv.im))
        ram = False
    else:
        place = lift.vertices[e.head].place
        path = StraightPath(start, place.x)
        ram = e.kind == "whisker_ram"
    if comp.deg_y == 1:
        ys, slot = [], 0
    else:
        ys = fiber_at(comp, path.start_ball(prec), prec)
        slot = resolve_slot(comp, path.start_ball(prec), ys, e.tail_ball,
                            prec)
    if not ram:
        val, _ = integrate_sheet(comp, coords, path, ys, slot, prec, tol)
        return val
    return integrate_to_ram(comp, coords, path, ys, slot, prec, tol)


def integrate_to_ram(comp, coords, path, ys, slot, prec, tol):
    """Straight part plus certified cap into the branch point at t = 1."""
    shape = comp._superelliptic_shape()
    if shape is None:
        raise UnsupportedClass(
            "ramified endpoint integration needs the radical shape")
    m, f = shape
    field = comp.field
    x0 = path.b if not isinstance(path.b, (int, Fraction)) \
        else field.element(path.b)
    assert fpoly.eval_alg(field, f, x0).is_zero(), \
        "ramified tip is not a branch point"
    total = ComplexBall.zero(prec)
    cur = ys
    t_at = Fraction(0)
    for h in H_LADDER:
        seg, cur = integrate_sheet(comp, coords, path, cur, slot, prec, tol,
                                   t_lo=t_at, t_hi=1 - h)
        total = total.add(seg)
        t_at = 1 - h
        cap = _cap(comp, coords, path, m, f, x0, h, cur, slot, prec, tol)
        if cap is not None:
            return total.add(cap)
    raise PrecisionExhausted("ramified cap certificate failed at all scales")


def _cap(comp, coords, path, m, f, x0, h, fiber, slot, prec, tol):
    """Ball for the integral from x(1-h) to the branch point, or None."""
    field = comp.field
    pc = fiber_coeffs(comp)
    x_b = path.point(1 - h, prec)
    try:
        y_b = refine_root(pc(x_b, prec), fiber[slot], prec)
    except (NonSimpleRoot, PrecisionExhausted):
        return None
    tb_up = y_b.abs_upper()
    if not tb_up > 0:
        return None
    rho = gmpy2.mul(mpfr(2), tb_up)
    rho_m_up = _pow_up(rho, m)
    rho_m_dn = _pow_dn(rho, m)

    x0b = x0.embed(prec)
    dist_up = x_b.sub(x0b).abs_upper()
    disk = ComplexBall(x0b.re, x0b.im,
                       _RU.add(x0b.rad, _RU.mul(mpfr(2), dist_up)), prec)
    hull = x_b.hull(x0b)
    if not disk.contains_ball(hull):
        return None
    if not fpoly.eval_ball(f, hull, prec).abs_upper() <= rho_m_dn:
        return None

    fb = [c.embed(prec) for c in f]
    fb[0] = fb[0].widen(rho_m_up)
    try:
        x_ram = krawczyk_test(fb, disk)
    except NonSimpleRoot:
        return None
    if not _strictly_inside(x_ram, disk):
        return None
    fp_lo = fpoly.eval_ball(fpoly.derivative(field, f), x_ram,
                            prec).abs_lower()
    if not fp_lo > 0:
        return None
    lin = [x0.neg(), field.one()]
    ftilde, rem = fpoly.divmod_poly(field, f, lin)
    assert not rem, "branch point is not a simple zero of f"
    ft_up = fpoly.eval_ball(ftilde, x_ram, prec).abs_upper()
    d_min = _RD.div(rho_m_dn, ft_up)
    if not d_min > 0:
        return None

    xp_up = _RU.div(_RU.mul(mpfr(m), _pow_up(rho, m - 1)), fp_lo)
    msum = mpfr(0)
    max_v = 0
    for j, rj in enumerate(coords):
        if rj.is_zero():
            continue
        vj = fpoly.order_at(field, rj.den, x0)
        max_v = max(max_v, vj)
        if vj:
            dt, drem = fpoly.divmod_poly(field, rj.den,
                                         fpoly.pow_linear(field, x0, vj))
            assert not drem
        else:
            dt = rj.den
        dt_lo = fpoly.eval_ball(dt, x_ram, prec).abs_lower()
        if not dt_lo > 0:
            return None
        num_up = fpoly.eval_ball(rj.num, x_ram, prec).abs_upper()
        den_lo = _RD.mul(_pow_dn(d_min, vj), dt_lo)
        msum = _RU.add(msum, _RU.mul(_RU.div(num_up, den_lo),
                                     _pow_up(rho, j)))
    m_g = _RU.mul(msum, xp_up)

    # tail over k > N: m_g |t_b| q^(N+1) / (1 - q) with q = 1/2 by the
    # choice of rho, so the whole factor in front is m_g |t_b| times 2
    base = _RU.mul(m_g, _RU.mul(tb_up, mpfr(2)))
    tolc = _RD.mul(tol, mpfr("0.5"))
    if base <= tolc:
        n_head = 4
    else:
        n_head = int(gmpy2.ceil(_RU.log2(_RU.div(base, tolc)))) + 1
        n_head = max(n_head, 4)
    if n_head > 8 * prec + 512:
        return None
    tail = _RU.mul(base, mpfr(2) ** -(n_head + 1))

    t_window = n_head + 2 * m * (max_v + 2) + m + 4
    for _ in range(3):
        try:
            gs = _pullback_head(field, coords, f, x0, m, n_head, t_window)
            break
        except ExpansionOrderExceeded:
            t_window *= 2
    else:
        return None

    acc = ComplexBall.zero(prec)
    for k in range(n_head, -1, -1):
        c = gs[k].mul(field.element(Fraction(1, k + 1)))
        acc = acc.mul(y_b).add(c.embed(prec))
    acc = acc.mul(y_b)
    return acc.widen(tail).neg()


def _pullback_head(field, coords, f, x0, m, n_head, t_window):
    """Exact coefficients g_0 .. g_N of the pulled-back integrand."""
    x_ser = newton_invert_branch(field, list(f), x0, m, t_window)
    dx_ser = x_ser.derivative()
    g = None
    for j, rj in enumerate(coords):
        if rj.is_zero():
            continue
        term = eval_ratfunc(rj, x_ser, x_ser.trunc).mul_tpow(j)
        g = term if g is None else g.add(term)
    assert g is not None, "zero integrand made it to a cap"
    g = g.mul(dx_ser).strip()
    v = g.valuation()
    if v is not None and v < 0:
        raise PoleOnPath("differential has a pole at the ramified endpoint")
    return [g.coeff(k) for k in range(n_head + 1)]


__all__ = [
    "H_LADDER",
    "integrate_edge",
    "integrate_to_ram",
    "resolve_slot",
]
