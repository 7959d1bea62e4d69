"""Certified integration of algebraic differentials along straight x-paths.

A chain edge is a straight segment in the x-plane together with a sheet
choice. The integrand restricted to a sheet is sum_j r_j(x) y(x)^j with
rational r_j, so a piece of the segment is handled by one Gauss-Legendre
rule once three facts are certified on a disk covering the piece's
Bernstein ellipse: the fiber stays unbranched (one Krawczyk tube per
sheet over the whole disk), no r_j denominator vanishes, and the sheet's
tube caps |y|. Those caps give the max-modulus bound that turns the
rule's tail into an explicit error radius; pieces where certification
fails are halved, with the working precision escalated by the caller
when halving bottoms out.

Inside a certified piece the sheets cannot cross, so the y-value at a
node is recovered directly: the node's x-ball is a subset of the disk
and the sheet's tube isolates the root there, one Krawczyk refinement
pins it. Only piece boundaries carry fiber state forward.

Whiskers into a ramified marking get a two-part treatment: the straight
run stops short of the branch point and the remaining cap is integrated
through the exact local series in the uniformizer t = y. The series
coefficients are exact field elements; the tail after N terms is bounded
by Cauchy estimates on |t| = rho, where the modulus of the integrand is
controlled through a Krawczyk enclosure of x(t) valid for every |t| <=
rho at once (the branch equation f(x) = t^m perturbed by a radius rho^m
ball). The lifted straight path stays inside that local patch because
|f| on the remaining x-segment is certified below rho^m, so the cap
value is just the antiderivative series evaluated at the entry point,
with sign flipped for running into the branch point.
"""

from __future__ import annotations

from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

from ..arith import ComplexBall, isolate_roots, refine_root
from ..betti.lift import _tube_step
from ..curve import fpoly
from ..errors import NonSimpleRoot, PrecisionExhausted
from .quadrature import legendre_rule, pick_node_count, subdivision_floor

_RU = gmpy2.context(precision=53, round=gmpy2.RoundUp)
_RD = gmpy2.context(precision=53, round=gmpy2.RoundDown)

# Bernstein ellipse parameters tried per piece, widest first
RHO_LADDER = (Fraction(8), Fraction(4), Fraction(2),
              Fraction(7, 5), Fraction(23, 20))


def _fr_up(q):
    return _RU.div(q.numerator, q.denominator)


def _fr_dn(q):
    return _RD.div(q.numerator, q.denominator)


class StraightPath:
    """Affine x-path t -> a + t (b - a); endpoints exact data.

    Endpoints are either (re, im) Fraction pairs or field values (a
    Fraction or an embeddable algebraic number). Rational endpoints keep
    point evaluation exact, which keeps tube anchors tight.
    """

    __slots__ = ("a", "b")

    def __init__(self, a, b):
        self.a = a
        self.b = b

    @staticmethod
    def _ball(end, prec):
        if isinstance(end, tuple):
            return ComplexBall.from_rational(end[0], end[1], prec)
        if isinstance(end, (int, Fraction)):
            return ComplexBall.from_rational(end, 0, prec)
        return end.embed(prec)

    def start_ball(self, prec):
        return self._ball(self.a, prec)

    def end_ball(self, prec):
        return self._ball(self.b, prec)

    def delta(self, prec):
        return self.end_ball(prec).sub(self.start_ball(prec))

    def point(self, t, prec):
        """x(t) for an exact Fraction parameter."""
        if isinstance(self.a, tuple) and isinstance(self.b, tuple):
            are, aim = self.a
            bre, bim = self.b
            return ComplexBall.from_rational(are + t * (bre - are),
                                             aim + t * (bim - aim), prec)
        a = self.start_ball(prec)
        return a.add(self.delta(prec).mul(ComplexBall.from_rational(t, 0, prec)))

    def at_ball(self, tball, prec):
        return self.start_ball(prec).add(self.delta(prec).mul(tball))


def fiber_coeffs(comp):
    """Fiber polynomial evaluator in the shape _tube_step expects."""

    def pc(x_ball, prec):
        return [fpoly.eval_ball(c, x_ball, prec) for c in comp.ycoeffs]

    return pc


def fiber_at(comp, x_ball, prec):
    """Isolating balls for all sheets over one x, canonically ordered."""
    wp = prec
    while True:
        try:
            balls = isolate_roots([fpoly.eval_ball(c, x_ball.at_prec(wp), wp)
                                   for c in comp.ycoeffs], wp)
            break
        except PrecisionExhausted:
            if wp >= (1 << 13):
                raise
            wp *= 2
    assert len(balls) == comp.deg_y, "fiber degree dropped over a path point"
    balls.sort(key=lambda b: (b.re, b.im))
    return balls


def match_slot(balls, target):
    """Index of the unique fiber ball meeting the stored sheet enclosure."""
    hits = [i for i, b in enumerate(balls) if b.overlaps(target)]
    assert len(hits) == 1, "stored sheet ball did not pick a unique root"
    return hits[0]


def _ellipse_ball(path, ta, tb, rho, prec):
    mid = path.point((ta + tb) / 2, prec)
    half = _RU.mul(path.delta(prec).abs_upper(), _fr_up(Fraction(tb - ta, 2)))
    stretch = _RU.mul(half, _fr_up((rho + 1 / rho) / 2))
    return ComplexBall(mid.re, mid.im, _RU.add(mid.rad, stretch), prec)


def _eval_sheet(coords, x_ball, y_ball, prec):
    acc = ComplexBall.zero(prec)
    for rj in reversed(coords):
        acc = acc.mul(y_ball)
        if not rj.is_zero():
            acc = acc.add(rj.eval_ball(x_ball, prec))
    return acc


class SheetIntegrator:
    """Adaptive certified integration of one FFElem along one path.

    Fiber state is a list of isolating balls carried piece to piece; each
    accepted piece certifies its tubes over a disk covering the whole
    piece, so the tubes themselves isolate the fiber at the closing
    parameter and seed the next piece. Components with a single sheet
    skip fiber tracking: the integrand is a plain rational function and
    only the denominator exclusion matters.
    """

    def __init__(self, comp, coords, path, slot, prec, tol):
        self.comp = comp
        self.coords = coords
        self.path = path
        self.slot = slot
        self.prec = prec
        self.tol = tol
        self.pc = fiber_coeffs(comp)
        self.rational = comp.deg_y == 1

    def run(self, ys, t_lo=Fraction(0), t_hi=Fraction(1)):
        """(integral ball, fiber enclosures valid at t_hi)."""
        prec = self.prec
        floor = subdivision_floor(prec) * (t_hi - t_lo)
        total = ComplexBall.zero(prec)
        stack = [(t_lo, t_hi)]
        cur = ys
        while stack:
            ta, tb = stack.pop()
            piece = self._piece(ta, tb, cur)
            if piece is None:
                if tb - ta <= floor:
                    raise PrecisionExhausted(
                        "piece certification bottomed out near t=%s" % ta)
                tm = (ta + tb) / 2
                stack.append((tm, tb))
                stack.append((ta, tm))
                continue
            val, cur = piece
            total = total.add(val)
        return total, cur

    def _piece(self, ta, tb, ys):
        prec = self.prec
        xa = self.path.point(ta, prec)
        for rho in RHO_LADDER:
            cover = _ellipse_ball(self.path, ta, tb, rho, prec)
            if self.rational:
                tubes = ys
            else:
                try:
                    tubes = _tube_step(self.pc, xa, cover, ys, prec)
                except PrecisionExhausted:
                    tubes = None
                if tubes is None:
                    continue
            m_bound = self._modulus_bound(cover, tubes)
            if m_bound is None:
                continue
            jac_up = _RU.mul(self.path.delta(prec).abs_upper(),
                             _fr_up(Fraction(tb - ta, 2)))
            picked = pick_node_count(_RU.mul(m_bound, jac_up), rho,
                                     _RD.mul(self.tol, _fr_dn(tb - ta)))
            if picked is None:
                return None
            n, err = picked
            try:
                return self._apply_rule(ta, tb, tubes, n, err)
            except (NonSimpleRoot, PrecisionExhausted):
                return None
        return None

    def _modulus_bound(self, cover, tubes):
        """sup of the integrand on the covering disk, or None."""
        prec = self.prec
        y_up = None if self.rational else tubes[self.slot].abs_upper()
        acc = mpfr(0)
        ypow = mpfr(1)
        for rj in self.coords:
            if not rj.is_zero():
                num = fpoly.eval_ball(rj.num, cover, prec).abs_upper()
                den = fpoly.eval_ball(rj.den, cover, prec).abs_lower()
                if not den > 0:
                    return None
                acc = _RU.add(acc, _RU.mul(_RU.div(num, den), ypow))
            if y_up is not None:
                ypow = _RU.mul(ypow, y_up)
        return acc

    def _apply_rule(self, ta, tb, tubes, n, err):
        prec = self.prec
        nodes, weights = legendre_rule(n, prec)
        tmid = ComplexBall.from_rational((ta + tb) / 2, 0, prec)
        thalf = ComplexBall.from_rational(Fraction(tb - ta, 2), 0, prec)
        tube = None if self.rational else tubes[self.slot]
        acc = ComplexBall.zero(prec)
        for xi, w in zip(nodes, weights):
            x_node = self.path.at_ball(tmid.add(thalf.mul(xi)), prec)
            if tube is None:
                f_node = self.coords[0].eval_ball(x_node, prec)
            else:
                y_node = refine_root(self.pc(x_node, prec), tube, prec)
                f_node = _eval_sheet(self.coords, x_node, y_node, prec)
            acc = acc.add(w.mul(f_node))
        jac = self.path.delta(prec).mul(thalf)
        return acc.mul(jac).widen(err), tubes


def integrate_sheet(comp, coords, path, ys, slot, prec, tol,
                    t_lo=Fraction(0), t_hi=Fraction(1)):
    """Certified ball for the integral of sum r_j(x) y^j dx over the path.

    ys must isolate the full fiber at t_lo and slot picks the sheet; both
    are ignored on single-sheet components. Returns (value, fiber
    enclosures valid at t_hi) so callers can continue the same sheet.
    """
    return SheetIntegrator(comp, coords, path, slot, prec, tol).run(
        ys, t_lo, t_hi)
