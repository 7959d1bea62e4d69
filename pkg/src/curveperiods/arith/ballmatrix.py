"""Ball matrices and certified linear algebra.

The solver is the classical approximate-inverse enclosure: compute a
floating approximation R of A^-1 on midpoints, bound beta = ||I - R A|| in
ball arithmetic, and when beta < 1 the residual iteration gives a rigorous
componentwise enclosure of A^-1 b. beta < 1 simultaneously certifies
invertibility, which is how determinant-excludes-zero is established.
"""

from __future__ import annotations

import gmpy2
from gmpy2 import mpc, mpfr

from ..errors import SingularAtPrecision
from .ball import ComplexBall, _RD, _RU, _nearest, as_ball


class BallMatrix:
    __slots__ = ("rows", "cols", "entries", "prec")

    def __init__(self, entries, prec=None):
        self.entries = [list(row) for row in entries]
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.rows else 0
        assert all(len(r) == self.cols for r in self.entries), "ragged matrix"
        if prec is None:
            prec = max((e.prec for row in self.entries for e in row), default=64)
        self.prec = prec

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i):
        return list(self.entries[i])

    def col(self, j):
        return [self.entries[i][j] for i in range(self.rows)]

    def transpose(self):
        return BallMatrix(
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)],
            self.prec,
        )

    def mat_vec(self, vec):
        out = []
        for i in range(self.rows):
            acc = ComplexBall.zero(self.prec)
            for j in range(self.cols):
                acc = acc.add(self.entries[i][j].mul(vec[j]))
            out.append(acc)
        return out

    def to_json(self):
        return {
            "rows": self.rows,
            "cols": self.cols,
            "prec": self.prec,
            "entries": [[e.to_json() for e in row] for row in self.entries],
        }


def _mid_inverse(entries, prec):
    """Plain Gaussian elimination inverse on midpoints (no rigor here)."""
    n = len(entries)
    ctx = _nearest(prec + 16)
    a = [[entries[i][j].mid() for j in range(n)] for i in range(n)]
    inv = [[mpc(1) if i == j else mpc(0) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv, best = None, mpfr(-1)
        for r in range(col, n):
            mag = abs(a[r][col])
            if mag > best:
                piv, best = r, mag
        if best == 0:
            return None
        a[col], a[piv] = a[piv], a[col]
        inv[col], inv[piv] = inv[piv], inv[col]
        d = a[col][col]
        for j in range(n):
            a[col][j] = ctx.div(a[col][j], d)
            inv[col][j] = ctx.div(inv[col][j], d)
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                for j in range(n):
                    a[r][j] = ctx.sub(a[r][j], ctx.mul(f, a[col][j]))
                    inv[r][j] = ctx.sub(inv[r][j], ctx.mul(f, inv[col][j]))
    return inv


def _residual_norm(R, A):
    """Upper bound for the row-sum norm of I - R A, in ball arithmetic."""
    n = A.rows
    prec = A.prec
    worst = mpfr(0)
    for i in range(n):
        rowsum = mpfr(0)
        for j in range(n):
            acc = ComplexBall.one(prec) if i == j else ComplexBall.zero(prec)
            for k in range(n):
                acc = acc.sub(R[i][k].mul(A.entries[k][j]))
            rowsum = _RU.add(rowsum, acc.abs_upper())
        worst = max(worst, rowsum)
    return worst


def certify_invertible(A):
    """Return (R_balls, beta) with beta < 1 proving invertibility, or raise."""
    assert A.rows == A.cols, "square matrices only"
    prec = A.prec
    mid_inv = _mid_inverse(A.entries, prec)
    if mid_inv is None:
        raise SingularAtPrecision("midpoint elimination hit a zero pivot")
    R = [
        [ComplexBall(mpfr(z.real, prec), mpfr(z.imag, prec), mpfr(0), prec) for z in row]
        for row in mid_inv
    ]
    beta = _residual_norm(R, A)
    if not beta < 1:
        raise SingularAtPrecision("residual norm %.3g not below 1" % float(beta))
    return R, beta


def solve_enclosure(A, b):
    """Componentwise enclosure of A^-1 b; certifies invertibility en route."""
    R, beta = certify_invertible(A)
    n = A.rows
    prec = A.prec
    # approximate solution x~ = R b on midpoints, then enclose the error:
    # x = x~ + A^-1 (b - A x~), and ||A^-1 r|| <= ||R r|| / (1 - beta).
    x0 = []
    for i in range(n):
        acc = ComplexBall.zero(prec)
        for j in range(n):
            acc = acc.add(R[i][j].mul(b[j]))
        x0.append(ComplexBall(acc.re, acc.im, mpfr(0), prec))
    Ax0 = A.mat_vec(x0)
    resid = [b[i].sub(Ax0[i]) for i in range(n)]
    rr = []
    for i in range(n):
        acc = ComplexBall.zero(prec)
        for j in range(n):
            acc = acc.add(R[i][j].mul(resid[j]))
        rr.append(acc)
    # the max norm of R r, inflated by the Neumann factor 1/(1-beta);
    # the denominator is rounded down so the quotient is an upper bound
    bound = mpfr(0)
    for e in rr:
        bound = max(bound, e.abs_upper())
    denom = _RD.sub(mpfr(1), beta)
    inflate = _RU.div(bound, denom)
    return [x0[i].widen(inflate) for i in range(n)]


def det_excludes_zero(A):
    try:
        certify_invertible(A)
        return True
    except SingularAtPrecision:
        return False
