"""Integer lattice utilities: LLL reduction, kernels, saturation, membership.

LLL itself is delegated to sympy's exact implementation over ZZ (rational
Gram-Schmidt bookkeeping, no floating point), wrapped to our row-lattice
convention. The rest is HNF/Smith-form based plumbing used by the relation
machinery.
"""

from __future__ import annotations

import math
from fractions import Fraction

from sympy import Matrix, QQ, Rational, ZZ
from sympy.matrices.normalforms import hermite_normal_form, smith_normal_form
from sympy.polys.matrices import DomainMatrix


def lll_reduce(rows, delta=0.99):
    """LLL-reduce the lattice spanned by integer rows (rows independent)."""
    if not rows:
        return []
    dm = DomainMatrix(
        [[ZZ(int(v)) for v in r] for r in rows], (len(rows), len(rows[0])), ZZ
    )
    red = dm.lll(delta=Rational(delta))
    return [[int(v) for v in row] for row in red.to_Matrix().tolist()]


def _int_matrix(rows):
    return Matrix([[int(v) for v in r] for r in rows])


def _primitive(vec):
    g = 0
    for v in vec:
        g = math.gcd(g, abs(int(v)))
    if g in (0, 1):
        return [int(v) for v in vec]
    return [int(v) // g for v in vec]


def _as_fraction(e):
    if hasattr(e, "numerator"):
        return Fraction(int(e.numerator), int(e.denominator))
    return Fraction(int(e.p), int(e.q))


def _clear_denominators(row):
    fracs = [_as_fraction(e) for e in row]
    lcm = 1
    for f in fracs:
        lcm = lcm * f.denominator // math.gcd(lcm, f.denominator)
    return _primitive([int(f * lcm) for f in fracs])


def hnf_basis(rows):
    """Canonical (HNF) basis of the row lattice; drops zero rows."""
    rows = [r for r in rows if any(v != 0 for v in r)]
    if not rows:
        return []
    h = hermite_normal_form(_int_matrix(rows).T).T
    basis = [[int(v) for v in h.row(i)] for i in range(h.rows)]
    return [row for row in basis if any(v != 0 for v in row)]


def integer_kernel(rows):
    """Basis of {x in Z^n : x M = 0} for the integer matrix M given by rows.

    The kernel of an integer matrix is saturated, so clearing denominators
    of a rational nullspace basis spans the whole kernel lattice.
    """
    if not rows:
        return []
    dm = DomainMatrix(
        [[QQ(int(v)) for v in r] for r in rows], (len(rows), len(rows[0])), QQ
    )
    ns = dm.transpose().nullspace()  # left-kernel of M
    out = [_clear_denominators(row) for row in ns.rep.to_ddm()]
    return hnf_basis(out)


def rational_row_basis(rows):
    """Primitive integer basis of the rational row span (= saturation)."""
    rows = [r for r in rows if any(v != 0 for v in r)]
    if not rows:
        return []
    dm = DomainMatrix(
        [[QQ(int(v)) for v in r] for r in rows], (len(rows), len(rows[0])), QQ
    )
    rref, pivots = dm.rref()
    out = []
    for row in rref.rep.to_ddm():
        if any(e != 0 for e in row):
            out.append(_clear_denominators(row))
    return hnf_basis(out)


saturate = rational_row_basis


def lattice_contains(basis, vec):
    """Does the row lattice spanned by basis contain the integer vector?"""
    if all(v == 0 for v in vec):
        return True
    if not basis:
        return False
    a = _int_matrix(basis).T
    b = Matrix([int(v) for v in vec])
    try:
        sol, params = a.gauss_jordan_solve(b)
    except ValueError:
        return False
    if params.rows > 0:
        sol = sol.subs({p: 0 for p in params})
    if a * sol != b:
        return False
    return all(v.is_Integer for v in sol)


def lattice_equal(basis_a, basis_b):
    return all(lattice_contains(basis_b, v) for v in basis_a) and all(
        lattice_contains(basis_a, v) for v in basis_b
    )


def smith_diagonal(rows):
    """Nonzero elementary divisors of the integer matrix."""
    rows = [r for r in rows if any(v != 0 for v in r)]
    if not rows:
        return []
    s = smith_normal_form(_int_matrix(rows))
    return [int(s[i, i]) for i in range(min(s.rows, s.cols)) if s[i, i] != 0]


def solve_integer(a_rows, b):
    """One integer solution x of x A = b (A given by rows), or None."""
    a = _int_matrix(a_rows).T
    bb = Matrix([int(v) for v in b])
    try:
        sol, params = a.gauss_jordan_solve(bb)
    except ValueError:
        return None
    if params.rows > 0:
        sol = sol.subs({p: 0 for p in params})
    if a * sol != bb:
        return None
    vals = list(sol)
    if not all(v.is_Integer for v in vals):
        return None
    return [int(v) for v in vals]


def smith_transforms(rows):
    """Smith form with transforms: U, D, V with U*M*V = D, U and V unimodular.

    Textbook elimination on python ints. Sizes here are small (coefficient
    matrices of homology sublattices), so no effort is spent on pivoting
    strategies that control entry growth.
    """
    m = [[int(v) for v in r] for r in rows]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    u = [[int(i == j) for j in range(nr)] for i in range(nr)]
    v = [[int(i == j) for j in range(nc)] for i in range(nc)]

    def swap_rows(a, i, j):
        a[i], a[j] = a[j], a[i]

    def addmul_row(a, dst, src, q):
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]

    def swap_cols(a, i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]

    def addmul_col(a, dst, src, q):
        for row in a:
            row[dst] += q * row[src]

    t = 0
    while t < min(nr, nc):
        # find a nonzero pivot in the remaining block
        piv = None
        for i in range(t, nr):
            for j in range(t, nc):
                if m[i][j] != 0 and (piv is None or abs(m[i][j]) < abs(m[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        i, j = piv
        swap_rows(m, t, i), swap_rows(u, t, i)
        swap_cols(m, t, j), swap_cols(v, t, j)
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, nr):
                if m[i][t] % m[t][t] != 0:
                    dirty = True
                q = -(m[i][t] // m[t][t])
                if q:
                    addmul_row(m, i, t, q), addmul_row(u, i, t, q)
                if m[i][t] != 0:
                    swap_rows(m, t, i), swap_rows(u, t, i)
                    dirty = True
            for j in range(t + 1, nc):
                if m[t][j] % m[t][t] != 0:
                    dirty = True
                q = -(m[t][j] // m[t][t])
                if q:
                    addmul_col(m, j, t, q), addmul_col(v, j, t, q)
                if m[t][j] != 0:
                    swap_cols(m, t, j), swap_cols(v, t, j)
                    dirty = True
        if m[t][t] < 0:
            m[t] = [-x for x in m[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    # enforce divisibility d_t | d_{t+1}
    changed = True
    while changed:
        changed = False
        for t in range(min(nr, nc) - 1):
            a, b = m[t][t], m[t + 1][t + 1]
            if a != 0 and b % a != 0:
                addmul_col(m, t, t + 1, 1), addmul_col(v, t, t + 1, 1)
                # re-eliminate the 2x2 block
                q = -(m[t + 1][t] // m[t][t])
                addmul_row(m, t + 1, t, q), addmul_row(u, t + 1, t, q)
                while m[t][t] != 0 and m[t + 1][t] != 0:
                    q = -(m[t][t] // m[t + 1][t])
                    addmul_row(m, t, t + 1, q), addmul_row(u, t, t + 1, q)
                    if m[t][t] == 0:
                        break
                    q = -(m[t + 1][t] // m[t][t])
                    addmul_row(m, t + 1, t, q), addmul_row(u, t + 1, t, q)
                if m[t][t] == 0:
                    swap_rows(m, t, t + 1), swap_rows(u, t, t + 1)
                q = -(m[t][t + 1] // m[t][t])
                if q:
                    addmul_col(m, t + 1, t, q), addmul_col(v, t + 1, t, q)
                if m[t][t] < 0:
                    m[t] = [-x for x in m[t]]
                    u[t] = [-x for x in u[t]]
                if m[t + 1][t + 1] < 0:
                    m[t + 1] = [-x for x in m[t + 1]]
                    u[t + 1] = [-x for x in u[t + 1]]
                changed = True
    return u, m, v


def unimodular_inverse(rows):
    """Exact inverse of a unimodular integer matrix, as integer rows."""
    mat = _int_matrix(rows)
    det = mat.det()
    assert det in (1, -1), "matrix is not unimodular"
    inv = mat.inv()
    return [[int(v) for v in inv.row(i)] for i in range(inv.rows)]


def extend_to_basis(sub_rows, full_rows):
    """Vectors completing a basis of lattice(sub) to one of lattice(full).

    Requires lattice(sub) to be a saturated sublattice of lattice(full);
    the quotient must be free, which is asserted via the Smith form.
    Returns (sub_basis, extension_rows): their concatenation is a basis of
    lattice(full) whose initial block spans lattice(sub).
    """
    full = hnf_basis(full_rows)
    sub = hnf_basis(sub_rows)
    if not sub:
        return [], full
    if not full:
        raise ValueError("sub lattice not contained in full lattice")
    a = []
    for r in sub:
        coeffs = solve_integer(full, r)
        assert coeffs is not None, "sub lattice must lie inside full lattice"
        a.append(coeffs)
    u, d, v = smith_transforms(a)
    r = len(sub)
    for t in range(r):
        assert d[t][t] == 1, "quotient lattice has torsion"
    vinv = unimodular_inverse(v)
    # rows of vinv * full: first r span the sub lattice, rest extend it
    base = []
    for row in vinv:
        base.append([sum(c * fv for c, fv in zip(row, col)) for col in zip(*full)])
    head, tail = base[:r], base[r:]
    assert lattice_equal(head, sub)
    return head, tail
