"""Exact linear algebra over a NumberField (dense, fraction-free enough).

Matrices are lists of lists of AlgebraicNumber. Everything here is pure
Gaussian elimination with exact field arithmetic; sizes in this project
stay small (tens of rows), so no pivoting sophistication is needed beyond
skipping exact zeros.
"""

from __future__ import annotations


def _clone(m):
    return [list(row) for row in m]


def rref(field, m):
    """Reduced row echelon form; returns (rref_matrix, pivot_columns)."""
    a = _clone(m)
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = None
        for i in range(r, rows):
            if not a[i][c].is_zero():
                piv = i
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = a[r][c].inverse()
        a[r] = [v.mul(inv) for v in a[r]]
        for i in range(rows):
            if i != r and not a[i][c].is_zero():
                f = a[i][c]
                a[i] = [x.sub(f.mul(y)) for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def nullspace(field, m):
    """Basis of the right kernel, as a list of coordinate vectors."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    if rows == 0:
        return [
            [field.one() if i == j else field.zero() for i in range(cols)]
            for j in range(cols)
        ]
    a, pivots = rref(field, m)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [field.zero()] * cols
        v[fc] = field.one()
        for r, pc in enumerate(pivots):
            v[pc] = a[r][fc].neg()
        basis.append(v)
    return basis


def solve(field, m, rhs):
    """One exact solution of m x = rhs, or None if inconsistent."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    aug = [list(row) + [rhs[i]] for i, row in enumerate(m)]
    a, pivots = rref(field, aug)
    # inconsistent iff a pivot lands in the rhs column
    if cols in pivots:
        return None
    x = [field.zero()] * cols
    for r, pc in enumerate(pivots):
        x[pc] = a[r][cols]
    return x


def rank(field, m):
    _, pivots = rref(field, m)
    return len(pivots)


def matmul(field, a, b):
    n, k = len(a), len(b)
    cols = len(b[0]) if k else 0
    out = []
    for i in range(n):
        row = []
        for j in range(cols):
            acc = field.zero()
            for t in range(k):
                acc = acc.add(a[i][t].mul(b[t][j]))
            row.append(acc)
        out.append(row)
    return out
