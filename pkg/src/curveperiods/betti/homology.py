"""Integral relative homology of the lifted complex.

The lifted graph is the 1-skeleton of a CW structure on the disjoint
union of the smooth proper models. Relative 1-cycles are integer edge
chains whose boundary is supported on the marked tips; dividing by the
boundaries of the kept 2-cells leaves H_1 of the punctured curve rel
its marked endpoints.

Two sublattices cut out the weight filtration. Boundaries of the
omitted cells (one per puncture) generate the loops around the removed
points; chains with empty boundary generate everything that already
lives on the unmarked curve. An integral basis is adapted to

    span(kept cells)  <  + omitted cells  <  closed chains  <  relative,

and each extension step is certified free, so torsion in any quotient
would be caught rather than silently rounded away.
"""

from fractions import Fraction

from ..arith import extend_to_basis, integer_kernel, solve_integer
from ..curve import Divisor, genus as exact_genus
from ..errors import InconsistentInput, UnresolvedEndpoint
from .base import base_graph_for, sites_of
from .lift import lift_curve

__all__ = [
    "RectilinearChain",
    "HomologyRepresentation",
    "boundary",
    "homology_representation",
    "representation_from_lift",
]


class RectilinearChain:
    """Integer combination of lifted edges of one curve lift.

    Every edge is a straight segment (an axis-parallel grid wall, or a
    whisker running into a marked point), so a chain is a rectilinear
    path system with algebraic corners.
    """

    def __init__(self, lift, coeffs):
        self.lift = lift
        self.coeffs = {int(e): int(c) for e, c in coeffs.items() if c}

    def vector(self):
        vec = [0] * len(self.lift.edges)
        for e, c in self.coeffs.items():
            vec[e] = c
        return vec

    def add(self, other):
        assert other.lift is self.lift, "chains live on different lifts"
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return RectilinearChain(self.lift, out)

    def neg(self):
        return RectilinearChain(self.lift, {e: -c for e, c in self.coeffs.items()})

    def sub(self, other):
        return self.add(other.neg())

    def scale(self, n):
        return RectilinearChain(self.lift, {e: n * c for e, c in self.coeffs.items()})

    def boundary(self):
        """Exact boundary divisor; endpoints must be marked places."""
        acc = {}
        for e, c in self.coeffs.items():
            edge = self.lift.edges[e]
            acc[edge.head] = acc.get(edge.head, 0) + c
            acc[edge.tail] = acc.get(edge.tail, 0) - c
        weights = {}
        for vi, c in acc.items():
            if c == 0:
                continue
            v = self.lift.vertices[vi]
            if not v.is_tip:
                raise UnresolvedEndpoint(
                    "chain boundary touches an unmarked vertex")
            weights[v.place] = weights.get(v.place, 0) + Fraction(c)
        return Divisor(weights)

    def __repr__(self):
        return "RectilinearChain(%d edges)" % len(self.coeffs)


def boundary(chain):
    return chain.boundary()


class HomologyRepresentation:
    """Basis of H_1(curve minus punctures, marked points; Z).

    basis holds one chain per class; weights marks each as -2 (loop
    around a puncture), -1 (closed cycle of the filled-in curve), or 0
    (relative class with endpoints). kernel_rows are the boundaries of
    the kept 2-cells, the subgroup the basis is taken modulo.
    """

    def __init__(self, lift, a_subset, kernel_rows, basis, weights, k_basis):
        self.lift = lift
        self.a_subset = a_subset
        self.kernel_rows = kernel_rows
        self.basis = basis
        self.weights = weights
        self._k_basis = k_basis

    @property
    def graph(self):
        return self.lift.graph

    @property
    def rank(self):
        return len(self.basis)

    def weight_rank(self, w):
        """Rank of W_w: classes of weight at most w."""
        return sum(1 for m in self.weights if m <= w)

    def chain(self, coeffs):
        return RectilinearChain(self.lift, coeffs)

    def coordinates(self, chain):
        """Integer coordinates of a relative cycle in the basis.

        Returns (basis coordinates, kernel coordinates); the latter are
        the coefficients over the kernel sublattice basis and carry no
        homological information. Raises InconsistentInput if the chain
        is not a relative cycle of the lifted graph.
        """
        rows = [b.vector() for b in self.basis] + self._k_basis
        if not rows:
            if any(chain.coeffs.values()):
                raise InconsistentInput("chain is not a relative cycle")
            return [], []
        sol = solve_integer(rows, chain.vector())
        if sol is None:
            raise InconsistentInput("chain is not a relative cycle")
        return sol[:len(self.basis)], sol[len(self.basis):]

    def from_coordinates(self, basis_coords, kernel_coords=()):
        out = {}
        rows = [b.vector() for b in self.basis] + self._k_basis
        coords = list(basis_coords) + list(kernel_coords)
        assert len(coords) <= len(rows)
        for c, row in zip(coords, rows):
            for e, v in enumerate(row):
                if c * v:
                    out[e] = out.get(e, 0) + c * v
        return RectilinearChain(self.lift, out)


def homology_representation(X, avoid=()):
    """Full pipeline: separating grid, certified lift, adapted basis."""
    graph = base_graph_for(sites_of(X, avoid=avoid))
    lift = lift_curve(X, graph)
    return representation_from_lift(X, lift)


def representation_from_lift(X, lift):
    ncomp = len(X.curve.components)
    n_punct = [0] * ncomp
    n_marked = [0] * ncomp
    for p in X.punctures:
        n_punct[p.comp] += 1
    for q in X.markings:
        n_marked[q.comp] += 1

    if not lift.edges:
        # no separating sites at all: no punctures, no markings, and
        # every component must be rational for the plane model to have
        # an empty branch locus
        assert not X.punctures and not X.markings
        for ci in range(ncomp):
            assert exact_genus(X.curve, ci) == 0
        return HomologyRepresentation(lift, [], [], [], [], [])

    nv = len(lift.vertices)
    ne = len(lift.edges)
    tips = set(lift.a_vertices())

    brows = []
    for e in lift.edges:
        row = [0] * nv
        row[e.head] += 1
        row[e.tail] -= 1
        brows.append(row)

    for f in lift.faces:
        bd = [0] * nv
        for ei, c in f.row.items():
            edge = lift.edges[ei]
            bd[edge.head] += c
            bd[edge.tail] -= c
        assert not any(bd), "face row is not a closed cycle"

    keep_cols = [v for v in range(nv) if v not in tips]
    z_rel = integer_kernel([[r[v] for v in keep_cols] for r in brows])
    z_abs = integer_kernel(brows)

    k_rows = [f for f in lift.faces if f.kept]
    w2_rows = [f for f in lift.faces if not f.kept]

    def face_vec(f):
        vec = [0] * ne
        for ei, c in f.row.items():
            vec[ei] = c
        return vec

    k_rows = [face_vec(f) for f in k_rows]
    w2_rows = [face_vec(f) for f in w2_rows]

    k_basis, ext2 = extend_to_basis(k_rows, k_rows + w2_rows)
    _, ext1 = extend_to_basis(k_rows + w2_rows, z_abs)
    _, ext0 = extend_to_basis(z_abs, z_rel)

    exp2 = sum(max(nd - 1, 0) for nd in n_punct)
    exp1 = sum(2 * s["genus"] for s in lift.comp_stats)
    exp0 = sum(nq - 1 for nq in n_marked if nq)
    assert len(ext2) == exp2, "puncture loop rank mismatch"
    assert len(ext1) == exp1, "closed cycle rank is not twice the genus"
    assert len(ext0) == exp0, "relative rank does not match the endpoints"

    def chains(rows):
        return [RectilinearChain(lift, dict(enumerate(r))) for r in rows]

    basis = chains(ext2) + chains(ext1) + chains(ext0)
    weights = [-2] * len(ext2) + [-1] * len(ext1) + [0] * len(ext0)
    return HomologyRepresentation(lift, sorted(tips), k_rows, basis,
                                  weights, k_basis)
