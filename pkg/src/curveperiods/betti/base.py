"""Rectilinear base graphs in the x-line.

The graph is a rectangular grid with one cell per special x-value
(branch points of every component, puncture and marking images,
requested avoid values). Cut lines are simple dyadic rationals chosen
strictly between certified-disjoint coordinate clusters, so every
special value is strictly interior to its own cell and no surviving
edge can pass through one.

Cells holding no special value are merged into neighbouring regions by
deleting shared walls. This is purely an economy measure: every
complementary region, special or not, becomes a 2-cell of the eventual
CW structure, so a leftover unmerged empty cell is sound, just wasteful.
Merging carves a tree of cells per region (one deleted wall per merged
cell), which keeps the surviving graph connected and every region a
disk. Walls left standing between two cells of the same region are
slits; face walks traverse them twice with opposite signs.

The unbounded region is never merged into: every rim wall survives, so
the outer face is exactly the complement of the bounding box, a disk
around infinity whose boundary walk is the box rectangle. Paths that
leave a rim vertex pointing away from the box stay inside the closure
of the outer face, which is what sheet matching over infinity needs.

Cells of punctures and markings are never merged into, so those faces
stay convex rectangles; sheet-to-place matching later continues along a
straight segment inside the cell. Marking cells receive a whisker: a
slit edge from the cell's southwest corner to a tip vertex at the exact
marking x-value.
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction

from gmpy2 import mpq

from ..arith import ComplexBall
from ..curve import branch_locus, is_infinite
from ..errors import (
    BoundaryMeetsPoles,
    DegenerateConfiguration,
    UnsupportedClass,
)

OUTER = "outer"


class Site:
    """One special x-value with its roles in the construction."""

    __slots__ = ("key", "value", "branch_comps", "punctures", "markings",
                 "avoid", "cell")

    def __init__(self, key, value):
        self.key = key
        self.value = value
        self.branch_comps = set()
        self.punctures = []
        self.markings = []
        self.avoid = False
        self.cell = None

    def ball(self, prec):
        if isinstance(self.value, Fraction):
            return ComplexBall.from_rational(self.value, 0, prec)
        return self.value.embed(prec)

    def is_protected(self):
        return bool(self.punctures) or bool(self.markings)

    def __repr__(self):
        roles = []
        if self.branch_comps:
            roles.append("branch")
        if self.punctures:
            roles.append("puncture")
        if self.markings:
            roles.append("marking")
        if self.avoid:
            roles.append("avoid")
        return "Site(%s: %s)" % (self.key, "+".join(roles) or "plain")


class SiteSet:
    """Deduplicated special x-values plus the roles of infinity."""

    def __init__(self):
        self.sites = {}
        self.inf_punctures = []
        self.inf_branch_comps = set()

    def _get(self, a):
        if isinstance(a, (int, Fraction)):
            a = Fraction(a)
            key = ("q", a)
        else:
            key = a.identity_key()
        s = self.sites.get(key)
        if s is None:
            s = Site(key, a)
            self.sites[key] = s
        return s

    def add_branch(self, x, comp_idx):
        if is_infinite(x):
            self.inf_branch_comps.add(comp_idx)
        else:
            self._get(x).branch_comps.add(comp_idx)

    def add_puncture(self, place):
        if is_infinite(place.x):
            self.inf_punctures.append(place)
        else:
            self._get(place.x).punctures.append(place)

    def add_marking(self, place):
        if is_infinite(place.x):
            raise UnsupportedClass(
                "chain endpoints over x = infinity are not supported")
        self._get(place.x).markings.append(place)

    def add_avoid(self, x):
        if not is_infinite(x):
            self._get(x).avoid = True

    def finalize(self):
        for s in self.sites.values():
            if s.punctures and s.markings:
                raise BoundaryMeetsPoles()
        return list(self.sites.values())


def sites_of(X, avoid=()):
    """SiteSet of a marked curve: branch values, x(D), x(E), extra avoids."""
    ss = SiteSet()
    curve = X.curve
    for ci in range(len(curve.components)):
        for b in branch_locus(curve, ci):
            ss.add_branch(b, ci)
    for p in X.punctures:
        ss.add_puncture(p)
    for p in X.markings:
        ss.add_marking(p)
    for a in avoid:
        ss.add_avoid(getattr(a, "x", a))
    return ss


# ---------------------------------------------------------------------------
# separating cuts


def _to_fraction(x):
    q = mpq(x)
    return Fraction(int(q.numerator), int(q.denominator))


def _simple_dyadic_between(lo, hi):
    """The coarsest dyadic rational strictly inside (lo, hi)."""
    assert lo < hi
    k = 0
    while True:
        step = Fraction(1, 2 ** k)
        c = (lo // step + 1) * step
        if lo < c < hi:
            return c
        k += 1


def _cluster_1d(intervals):
    """Merge overlapping (lo, hi, key) intervals into sorted clusters."""
    clusters = []
    for lo, hi, key in sorted(intervals, key=lambda t: (t[0], t[1])):
        if clusters and lo <= clusters[-1][1]:
            c = clusters[-1]
            clusters[-1] = (c[0], max(c[1], hi), c[2] + [key])
        else:
            clusters.append((lo, hi, [key]))
    return clusters


def _cuts_for(sites, max_prec=1 << 13):
    """Dyadic cut lines leaving every site strictly inside its own cell.

    Returns (re_cuts, im_cuts, cell_of). Enclosures are refined until any
    two sites are split by a vertical or a horizontal cut; two distinct
    algebraic numbers always separate eventually in the real or the
    imaginary coordinate.
    """
    prec = 64
    while True:
        re_iv, im_iv = [], []
        for s in sites:
            b = s.ball(prec)
            lo, hi = b.real_interval()
            re_iv.append((_to_fraction(lo), _to_fraction(hi), s.key))
            lo, hi = b.imag_interval()
            im_iv.append((_to_fraction(lo), _to_fraction(hi), s.key))
        re_cl = _cluster_1d(re_iv)
        im_cl = _cluster_1d(im_iv)
        col = {k: i for i, (_, _, ks) in enumerate(re_cl) for k in ks}
        row = {k: j for j, (_, _, ks) in enumerate(im_cl) for k in ks}
        taken = set()
        collision = False
        for s in sites:
            cell = (col[s.key], row[s.key])
            if cell in taken:
                collision = True
                break
            taken.add(cell)
        if not collision:
            re_cuts = [Fraction(re_cl[0][0] // 1 - 1)]
            for a, b in zip(re_cl, re_cl[1:]):
                re_cuts.append(_simple_dyadic_between(a[1], b[0]))
            re_cuts.append(Fraction(re_cl[-1][1] // 1 + 2))
            im_cuts = [Fraction(im_cl[0][0] // 1 - 1)]
            for a, b in zip(im_cl, im_cl[1:]):
                im_cuts.append(_simple_dyadic_between(a[1], b[0]))
            im_cuts.append(Fraction(im_cl[-1][1] // 1 + 2))
            cell_of = {s.key: (col[s.key], row[s.key]) for s in sites}
            return re_cuts, im_cuts, cell_of
        if prec >= max_prec:
            raise DegenerateConfiguration(
                "special x-values did not separate at working precision")
        prec *= 2


# ---------------------------------------------------------------------------
# graph, rotation system, faces


class BaseVertex:
    """Grid vertex at exact rational coordinates, or a whisker tip."""

    __slots__ = ("re", "im", "site")

    def __init__(self, re=None, im=None, site=None):
        self.re = re
        self.im = im
        self.site = site

    @property
    def is_tip(self):
        return self.re is None

    def ball(self, prec):
        if self.re is not None:
            return ComplexBall.from_rational(self.re, self.im, prec)
        return self.site.ball(prec)

    def __repr__(self):
        if self.re is None:
            return "tip%s" % (self.site.key,)
        return "v(%s, %s)" % (self.re, self.im)


class BaseEdge:
    __slots__ = ("tail", "head", "kind")

    def __init__(self, tail, head, kind):
        self.tail = tail
        self.head = head
        self.kind = kind  # "grid" | "whisker"


class BaseFace:
    """One complementary region, as its closed boundary walk.

    The walk is a list of directed edges (edge index, +1/-1), oriented so
    the region lies on the left; for the outer face that means clockwise
    in the plane. Slit edges appear twice with opposite signs.
    """

    __slots__ = ("label", "site", "walk", "kind")

    def __init__(self, label, site, walk, kind):
        self.label = label
        self.site = site
        self.walk = walk
        self.kind = kind  # "site" | "empty" | "outer"


class BaseGraph:
    def __init__(self, vertices, edges, rotations, faces, sites,
                 inf_punctures, re_cuts=(), im_cuts=()):
        self.vertices = vertices
        self.edges = edges
        self.rotations = rotations  # vertex index -> CCW list of edge ends
        self.faces = faces
        self.sites = sites
        self.inf_punctures = inf_punctures
        self.re_cuts = list(re_cuts)
        self.im_cuts = list(im_cuts)

    def box_radius(self):
        """Rational R with |x| < R strictly for every special value."""
        re_b = max(abs(self.re_cuts[0]), abs(self.re_cuts[-1]))
        im_b = max(abs(self.im_cuts[0]), abs(self.im_cuts[-1]))
        return re_b + im_b + 1

    def directed(self):
        for ei in range(len(self.edges)):
            yield (ei, 1)
            yield (ei, -1)

    def head_of(self, d):
        e = self.edges[d[0]]
        return e.head if d[1] == 1 else e.tail

    def tail_of(self, d):
        e = self.edges[d[0]]
        return e.tail if d[1] == 1 else e.head

    def next_around_face(self, d):
        """Directed successor in the face walk keeping the region on the
        left: take the incoming end at the head vertex and step one
        position clockwise in the rotation."""
        rot = self.rotations[self.head_of(d)]
        pos = rot.index((d[0], -d[1]))
        return rot[(pos - 1) % len(rot)]

    def segment_ball(self, ei, prec):
        """Disk containing the whole edge segment (disks are convex)."""
        e = self.edges[ei]
        a = self.vertices[e.tail].ball(prec)
        b = self.vertices[e.head].ball(prec)
        return a.hull(b)

    def site_face(self, key):
        for f in self.faces:
            if f.site is not None and f.site.key == key:
                return f
        raise KeyError(key)


def build_base_graph(branch_x=(), punct_x=(), marked_x=(), avoid_x=()):
    """Planar CW skeleton for explicitly listed special x-values.

    Entries may be exact values (AlgebraicNumber, int, Fraction) or INF.
    Punctures at infinity need no planar accommodation because the outer
    face is never merged; branch and avoid entries at infinity are
    ignored since the affine graph never reaches them.
    """
    ss = SiteSet()
    for x in branch_x:
        ss.add_branch(x, 0)
    for x in punct_x:
        if not is_infinite(x):
            ss._get(x).punctures.append(None)
    for x in marked_x:
        if is_infinite(x):
            raise UnsupportedClass(
                "chain endpoints over x = infinity are not supported")
        ss._get(x).markings.append(None)
    for x in avoid_x:
        ss.add_avoid(x)
    sites = ss.finalize()
    return _assemble(sites)


def base_graph_for(siteset):
    sites = siteset.finalize()
    return _assemble(sites, inf_punctures=list(siteset.inf_punctures))


def _assemble(sites, inf_punctures=()):
    if not sites:
        return BaseGraph([], [], [], [], [], list(inf_punctures))
    re_cuts, im_cuts, cell_of = _cuts_for(sites)
    ncol = len(re_cuts) - 1
    nrow = len(im_cuts) - 1
    special = {}
    for s in sites:
        s.cell = cell_of[s.key]
        special[s.cell] = s

    deleted, region = _merge_empty_cells(ncol, nrow, special)

    def reg(cell):
        return region.get(cell, cell)

    vid = {}
    vertices = []

    def vertex(i, j):
        if (i, j) not in vid:
            vid[(i, j)] = len(vertices)
            vertices.append(BaseVertex(re=re_cuts[i], im=im_cuts[j]))
        return vid[(i, j)]

    edges, left, right = [], [], []
    for i in range(ncol + 1):
        for j in range(nrow + 1):
            if i < ncol and ("h", i, j) not in deleted:
                edges.append(BaseEdge(vertex(i, j), vertex(i + 1, j), "grid"))
                left.append(reg((i, j)) if j < nrow else OUTER)
                right.append(reg((i, j - 1)) if j > 0 else OUTER)
            if j < nrow and ("v", i, j) not in deleted:
                edges.append(BaseEdge(vertex(i, j), vertex(i, j + 1), "grid"))
                left.append(reg((i - 1, j)) if i > 0 else OUTER)
                right.append(reg((i, j)) if i < ncol else OUTER)

    for s in sites:
        if not s.markings:
            continue
        i, j = s.cell
        # the cell is protected, so its walls and corners always survive
        corner = vertex(i, j)
        tip = len(vertices)
        vertices.append(BaseVertex(site=s))
        edges.append(BaseEdge(corner, tip, "whisker"))
        left.append(s.cell)
        right.append(s.cell)

    alive_e = _prune(vertices, edges)
    new_index = {}
    kept_vertices = []
    for ei in sorted(alive_e):
        for vi in (edges[ei].tail, edges[ei].head):
            if vi not in new_index:
                new_index[vi] = len(kept_vertices)
                kept_vertices.append(vertices[vi])
    kept_edges, kept_left, kept_right = [], [], []
    for ei in sorted(alive_e):
        e = edges[ei]
        kept_edges.append(
            BaseEdge(new_index[e.tail], new_index[e.head], e.kind))
        kept_left.append(left[ei])
        kept_right.append(right[ei])

    rotations = _rotations(kept_vertices, kept_edges, re_cuts, im_cuts)
    faces = _trace_faces(kept_vertices, kept_edges, rotations,
                         kept_left, kept_right, special)
    return BaseGraph(kept_vertices, kept_edges, rotations, faces, sites,
                     list(inf_punctures), re_cuts, im_cuts)


def _merge_empty_cells(ncol, nrow, special):
    """Breadth-first region growth over empty cells.

    Sources are the unprotected site cells; empty pockets no source
    reaches each seed a region of their own. Each merged cell has
    exactly one deleted wall toward its region, so the deleted set is a
    forest in the dual grid and the surviving graph stays connected. No
    rim wall is ever deleted: the unbounded region stays out of the box.
    """
    deleted = set()
    region = {}

    def neighbours(cell):
        i, j = cell
        if i > 0:
            yield (i - 1, j), ("v", i, j)
        if i < ncol - 1:
            yield (i + 1, j), ("v", i + 1, j)
        if j > 0:
            yield (i, j - 1), ("h", i, j)
        if j < nrow - 1:
            yield (i, j + 1), ("h", i, j + 1)

    def grow(q):
        while q:
            cell = q.popleft()
            for nb, wall in neighbours(cell):
                if nb in special or nb in region:
                    continue
                region[nb] = region[cell]
                deleted.add(wall)
                q.append(nb)

    seeds = deque()
    for cell in sorted(special):
        if not special[cell].is_protected():
            region[cell] = cell
            seeds.append(cell)
    grow(seeds)
    for i in range(ncol):
        for j in range(nrow):
            if (i, j) in special or (i, j) in region:
                continue
            region[(i, j)] = (i, j)
            grow(deque([(i, j)]))
    return deleted, region


def _prune(vertices, edges):
    """Indices of edges surviving iterated removal of stub chains.

    A degree-one vertex that is not a whisker tip contributes a forward
    and a backward pass over its edge to any face walk, cancelling in
    every boundary computation, so such edges are dead weight.
    """
    deg = [0] * len(vertices)
    incident = [[] for _ in vertices]
    for ei, e in enumerate(edges):
        deg[e.tail] += 1
        deg[e.head] += 1
        incident[e.tail].append(ei)
        incident[e.head].append(ei)
    alive = set(range(len(edges)))
    stack = [vi for vi in range(len(vertices))
             if deg[vi] == 1 and not vertices[vi].is_tip]
    while stack:
        vi = stack.pop()
        if deg[vi] != 1 or vertices[vi].is_tip:
            continue
        ei = next(i for i in incident[vi] if i in alive)
        alive.discard(ei)
        e = edges[ei]
        for w in (e.tail, e.head):
            deg[w] -= 1
            if deg[w] == 1 and not vertices[w].is_tip:
                stack.append(w)
    return alive


# compass sectors in counterclockwise order starting due east
_SECTORS = {(1, 0): 0, (1, 1): 1, (0, 1): 2, (-1, 1): 3,
            (-1, 0): 4, (-1, -1): 5, (0, -1): 6, (1, -1): 7}


def _rotations(vertices, edges, re_cuts, im_cuts):
    """Counterclockwise edge-end order around each vertex, exactly.

    Grid edges leave along the axes and each whisker leaves its corner
    strictly into one open quadrant, so the eight compass sectors order
    all ends without numeric work; a sector is never shared.
    """
    keyed = [[] for _ in vertices]
    for ei, e in enumerate(edges):
        for vi, sign in ((e.tail, 1), (e.head, -1)):
            me = vertices[vi]
            other = vertices[e.head if sign == 1 else e.tail]
            if e.kind == "grid":
                dre = _sign(other.re - me.re)
                dim = _sign(other.im - me.im)
            elif sign == 1:
                # corner end of a whisker points into the cell interior
                i, j = other.site.cell
                dre = 1 if me.re == re_cuts[i] else -1
                dim = 1 if me.im == im_cuts[j] else -1
            else:
                # tip end: the only end at its vertex, order is vacuous
                dre, dim = 1, 0
            keyed[vi].append((_SECTORS[(dre, dim)], (ei, sign)))
    rotations = []
    for ends in keyed:
        ends.sort()
        sectors = [k for k, _ in ends]
        assert len(set(sectors)) == len(sectors), "sector clash at a vertex"
        rotations.append([end for _, end in ends])
    return rotations


def _sign(q):
    return (q > 0) - (q < 0)


def _trace_faces(vertices, edges, rotations, left, right, special):
    graph = BaseGraph(vertices, edges, rotations, [], [], [])
    label_of = {}
    for ei in range(len(edges)):
        label_of[(ei, 1)] = left[ei]
        label_of[(ei, -1)] = right[ei]
    seen = set()
    faces = []
    for d0 in graph.directed():
        if d0 in seen:
            continue
        walk = []
        labels = set()
        d = d0
        while True:
            walk.append(d)
            seen.add(d)
            labels.add(label_of[d])
            d = graph.next_around_face(d)
            if d == d0:
                break
        assert len(labels) == 1, "face walk crossed region labels"
        label = labels.pop()
        if label == OUTER:
            faces.append(BaseFace(label, None, walk, "outer"))
        elif label in special:
            faces.append(BaseFace(label, special[label], walk, "site"))
        else:
            faces.append(BaseFace(label, None, walk, "empty"))
    # each region is a disk carved from a tree of cells, so it bounds one
    # walk; a duplicate label would mean the graph came apart somewhere
    assert len({f.label for f in faces}) == len(faces), "region traced twice"
    return faces
