"""Certified lifts of the base graph to each covering component.

Sheets are tracked along edges by tube continuation: a straight segment
is covered by chunks, and over each chunk every sheet gets a disk that
Krawczyk-contracts for the whole x-range at once. The contraction gives
a unique root in the disk for every x in the chunk, pairwise-disjoint
disks keep the sheets apart, so the endpoint permutation is proved, not
guessed. A failed chunk is bisected; a bottomed-out bisection escalates
the working precision.

Sheet indices at the two ends of an edge are matched through canonical
per-vertex fibers (isolated root enclosures in a fixed order), and the
matching itself is a refinement loop: enclosures shrink until every
continued root ball meets exactly one candidate. Since the candidate
family provably contains the root, meeting exactly one member forces
the identity.

A whisker tip over a marking at a branch value of a radical component
collapses all sheets into the single ramified place. The face walk
there crosses the whisker pair by the inverse of the cell boundary
monodromy: the lifted cell falls apart into sectors around the
ramification point, and a sector entered along the slit on sheet a is
left on the sheet whose continuation around the cell returns to a.

Faces over the outer region correspond to places over x = infinity.
When those places are punctured and the fiber is split, sheets are
matched to places by continuing the fiber out of the bounding box and
switching to the chart at infinity, where the normalized branch values
separate the places.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

from ..arith import ComplexBall, isolate_roots, krawczyk_test, refine_root
from ..curve import (
    INF,
    fpoly,
    genus as exact_genus,
    is_infinite,
    place_y_ball,
    places_over,
)
from ..errors import (
    InconsistentInput,
    NonSimpleRoot,
    PrecisionExhausted,
    UnsupportedClass,
)
from .base import SiteSet, base_graph_for

PREC_CAP = 1 << 13
STORE_PREC = 192

_RU = gmpy2.context(precision=53, round=gmpy2.RoundUp)
_RD = gmpy2.context(precision=53, round=gmpy2.RoundDown)


def _absdiff_up(a, b):
    return max(abs(_RD.sub(a, b)), abs(_RU.sub(a, b)))


def _absdiff_lo(a, b):
    dlo = _RD.sub(a, b)
    dhi = _RU.sub(a, b)
    if dlo <= 0 <= dhi:
        return mpfr(0)
    return min(abs(dlo), abs(dhi))


def _inside(k, disk):
    d = _RU.hypot(_absdiff_up(k.re, disk.re), _absdiff_up(k.im, disk.im))
    return _RU.add(d, k.rad) < disk.rad


def _root_gap_lower(a, b):
    """Certified lower bound for the distance between the roots inside."""
    d = _RD.hypot(_absdiff_lo(a.re, b.re), _absdiff_lo(a.im, b.im))
    d = _RD.sub(d, _RU.add(a.rad, b.rad))
    return d if d > 0 else mpfr(0)


def _xkey(x):
    # must agree with the site keying in base.SiteSet
    if isinstance(x, (int, Fraction)):
        return ("q", Fraction(x))
    return x.identity_key()


# ---------------------------------------------------------------------------
# tube continuation


def _tube_step(pc, xa, X, ys, prec):
    """Continue all sheets over one chunk, or None to request bisection.

    pc(x_ball, prec) evaluates the fiber polynomial coefficients; xa is
    the chunk's start enclosure and X covers the whole chunk. ys must be
    isolating balls for the sheets at xa.
    """
    coeffs_a = pc(xa, prec)
    try:
        refined = [refine_root(coeffs_a, y, prec) for y in ys]
    except (NonSimpleRoot, PrecisionExhausted):
        return None
    sep = None
    for i in range(len(refined)):
        for j in range(i + 1, len(refined)):
            g = _root_gap_lower(refined[i], refined[j])
            sep = g if sep is None else min(sep, g)
    if sep is not None and not sep > 0:
        return None
    rho = mpfr(1) if sep is None else sep / 4
    tubes = [ComplexBall(b.re, b.im, rho, prec) for b in refined]
    for tube, b in zip(tubes, refined):
        if not tube.contains_ball(b):
            return None
    for i in range(len(tubes)):
        for j in range(i + 1, len(tubes)):
            if not tubes[i].is_disjoint(tubes[j]):
                return None
    coeffs_X = pc(X, prec)
    out = []
    for tube in tubes:
        try:
            k = krawczyk_test(coeffs_X, tube)
        except NonSimpleRoot:
            return None
        if not _inside(k, tube):
            return None
        out.append(k)
    return out


def _continue_leg(pc, x_of, ys, prec, max_split=42):
    """Certified continuation of the fiber ys from x_of(0) to x_of(1)."""
    limit = Fraction(1, 1 << max_split)
    stack = [(Fraction(0), Fraction(1))]
    while stack:
        ta, tb = stack.pop()
        xa = x_of(ta, prec)
        xb = x_of(tb, prec)
        step = _tube_step(pc, xa, xa.hull(xb), ys, prec)
        if step is None:
            if tb - ta <= limit:
                raise PrecisionExhausted(
                    "tube continuation bottomed out; needs more precision")
            tm = (ta + tb) / 2
            stack.append((tm, tb))
            stack.append((ta, tm))
        else:
            ys = step
    return ys


def _reparam(x_of, lo, hi):
    span = hi - lo

    def g(t, prec):
        return x_of(lo + t * span, prec)

    return g


def _continue_with_midpoint(pc, x_of, ys, prec):
    """Continuation with a mandatory stop at the halfway point."""
    mid = _continue_leg(pc, _reparam(x_of, Fraction(0), Fraction(1, 2)),
                        ys, prec)
    end = _continue_leg(pc, _reparam(x_of, Fraction(1, 2), Fraction(1)),
                        mid, prec)
    return mid, end


def _escalate(task, prec0):
    prec = prec0
    while True:
        try:
            return prec, task(prec)
        except PrecisionExhausted:
            if prec >= PREC_CAP:
                raise
            prec *= 2


def _x_linear(za, zb):
    are, aim = za
    bre, bim = zb

    def x_of(t, prec):
        return ComplexBall.from_rational(are + t * (bre - are),
                                         aim + t * (bim - aim), prec)

    return x_of


def _x_toward_site(corner, site):
    cre, cim = corner

    def x_of(t, prec):
        c = ComplexBall.from_rational(cre, cim, prec)
        s = site.ball(prec)
        tb = ComplexBall.from_rational(t, 0, prec)
        return c.add(tb.mul(s.sub(c)))

    return x_of


def _match_unique(ends, end_refiner, family, prec0):
    """Index into family(prec) forced for each isolating end ball.

    family(prec) must return enclosures that jointly contain every
    candidate value and are pairwise disjoint once prec suffices; an end
    ball overlapping exactly one member then identifies its root.
    """
    prec = prec0
    while True:
        fam = family(prec)
        disjoint = all(
            fam[i].is_disjoint(fam[j])
            for i in range(len(fam)) for j in range(i + 1, len(fam)))
        if disjoint:
            out = []
            for k in ends:
                hits = [j for j, fb in enumerate(fam) if k.overlaps(fb)]
                if len(hits) != 1:
                    out = None
                    break
                out.append(hits[0])
            if out is not None:
                return out
        if prec >= PREC_CAP:
            raise PrecisionExhausted("sheet matching did not resolve")
        prec *= 2
        ends = end_refiner(ends, prec)


# ---------------------------------------------------------------------------
# canonical fibers


class _Fibers:
    """Per-vertex root enclosures of one component, in a fixed order."""

    def __init__(self, comp, graph):
        self.comp = comp
        self.graph = graph
        self.cache = {}

    def poly_at(self, x_ball, prec):
        return [fpoly.eval_ball(c, x_ball, prec) for c in self.comp.ycoeffs]

    def canonical(self, vi):
        balls = self.cache.get(vi)
        if balls is None:
            v = self.graph.vertices[vi]

            def task(prec):
                return isolate_roots(self.poly_at(v.ball(prec), prec), prec)

            _, balls = _escalate(task, 128)
            assert len(balls) == self.comp.deg_y, "fiber degree dropped"
            balls.sort(key=lambda b: (b.re, b.im))
            self.cache[vi] = balls
        return balls

    def refined(self, vi, prec):
        base = self.canonical(vi)
        if prec <= base[0].prec:
            return base
        cs = self.poly_at(self.graph.vertices[vi].ball(prec), prec)
        return [refine_root(cs, b, prec) for b in base]


# ---------------------------------------------------------------------------
# permutations


def _identity(m):
    return list(range(m))


def _inverse(perm):
    out = [0] * len(perm)
    for i, v in enumerate(perm):
        out[v] = i
    return out


def _cycles(perm):
    seen = [False] * len(perm)
    out = []
    for i in range(len(perm)):
        if seen[i]:
            continue
        cyc = []
        j = i
        while not seen[j]:
            seen[j] = True
            cyc.append(j)
            j = perm[j]
        out.append(cyc)
    return out


# ---------------------------------------------------------------------------
# monodromy of one component over the base graph


def _edge_sigmas(curve, ci, graph, want_payload=True):
    """Sheet permutation along every grid edge, tail order to head order.

    Returns (fibers, sigma, mids): sigma[ei][a] is the head sheet that
    tail sheet a continues into, mids[ei][a] a certified enclosure at
    the halfway point of the segment (payload for later integration).
    """
    comp = curve.components[ci]
    m = comp.deg_y
    fib = _Fibers(comp, graph)
    sigma = {}
    mids = {}
    for ei, e in enumerate(graph.edges):
        if e.kind != "grid":
            continue
        if m == 1:
            sigma[ei] = [0]
            mids[ei] = [None]
            continue
        vt = graph.vertices[e.tail]
        vh = graph.vertices[e.head]
        x_of = _x_linear((vt.re, vt.im), (vh.re, vh.im))

        def task(prec, _x=x_of, _t=e.tail):
            return _continue_with_midpoint(
                fib.poly_at, _x, fib.refined(_t, prec), prec)

        prec, (mid, end) = _escalate(task, 128)

        def end_refiner(ends, p, _x=x_of):
            cs = fib.poly_at(_x(Fraction(1), p), p)
            return [refine_root(cs, k, p) for k in ends]

        perm = _match_unique(end, end_refiner,
                             lambda p, _h=e.head: fib.refined(_h, p), prec)
        assert sorted(perm) == list(range(m)), "sheet matching not bijective"
        sigma[ei] = perm
        if want_payload:
            mids[ei] = [b.at_prec(STORE_PREC) for b in mid]
        else:
            mids[ei] = [None] * m
    return fib, sigma, mids


def _walk_loop_perm(walk, edges, sigma, m, start=0):
    """Monodromy along a face walk, whisker double-backs skipped."""
    perm = _identity(m)
    n = len(walk)
    for step in range(n):
        ei, s = walk[(start + step) % n]
        if edges[ei].kind != "grid":
            continue
        se = sigma[ei]
        if s == 1:
            perm = [se[a] for a in perm]
        else:
            inv = _inverse(se)
            perm = [inv[a] for a in perm]
    return perm


def genus_from_monodromy(curve, comp_idx):
    """Genus by certified sheet tracking over a branch-value graph.

    Every face of the graph holds at most one branch value, so the cycle
    counts of the face walk monodromies enumerate all ramification over
    the x-line and the degree-genus count needs no further input.
    """
    comp = curve.components[comp_idx]
    m = comp.deg_y
    if m == 1:
        return 0
    from ..curve import branch_locus

    ss = SiteSet()
    for b in branch_locus(curve, comp_idx):
        ss.add_branch(b, comp_idx)
    graph = base_graph_for(ss)
    if not graph.edges:
        return 0
    _, sigma, _ = _edge_sigmas(curve, comp_idx, graph, want_payload=False)
    total = 0
    for face in graph.faces:
        perm = _walk_loop_perm(face.walk, graph.edges, sigma, m)
        total += m - len(_cycles(perm))
    assert total % 2 == 0, "odd total ramification"
    g = 1 - m + total // 2
    assert g >= 0, "negative genus from monodromy"
    return g


# ---------------------------------------------------------------------------
# the lifted complex


class LiftedVertex:
    __slots__ = ("comp", "base", "sheet", "place")

    def __init__(self, comp, base, sheet=None, place=None):
        self.comp = comp
        self.base = base
        self.sheet = sheet
        self.place = place  # set exactly for whisker tips

    @property
    def is_tip(self):
        return self.place is not None

    def __repr__(self):
        if self.place is not None:
            return "LV(c%d, tip %s)" % (self.comp, self.place)
        return "LV(c%d, v%d, sheet %d)" % (self.comp, self.base, self.sheet)


class LiftedEdge:
    __slots__ = ("comp", "base", "kind", "tail_sheet", "tail", "head",
                 "tail_ball", "mid_ball")

    def __init__(self, comp, base, kind, tail_sheet, tail, head,
                 tail_ball=None, mid_ball=None):
        self.comp = comp
        self.base = base
        self.kind = kind  # "grid" | "whisker" | "whisker_ram"
        self.tail_sheet = tail_sheet
        self.tail = tail
        self.head = head
        self.tail_ball = tail_ball
        self.mid_ball = mid_ball

    def __repr__(self):
        return "LE(c%d, e%d, sheet %d, %s)" % (
            self.comp, self.base, self.tail_sheet, self.kind)


class LiftedFace:
    __slots__ = ("comp", "label", "row", "omit_place")

    def __init__(self, comp, label, row, omit_place=None):
        self.comp = comp
        self.label = label
        self.row = row  # lifted edge index -> coefficient
        self.omit_place = omit_place

    @property
    def kept(self):
        return self.omit_place is None


class CurveLift:
    """Lifted CW data of all components over one base graph.

    Vertices carry keys ("v", comp, base vertex, sheet) for grid lifts
    and ("t", comp, place key) for tips; edges carry ("e", comp, base
    edge, tail sheet) for grid lifts and ("w", comp, base edge, sheet)
    for whisker lifts. Faces hold integer boundary rows over the edges;
    a face is omitted exactly when it holds a puncture.
    """

    def __init__(self, X, graph):
        self.X = X
        self.graph = graph
        self.vertices = []
        self.edges = []
        self.faces = []
        self.vertex_index = {}
        self.edge_index = {}
        self.comp_stats = []

    def add_vertex(self, key, lv):
        idx = self.vertex_index.get(key)
        if idx is None:
            idx = len(self.vertices)
            self.vertex_index[key] = idx
            self.vertices.append(lv)
        return idx

    def add_edge(self, key, le):
        assert key not in self.edge_index, "duplicate lifted edge"
        self.edge_index[key] = len(self.edges)
        self.edges.append(le)

    def a_vertices(self):
        """Indices of the marked endpoint vertices."""
        return [i for i, v in enumerate(self.vertices) if v.is_tip]


def lift_curve(X, graph):
    lift = CurveLift(X, graph)
    if not graph.edges:
        return lift
    for ci in range(len(X.curve.components)):
        _lift_component(lift, X, graph, ci)
    return lift


def _lift_component(lift, X, graph, ci):
    curve = X.curve
    comp = curve.components[ci]
    m = comp.deg_y
    fib, sigma, mids = _edge_sigmas(curve, ci, graph)

    for vi in range(len(graph.vertices)):
        if graph.vertices[vi].is_tip:
            continue
        for a in range(m):
            lift.add_vertex(("v", ci, vi, a), LiftedVertex(ci, vi, sheet=a))
    for ei, e in enumerate(graph.edges):
        if e.kind != "grid":
            continue
        for a in range(m):
            tail = lift.vertex_index[("v", ci, e.tail, a)]
            head = lift.vertex_index[("v", ci, e.head, sigma[ei][a])]
            tb = None
            if m > 1:
                tb = fib.canonical(e.tail)[a].at_prec(STORE_PREC)
            lift.add_edge(("e", ci, ei, a),
                          LiftedEdge(ci, ei, "grid", a, tail, head,
                                     tail_ball=tb, mid_ball=mids[ei][a]))

    whisk = _lift_whiskers(lift, X, graph, ci, fib, sigma)
    for q in X.markings:
        if q.comp == ci:
            assert ("t", ci, q.key()) in lift.vertex_index, \
                "marking did not receive a tip vertex"

    n_faces = _lift_faces(lift, X, graph, ci, fib, sigma, whisk)

    cover = {}
    for f in lift.faces:
        if f.comp != ci:
            continue
        for k, c in f.row.items():
            cover[k] = cover.get(k, 0) + c
    assert not any(cover.values()), "face rows do not cancel over each edge"

    _assert_connected(lift, ci)
    n_v = sum(1 for v in lift.vertices if v.comp == ci)
    n_e = sum(1 for e in lift.edges if e.comp == ci)
    g = exact_genus(curve, ci)
    assert n_v - n_e + n_faces == 2 - 2 * g, \
        "lifted complex is not a closed genus %d surface" % g
    lift.comp_stats.append(
        {"genus": g, "vertices": n_v, "edges": n_e, "faces": n_faces})


def _assert_connected(lift, ci):
    """Monodromy transitivity, which certifies absolute irreducibility."""
    idx = [i for i, v in enumerate(lift.vertices) if v.comp == ci]
    parent = {i: i for i in idx}

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for e in lift.edges:
        if e.comp != ci:
            continue
        a, b = find(e.tail), find(e.head)
        if a != b:
            parent[a] = b
    if len({find(i) for i in idx}) > 1:
        raise InconsistentInput(
            "component %d is not absolutely irreducible" % ci)


# ---------------------------------------------------------------------------
# whiskers and tips


class _WhiskerLift:
    """Per-site lift data of one component across a whisker slit."""

    __slots__ = ("site", "edge", "corner", "ret", "tip_of_sheet", "ram")

    def __init__(self, site, edge, corner, ret, tip_of_sheet, ram):
        self.site = site
        self.edge = edge  # base edge index
        self.corner = corner  # base vertex index
        self.ret = ret  # sheet map across the in-out double-back
        self.tip_of_sheet = tip_of_sheet  # sheet -> lifted tip index or None
        self.ram = ram


def _lift_whiskers(lift, X, graph, ci, fib, sigma):
    """Tips and whisker edges of one component, keyed by site."""
    curve = X.curve
    comp = curve.components[ci]
    m = comp.deg_y
    out = {}
    for ei, e in enumerate(graph.edges):
        if e.kind != "whisker":
            continue
        site = graph.vertices[e.head].site
        marks_here = [q for q in X.markings_on(ci)
                      if _xkey(q.x) == site.key]
        if not marks_here:
            # no endpoint of this component over the slit: nothing to
            # keep, and the face walk closes up by plain monodromy
            out[site.key] = _WhiskerLift(site, ei, e.tail, _identity(m),
                                         [None] * m, ram=False)
            continue
        x0 = marks_here[0].x
        marks_by_key = {q.key(): q for q in marks_here}

        if ci in site.branch_comps:
            places = places_over(curve, ci, x0)
            if len(places) != 1 or places[0].kind != "ram":
                raise UnsupportedClass(
                    "endpoint at a branch value needs a single ramified "
                    "place over it")
            place = places[0]
            if set(marks_by_key) != {place.key()}:
                raise InconsistentInput(
                    "endpoint does not match the place over its x-value")
            loop = _site_loop_perm(graph, site, e.tail, sigma, m)
            assert len(_cycles(loop)) == 1, \
                "ramified endpoint with split cell monodromy"
            tip = lift.add_vertex(
                ("t", ci, place.key()),
                LiftedVertex(ci, e.head, place=marks_by_key[place.key()]))
            for a in range(m):
                tail = lift.vertex_index[("v", ci, e.tail, a)]
                tb = None
                if m > 1:
                    tb = fib.canonical(e.tail)[a].at_prec(STORE_PREC)
                lift.add_edge(("w", ci, ei, a),
                              LiftedEdge(ci, ei, "whisker_ram", a, tail, tip,
                                         tail_ball=tb))
            out[site.key] = _WhiskerLift(site, ei, e.tail, _inverse(loop),
                                         [tip] * m, ram=True)
            continue

        places = places_over(curve, ci, x0)
        assert len(places) == m, "unramified fiber of the wrong size"
        perm = _match_sheets_to_places(curve, ci, graph, fib, e.tail, site,
                                       places)
        tip_of_sheet = [None] * m
        for a in range(m):
            key = places[perm[a]].key()
            if key not in marks_by_key:
                continue  # unmarked lifted leaf, never built
            tip = lift.add_vertex(("t", ci, key),
                                  LiftedVertex(ci, e.head,
                                               place=marks_by_key[key]))
            tip_of_sheet[a] = tip
            tail = lift.vertex_index[("v", ci, e.tail, a)]
            tb = None
            if m > 1:
                tb = fib.canonical(e.tail)[a].at_prec(STORE_PREC)
            lift.add_edge(("w", ci, ei, a),
                          LiftedEdge(ci, ei, "whisker", a, tail, tip,
                                     tail_ball=tb))
        out[site.key] = _WhiskerLift(site, ei, e.tail, _identity(m),
                                     tip_of_sheet, ram=False)
    return out


def _site_loop_perm(graph, site, corner, sigma, m):
    """Cell boundary monodromy based at the whisker corner."""
    face = graph.site_face(site.key)
    walk = face.walk
    start = None
    for pos, (ei, s) in enumerate(walk):
        if graph.edges[ei].kind == "whisker" and s == -1:
            start = (pos + 1) % len(walk)
            break
    assert start is not None, "site face lost its whisker"
    assert graph.tail_of(walk[start]) == corner
    return _walk_loop_perm(walk, graph.edges, sigma, m, start=start)


def _match_sheets_to_places(curve, ci, graph, fib, corner_vi, site, places):
    """Continue the corner fiber to the site value inside its own cell."""
    comp = curve.components[ci]
    m = comp.deg_y
    if m == 1:
        return [0]
    corner = graph.vertices[corner_vi]
    x_of = _x_toward_site((corner.re, corner.im), site)

    def task(prec):
        return _continue_leg(fib.poly_at, x_of,
                             fib.refined(corner_vi, prec), prec)

    prec, ends = _escalate(task, 128)

    def end_refiner(ends_, p):
        cs = fib.poly_at(site.ball(p), p)
        return [refine_root(cs, k, p) for k in ends_]

    def family(p):
        return [place_y_ball(curve, q, p) for q in places]

    perm = _match_unique(ends, end_refiner, family, prec)
    assert sorted(perm) == list(range(m)), "place matching not bijective"
    return perm


# ---------------------------------------------------------------------------
# lifted faces


def _lift_faces(lift, X, graph, ci, fib, sigma, whisk):
    curve = X.curve
    m = curve.components[ci].deg_y
    punct = [p for p in X.punctures if p.comp == ci]
    fin_punct = [p for p in punct if not is_infinite(p.x)]
    inf_punct = [p for p in punct if is_infinite(p.x)]
    n_faces = 0
    omitted = []
    for fi, face in enumerate(graph.faces):
        if face.kind == "outer":
            walk = _rotate_to_corner(graph, face.walk)
        else:
            walk = _align_walk(graph, face.walk)
        perm, steps = _face_transitions(graph, walk, sigma, whisk, m)
        cycles = _cycles(perm)
        omit = _omission(X, graph, ci, fib, face, walk, cycles, m,
                         fin_punct, inf_punct)
        for cyc in cycles:
            row = {}
            a = cyc[0]
            for _ in range(len(cyc)):
                a = _accumulate_walk(lift, ci, steps, sigma, whisk, a, row)
            assert a == cyc[0], "lifted face walk failed to close"
            row = {k: c for k, c in row.items() if c}
            place = omit.get(cyc[0])
            lift.faces.append(LiftedFace(ci, (fi, cyc[0]), row, place))
            if place is not None:
                omitted.append(place)
            n_faces += 1
    assert Counter(p.key() for p in omitted) == \
        Counter(p.key() for p in punct), \
        "punctured cells do not match the puncture list"
    return n_faces


def _align_walk(graph, walk):
    """Rotate a face walk to start on a grid edge.

    Keeps whisker in-out pairs consecutive; a cyclic rotation changes
    neither the boundary row nor the cycle structure.
    """
    for i, d in enumerate(walk):
        if graph.edges[d[0]].kind == "grid":
            return walk[i:] + walk[:i]
    raise AssertionError("face walk without grid edges")


def _rotate_to_corner(graph, walk):
    """Start the outer walk at the lower right corner of the box.

    The corner always survives (the rim is never pruned) and a path that
    leaves it pointing away from the box stays inside the closure of the
    outer face, which makes it a sound basepoint for matching sheets to
    places over infinity.
    """
    tre = graph.re_cuts[-1]
    tim = graph.im_cuts[0]
    for i in range(len(walk)):
        v = graph.vertices[graph.tail_of(walk[i])]
        if not v.is_tip and v.re == tre and v.im == tim:
            return walk[i:] + walk[:i]
    raise AssertionError("outer walk misses the box corner")


def _face_transitions(graph, walk, sigma, whisk, m):
    """Compile a face walk into sheet transitions.

    Returns (perm, steps): perm is the one-pass monodromy at the walk's
    start vertex, steps the compiled instructions for one pass.
    """
    steps = []
    i = 0
    while i < len(walk):
        ei, s = walk[i]
        e = graph.edges[ei]
        if e.kind == "grid":
            steps.append(("g", ei, s))
            i += 1
            continue
        assert s == 1 and i + 1 < len(walk) and walk[i + 1] == (ei, -1), \
            "whisker not entered and left consecutively"
        steps.append(("w", ei, graph.vertices[e.head].site.key))
        i += 2
    perm = []
    for a in range(m):
        b = a
        for step in steps:
            b = _step_sheet(step, sigma, whisk, b)
        perm.append(b)
    return perm, steps


def _step_sheet(step, sigma, whisk, a):
    kind, ei, extra = step
    if kind == "g":
        return sigma[ei][a] if extra == 1 else _inverse(sigma[ei])[a]
    return whisk[extra].ret[a]


def _accumulate_walk(lift, ci, steps, sigma, whisk, a, row):
    """One pass of a compiled walk from sheet a, adding row coefficients.

    Unramified whisker pairs enter and leave on the same sheet, so their
    contributions cancel and nothing is emitted; ramified pairs leave on
    a different sheet and keep both signed entries.
    """
    for kind, ei, extra in steps:
        if kind == "g":
            if extra == 1:
                idx = lift.edge_index[("e", ci, ei, a)]
                row[idx] = row.get(idx, 0) + 1
                a = sigma[ei][a]
            else:
                b = _inverse(sigma[ei])[a]
                idx = lift.edge_index[("e", ci, ei, b)]
                row[idx] = row.get(idx, 0) - 1
                a = b
        else:
            wl = whisk[extra]
            b = wl.ret[a]
            if wl.ram:
                idx = lift.edge_index[("w", ci, ei, a)]
                row[idx] = row.get(idx, 0) + 1
                jdx = lift.edge_index[("w", ci, ei, b)]
                row[jdx] = row.get(jdx, 0) - 1
            else:
                assert b == a
            a = b
    return a


def _omission(X, graph, ci, fib, face, walk, cycles, m, fin_punct,
              inf_punct):
    """Which face cycles hold a puncture: cycle start sheet -> place."""
    curve = X.curve
    if face.kind == "empty":
        assert len(cycles) == m, "sheet mixing around an empty region"
        return {}
    if face.kind == "outer":
        return _omission_outer(curve, ci, graph, fib, walk, cycles, m,
                               inf_punct)
    site = face.site
    if ci not in site.branch_comps:
        assert len(cycles) == m, "sheet mixing without a branch value"
    pks = {p.key(): p for p in fin_punct if _xkey(p.x) == site.key}
    if not pks:
        return {}
    x0 = next(iter(pks.values())).x
    places = places_over(curve, ci, x0)
    if ci in site.branch_comps:
        assert len(places) == 1 and places[0].kind == "ram"
        assert len(cycles) == 1, "ramified fiber with split cell monodromy"
        assert set(pks) == {places[0].key()}
        return {cycles[0][0]: pks[places[0].key()]}
    assert len(places) == m
    corner = graph.tail_of(walk[0])
    match = _match_sheets_to_places(curve, ci, graph, fib, corner, site,
                                    places)
    out = {}
    for a in range(m):
        key = places[match[a]].key()
        if key in pks:
            out[a] = pks[key]
    assert len(out) == len(pks), "puncture place missing from its fiber"
    return out


def _omission_outer(curve, ci, graph, fib, walk, cycles, m, inf_punct):
    if not inf_punct:
        return {}
    places = places_over(curve, ci, INF)
    pks = {p.key(): p for p in inf_punct}
    assert set(pks) <= {q.key() for q in places}, "unknown place at infinity"
    if len(places) == 1:
        assert len(cycles) == 1, "one place over infinity, several faces"
        q = places[0]
        if q.key() in pks:
            return {cycles[0][0]: pks[q.key()]}
        return {}
    assert len(places) == m, "unexpected fiber size at infinity"
    assert len(cycles) == m, "split infinity with sheet mixing"
    match = _match_outer(curve, ci, graph, fib, walk, places)
    out = {}
    for a in range(m):
        key = places[match[a]].key()
        if key in pks:
            out[a] = pks[key]
    assert len(out) == len(pks), "puncture place missing over infinity"
    return out


def _match_outer(curve, ci, graph, fib, walk, places):
    """Match corner sheets to places over infinity, certified.

    The fiber is continued from the box corner horizontally out to
    re = R, with R beyond every special value, then radially to w = 0 in
    the chart x = 1/w. In that chart the normalized variable
    v = y w^(n/m) satisfies v^m = g(w) with g the reversed right side,
    and the places over infinity separate as the roots of v^m = g(0).
    """
    comp = curve.components[ci]
    m = comp.deg_y
    shape = comp._superelliptic_shape()
    assert shape is not None, "matching over infinity needs a radical model"
    _, f = shape
    g_list = list(reversed(f))
    k = places[0].data["n_over_m"]
    assert k >= 1
    corner_vi = graph.tail_of(walk[0])
    corner = graph.vertices[corner_vi]
    R = graph.box_radius()
    b0 = corner.im
    x_leg = _x_linear((corner.re, b0), (R, b0))
    den = R * R + b0 * b0
    w1 = (Fraction(R, den), Fraction(-b0, den))
    w_leg = _x_linear(w1, (Fraction(0), Fraction(0)))

    def pv(w_ball, prec):
        gw = fpoly.eval_ball(g_list, w_ball, prec)
        cs = [gw.neg()]
        cs.extend(ComplexBall.zero(prec) for _ in range(m - 1))
        cs.append(ComplexBall.one(prec))
        return cs

    def task(prec):
        ys = _continue_leg(fib.poly_at, x_leg,
                           fib.refined(corner_vi, prec), prec)
        w1b = ComplexBall.from_rational(w1[0], w1[1], prec)
        w1p = w1b
        for _ in range(k - 1):
            w1p = w1p.mul(w1b)
        vs = [y.mul(w1p) for y in ys]
        return _continue_leg(pv, w_leg, vs, prec)

    prec, ends = _escalate(task, 128)

    def end_refiner(ends_, p):
        cs = pv(ComplexBall.zero(p), p)
        return [refine_root(cs, e, p) for e in ends_]

    def family(p):
        fam = []
        for q in places:
            if "c" in q.data:
                fam.append(q.data["c"].embed(p))
            else:
                cs = [cf.embed(p) for cf in q.data["factor"]]
                seed = q.ybranch.at_prec(max(p, q.ybranch.prec))
                fam.append(refine_root(cs, seed, p))
        return fam

    perm = _match_unique(ends, end_refiner, family, prec)
    assert sorted(perm) == list(range(m)), "infinity matching not bijective"
    return perm
