"""Cohomology bases and reduction on punctured marked curves.

Classes of the first cohomology of (C minus punctures, markings) are
represented by pairs (differential, function on the markings). The basis is
built in blocks: regular differentials, second-kind differentials with a
pole only at a chosen base point, third-kind differentials with simple
poles on the punctures, and indicator differences on the markings. The
filtration data then falls out of the block structure.

Reduction rewrites an arbitrary differential in this basis together with an
exact antiderivative witness, so every result is self-checking.
"""

from __future__ import annotations

from fractions import Fraction

from . import fieldlinalg
from .algnum import rational_field, to_common_field
from .curve import (
    INF,
    Differential,
    Divisor,
    FFElem,
    Place,
    PlaneCurve,
    dx_divisor,
    evaluate_at_place,
    genus,
    linear_system,
    places_over,
    pole_divisor,
    residual_divisor,
)
from .curve import fpoly
from .curve.riemannroch import lift_via_gen
from .errors import InconsistentInput, PrecisionExhausted, UnsupportedClass


class MarkedCurve:
    """A smooth projective curve with punctures D and markings E."""

    def __init__(self, curve, punctures=(), markings=()):
        self.curve = curve
        self.punctures = list(punctures)
        self.markings = list(markings)
        pk = {q.key() for q in self.punctures}
        mk = {q.key() for q in self.markings}
        if len(pk) != len(self.punctures) or len(mk) != len(self.markings):
            raise InconsistentInput("repeated puncture or marking")
        if pk & mk:
            raise InconsistentInput("punctures and markings must be disjoint")

    def punctures_on(self, comp_idx):
        return [q for q in self.punctures if q.comp == comp_idx]

    def markings_on(self, comp_idx):
        return [q for q in self.markings if q.comp == comp_idx]


class _CompBlock:
    """Per-component basis bookkeeping."""

    __slots__ = (
        "genus",
        "base_place",
        "dx_div",
        "punctures",
        "comp",
        "lift",
        "w_elems",
        "w_indices",
        "n_first",
        "n_second",
        "e_places",
        "e_indices",
    )


class CohomBasis:
    """Basis of H^1 of (C minus D, E) split as W + functions on markings.

    elements: list of (Differential, dict Place -> AlgebraicNumber).
    Filtration index lists refer to positions in elements.
    """

    def __init__(self, X, curve, elements, base_points, f1, w0, w1, blocks,
                 certified):
        self.X = X
        self.curve = curve
        self.elements = elements
        self.base_points = base_points
        self.f1_indices = f1
        self.w0_indices = w0
        self.w1_indices = w1
        self.pole_support = set(base_points.values()) | set(X.punctures)
        self.certified = certified
        self._blocks = blocks

    def dimension(self):
        return len(self.elements)

    @property
    def base_point(self):
        assert len(self.base_points) == 1
        return next(iter(self.base_points.values()))

    def to_json(self):
        elems = []
        for om, amap in self.elements:
            parts = {}
            for ci, f in om.parts.items():
                nums, den = f.common_denominator()
                parts[str(ci)] = {
                    "nums": [[c.to_json() for c in nb] for nb in nums],
                    "den": [c.to_json() for c in den],
                }
            elems.append({
                "differential": parts,
                "a": [[p.to_json(), v.to_json()] for p, v in amap.items()],
            })
        return {
            "elements": elems,
            "base_points": {
                str(ci): p.to_json() for ci, p in self.base_points.items()
            },
            "f1": list(self.f1_indices),
            "w0": list(self.w0_indices),
            "w1": list(self.w1_indices),
            "certified": self.certified,
        }


class ReductionResult:
    """eta + d(witness) equals the input; boundary_class = witness on E."""

    def __init__(self, eta, boundary_class, witness):
        self.eta = eta
        self.boundary_class = boundary_class
        self.witness = witness


def _candidate_x_values(field):
    yield INF
    yield field.element(0)
    n = 1
    while n < 60:
        yield field.element(n)
        yield field.element(-n)
        n += 1


def find_non_weierstrass(curve, comp_idx, avoid=()):
    """A place p with h0(g p) = 1, skipping the avoid set.

    For unsupported classes the linear-system test is unavailable and the
    first candidate off the avoid set is returned as a heuristic choice.
    """
    avoid_keys = {q.key() if isinstance(q, Place) else q for q in avoid}
    try:
        g = genus(curve, comp_idx)
    except (UnsupportedClass, ImportError):
        g = None
    for x0 in _candidate_x_values(curve.components[comp_idx].field):
        try:
            places = places_over(curve, comp_idx, x0)
        except UnsupportedClass:
            continue
        for p in places:
            if p.key() in avoid_keys:
                continue
            if g is not None and g <= 1:
                return p
            if g is None:
                return p
            try:
                ls = linear_system(curve, comp_idx, Divisor({p: g}))
            except UnsupportedClass:
                return p
            if ls.dimension() == 1:
                return p
    raise InconsistentInput("no base point candidate found")


def _ff_vectors(comp, elems):
    """Coordinate rows for exact rank work, over a shared denominator."""
    f = comp.field
    den = [f.one()]
    parts = []
    for e in elems:
        nums, d = e.common_denominator()
        parts.append((nums, d))
        g = fpoly.gcd(f, den, d)
        q, _ = fpoly.divmod_poly(f, d, g)
        den = fpoly.mul(f, den, q)
    scaled = []
    width = 1
    for nums, d in parts:
        q, r = fpoly.divmod_poly(f, den, d)
        assert not r
        row = [fpoly.mul(f, nb, q) for nb in nums]
        scaled.append(row)
        for nb in row:
            width = max(width, len(nb))
    rows = []
    for row in scaled:
        flat = []
        for b in range(comp.deg_y):
            nb = row[b] if b < len(row) else []
            flat.extend(list(nb) + [f.zero()] * (width - len(nb)))
        rows.append(flat)
    return rows


def _extend_independent(field, base_rows, cand_rows, need):
    """Indices of candidates that grow the row span, greedily, need many."""
    rows = list(base_rows)
    r = fieldlinalg.rank(field, rows) if rows else 0
    picked = []
    for i, cand in enumerate(cand_rows):
        if len(picked) == need:
            break
        trial = rows + [cand]
        r2 = fieldlinalg.rank(field, trial)
        if r2 > r:
            rows = trial
            r = r2
            picked.append(i)
    assert len(picked) == need, "basis extension fell short"
    return picked


def _merge_fields(gens):
    """Common field and per-source morphisms for a list of field gens."""
    F, imgs = to_common_field(gens)

    def make(img):
        return lambda e: lift_via_gen(e, img)

    return F, [make(im) for im in imgs]


def cohomology_basis(X, avoid=()):
    """Differential basis with Hodge and weight filtration markers.

    Per component the W part has dimension 2 genus plus number of
    punctures minus one (when punctured); markings add indicator
    differences. Poles sit only on punctures and one base point per
    component, chosen off the avoid set.
    """
    curve = X.curve
    avoid_keys = {q.key() if isinstance(q, Place) else q for q in avoid}
    avoid_keys |= {q.key() for q in X.punctures}
    avoid_keys |= {q.key() for q in X.markings}

    certified = True
    per_comp = []
    gens = [curve.field.gen()]
    systems = []
    for ci, comp in enumerate(curve.components):
        if comp.tag == "general":
            raise UnsupportedClass(
                "general-tag basis needs the monodromy layer"
            )
        g = genus(curve, ci)
        D_c = X.punctures_on(ci)
        p = find_non_weierstrass(curve, ci, avoid_keys)
        ddx = dx_divisor(curve, ci)
        assert ddx.degree(ci) == 2 * g - 2
        sys1 = linear_system(curve, ci, ddx)
        sys2 = linear_system(curve, ci, ddx.add(Divisor({p: g + 1})))
        sys3 = None
        if D_c:
            sys3 = linear_system(
                curve, ci, ddx.add(Divisor({q: 1 for q in D_c}))
            )
        per_comp.append((g, D_c, p, ddx, sys1, sys2, sys3))
        for s in (sys1, sys2, sys3):
            if s is not None:
                systems.append((ci, s))
                gens.append(s.curve.components[ci].field.gen())

    F, morphs = _merge_fields(gens)
    lift0 = morphs[0]
    comps_F = [c.lift_to(F, lift0) for c in curve.components]
    sys_lift = {}
    for (ci, s), m in zip(systems, morphs[1:]):
        sys_lift[id(s)] = m

    elements = []
    f1, w0, w1 = [], [], []
    base_points = {}
    blocks = {}
    for ci, (g, D_c, p, ddx, sys1, sys2, sys3) in enumerate(per_comp):
        comp_F = comps_F[ci]
        base_points[ci] = p

        def lifted(sys):
            m = sys_lift[id(sys)]
            return [e.lift_to(comp_F, m) for e in sys.elements]

        b1 = lifted(sys1)
        assert len(b1) == g
        cand2 = lifted(sys2)
        rows = _ff_vectors(comp_F, b1 + cand2)
        idx2 = _extend_independent(F, rows[:g], rows[g:], g)
        b2 = [cand2[i] for i in idx2]
        b3 = []
        if sys3 is not None and len(D_c) > 1:
            cand3 = lifted(sys3)
            rows = _ff_vectors(comp_F, b1 + b2 + cand3)
            k = len(b1) + len(b2)
            idx3 = _extend_independent(
                F, rows[:k], rows[k:], len(D_c) - 1
            )
            b3 = [cand3[i] for i in idx3]

        blk = _CompBlock()
        blk.genus = g
        blk.base_place = p
        blk.dx_div = ddx
        blk.punctures = D_c
        blk.comp = comp_F
        blk.lift = lift0
        blk.w_elems = b1 + b2 + b3
        blk.n_first = len(b1)
        blk.n_second = len(b2)
        blk.w_indices = []
        for j, e in enumerate(blk.w_elems):
            i = len(elements)
            blk.w_indices.append(i)
            elements.append((Differential.on(ci, e), {}))
            if j < len(b1) or j >= len(b1) + len(b2):
                f1.append(i)
            if j < len(b1) + len(b2):
                w1.append(i)
        blocks[ci] = blk

    for ci, blk in blocks.items():
        E_c = X.markings_on(ci)
        blk.e_places = E_c
        blk.e_indices = []
        one = rational_field.element(1)
        for e in E_c[1:]:
            i = len(elements)
            blk.e_indices.append(i)
            elements.append(
                (Differential({}), {E_c[0]: one.neg(), e: one})
            )
            w0.append(i)
            w1.append(i)

    basis = CohomBasis(
        X, PlaneCurve(comps_F), elements, base_points, f1, w0, w1, blocks,
        certified,
    )
    return basis


def _pointwise_min(d1, d2):
    out = {}
    for q in set(d1.weights) | set(d2.weights):
        m = min(
            Fraction(d1.weights.get(q, 0)), Fraction(d2.weights.get(q, 0))
        )
        if m:
            out[q] = m
    return Divisor(out)


def _antiderivative_bound(dpp, dx_div):
    """Pole allowance for F from the target profile of dF/dx."""
    d3 = {}
    for q in set(dpp.weights) | set(dx_div.weights):
        w = Fraction(dpp.weights.get(q, 0))
        s = Fraction(dx_div.weights.get(q, 0))
        bound = min(Fraction(0), w + 1 + s)
        if bound < 0:
            d3[q] = -bound
    return d3


def _align(curve, mu):
    """The curve and differential over one shared field."""
    keys = sorted(
        ci for ci, f in mu.parts.items() if f is not None and not f.is_zero()
    )
    if all(mu.parts[ci].comp.field is curve.field for ci in keys):
        return curve, mu
    gens = [curve.field.gen()] + [mu.parts[ci].comp.field.gen() for ci in keys]
    F1, morphs = _merge_fields(gens)
    curve_1 = curve.lift_to(F1, morphs[0])
    parts = {}
    for ci, m in zip(keys, morphs[1:]):
        parts[ci] = mu.parts[ci].lift_to(curve_1.components[ci], m)
    return curve_1, Differential(parts)


def _reduce_component(curve_1, basis, ci, h1):
    """Solve h + dF/dx = sum a_i w_i exactly; returns (a, F, ws, curve)."""
    blk = basis._blocks[ci]
    g = blk.genus

    div_h = pole_divisor(curve_1, ci, h1)
    dprime = blk.dx_div.add(
        Divisor({q: 1 for q in blk.punctures})
    ).add(Divisor({blk.base_place: g + 1}))
    dpp = _pointwise_min(div_h, dprime.neg())

    # antiderivative pole bound: v(F) >= min(0, v(f') + 1 + v(dx)); the
    # dx support matters even off dpp (v(dx) <= -2 forces growth room)
    d3 = _antiderivative_bound(dpp, blk.dx_div)
    sysF = linear_system(curve_1, ci, Divisor(d3))

    gens = [
        blk.comp.field.gen(),
        sysF.curve.components[ci].field.gen(),
        curve_1.field.gen(),
    ]
    F2, (m_basis, m_sys, m_1) = _merge_fields(gens)
    comps_F2 = [c.lift_to(F2, m_1) for c in curve_1.components]
    curve_F2 = PlaneCurve(comps_F2)
    comp_F2 = comps_F2[ci]

    h2 = h1.lift_to(comp_F2, m_1)
    ws = [w.lift_to(comp_F2, m_basis) for w in blk.w_elems]
    us = [u.lift_to(comp_F2, m_sys) for u in sysF.elements]
    dus = [u.dx_total() for u in us]

    vecs = _ff_vectors(comp_F2, [h2] + dus + ws)
    hvec = vecs[0]
    dvecs = vecs[1:1 + len(dus)]
    wvecs = vecs[1 + len(dus):]
    nrows = len(hvec)
    m = []
    rhs = []
    for k in range(nrows):
        m.append(
            [dv[k] for dv in dvecs] + [wv[k].neg() for wv in wvecs]
        )
        rhs.append(hvec[k].neg())
    sol = fieldlinalg.solve(F2, m, rhs)
    assert sol is not None, "reduction solve must be consistent"
    cs = sol[:len(us)]
    a = sol[len(us):]

    F_elem = FFElem.const(comp_F2, 0)
    for c, u in zip(cs, us):
        F_elem = F_elem.add(u.mul(FFElem.const(comp_F2, c)))

    # self-check: the witness identity holds exactly
    acc = h2.add(F_elem.dx_total())
    for ai, w in zip(a, ws):
        acc = acc.sub(w.mul(FFElem.const(comp_F2, ai)))
    assert acc.is_zero(), "witness identity failed"

    return a, F_elem, ws, curve_F2


def _boundary_coords(values, base_count):
    """Coordinates in the indicator-difference basis plus a constant."""
    # values: list over markings e_0..e_K of field elements, one field
    field = values[0].field if values else rational_field
    K = len(values) - 1
    m = []
    rhs = []
    for k, v in enumerate(values):
        row = []
        for j in range(K):
            if k == 0:
                row.append(field.element(-1))
            elif k == j + 1:
                row.append(field.one())
            else:
                row.append(field.zero())
        row.append(field.one())
        m.append(row)
        rhs.append(v)
    sol = fieldlinalg.solve(field, m, rhs)
    assert sol is not None
    return sol[:K]


def reduce_symbolic(mu, X, basis):
    """Rewrite mu in the basis with an exact antiderivative witness.

    Returns (ReductionResult, coords). The witness f satisfies
    mu = eta + df componentwise and the boundary class is f restricted to
    the markings, normalized to vanish at each component's base marking.
    """
    curve_1, mu_1 = _align(X.curve, mu)
    resd = residual_divisor(curve_1, mu_1)
    dkeys = {q.key() for q in X.punctures}
    for q in resd.weights:
        if q.key() not in dkeys:
            raise InconsistentInput("residues must sit on the punctures")

    zero = rational_field.zero()
    coords = [zero for _ in basis.elements]
    eta = Differential({})
    witness = {}
    wit_curves = {}
    for ci, h in mu_1.parts.items():
        if h is None or h.is_zero():
            continue
        a, F_elem, ws, curve_F2 = _reduce_component(curve_1, basis, ci, h)
        blk = basis._blocks[ci]
        comp_F2 = curve_F2.components[ci]
        part = FFElem.const(comp_F2, 0)
        for idx, ai, w in zip(blk.w_indices, a, ws):
            coords[idx] = ai
            part = part.add(w.mul(FFElem.const(comp_F2, ai)))
        if not part.is_zero():
            eta = eta.add(Differential.on(ci, part))
        witness[ci] = F_elem.neg()
        wit_curves[ci] = curve_F2

    boundary = {}
    for ci, blk in basis._blocks.items():
        if not blk.e_places:
            continue
        f_ci = witness.get(ci)
        if f_ci is None:
            for e in blk.e_places:
                boundary[e] = zero
            for idx in blk.e_indices:
                coords[idx] = zero
            continue
        raw = [
            evaluate_at_place(wit_curves[ci], f_ci, e) for e in blk.e_places
        ]
        Fv, vals = to_common_field(raw)
        cs = _boundary_coords(vals, len(blk.e_places))
        for idx, c in zip(blk.e_indices, cs):
            coords[idx] = c
        for e, v in zip(blk.e_places, vals):
            boundary[e] = v.sub(vals[0])

    return ReductionResult(eta, boundary, witness), coords


def third_kind_normalize(omega, X):
    """The third-kind representative of omega's class, if one exists.

    Returns (eta, witness) with omega = eta + d(witness), or None when the
    class has no simple-pole representative.
    """
    curve = X.curve if isinstance(X, MarkedCurve) else X
    curve_1, om_1 = _align(curve, omega)
    resd = residual_divisor(curve_1, om_1)
    Xr = MarkedCurve(curve_1, list(resd.weights.keys()), [])
    basis = cohomology_basis(Xr)
    result, coords = reduce_symbolic(om_1, Xr, basis)
    f1 = set(basis.f1_indices)
    for i, c in enumerate(coords):
        if i in f1:
            continue
        if not c.is_zero():
            return None
    return result.eta, result.witness


def _certify_coords(X, basis, mu, coords):
    """Exact witness check for guessed W coordinates; None on failure."""
    curve_1, mu_1 = _align(X.curve, mu)
    witness = {}
    for ci, h1 in mu_1.parts.items():
        if h1 is None or h1.is_zero():
            continue
        blk = basis._blocks[ci]
        g = blk.genus
        div_h = pole_divisor(curve_1, ci, h1)
        dprime = blk.dx_div.add(
            Divisor({q: 1 for q in blk.punctures})
        ).add(Divisor({blk.base_place: g + 1}))
        dpp = _pointwise_min(div_h, dprime.neg())
        d3 = _antiderivative_bound(dpp, blk.dx_div)
        sysF = linear_system(curve_1, ci, Divisor(d3))
        gens = [
            blk.comp.field.gen(),
            sysF.curve.components[ci].field.gen(),
            curve_1.field.gen(),
        ]
        coord_vals = [coords[i] for i in blk.w_indices]
        gens.extend(v.field.gen() for v in coord_vals)
        F2, morphs = _merge_fields(gens)
        m_basis, m_sys, m_1 = morphs[:3]
        m_coords = morphs[3:]
        comp_F2 = curve_1.components[ci].lift_to(F2, m_1)
        h2 = h1.lift_to(comp_F2, m_1)
        target = h2.neg()
        for mc, v, w in zip(m_coords, coord_vals, blk.w_elems):
            wl = w.lift_to(comp_F2, m_basis)
            target = target.add(wl.mul(FFElem.const(comp_F2, mc(v))))
        # target = sum a w - h must equal dF/dx for some F
        us = [u.lift_to(comp_F2, m_sys) for u in sysF.elements]
        dus = [u.dx_total() for u in us]
        vecs = _ff_vectors(comp_F2, [target] + dus)
        m = [[dv[k] for dv in vecs[1:]] for k in range(len(vecs[0]))]
        rhs = [vecs[0][k] for k in range(len(vecs[0]))]
        sol = fieldlinalg.solve(F2, m, rhs)
        if sol is None:
            return None
        F_elem = FFElem.const(comp_F2, 0)
        for c, u in zip(sol, us):
            F_elem = F_elem.add(u.mul(FFElem.const(comp_F2, c)))
        witness[ci] = F_elem
    return witness


def reduce_numeric(mu, X, basis, hom_basis, prec, max_prec=1 << 13):
    """Coordinates of mu recovered from ball periods, then certified.

    Returns (coords, certified). Certification reconstructs the exact
    antiderivative witness; when the curve class rules that out the stable
    ball guess is returned with certified False.
    """
    from . import periods as _periods

    wp = prec
    last_guess = None
    while wp <= max_prec:
        M = _periods.pairing_matrix(X, basis, hom_basis, wp)
        row = [
            _periods.integrate_class(X, mu, {}, gamma, wp)
            for gamma in hom_basis
        ]
        guessed = _periods.solve_and_guess(M, row, wp)
        if guessed is None:
            wp *= 2
            continue
        try:
            witness = _certify_coords(X, basis, mu, guessed)
        except UnsupportedClass:
            if last_guess is not None and _coords_equal(last_guess, guessed):
                return guessed, False
            last_guess = guessed
            wp *= 2
            continue
        if witness is not None:
            return guessed, True
        wp *= 2
    raise PrecisionExhausted("coordinate reconstruction did not stabilize")


def _coords_equal(a, b):
    if len(a) != len(b):
        return False
    for x, y in zip(a, b):
        F, (u, v) = to_common_field([x, y])
        if not u.sub(v).is_zero():
            return False
    return True
