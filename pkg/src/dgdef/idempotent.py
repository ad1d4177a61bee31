"""Idempotent endomorphisms: fixed loci, algebraic and DG lifting.

The DG lifting pipeline over a small extension with socle t of degree i:
  (1) lift the reduced idempotent to a graded map through the killer square,
  (2) correct it to an exact graded idempotent via 3g^2 - 2g^3,
  (3) read the chain defect d∘r - r∘d as t times a twisted derivation psi of
      the residue algebra,
  (4) solve (-1)^i d∘h - h∘d = psi with f∘h + h∘f = h by exact linear algebra
      on the truncated derivation space (retrying once with a doubled word
      bound),
  (5) return r - t·h and verify the five exact certificates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import exactlinalg as lin
from .algebra import (DGAlgebra, Element, Monomial, Morphism, graded_map,
                      transport_morphism)
from .artin import (
    RingMorphism,
    decompose_by_layers,
    kernel_filtration,
    residue_map,
    ring_section,
    small_extension_tower,
)
from .derivation import Derivation
from .errors import (
    DefectNotSolvable,
    IdealNotSquareZero,
    NotAlmostIdempotent,
    NotFlatCertificate,
    NotIdempotent,
    NotTrivialIdempotent,
    ReductionMismatch,
    SyzygyUnavailable,
)
from .homology import Truncation, DEFAULT_TRUNCATION, is_quasi_iso, nakayama_check
from .linsys import combination_solve
from .model import (
    Factorization,
    LiftingProblem,
    MorphismClass,
    classify,
    dg_lift,
    graded_lift,
    surjective_in_degrees,
)


@dataclass
class Idempotent:
    """Endomorphism with e∘e = e; `trivial` records a weak-equivalence certificate."""

    morphism: Morphism
    trivial: bool = None
    evidence: dict = field(default_factory=dict)

    def __post_init__(self):
        e = self.morphism
        for g in e.source.gens:
            if e.apply(e.images[g.name]) != e.images[g.name]:
                raise NotIdempotent(f"e∘e differs from e on {g.name}")


def make_idempotent(e: Morphism, trunc: Truncation = None, component=None) -> Idempotent:
    """Wrap and certify an idempotent; triviality decided when trunc is given."""
    idem = Idempotent(e)
    if trunc is not None:
        ok, ev = is_quasi_iso(e, trunc, component=component)
        idem.trivial = ok
        idem.evidence["quasi_iso"] = ev
    return idem


@dataclass
class RetractionData:
    """Fixed locus F with include/project maps; all four identities exact."""

    fixed: DGAlgebra
    include: Morphism
    project: Morphism
    idempotent: Morphism

    def verify(self):
        F, incl, proj, e = self.fixed, self.include, self.project, self.idempotent
        for g in F.gens:
            if proj.apply(incl.images[g.name]) != F.gen(g.name):
                raise NotIdempotent(f"p∘ι is not the identity on {g.name}")
        for g in e.source.gens:
            if incl.apply(proj.images[g.name]) != e.images[g.name]:
                raise NotIdempotent(f"ι∘p differs from e on {g.name}")
            if proj.apply(e.images[g.name]) != proj.images[g.name]:
                raise NotIdempotent(f"p∘e differs from p on {g.name}")
        for g in F.gens:
            if e.apply(incl.images[g.name]) != incl.images[g.name]:
                raise NotIdempotent(f"e∘ι differs from ι on {g.name}")
        return self


def fixed_locus(e: Idempotent, retraction=None) -> RetractionData:
    """Fixed locus of an idempotent.

    Either e is the identity, or explicit retraction data (i, q) with
    i∘q = e must be supplied (the construction pipelines always carry it);
    the data is re-verified exactly.
    """
    m = e.morphism if isinstance(e, Idempotent) else e
    Z = m.source
    if Morphism.identity(Z).equals_on_generators(m):
        ident = Morphism.identity(Z)
        return RetractionData(Z, ident, ident, m).verify()
    if retraction is not None:
        i, q = retraction
        return RetractionData(i.source, i, q, m).verify()
    raise NotIdempotent(
        "fixed loci are computed from explicit retraction data; none was given")


# ----- algebraic idempotent correction -----

def lift_idempotent_graded(g: Morphism, j_vectors, i: Morphism = None,
                           e: Morphism = None) -> Morphism:
    """3g^2 - 2g^3 for a graded endomorphism that is idempotent mod a
    square-zero coefficient ideal J (given by spanning vectors).

    Verifies J^2 = 0, the almost-idempotency of g, and on the output:
    exact idempotency, congruence to g mod J, and compatibility g∘i = i∘e
    when the pair (i, e) is supplied.
    """
    P = g.source
    ring = P.base
    if ring is None:
        raise NotFlatCertificate("the square-zero ideal lives in an Artin base")
    for v in j_vectors:
        for w in j_vectors:
            if ring.vec_mul(v, w):
                raise IdealNotSquareZero(f"J contains a nonzero product")
    jspan = _ideal_span(ring, j_vectors)

    def in_jp(elt: Element) -> bool:
        return all(_coeff_in_span(ring, elt, mon, jspan) for mon in elt.terms)

    g2 = _compose_endo(g, g)
    for gen in P.gens:
        if not in_jp(g2.images[gen.name] - g.images[gen.name]):
            raise NotAlmostIdempotent(f"g^2 - g escapes J·P on {gen.name}")
    g3 = _compose_endo(g2, g)
    f = graded_map(P, P, {gen.name: g2.images[gen.name] * 3 - g3.images[gen.name] * 2
                          for gen in P.gens})
    for gen in P.gens:
        if f.apply(f.images[gen.name]) != f.images[gen.name]:
            raise NotIdempotent(f"3g^2-2g^3 failed to be idempotent on {gen.name}")
        if not in_jp(f.images[gen.name] - g.images[gen.name]):
            raise NotIdempotent(f"3g^2-2g^3 moved g beyond J·P on {gen.name}")
    if i is not None and e is not None:
        for gen in i.source.gens:
            if f.apply(i.images[gen.name]) != i.apply(e.images[gen.name]):
                raise NotIdempotent(f"f∘i differs from i∘e on {gen.name}")
    return f


def _compose_endo(a: Morphism, b: Morphism) -> Morphism:
    return graded_map(b.source, a.target,
                      {g.name: a.apply(b.images[g.name]) for g in b.source.gens})


def _ideal_span(ring, vectors):
    """Coordinate span of the ideal generated by the given vectors."""
    vecs = [ring.vec_coords(v) for v in vectors]
    for v in vectors:
        for lab in ring.labels[1:]:
            vecs.append(ring.vec_coords(ring.vec_mul(v, {lab: Fraction(1)})))
    return [v for v in vecs if any(c != 0 for c in v)]


def _coeff_in_span(ring, elt: Element, mon, span) -> bool:
    """Whether the coefficient of the generator part of mon lies in the span."""
    target = {}
    base_gens = mon.gens
    for m2, c in elt.terms.items():
        if m2.gens == base_gens:
            target[m2.tag] = c
    vec = ring.vec_coords(target)
    return lin.in_span([list(v) for v in span], vec)


# ----- the DG lifting pipeline -----

def _t_multiple(ring, elt: Element, t_vec):
    """Write elt = t * w exactly; returns w's terms over unit tags, or None."""
    t_coords = ring.vec_coords(t_vec)
    groups = {}
    for mon, c in elt.terms.items():
        groups.setdefault(mon.gens, {})[mon.tag] = c
    out = {}
    for gens_part, tag_coeffs in groups.items():
        vec = ring.vec_coords(tag_coeffs)
        ratio = None
        for i, c in enumerate(t_coords):
            if c != 0:
                ratio = vec[i] / c
                break
        if ratio is None:
            return None
        if [x * ratio for x in t_coords] != vec:
            return None
        if ratio:
            out[Monomial(gens_part, None)] = ratio
    return out


def _scalar_to_ring(alg_from_q: Element, target: DGAlgebra) -> Element:
    """Transport a residue-algebra element into unit tags over the Artin base."""
    return target.element({Monomial(m.gens, None): c
                           for m, c in alg_from_q.terms.items()})


def _times_vec(alg: DGAlgebra, vec, elt: Element) -> Element:
    out = alg.scalar(0)
    for lab, c in vec.items():
        piece = elt * c if lab is None else alg.base_elt(lab) * elt * c
        out = out + piece
    return out


def lift_trivial_idempotent_dg(ext: RingMorphism, g_a: Morphism, e_a: Idempotent,
                               f_b: Idempotent, trunc: Truncation = DEFAULT_TRUNCATION,
                               skip_triviality_check=False, component=None):
    """Lift a trivial idempotent along a coefficient surjection.

    g_a: P->R is a semifree cofibration of graded-free algebras over
    ext.source; e_a is a trivial idempotent on P; f_b a trivial idempotent on
    the reduction of R along ext, compatible with the reduced square.
    Returns (Idempotent on R, certificates dict).
    """
    R = g_a.target
    P = g_a.source
    if not (R.graded_free and P.graded_free):
        raise NotFlatCertificate("flatness-by-construction certificates missing")
    if not g_a.is_semifree_extension():
        raise SyzygyUnavailable("the cofibration must carry a semifree certificate")
    tower = small_extension_tower(ext)
    # chains of reduced data down to the small-extension quotients
    levels = [(R, P, g_a, e_a.morphism, None)]
    for step in tower:
        R_prev, P_prev, g_prev, e_prev, _ = levels[-1]
        R_next, red_r = R_prev.base_change(step.projection,
                                           name=f"{R.name}@{step.quotient.name}")
        P_next, red_p = P_prev.base_change(step.projection)
        g_next = Morphism(P_next, R_next,
                          {g.name: R_next.element(dict(g_prev.images[g.name].terms))
                           for g in P_next.gens})
        e_next = Morphism(P_next, P_next,
                          {g.name: P_next.element(dict(e_prev.images[g.name].terms))
                           for g in P_next.gens})
        levels.append((R_next, P_next, g_next, e_next, red_r))
    R_bottom = levels[-1][0]
    fb = f_b.morphism if isinstance(f_b, Idempotent) else f_b
    if set(fb.source.gen_names()) != set(R_bottom.gen_names()):
        raise ReductionMismatch("f_b does not live on the reduction of R along ext")
    current = Morphism(R_bottom, R_bottom,
                       {g.name: R_bottom.element(dict(fb.images[g.name].terms))
                        for g in R_bottom.gens})
    if not skip_triviality_check:
        triv = f_b.trivial if isinstance(f_b, Idempotent) else None
        if triv is None:
            ok, _ = _reduced_qiso(current, trunc, component)
            triv = ok
        if not triv:
            raise NotTrivialIdempotent("f_b is not certified a weak equivalence")
    certificates = {"steps": []}
    for idx in range(len(tower) - 1, -1, -1):
        step = tower[idx]
        R_cur, P_cur, g_cur, e_cur, _ = levels[idx]
        red_r = levels[idx + 1][4]
        current, step_cert = _lift_one_small_step(
            step, R_cur, P_cur, g_cur, e_cur, red_r, current, trunc)
        certificates["steps"].append(step_cert)
    # final five certificates on the top level
    f_a = current
    cert = _verify_idempotent_lift(ext, f_a, g_a, e_a.morphism, fb, trunc, component)
    certificates.update(cert)
    return Idempotent(f_a, trivial=True, evidence=certificates), certificates


def _reduced_qiso(endo: Morphism, trunc, component):
    if endo.source.base is None:
        return is_quasi_iso(endo, trunc, component=component)
    rm = residue_map(endo.source.base)
    red, proj = endo.source.base_change(rm, name=endo.source.name + "@Q")
    images = {g.name: proj.apply(endo.images[g.name]) for g in endo.source.gens}
    return is_quasi_iso(Morphism(red, red, images), trunc, component=component)


def _lift_one_small_step(step, R, P, g_a, e_a, red_r, f_red, trunc):
    """One small-extension step of the idempotent lifting pipeline."""
    ring = step.total
    t_vec = step.socle
    i_deg = step.socle_degree
    # (1) graded lift through the killer square, with the coefficient section
    section = ring_section(step.projection)

    def sec(elt_red: Element) -> Element:
        out = R.scalar(0)
        for mon, c in elt_red.terms.items():
            vec = section[mon.tag]
            out = out + _times_vec(R, vec, R.element({Monomial(mon.gens, None): c}))
        return out

    top = graded_map(P, R, {g.name: g_a.apply(e_a.images[g.name]) for g in P.gens})
    bottom = f_red.compose(red_r)
    problem = LiftingProblem(g_a, red_r, top, bottom)
    r0 = graded_lift(problem, trunc, section=sec)
    # (2) exact graded idempotent
    r = lift_idempotent_graded(r0, [t_vec], i=g_a, e=e_a)
    # (3) defect as t times a twisted derivation of the residue algebra
    rm = residue_map(ring)
    Rbar, redbar = R.base_change(rm, name=R.name + "@Q")
    fbar = Morphism(Rbar, Rbar, {g.name: redbar.apply(r.images[g.name])
                                 for g in R.gens})
    psi_vals = {}
    p_names = {g.name for g in P.gens}
    for g in R.gens:
        defect = r.images[g.name].d() - r.apply(R.diff[g.name])
        w = _t_multiple(ring, defect, t_vec)
        if w is None:
            raise DefectNotSolvable(
                f"chain defect on {g.name} is not a socle multiple: {defect}")
        psi_vals[g.name] = Rbar.element(dict(w))
        if g.name in p_names and not psi_vals[g.name].is_zero():
            raise DefectNotSolvable("defect does not vanish on the subalgebra")
    psi = Derivation(Rbar, Rbar, psi_vals, 1 - i_deg, twist=fbar,
                     check_degrees=False)
    # membership in the acyclic subcomplex: psi = f∘psi + psi∘f
    for g in Rbar.gens:
        lhs = fbar.apply(psi.values[g.name]) + psi.apply(fbar.images[g.name])
        if lhs != psi.values[g.name]:
            raise DefectNotSolvable(f"defect derivation leaves the subcomplex on {g.name}")
    # (4) solve the twisted coboundary equation, retrying once with more room
    h = _solve_subcomplex(Rbar, fbar, psi, p_names, i_deg, trunc)
    if h is None:
        wider = Truncation(trunc.lo, trunc.hi, trunc.word_max * 2, trunc.weights)
        h = _solve_subcomplex(Rbar, fbar, psi, p_names, i_deg, wider)
    if h is None:
        raise DefectNotSolvable(
            "correction derivation not found within the doubled truncation; "
            f"defect values: { {g: str(v) for g, v in psi_vals.items()} }")
    # (5) assemble r - t·h and hand back
    images = {}
    for g in R.gens:
        corr = _times_vec(R, t_vec, _scalar_to_ring(h.values[g.name], R))
        images[g.name] = r.images[g.name] - corr
    f_new = Morphism(R, R, images, check_chain=True)
    for g in R.gens:
        if f_new.apply(f_new.images[g.name]) != f_new.images[g.name]:
            raise NotIdempotent(f"lifted map is not idempotent on {g.name}")
        if red_r.apply(f_new.images[g.name]) != f_red.apply(red_r.images[g.name]):
            raise ReductionMismatch(f"lift does not reduce correctly on {g.name}")
    for g in P.gens:
        if f_new.apply(g_a.images[g.name]) != g_a.apply(e_a.images[g.name]):
            raise ReductionMismatch(f"compatibility f∘g = g∘e fails on {g.name}")
    return f_new, {"socle": ring.str_vec(t_vec), "socle_degree": i_deg,
                   "correction": {g.name: str(h.values[g.name]) for g in Rbar.gens
                                  if not h.values[g.name].is_zero()}}


def _solve_subcomplex(Rbar, fbar, psi, p_names, i_deg, trunc):
    """Solve (-1)^i d∘h - h∘d = psi with f∘h + h∘f = h, h of degree -i."""
    h_deg = -i_deg
    sign = Fraction((-1) ** (i_deg % 2))
    gens = [g for g in Rbar.gens if g.name not in p_names]
    unknowns = []
    for g in gens:
        val_deg = g.degree + h_deg
        for m in Rbar.normal_monomials(val_deg, val_deg, trunc.word_max):
            unknowns.append((g.name, m))
    columns = []
    slots = [g.name for g in Rbar.gens]
    for gname, mon in unknowns:
        eta = Derivation(Rbar, Rbar,
                         {gname: Rbar.element({mon: Fraction(1)})},
                         h_deg, twist=fbar, check_degrees=False)
        col = []
        for s in slots:
            val = eta.values[s].d() * sign - eta.apply(Rbar.diff[s])
            col.append(val)
        for s in slots:
            memb = fbar.apply(eta.values[s]) + eta.apply(fbar.images[s]) - eta.values[s]
            col.append(memb)
        columns.append(tuple(col))
    rhs = tuple(psi.values[s] for s in slots) + tuple(Rbar.scalar(0) for _ in slots)
    sol = combination_solve(columns, rhs)
    if sol is None:
        return None
    values = {}
    for c, (gname, mon) in zip(sol, unknowns):
        if c:
            cur = values.get(gname, Rbar.scalar(0))
            values[gname] = cur + Rbar.element({mon: c})
    return Derivation(Rbar, Rbar, values, h_deg, twist=fbar, check_degrees=False)


def _verify_idempotent_lift(ext, f_a, g_a, e_a, f_b, trunc, component):
    """The five exact certificates of a lifted trivial idempotent."""
    cert = {}
    cert["chain_map"] = not f_a.chain_defects()
    cert["idempotent"] = all(f_a.apply(f_a.images[g.name]) == f_a.images[g.name]
                             for g in f_a.source.gens)
    R_red, red = f_a.source.base_change(ext, name=f_a.source.name + "@B")
    cert["reduction"] = all(
        red.apply(f_a.images[g.name])
        == R_red.element(dict(f_b.images[g.name].terms))
        for g in f_a.source.gens)
    cert["compatibility"] = all(
        f_a.apply(g_a.images[g.name]) == g_a.apply(e_a.images[g.name])
        for g in g_a.source.gens)
    ok, ev = _reduced_qiso(f_a, trunc, component)
    cert["weak_equivalence"] = ok
    cert["weak_equivalence_evidence"] = ev
    if not all(cert[k] for k in ["chain_map", "idempotent", "reduction",
                                 "compatibility", "weak_equivalence"]):
        raise NotTrivialIdempotent(f"certificate failure: {cert}")
    return cert


# ----- fixed loci over an Artin base (filtration descent) -----

def _lift_coeffs(alg: DGAlgebra, section, elt_red: Element) -> Element:
    """Lift a reduced element into alg through a coefficient section."""
    out = alg.scalar(0)
    for mon, c in elt_red.terms.items():
        vec = section[mon.tag]
        out = out + _times_vec(alg, vec, alg.element({Monomial(mon.gens, None): c}))
    return out


def fixed_locus_over_artin(e: Idempotent, ext: RingMorphism, s: Morphism,
                           p: Morphism, red: Morphism) -> RetractionData:
    """Fixed locus of a lifted idempotent, presented over the total ring.

    e acts on D over ext.source; red: D -> D_red is the reduction along ext,
    and (s, p) is a retraction presentation of the reduced idempotent
    (s∘p = e_red, p∘s = id).  The fixed locus Q is graded-free on the reduced
    fixed locus' generators; include/project are produced by filtration
    descent and all retraction identities are verified exactly.
    """
    em = e.morphism if isinstance(e, Idempotent) else e
    D = em.source
    ring = D.base
    Qbar = s.source
    for g in Qbar.gens:
        if p.apply(s.images[g.name]) != Qbar.gen(g.name):
            raise NotIdempotent("p∘s is not the identity on the reduced fixed locus")
    layers, section = kernel_filtration(ext)
    shell = DGAlgebra(ring, [(g.name, g.degree) for g in Qbar.gens], {}, (),
                      D.regime, graded_free=True)
    iota_vals = {g.name: em.apply(_lift_coeffs(D, section, s.images[g.name]))
                 for g in Qbar.gens}

    def eval_iota(q_elt: Element) -> Element:
        out = D.scalar(0)
        for mon, c in q_elt.terms.items():
            part = D.scalar(c) if mon.tag is None else D.base_elt(mon.tag) * c
            for g, k in mon.gens:
                part = part * (iota_vals[g] ** k)
            out = out + part
        return out

    nil = ring.nilpotency_index + 1

    def express(v: Element) -> Element:
        out = shell.scalar(0)
        rem = v
        for k in range(len(layers)):
            if rem.is_zero():
                break
            groups = {}
            for mon, c in rem.terms.items():
                groups.setdefault(mon.gens, {})[mon.tag] = c
            contribution = shell.scalar(0)
            for gens_part, tag_coeffs in groups.items():
                coords = decompose_by_layers(ring.vec_coords(tag_coeffs), layers)
                for t_vec, c_t in zip(layers[k], coords[k]):
                    if not c_t:
                        continue
                    wbar = red.target.element(
                        {Monomial(gens_part, None): c_t})
                    q_t = p.apply(wbar)
                    poly = _lift_coeffs(shell, section, q_t)
                    contribution = contribution + _times_vec(
                        shell, ring.coords_vec(t_vec), poly)
            out = out + contribution
            rem = rem - eval_iota(contribution)
        if not rem.is_zero():
            raise DefectNotSolvable("filtration descent did not terminate")
        return out

    d_q = {g.name: express(iota_vals[g.name].d()).terms for g in Qbar.gens}
    Q = DGAlgebra(ring, [(g.name, g.degree) for g in Qbar.gens], d_q, (),
                  D.regime, name=f"fix({D.name})", graded_free=True)
    iota = Morphism(Q, D, {n: v for n, v in iota_vals.items()}, check_chain=True)
    proj = Morphism(D, Q, {g.name: Q.element(express(em.images[g.name]).terms)
                           for g in D.gens}, check_chain=True)
    data = RetractionData(Q, iota, proj, em).verify()
    # reduction of the fixed locus is the reduced fixed locus, generator-exactly
    Q_red, _ = Q.base_change(ext)
    for g in Qbar.gens:
        lhs = Q_red.element(_reduce_terms(Q, ext, Q.diff[g.name]))
        rhs = Q_red.element(dict(Qbar.diff[g.name].terms))
        if lhs != rhs:
            raise ReductionMismatch(f"fixed locus does not reduce correctly on {g.name}")
    return data


def _reduce_terms(alg: DGAlgebra, ext: RingMorphism, elt: Element):
    out = {}
    for mon, c in elt.terms.items():
        for tag, tc in (ext.label_image(mon.tag)).items():
            key = Monomial(mon.gens, tag)
            out[key] = out.get(key, Fraction(0)) + c * tc
    return {m: c for m, c in out.items() if c}


# ----- reduction-detected cofibrations -----

def reduction_cofibration_check(f: Morphism, trunc: Truncation = DEFAULT_TRUNCATION):
    """f between graded-free algebras over an Artin base is a cofibration iff
    its residue reduction is; returns (bool, certificate)."""
    if f.source.base is None or f.source.base is not f.target.base:
        raise NotFlatCertificate("reduction check needs a shared Artin base")
    if not (f.source.graded_free and f.target.graded_free):
        raise NotFlatCertificate("graded-free certificates over the base are missing")
    rm = residue_map(f.source.base)
    src_red, _ = f.source.base_change(rm, name=f.source.name + "@Q")
    tgt_red, pt = f.target.base_change(rm, name=f.target.name + "@Q")
    fred = Morphism(src_red, tgt_red,
                    {g.name: pt.apply(f.images[g.name]) for g in f.source.gens})
    ok = fred.is_semifree_extension()
    cert = {"reduction_semifree": ok,
            "reduced_images": {g.name: str(fred.images[g.name])
                               for g in src_red.gens}}
    return ok, cert


# ----- lifting of factorizations -----

def lift_factorization(ext: RingMorphism, f: Morphism, given: Factorization,
                       kind: str, trunc: Truncation = DEFAULT_TRUNCATION):
    """Lift a factorization of the reduction of f along a coefficient surjection.

    kind CW_F follows the constructive route: adjoin one contractible pair per
    adjoined middle generator, take the tautological section, lift the trivial
    idempotent, and return the fixed locus.  kind C_FW is implemented for
    given factorizations whose right leg is an isomorphism-on-presentation
    onto a graded-free target (the desk instances); then the lift is the
    semifree-certified f itself followed by the identity.
    """
    P, M = f.source, f.target
    if not (P.graded_free and M.graded_free):
        raise NotFlatCertificate("factorization lifting needs graded-free flats")
    if given.kind != kind:
        raise ReductionMismatch("given factorization kind does not match")
    Pbar, red_p = P.base_change(ext, name=P.name + "@B")
    Mbar, red_m = M.base_change(ext, name=M.name + "@B")
    cbar, pbar = given.left, given.right
    if set(cbar.source.gen_names()) != set(Pbar.gen_names()) or \
            set(pbar.target.gen_names()) != set(Mbar.gen_names()):
        raise ReductionMismatch("given factorization is not over the reduction of f")

    if kind == "C_FW":
        iso_right = all(pbar.images[g.name] == pbar.target.gen(g.name)
                        for g in pbar.source.gens) and \
            set(pbar.source.gen_names()) == set(pbar.target.gen_names())
        if not (iso_right and f.is_semifree_extension()):
            raise SyzygyUnavailable(
                "general (C,FW) lifting beyond an isomorphic right leg over a "
                "graded-free target is out of desk scope")
        lifted = Factorization(M, f, Morphism.identity(M), "C_FW",
                               window=given.window,
                               notes={"degenerate": True})
        _verify_lift_reduces(ext, lifted, given)
        return lifted

    if kind != "CW_F":
        raise ReductionMismatch(f"unknown factorization kind {kind!r}")
    cbar = transport_morphism(cbar, source=Pbar)
    pairs_given = given.notes.get("contractible_pairs")
    if pairs_given is None:
        raise SyzygyUnavailable("(CW,F) lifting needs the contractible-pair certificate")

    # middle D: one contractible pair per given contractible pair of the middle
    qbar = cbar.target
    adjoined = {g.name for g in cbar.adjoined_generators()}
    if adjoined != {n for pr in pairs_given for n in pr}:
        raise SyzygyUnavailable("the given middle is not presented by pairs")
    pair_of = {}
    new_gens = []
    diff = {}
    for k, (u, z) in enumerate(pairs_given):
        w, v = f"w{k + 1}_l", f"v{k + 1}_l"
        pair_of[(u, z)] = (w, v)
        new_gens.extend([(w, qbar.degree_of(u)), (v, qbar.degree_of(u) + 1)])
        diff[w] = {Monomial(((v, 1),), None): Fraction(1)}
    D, incl = P.adjoin(new_gens, diff, name=f"mid({M.name})")
    section = ring_section(ext)
    tau_m_images = {g.name: f.images[g.name] for g in P.gens}
    for (u, z), (w, v) in pair_of.items():
        m_b = _lift_coeffs(M, section, pbar.apply(qbar.gen(u)))
        tau_m_images[w] = m_b
        tau_m_images[v] = m_b.d()
    tau_m = Morphism(D, M, tau_m_images, check_chain=True)

    Dbar, red_d = D.base_change(ext, name=D.name + "@B")
    # tautological trivial fibration D_red -> Q_red and its section
    p_images = {g.name: cbar.images[g.name] for g in Pbar.gens}
    for (u, z), (w, v) in pair_of.items():
        p_images[w] = qbar.gen(u)
        p_images[v] = qbar.gen(z)
    p_d = Morphism(Dbar, qbar, p_images, check_chain=True)
    incl_bar = Morphism(Pbar, Dbar, {g.name: Dbar.gen(g.name) for g in Pbar.gens},
                        semifree_over=Pbar)
    sec_prob = LiftingProblem(cbar, p_d, incl_bar, Morphism.identity(cbar.target))
    s = dg_lift(sec_prob, trunc, pairing="CW_F", pairs=pairs_given)
    ebar = s.compose(p_d)
    ebar_idem = Idempotent(ebar)
    e_lift, certs = lift_trivial_idempotent_dg(
        ext, incl, Idempotent(Morphism.identity(P)), ebar_idem, trunc,
        skip_triviality_check=False)
    data = fixed_locus_over_artin(e_lift, ext, s, _project_of(s, p_d), red_d)
    Q = data.fixed
    left = data.project.compose(incl)
    right = tau_m.compose(data.include)
    assert right.compose(left).equals_on_generators(f)
    lifted = Factorization(Q, left, right, "CW_F", window=given.window,
                           notes={"idempotent_certificates": certs})
    _verify_lift_reduces(ext, lifted, given)
    # re-certify output classes through the reduction
    ok_cof, cof_cert = reduction_cofibration_check(left, trunc)
    lifted.notes["left_cofibration_via_reduction"] = ok_cof
    lifted.notes["left_weak_equivalence"] = nakayama_check(left, trunc)[0] == "weak_equiv" \
        if ok_cof else None
    lifted.notes["right_fibration_within_truncation"] = all(
        surjective_in_degrees(right, range(trunc.lo, 0), trunc).values())
    return lifted


def _project_of(s: Morphism, p_d: Morphism) -> Morphism:
    """The projection leg of the tautological retraction (p_d itself)."""
    return p_d


def _verify_lift_reduces(ext: RingMorphism, lifted: Factorization,
                         given: Factorization):
    mid_red, red_mid = lifted.middle.base_change(ext)
    gbar = given.left.target
    if set(mid_red.gen_names()) != set(gbar.gen_names()):
        raise ReductionMismatch("lifted middle has the wrong generator set")
    for g in mid_red.gens:
        if mid_red.element(dict(mid_red.diff[g.name].terms)) != \
                mid_red.element(dict(gbar.diff[g.name].terms)):
            raise ReductionMismatch(f"middle differential does not reduce on {g.name}")
    for g in lifted.left.source.gens:
        lhs = red_mid.apply(lifted.left.images[g.name])
        rhs = mid_red.element(dict(given.left.images[g.name].terms))
        if lhs != rhs:
            raise ReductionMismatch(f"left leg does not reduce on {g.name}")
    Mbar, red_m = lifted.right.target.base_change(ext)
    for g in lifted.middle.gens:
        lhs = red_m.apply(lifted.right.images[g.name])
        rhs = Mbar.element(dict(given.right.images[g.name].terms))
        if lhs != rhs:
            raise ReductionMismatch(f"right leg does not reduce on {g.name}")
