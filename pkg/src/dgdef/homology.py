"""Truncated complexes, exact cohomology, coboundary solving, quasi-isos.

A FiniteComplex is the degree window of an algebra's normal-form monomial
basis together with exact boundary matrices.  Negative answers computed here
hold "within the truncation" unless a multigrading certificate makes the
relevant component genuinely finite; callers record which.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import exactlinalg as lin
from .algebra import DGAlgebra, Element, Morphism
from .artin import residue_map
from .errors import (
    DegreeMismatch,
    NotACocycle,
    NotClosed,
    NotFlatCertificate,
    TruncationNotClosed,
)


@dataclass(frozen=True)
class Truncation:
    """Degree window, word-length cap, and optional multigrading weights."""

    lo: int = -6
    hi: int = 0
    word_max: int = 8
    weights: tuple = ()   # tuple of weight dicts {gen_name: int}

    def describe(self) -> str:
        s = f"window [{self.lo}, {self.hi}], word length <= {self.word_max}"
        if self.weights:
            s += f", {len(self.weights)} weight vector(s)"
        return s


DEFAULT_TRUNCATION = Truncation()


def monomial_weight(mon, wvec) -> int:
    return sum(wvec.get(g, 0) * e for g, e in mon.gens)


def weight_shifts(alg: DGAlgebra, wvec) -> int:
    """Shift of a weight vector under d; raises if d is not homogeneous."""
    shift = None
    for g in alg.gens:
        val = alg.diff[g.name]
        base = wvec.get(g.name, 0)
        for m in val.terms:
            s = monomial_weight(m, wvec) - base
            if shift is None:
                shift = s
            elif s != shift:
                raise DegreeMismatch(
                    f"differential not homogeneous for weight vector (gen {g.name})")
    return 0 if shift is None else shift


class FiniteComplex:
    """Explicit basis and exact boundary matrices in a degree window."""

    def __init__(self, alg, trunc, basis, closed, escapes, component=None):
        self.alg = alg
        self.trunc = trunc
        self.component = component
        self.basis = basis          # degree -> ordered monomial list
        self.index = {}
        for d, mons in basis.items():
            for i, m in enumerate(mons):
                self.index[m] = (d, i)
        self.closed = closed
        self.escapes = escapes
        self.matrix = {}
        for d, mons in basis.items():
            tgt = basis.get(d + 1, [])
            rows = [[Fraction(0)] * len(mons) for _ in tgt]
            for j, m in enumerate(mons):
                dm = alg.reduce(alg.d_terms({m: Fraction(1)}))
                for mm, c in dm.items():
                    pos = self.index.get(mm)
                    if pos is None or pos[0] != d + 1:
                        continue
                    rows[pos[1]][j] = c
            self.matrix[d] = rows

    def degrees(self):
        return sorted(self.basis)

    def dim(self, d) -> int:
        return len(self.basis.get(d, []))

    def coords(self, elt: Element):
        """(degree, coordinate vector); raises on escape from the basis."""
        if elt.is_zero():
            return None, []
        deg = elt.degree()
        mons = self.basis.get(deg, [])
        vec = [Fraction(0)] * len(mons)
        for m, c in elt.terms.items():
            pos = self.index.get(m)
            if pos is None:
                raise TruncationNotClosed(self.alg._str_monomial(m),
                                          "element escapes the truncated basis")
            vec[pos[1]] = c
        return deg, vec

    def element(self, d, vec) -> Element:
        terms = {}
        for m, c in zip(self.basis.get(d, []), vec):
            if c:
                terms[m] = Fraction(c)
        return self.alg.element(terms)

    def kernel_vectors(self, d):
        mat = self.matrix.get(d, [])
        if not mat:
            return [[Fraction(1 if i == j else 0) for i in range(self.dim(d))]
                    for j in range(self.dim(d))]
        return lin.nullspace(mat)

    def image_vectors(self, d):
        """Vectors in degree d+1 spanning the image of the boundary from d."""
        mat = self.matrix.get(d, [])
        mons = self.basis.get(d, [])
        out = []
        for j in range(len(mons)):
            out.append([mat[i][j] for i in range(len(mat))])
        return [v for v in out if any(c != 0 for c in v)]


def extract_complex(alg: DGAlgebra, trunc: Truncation, component=None,
                    demand_closed=False, allow_gen=None) -> FiniteComplex:
    """Enumerate the truncated basis and boundary; certify closure.

    component selects a value tuple of trunc.weights (requires every vector to
    make the differential homogeneous, which is verified).
    """
    shifts = [weight_shifts(alg, w) for w in trunc.weights]
    mons = alg.normal_monomials(trunc.lo, trunc.hi, trunc.word_max, allow_gen=allow_gen)
    if component is not None:
        mons = [m for m in mons
                if tuple(monomial_weight(m, w) for w in trunc.weights) == tuple(component)]
    basis = {}
    for m in mons:
        basis.setdefault(alg.monomial_degree(m), []).append(m)
    chosen = set(mons)
    closed = True
    escapes = []
    for m in mons:
        dm = alg.reduce(alg.d_terms({m: Fraction(1)}))
        for mm in dm:
            if mm not in chosen:
                closed = False
                escapes.append((m, mm))
    if demand_closed and not closed:
        raise TruncationNotClosed(alg._str_monomial(escapes[0][1]))
    return FiniteComplex(alg, trunc, basis, closed, escapes, component=component)


@dataclass
class CohomologyReport:
    """Per-degree dimensions with verified independent representatives."""

    entries: dict = field(default_factory=dict)  # degree -> (dim, [Element])
    trunc: Truncation = DEFAULT_TRUNCATION
    edge_degree: int = None

    def dim(self, d) -> int:
        return self.entries.get(d, (0, []))[0]

    def to_json(self):
        return {
            "truncation": self.trunc.describe(),
            "edge_degree_excluded": self.edge_degree,
            "dimensions": {str(d): v[0] for d, v in sorted(self.entries.items())},
            "representatives": {str(d): [str(e) for e in v[1]]
                                for d, v in sorted(self.entries.items())},
        }


def cohomology(cx: FiniteComplex) -> CohomologyReport:
    """Exact cohomology of a closed truncated complex.

    The window's bottom degree is excluded: incoming boundaries from below the
    window are not visible there.
    """
    if not cx.closed:
        raise NotClosed("complex is not closed under the differential")
    report = CohomologyReport(trunc=cx.trunc, edge_degree=cx.trunc.lo)
    for d in cx.degrees():
        kernel = cx.kernel_vectors(d)
        boundaries = cx.image_vectors(d - 1)
        rank_b = lin.rank_of_span(boundaries) if boundaries else 0
        dim_h = len(kernel) - rank_b
        reps = []
        span = list(boundaries)
        for z in kernel:
            if len(reps) == dim_h:
                break
            if not lin.in_span(span, z):
                reps.append(cx.element(d, z))
                span.append(z)
        report.entries[d] = (dim_h, reps)
    return report


def solve_coboundary(cx: FiniteComplex, z: Element):
    """h with dh = z inside the truncation, or None (infeasible over Q there)."""
    if z.is_zero():
        return z.alg.scalar(0)
    deg, vec = cx.coords(z)
    mat = cx.matrix.get(deg, [])
    if mat:
        img = [sum(mat[i][j] * vec[j] for j in range(len(vec)))
               for i in range(len(mat))]
        if any(c != 0 for c in img):
            raise NotACocycle(f"d of the given element is nonzero: {z}")
    elif cx.dim(deg + 1) > 0:
        raise NotACocycle("boundary matrix missing for the element's degree")
    prev = cx.matrix.get(deg - 1, [])
    if not prev or not cx.basis.get(deg - 1):
        return None
    sol = lin.solve(prev, vec)
    if sol is None:
        return None
    return cx.element(deg - 1, sol)


def induced_matrices(f: Morphism, src: FiniteComplex, tgt: FiniteComplex):
    """Per-degree matrices of f between truncated bases (escape -> error)."""
    out = {}
    for d in src.degrees():
        cols = []
        for m in src.basis[d]:
            img = f.apply(src.alg.element({m: Fraction(1)}))
            vec = [Fraction(0)] * tgt.dim(d)
            for mm, c in img.terms.items():
                pos = tgt.index.get(mm)
                if pos is None:
                    raise TruncationNotClosed(tgt.alg._str_monomial(mm),
                                              "morphism image escapes the target truncation")
                vec[pos[1]] = c
            cols.append(vec)
        out[d] = cols  # list of columns
    return out


def is_quasi_iso(f: Morphism, trunc: Truncation, component=None):
    """(verdict, evidence) on the window's interior degrees [lo+1 .. hi].

    Over a shared Artin base with graded-free sides, decides on the residue
    reduction (flat Nakayama route).  Evidence collects per-degree data and a
    witness cocycle on failure.
    """
    if f.source.base is not None or f.target.base is not None:
        if f.source.base is not f.target.base:
            raise NotFlatCertificate("sides live over different coefficient rings")
        if not (f.source.graded_free and f.target.graded_free):
            raise NotFlatCertificate("quasi-iso over an Artin base needs graded-free sides")
        rm = residue_map(f.source.base)
        src_red, ps = f.source.base_change(rm, name=f.source.name + "@Q")
        tgt_red, pt = f.target.base_change(rm, name=f.target.name + "@Q")
        images = {g.name: pt.apply(f.images[g.name]) for g in f.source.gens}
        fred = Morphism(src_red, tgt_red, images)
        verdict, ev = is_quasi_iso(fred, trunc, component=component)
        ev["reduced_via"] = "residue field (flat sides over Artin base)"
        return verdict, ev

    src = extract_complex(f.source, trunc, component=component, demand_closed=True)
    tgt = extract_complex(f.target, trunc, component=component, demand_closed=True)
    mats = induced_matrices(f, src, tgt)
    evidence = {"truncation": trunc.describe(), "degrees": {}}
    ok = True
    witness = None
    for d in range(trunc.lo + 1, trunc.hi + 1):
        kernel_s = src.kernel_vectors(d)
        bound_s = src.image_vectors(d - 1)
        kernel_t = tgt.kernel_vectors(d)
        bound_t = tgt.image_vectors(d - 1)
        rank_bs = lin.rank_of_span(bound_s)
        rank_bt = lin.rank_of_span(bound_t)
        dim_hs = len(kernel_s) - rank_bs
        dim_ht = len(kernel_t) - rank_bt
        cols = mats.get(d, [])
        f_kernel = []
        for z in kernel_s:
            img = [sum(cols[j][i] * z[j] for j in range(len(z)))
                   for i in range(tgt.dim(d))]
            f_kernel.append(img)
        joint = bound_t + f_kernel
        rank_joint = lin.rank_of_span(joint)
        injective = (rank_joint - rank_bt) == dim_hs
        surjective = rank_joint == rank_bt + dim_ht
        evidence["degrees"][d] = {
            "dim_H_source": dim_hs, "dim_H_target": dim_ht,
            "injective": injective, "surjective": surjective,
        }
        if not (injective and surjective and dim_hs == dim_ht):
            ok = False
            if witness is None and not injective:
                # a kernel combination of source classes dying in the target
                rows = [[Fraction(v[i]) for v in (bound_t + f_kernel)]
                        for i in range(tgt.dim(d))]
                if not rows:
                    rows = [[Fraction(0)] * (len(bound_t) + len(f_kernel))]
                for combo in lin.nullspace(rows):
                    tail = combo[len(bound_t):]
                    if any(c != 0 for c in tail):
                        zvec = [sum(c * z[j] for c, z in zip(tail, kernel_s))
                                for j in range(src.dim(d))]
                        cand = src.element(d, zvec)
                        # genuinely nonzero in source cohomology?
                        if not lin.in_span(bound_s, zvec):
                            witness = cand
                            break
            if witness is None and not surjective:
                span = bound_t + f_kernel
                for z in kernel_t:
                    if not lin.in_span(span, z):
                        witness = tgt.element(d, z)
                        break
    if witness is not None:
        evidence["witness"] = str(witness)
    return ok, evidence


# ----- exact isomorphism decisions -----

def invert_q_morphism(f: Morphism, trunc: Truncation):
    """Explicit two-sided inverse of a morphism over Q by bounded search.

    Returns the inverse Morphism or None (no inverse within the truncation).
    A returned inverse is verified exactly, so a success is unconditional.
    """
    src, tgt = f.source, f.target
    images = {}
    for g in tgt.gens:
        cands = [src.element({m: Fraction(1)})
                 for m in src.normal_monomials(g.degree, g.degree, trunc.word_max)]
        from .linsys import affine_solve
        sol = affine_solve(cands, [(f.apply, tgt.gen(g.name))])
        if sol is None:
            return None
        images[g.name] = sol
    try:
        ginv = Morphism(tgt, src, images)
    except DegreeMismatch:
        return None
    for g in tgt.gens:
        if f.apply(ginv.images[g.name]) != tgt.gen(g.name):
            return None
    for g in src.gens:
        if ginv.apply(f.images[g.name]) != src.gen(g.name):
            return None
    return ginv


def invert_flat_over_artin(f: Morphism, gbar_lift: Morphism):
    """Inverse of f: P->Q (flat over a shared Artin base) from a graded lift
    of the inverse of its reduction, by nilpotent-filtration iteration.

    gbar_lift is any graded A-algebra map Q->P reducing to the inverse of the
    reduction of f.  Returns the exact inverse Morphism of f, or None.
    """
    P = f.source
    ring = P.base
    tau_images = {g.name: gbar_lift.apply(f.images[g.name]) for g in P.gens}
    tau = Morphism(P, P, tau_images)
    sigma_images = {}
    for g in P.gens:
        x = P.gen(g.name)
        for _ in range(ring.nilpotency_index + 1):
            delta = tau.apply(x) - P.gen(g.name)
            if delta.is_zero():
                break
            x = x - delta
        else:
            return None
        sigma_images[g.name] = x
    sigma = Morphism(P, P, sigma_images)
    finv = sigma.compose(gbar_lift)
    for g in f.target.gens:
        if f.apply(finv.images[g.name]) != f.target.gen(g.name):
            return None
    for g in P.gens:
        if finv.apply(f.images[g.name]) != P.gen(g.name):
            return None
    return finv


def nakayama_check(f: Morphism, trunc: Truncation = DEFAULT_TRUNCATION):
    """Classify a morphism of graded-free algebras over an Artin base.

    Returns ("iso" | "weak_equiv" | "neither", evidence).  Iso is decided on
    the residue reduction (bounded explicit-inverse search) and transported by
    the nilpotent Nakayama principle; weak equivalence via the reduced
    quasi-iso check.
    """
    if f.source.base is None or f.source.base is not f.target.base:
        raise NotFlatCertificate("nakayama_check needs a shared Artin base")
    if not (f.source.graded_free and f.target.graded_free):
        raise NotFlatCertificate("sides are not certified graded-free over the base")
    rm = residue_map(f.source.base)
    src_red, _ = f.source.base_change(rm, name=f.source.name + "@Q")
    tgt_red, pt = f.target.base_change(rm, name=f.target.name + "@Q")
    images = {g.name: pt.apply(f.images[g.name]) for g in f.source.gens}
    fred = Morphism(src_red, tgt_red, images)
    inv = invert_q_morphism(fred, trunc)
    if inv is not None:
        return "iso", {"reduction_inverse": {g.name: str(inv.images[g.name])
                                             for g in tgt_red.gens}}
    verdict, ev = is_quasi_iso(fred, trunc)
    if verdict:
        return "weak_equiv", ev
    return "neither", ev
