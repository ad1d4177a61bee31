"""Derivation DG-Lie algebras, Maurer-Cartan/gauge calculus, deformations.

Sign conventions (fixed here and re-verified by the property suites):
    delta(eta) = d∘eta - (-1)^{|eta|} eta∘d,
    [eta, theta] = eta∘theta - (-1)^{|eta||theta|} theta∘eta,
and the gauge action is conjugation of the total differential by exp(theta),
exact because all coefficients are nilpotent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import exactlinalg as lin
from .algebra import DGAlgebra, Element, Monomial, Morphism, NONPOSITIVE
from .artin import ArtinRing, residue_map
from .derivation import Derivation, bracket, delta
from .errors import (
    CoefficientNotNilpotent,
    DegreeMismatch,
    MinorIdealMismatch,
    NotMC,
    NotNilpotent,
    SyzygyUnavailable,
    TruncationNotClosed,
)
from .homology import Truncation, DEFAULT_TRUNCATION, extract_complex, cohomology
from .idempotent import reduction_cofibration_check
from .linsys import combination_solve
from .model import factor_c_fw


def base_extend(R: DGAlgebra, ring: ArtinRing, name="") -> DGAlgebra:
    """R ⊗ A as a graded algebra with the lifted differential."""
    if R.base is not None:
        raise DegreeMismatch("base extension starts from an algebra over Q")
    diff = {g.name: dict(R.diff[g.name].terms) for g in R.gens}
    rels = [dict(r.terms) for r in R.relations]
    return DGAlgebra(ring, [(g.name, g.degree) for g in R.gens], diff, rels,
                     R.regime, name=name or f"{R.name}(x){ring.name}",
                     graded_free=R.graded_free)


# ----- derivation complexes -----

class DerivationComplex:
    """Truncated module/Lie structure on derivations between algebras.

    Basis: elementary derivations (generator -> normal-form monomial) with
    value monomials inside the truncation.  delta and (for endomorphism
    complexes) the bracket are tabulated exactly; escaping values raise
    TruncationNotClosed.
    """

    def __init__(self, source: DGAlgebra, target: DGAlgebra, trunc: Truncation,
                 twist: Morphism = None, degrees=None):
        self.source = source
        self.target = target
        self.trunc = trunc
        self.twist = twist
        self.basis = {}     # derivation degree -> list of (gen_name, monomial)
        degs = degrees if degrees is not None else list(
            range(trunc.lo, trunc.hi + 2))
        for n in degs:
            items = []
            for g in source.gens:
                vdeg = g.degree + n
                for m in target.normal_monomials(vdeg, vdeg, trunc.word_max):
                    items.append((g.name, m))
            self.basis[n] = items

    def elementary(self, n, idx) -> Derivation:
        gname, mon = self.basis[n][idx]
        return Derivation(self.source, self.target,
                          {gname: self.target.element({mon: Fraction(1)})},
                          n, twist=self.twist, check_degrees=False)

    def dim(self, n) -> int:
        return len(self.basis.get(n, []))

    def coords(self, eta: Derivation):
        n = eta.degree
        index = {key: i for i, key in enumerate(self.basis.get(n, []))}
        vec = [Fraction(0)] * len(index)
        for g in self.source.gens:
            for mon, c in eta.values[g.name].terms.items():
                key = (g.name, mon)
                if key not in index:
                    raise TruncationNotClosed(
                        self.target._str_monomial(mon),
                        f"derivation value escapes the truncated basis on {g.name}")
                vec[index[key]] = c
        return vec

    def from_coords(self, n, vec) -> Derivation:
        values = {}
        for c, (gname, mon) in zip(vec, self.basis[n]):
            if c:
                cur = values.get(gname, self.target.scalar(0))
                values[gname] = cur + self.target.element({mon: Fraction(c)})
        return Derivation(self.source, self.target, values, n,
                          twist=self.twist, check_degrees=False)

    def delta_of(self, eta: Derivation) -> Derivation:
        sign = -1 if eta.degree % 2 else 1
        values = {}
        for g in self.source.gens:
            dv = self.target.element(
                self.target.d_terms(eta.values[g.name].terms))
            values[g.name] = dv - eta.apply(self.source.diff[g.name]) * sign
        return Derivation(self.source, self.target, values, eta.degree + 1,
                          twist=self.twist, check_degrees=False)

    def delta_matrix(self, n):
        rows = [[Fraction(0)] * self.dim(n) for _ in range(self.dim(n + 1))]
        index = {key: i for i, key in enumerate(self.basis.get(n + 1, []))}
        for j in range(self.dim(n)):
            img = self.delta_of(self.elementary(n, j))
            for g in self.source.gens:
                for mon, c in img.values[g.name].terms.items():
                    key = (g.name, mon)
                    if key not in index:
                        raise TruncationNotClosed(
                            self.target._str_monomial(mon),
                            "delta escapes the truncated derivation basis")
                    rows[index[key]][j] = c
        return rows

    def homology_dim(self, n) -> int:
        mat_n = self.delta_matrix(n)
        kernel = lin.nullspace(mat_n) if mat_n else \
            [[Fraction(1 if i == j else 0) for i in range(self.dim(n))]
             for j in range(self.dim(n))]
        if self.dim(n + 1) == 0:
            kernel = [[Fraction(1 if i == j else 0) for i in range(self.dim(n))]
                      for j in range(self.dim(n))]
        prev = self.delta_matrix(n - 1)
        img = []
        for j in range(self.dim(n - 1)):
            img.append([prev[i][j] for i in range(self.dim(n))])
        img = [v for v in img if any(c != 0 for c in v)]
        return len(kernel) - lin.rank_of_span(img)


@dataclass
class DGLie:
    """Derivation Lie algebra of an algebra over Q, tabulated in a truncation."""

    complex: DerivationComplex
    ring_differential: Derivation = None

    def bracket_of(self, a: Derivation, b: Derivation) -> Derivation:
        return bracket(a, b)

    def verify_axioms(self, rng, trials=100):
        """Antisymmetry, Jacobi on random triples, delta^2 = 0, delta = [d,-]."""
        cx = self.complex
        degs = [n for n in cx.basis if cx.dim(n)]
        d_der = Derivation(cx.source, cx.source,
                           {g.name: cx.source.diff[g.name] for g in cx.source.gens},
                           1, check_degrees=False)

        def rand_elem():
            n = degs[rng.randrange(len(degs))]
            idx = rng.randrange(cx.dim(n))
            scale = Fraction(rng.randrange(-3, 4) or 1)
            return cx.elementary(n, idx) * scale

        for _ in range(trials):
            a, b, c = rand_elem(), rand_elem(), rand_elem()
            ab = bracket(a, b)
            ba = bracket(b, a)
            sign = -1 if (a.degree % 2 and b.degree % 2) else 1
            anti = ab + ba * sign
            if not anti.is_zero():
                return False, ("antisymmetry", a, b)
            jac = bracket(a, bracket(b, c)) \
                - bracket(bracket(a, b), c) \
                - bracket(b, bracket(a, c)) * (-1 if (a.degree * b.degree) % 2 else 1)
            if not jac.is_zero():
                return False, ("jacobi", a, b, c)
            dd = cx.delta_of(cx.delta_of(a))
            if not dd.is_zero():
                return False, ("delta_squared", a)
            via_bracket = bracket(d_der, a)
            if not (cx.delta_of(a) - via_bracket).is_zero():
                return False, ("delta_is_bracket_with_d", a)
        return True, None


def derivation_complex(B: DGAlgebra, M: DGAlgebra, trunc: Truncation,
                       twist: Morphism = None, degrees=None):
    """Derivations of B with values in M (twisted when M differs from B)."""
    return DerivationComplex(B, M, trunc, twist=twist, degrees=degrees)


# ----- Maurer-Cartan elements -----

@dataclass
class MCElement:
    """Degree-1 derivation with maximal-ideal coefficients on R ⊗ A."""

    algebra: DGAlgebra       # R over Q
    ring: ArtinRing
    host: DGAlgebra          # R ⊗ A with the unperturbed differential
    xi: Derivation

    def value(self, gen_name: str) -> Element:
        return self.xi.values[gen_name]


def mc_element(R: DGAlgebra, ring: ArtinRing, values, host=None) -> MCElement:
    host = host or base_extend(R, ring)
    xi = Derivation(host, host, {k: host._coerce(v) for k, v in values.items()}, 1)
    for g in host.gens:
        if not xi.values[g.name].coefficients_in_labels(set(ring.labels[1:])):
            raise CoefficientNotNilpotent(
                f"value on {g.name} has a unit-coefficient term")
    return MCElement(R, ring, host, xi)


def mc_defects(mc: MCElement):
    """(d + xi)^2 on every generator; empty dict means Maurer-Cartan."""
    host = mc.host
    out = {}
    for g in host.gens:
        v = mc.xi.values[g.name]
        defect = v.d() + mc.xi.apply(host.diff[g.name]) + mc.xi.apply(v)
        if not defect.is_zero():
            out[g.name] = defect
    return out


def mc_check(mc: MCElement):
    defects = mc_defects(mc)
    return not defects, defects


@dataclass
class StrictDeformation:
    """Graded-free total object over A with a reduction-isomorphism to R."""

    total: DGAlgebra
    comparison: Morphism
    certificates: dict = field(default_factory=dict)


def psi1_deform(R: DGAlgebra, ring: ArtinRing, mc: MCElement,
                trunc: Truncation = DEFAULT_TRUNCATION) -> StrictDeformation:
    """Strict deformation with differential d_R + xi; certificates included."""
    ok, defects = mc_check(mc)
    if not ok:
        raise NotMC(f"Maurer-Cartan defects: { {k: str(v) for k, v in defects.items()} }")
    host = mc.host
    new_diff = {g.name: (host.diff[g.name] + mc.xi.values[g.name]).terms
                for g in host.gens}
    total = host.with_differential(new_diff, name=f"def({R.name})")
    comparison = Morphism(total, R, {g.name: R.gen(g.name) for g in R.gens},
                          ring_map=residue_map(ring), check_chain=True)
    certs = {"reduction_isomorphism": "generator-exact by construction",
             "graded_free": total.graded_free}
    struct = Morphism(DGAlgebra(ring, [], {}, (), total.regime, graded_free=True),
                      total, {})
    try:
        ok_cof, cof = reduction_cofibration_check(struct, trunc)
        certs["cofibration_via_reduction"] = ok_cof
        certs["cofibration_evidence"] = cof
    except Exception as exc:  # non-semifree reductions stay uncertified
        certs["cofibration_via_reduction"] = f"unavailable: {exc}"
    return StrictDeformation(total, comparison, certs)


# ----- gauge action -----

def exp_automorphism(theta: Derivation) -> Morphism:
    """exp of a degree-0 derivation with nilpotent coefficients."""
    host = theta.source
    if theta.degree != 0:
        raise DegreeMismatch("gauge derivations have degree 0")
    ring = host.base
    for g in host.gens:
        if not theta.values[g.name].coefficients_in_labels(set(ring.labels[1:])):
            raise NotNilpotent(f"gauge value on {g.name} is not nilpotent")
    images = {}
    for g in host.gens:
        acc = host.gen(g.name)
        term = host.gen(g.name)
        k = 1
        while True:
            term = theta.apply(term)
            if term.is_zero():
                break
            acc = acc + term * Fraction(1, _factorial(k))
            k += 1
            if k > ring.nilpotency_index + len(host.gens) + 4:
                raise NotNilpotent("exp did not terminate")
        images[g.name] = acc
    return Morphism(host, host, images)


def _factorial(k):
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


def gauge_transform(theta: Derivation, mc: MCElement) -> MCElement:
    """Conjugate the total differential by exp(theta); exact and re-verified."""
    host = mc.host
    phi = exp_automorphism(theta)
    phi_inv = exp_automorphism(theta * Fraction(-1))
    for g in host.gens:
        if phi.apply(phi_inv.images[g.name]) != host.gen(g.name):
            raise NotNilpotent("exp(theta) is not invertible")

    def total_diff(elt: Element) -> Element:
        return elt.d() + mc.xi.apply(elt)

    values = {}
    for g in host.gens:
        conj = phi.apply(total_diff(phi_inv.images[g.name]))
        values[g.name] = conj - host.diff[g.name]
    out = MCElement(mc.algebra, mc.ring, host,
                    Derivation(host, host, values, 1, check_degrees=False))
    ok, defects = mc_check(out)
    if not ok:
        raise NotMC(f"gauge transform broke MC: {defects}")
    return out


def are_gauge_equivalent(mc1: MCElement, mc2: MCElement,
                         trunc: Truncation = DEFAULT_TRUNCATION):
    """Order-by-order gauge solve; returns (bool, witness-or-None, evidence).

    A positive answer carries an exact witness theta with
    gauge_transform(theta, mc1) == mc2; a negative answer is certified only
    within the truncated derivation basis.
    """
    host = mc1.host
    ring = mc1.ring
    if mc2.host is not host:
        raise DegreeMismatch("both elements must live on the same host algebra")
    for mc in (mc1, mc2):
        ok, defects = mc_check(mc)
        if not ok:
            raise NotMC(f"input is not Maurer-Cartan: {defects}")
    cx = DerivationComplex(host, host, trunc, degrees=[0, 1])
    auto = Morphism.identity(host)
    current = mc1
    for k in range(1, ring.nilpotency_index + 1):
        diff_vals = {g.name: mc2.xi.values[g.name] - current.xi.values[g.name]
                     for g in host.gens}
        if all(v.is_zero() for v in diff_vals.values()):
            break
        layer = ring.ideal_power_vectors(k)
        deeper = ring.ideal_power_vectors(k + 1)
        if not _values_in_power(ring, diff_vals, layer):
            return False, None, {"stuck_at_order": k,
                                 "truncation": trunc.describe()}
        # solve delta(eta) = -(xi2 - current) modulo m^{k+1}
        unknowns = []
        for idx in range(cx.dim(0)):
            gname, mon = cx.basis[0][idx]
            if mon.tag is None or not _vec_in_span(ring, {mon.tag: Fraction(1)}, layer):
                continue
            unknowns.append(idx)
        columns = []
        slots = [g.name for g in host.gens]
        deeper_elts = _power_monomial_columns(host, ring, deeper, trunc)
        for idx in unknowns:
            eta = cx.elementary(0, idx)
            dv = cx.delta_of(eta)
            columns.append(tuple(dv.values[s] * Fraction(-1) for s in slots))
        for extra in deeper_elts:
            columns.append(extra)
        rhs = tuple(diff_vals[s] for s in slots)
        sol = combination_solve(columns, rhs)
        if sol is None:
            return False, None, {"no_solution_at_order": k,
                                 "truncation": trunc.describe()}
        eta_vec = sol[: len(unknowns)]
        values = {}
        for c, idx in zip(eta_vec, unknowns):
            gname, mon = cx.basis[0][idx]
            cur = values.get(gname, host.scalar(0))
            values[gname] = cur + host.element({mon: Fraction(c)})
        eta = Derivation(host, host, values, 0, check_degrees=False)
        current = gauge_transform(eta, current)
        auto = exp_automorphism(eta).compose(auto)
    diff_vals = {g.name: mc2.xi.values[g.name] - current.xi.values[g.name]
                 for g in host.gens}
    if not all(v.is_zero() for v in diff_vals.values()):
        return False, None, {"residual_defect": {g: str(v) for g, v in
                                                 diff_vals.items() if not v.is_zero()},
                             "truncation": trunc.describe()}
    theta = _log_automorphism(auto, ring)
    check = gauge_transform(theta, mc1)
    for g in host.gens:
        if check.xi.values[g.name] != mc2.xi.values[g.name]:
            raise NotMC("logarithm witness failed exact verification")
    return True, theta, {"orders_used": ring.nilpotency_index}


def _values_in_power(ring, values, layer):
    span = [list(v) for v in layer]
    for v in values.values():
        for mon, c in v.terms.items():
            vec = ring.vec_coords({mon.tag: c})
            if not lin.in_span(span, vec):
                return False
    return True


def _vec_in_span(ring, vec_dict, layer):
    return lin.in_span([list(v) for v in layer], ring.vec_coords(vec_dict))


def _power_monomial_columns(host, ring, power_vectors, trunc):
    """Slack columns spanning m^{k+1}-valued derivations (for mod-m^{k+1} solves)."""
    out = []
    slots = [g.name for g in host.gens]
    for g in host.gens:
        vdeg = g.degree + 1
        for m in host.normal_monomials(vdeg, vdeg, trunc.word_max,
                                       include_tags=False):
            for pv in power_vectors:
                vec = ring.coords_vec(pv)
                col = []
                for s in slots:
                    if s == g.name:
                        base = host.element({Monomial(m.gens, None): Fraction(1)})
                        acc = host.scalar(0)
                        for lab, c in vec.items():
                            acc = acc + (base * c if lab is None
                                         else host.base_elt(lab) * base * c)
                        col.append(acc)
                    else:
                        col.append(host.scalar(0))
                out.append(tuple(col))
    return out


def _log_automorphism(phi: Morphism, ring) -> Derivation:
    """log of an automorphism congruent to the identity mod the maximal ideal."""
    host = phi.source

    def nu(elt):
        return phi.apply(elt) - elt

    values = {}
    for g in host.gens:
        acc = host.scalar(0)
        cur = nu(host.gen(g.name))
        n = 1
        while not cur.is_zero():
            acc = acc + cur * Fraction((-1) ** (n + 1), n)
            cur = nu(cur)
            n += 1
            if n > ring.nilpotency_index + 4:
                raise NotNilpotent("logarithm series did not terminate")
        values[g.name] = acc
    return Derivation(host, host, values, 0, check_degrees=False)


# ----- tangent and obstruction dimensions -----

def tangent_obstruction_dims(X: DGAlgebra, depth: int, degrees,
                             trunc: Truncation = DEFAULT_TRUNCATION):
    """Cohomology dimensions of the derivation complex of a resolution of X
    with values in X, in the requested derivation degrees."""
    Q = DGAlgebra(None, [], {}, (), X.regime)
    triv = Morphism(Q, X, {})
    fac = factor_c_fw(triv, depth)
    R = fac.middle
    pi = fac.right
    need = sorted({n for d in degrees for n in (d - 1, d, d + 1)})
    cx = DerivationComplex(R, X, trunc, twist=pi, degrees=need)
    return {n: cx.homology_dim(n) for n in degrees}, fac


def brute_force_first_order_count(X: DGAlgebra, trunc: Truncation = DEFAULT_TRUNCATION,
                                  degree_bound: int = None):
    """Independent oracle: dimension of first-order deformations of a
    degree-0 presented algebra, by direct enumeration.

    Perturbation space: each relation generator r picks up eps * (normal-form
    monomial below its degree-lex bound); trivial deformations come from
    substitutions x -> x + eps * (monomial).  The count is
    dim(perturbations) - dim(trivial directions), both exact.
    """
    if any(g.degree != 0 for g in X.gens):
        raise SyzygyUnavailable("the brute-force oracle expects a degree-0 algebra")
    rels = X.relations
    word = trunc.word_max if degree_bound is None else degree_bound
    basis = X.normal_monomials(0, 0, word)
    index = {m: i for i, m in enumerate(basis)}

    def reduce_vec(elt):
        vec = [Fraction(0)] * len(basis)
        for m, c in elt.terms.items():
            if m in index:
                vec[index[m]] = c
        return vec

    # columns: relation perturbations (r_k += monomial) -> tuple over relations
    pert_cols = []
    for k, r in enumerate(rels):
        for m in basis:
            col = [X.scalar(0)] * len(rels)
            col[k] = X.element({m: Fraction(1)})
            pert_cols.append(col)
    # trivial directions: r(x + eps a) - r(x) = sum_j dr/dx_j * a_j  modulo the ideal
    triv_cols = []
    shellX = DGAlgebra(None, [(g.name, 0) for g in X.gens], {}, (), X.regime)
    for g in X.gens:
        for m in basis:
            col = []
            a = X.element({m: Fraction(1)})
            for r in rels:
                dr = _partial(X, shellX, r, g.name)
                col.append(X.element(X.mul_terms(dr.terms, a.terms)))
            triv_cols.append(col)
    # also generator rescalings of the relations themselves (ideal mixing)
    mix_cols = []
    for k, r in enumerate(rels):
        for j, r2 in enumerate(rels):
            for m in basis:
                col = [X.scalar(0)] * len(rels)
                col[k] = X.element(X.mul_terms({m: Fraction(1)}, r2.terms))
                mix_cols.append(col)

    def col_vec(col):
        out = []
        for e in col:
            out.extend(reduce_vec(e))
        return out

    pert = [col_vec(c) for c in pert_cols]
    triv = [col_vec(c) for c in triv_cols] + [col_vec(c) for c in mix_cols]
    dim_pert = lin.rank_of_span(pert)
    joint = lin.rank_of_span(pert + triv)
    dim_triv_inside = dim_pert + lin.rank_of_span(triv) - joint
    return dim_pert - dim_triv_inside


def _partial(X: DGAlgebra, shell: DGAlgebra, r, gname: str):
    """Formal partial derivative of a degree-0 polynomial by one generator."""
    out = {}
    for mon, c in r.terms.items():
        facs = dict(mon.gens)
        e = facs.get(gname, 0)
        if not e:
            continue
        facs[gname] = e - 1
        gens = tuple(sorted(((g, k) for g, k in facs.items() if k),
                            key=lambda ge: X._order[ge[0]]))
        key = Monomial(gens, mon.tag)
        out[key] = out.get(key, Fraction(0)) + c * e
    return X.element(out)


# ----- classical comparison -----

@dataclass
class ClassicalDeformation:
    """Degree-0 presentation over a classical Artin ring, with flatness notes."""

    algebra: DGAlgebra
    ring: ArtinRing
    notes: dict = field(default_factory=dict)


def h0_compare(sd: StrictDeformation, trunc: Truncation = DEFAULT_TRUNCATION,
               weights=None) -> ClassicalDeformation:
    """H^0 of a strict deformation over a degree-0 Artin ring, as a presented
    A-algebra with a flatness certificate through the residue reduction."""
    total = sd.total
    ring = total.base
    if any(ring.label_degree(lab) != 0 for lab in ring.labels[1:]):
        raise DegreeMismatch("classical comparison needs a degree-0 Artin ring")
    zero_gens = [g for g in total.gens if g.degree == 0]
    minus_one = [g for g in total.gens if g.degree == -1]
    rels = [r for r in total.relations]
    for g in minus_one:
        val = total.diff[g.name]
        if any(total.degree_of(n) != 0 for m in val.terms for n, _ in m.gens):
            raise SyzygyUnavailable("H^0 presentation needs degree-0 differentials")
        if not val.is_zero():
            rels.append(val)
    h0 = DGAlgebra(ring, [(g.name, 0) for g in zero_gens],
                   {}, [dict(r.terms) for r in rels], total.regime,
                   name=f"H0({total.name})", graded_free=False)
    notes = {}
    # flatness via the residue reduction: negative cohomology of the fiber
    rm = residue_map(ring)
    fiber, _ = total.base_change(rm, name=total.name + "@Q")
    neg_dims = {}
    if weights is not None:
        tr = Truncation(trunc.lo, trunc.hi, trunc.word_max, weights=weights[0])
        for comp in weights[1]:
            cx = extract_complex(fiber, tr, component=comp, demand_closed=True)
            rep = cohomology(cx)
            for d in cx.degrees():
                if d < 0:
                    neg_dims[(comp, d)] = rep.dim(d)
        notes["flatness"] = ("fiber has vanishing negative cohomology on the "
                             "listed weight components" if not any(neg_dims.values())
                             else f"nonzero fiber cohomology: {neg_dims}")
        notes["flat"] = not any(neg_dims.values())
    else:
        try:
            cx = extract_complex(fiber, trunc, demand_closed=True)
            rep = cohomology(cx)
            for d in cx.degrees():
                if d < 0:
                    neg_dims[d] = rep.dim(d)
            notes["flat"] = not any(neg_dims.values())
            notes["flatness"] = f"fiber negative cohomology within {trunc.describe()}: {neg_dims}"
        except TruncationNotClosed as exc:
            notes["flat"] = None
            notes["flatness"] = f"undecided within truncation: {exc}"
    return ClassicalDeformation(h0, ring, notes)


def presentations_match(a: DGAlgebra, b: DGAlgebra) -> bool:
    """Same generators and mutually reducing relations (exact)."""
    if set((g.name, g.degree) for g in a.gens) != set((g.name, g.degree) for g in b.gens):
        return False
    for r in a.relations:
        if b.reduce(dict(r.terms)):
            return False
    for r in b.relations:
        if a.reduce(dict(r.terms)):
            return False
    return True


# ----- Hilbert-Schaps style matrix deformations -----

def minors_2x2(ring: DGAlgebra, G):
    """Determinants of the 2x2 minors of a 2xN matrix, by column pairs."""
    n = len(G[0])
    out = []
    for a in range(n):
        for b in range(a + 1, n):
            out.append(G[0][a] * G[1][b] - G[0][b] * G[1][a])
    return out


def hilbert_schaps_check(ring: DGAlgebra, G, ideal_gens, candidate,
                         support_bound: int = 4):
    """Decide whether a first-order ideal deformation comes from a matrix
    deformation of G (whose 2x2 minors present the ideal).

    candidate: list of perturbation elements, one per minor (aligned with
    minors_2x2's column-pair order).  First-order ideal equality allows
    per-slot corrections from the ideal and syzygy-mixed candidate terms.
    Returns (verdict, evidence).
    """
    minors = minors_2x2(ring, G)
    probe = DGAlgebra(None, [(g.name, 0) for g in ring.gens], {},
                      [dict(m.terms) for m in minors], ring.regime)
    for r in ideal_gens:
        if probe.reduce(dict(r.terms)):
            raise MinorIdealMismatch(f"ideal generator {r} is not in the minor ideal")
    probe2 = DGAlgebra(None, [(g.name, 0) for g in ring.gens], {},
                       [dict(r.terms) for r in ideal_gens], ring.regime)
    for m in minors:
        if probe2.reduce(dict(m.terms)):
            raise MinorIdealMismatch(f"minor {m} is not in the given ideal")

    ncols = len(G[0])
    pairs = [(a, b) for a in range(ncols) for b in range(a + 1, ncols)]
    mons = ring.normal_monomials(0, 0, support_bound)
    columns = []

    def matrix_column(i, j, delta):
        col = []
        for (a, b) in pairs:
            pert = ring.scalar(0)
            if i == 0 and j == a:
                pert = delta * G[1][b]
            elif i == 0 and j == b:
                pert = -(delta * G[1][a])
            elif i == 1 and j == b:
                pert = G[0][a] * delta
            elif i == 1 and j == a:
                pert = -(G[0][b] * delta)
            col.append(pert)
        return tuple(col)

    matrix_cols = []
    for i in range(2):
        for j in range(ncols):
            for m in mons:
                matrix_cols.append(matrix_column(i, j, ring.element({m: Fraction(1)})))
    columns.extend(matrix_cols)
    # per-slot ideal slack
    for k in range(len(pairs)):
        for r in minors:
            for m in mons:
                col = [ring.scalar(0)] * len(pairs)
                col[k] = ring.element({m: Fraction(1)}) * r
                columns.append(tuple(col))
    # syzygy-mixed candidate slack (Taylor syzygies of the monomial minors)
    monomial = all(len(m.terms) == 1 for m in minors)
    if monomial:
        expos = [dict(next(iter(m.terms)).gens) for m in minors]
        coeffs = [next(iter(m.terms.values())) for m in minors]
        for k in range(len(pairs)):
            for p in range(len(minors)):
                for q in range(p + 1, len(minors)):
                    lcm = {g: max(expos[p].get(g, 0), expos[q].get(g, 0))
                           for g in set(expos[p]) | set(expos[q])}

                    def quot(e):
                        gens = tuple(sorted(((g, lcm[g] - e.get(g, 0))
                                             for g in lcm if lcm[g] - e.get(g, 0)),
                                            key=lambda ge: ring._order[ge[0]]))
                        return ring.element({Monomial(gens, None): Fraction(1)})

                    mixed = quot(expos[p]) * candidate[p] * (Fraction(1) / coeffs[p]) \
                        - quot(expos[q]) * candidate[q] * (Fraction(1) / coeffs[q])
                    for m in mons:
                        col = [ring.scalar(0)] * len(pairs)
                        col[k] = ring.element({m: Fraction(1)}) * mixed
                        columns.append(tuple(col))
    rhs = tuple(candidate)
    sol = combination_solve(columns, rhs)
    entries_in_max_ideal = all(
        (e.is_zero() or all(m.gens for m in e.terms)) for row in G for e in row)
    evidence = {
        "minors": [str(m) for m in minors],
        "matrix_entries_in_maximal_ideal": entries_in_max_ideal,
        "support_bound": support_bound,
    }
    if sol is None:
        return "not_in_matrix_image", evidence
    return "liftable_via_matrix", evidence
