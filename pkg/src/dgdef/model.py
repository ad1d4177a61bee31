"""Model-structure predicates, factorizations, and constructive liftings.

Fibrations are surjections in strictly negative degrees; weak equivalences
are quasi-isomorphisms (decided within a truncation); cofibrations carry
either a syntactic semifree certificate or explicit retraction data.
The (C,FW) factorization is a depth-limited multiplicative resolution built
from Taylor-complex stages of the degree-0 relation ideal; the (CW,F)
factorization adjoins contractible pairs hitting the target's negative part.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from . import exactlinalg as lin
from .algebra import DGAlgebra, Element, Generator, Monomial, Morphism, NONPOSITIVE
from .artin import RingMorphism, residue_map
from .errors import (
    DegreeMismatch,
    MixedAlgebras,
    NotSurjective,
    ObstructionNotExact,
    ReductionMismatch,
    SyzygyUnavailable,
    TruncationNotClosed,
)
from .homology import Truncation, DEFAULT_TRUNCATION, extract_complex, is_quasi_iso
from .linsys import affine_solve


@dataclass
class MorphismClass:
    fibration: bool = None
    surjective_all_degrees: bool = None
    weak_equivalence: bool = None
    semifree_extension: bool = False
    cofibration_certificate: bool = False
    notes: dict = field(default_factory=dict)

    def flags(self):
        return {
            "fibration": self.fibration,
            "surjective_all_degrees": self.surjective_all_degrees,
            "weak_equivalence": self.weak_equivalence,
            "semifree_extension": self.semifree_extension,
            "cofibration_certificate": self.cofibration_certificate,
        }


@dataclass
class Factorization:
    middle: DGAlgebra
    left: Morphism
    right: Morphism
    kind: str                    # "C_FW" or "CW_F"
    window: tuple = None         # degree window where the W-leg is guaranteed
    notes: dict = field(default_factory=dict)


@dataclass
class LiftingProblem:
    """Commuting square  top∘? : i: P->Q, p: S->R, top: P->S, bottom: Q->R."""

    i: Morphism
    p: Morphism
    top: Morphism
    bottom: Morphism

    def __post_init__(self):
        left = self.bottom.compose(self.i)
        right = self.p.compose(self.top)
        if not left.equals_on_generators(right):
            raise MixedAlgebras("lifting square does not commute")


def surjective_in_degrees(f: Morphism, degrees, trunc: Truncation):
    """Per-degree surjectivity of f onto the truncated target basis."""
    out = {}
    for d in degrees:
        tgt_mons = f.target.normal_monomials(d, d, trunc.word_max)
        if not tgt_mons:
            out[d] = True
            continue
        index = {m: i for i, m in enumerate(tgt_mons)}
        src_mons = f.source.normal_monomials(d, d, trunc.word_max)
        cols = []
        for m in src_mons:
            img = f.apply(f.source.element({m: Fraction(1)}))
            vec = [Fraction(0)] * len(tgt_mons)
            for mm, c in img.terms.items():
                if mm in index:
                    vec[index[mm]] = c
            cols.append(vec)
        rank = lin.rank_of_span(cols) if cols else 0
        out[d] = rank == len(tgt_mons)
    return out


def classify(f: Morphism, trunc: Truncation = DEFAULT_TRUNCATION,
             component=None) -> MorphismClass:
    """Decide the model-structure flags of a chain morphism within a truncation."""
    mc = MorphismClass()
    mc.semifree_extension = f.is_semifree_extension()
    if mc.semifree_extension:
        mc.cofibration_certificate = True
    neg = [d for d in range(trunc.lo, min(trunc.hi, 0) + 1) if d < 0]
    surj = surjective_in_degrees(f, range(trunc.lo, trunc.hi + 1), trunc)
    mc.fibration = all(surj[d] for d in neg)
    mc.surjective_all_degrees = all(surj.values())
    try:
        ok, ev = is_quasi_iso(f, trunc, component=component)
        mc.weak_equivalence = ok
        mc.notes["quasi_iso"] = ev
    except TruncationNotClosed as exc:
        mc.weak_equivalence = None
        mc.notes["quasi_iso"] = f"undecided: {exc}"
    mc.notes["truncation"] = trunc.describe()
    return mc


# ----- (C,FW): depth-limited multiplicative resolution -----

def _pull_back(elt: Element, target: DGAlgebra, genmap):
    """Rewrite an element through a generator renaming into the target."""
    out = target.scalar(0)
    for mon, c in elt.terms.items():
        part = target.scalar(c) if mon.tag is None else target.base_elt(mon.tag) * c
        for g, e in mon.gens:
            part = part * (genmap[g] ** e)
        out = out + part
    return out


def factor_c_fw(f: Morphism, depth: int,
                trunc: Truncation = DEFAULT_TRUNCATION) -> Factorization:
    """Factor base -> X as a semifree extension followed by a surjective
    quasi-isomorphism, guaranteed on the window [-depth+1, 0].

    Stage 0 adjoins degree-0 generators onto X's generators; stage s >= 1
    adjoins the s-th Taylor stage of the degree-0 relation ideal (monomial
    ideals resolve fully; a single non-monomial relation is allowed as a
    principal ideal; anything else raises SyzygyUnavailable).
    """
    X = f.target
    if X.regime != NONPOSITIVE:
        raise SyzygyUnavailable("resolution factoring needs the non-positive regime")
    if f.source is X and Morphism.identity(X).equals_on_generators(f):
        ident = Morphism.identity(X)
        return Factorization(X, ident, ident, "C_FW", window=(-depth + 1, 0),
                             notes={"trivial": True})
    if f.source.gens:
        raise SyzygyUnavailable(
            "resolution factoring is implemented for maps out of the coefficient base")
    if any(g.degree != 0 for g in X.gens):
        raise SyzygyUnavailable(
            "resolution factoring is implemented for targets generated in degree 0")
    if X.base is not None:
        raise SyzygyUnavailable("resolution factoring is implemented over the field")

    ordered = sorted(X.gens, key=lambda g: (-g.degree, g.name))
    to_middle = {g.name: f"e{k + 1}_0" for k, g in enumerate(ordered)}
    gens = [(to_middle[g.name], g.degree) for g in ordered]
    diff = {to_middle[g.name]: 0 for g in ordered}
    images = {to_middle[g.name]: g.name for g in ordered}  # name -> X generator

    rels = list(X.relations)
    monomial_ideal = all(len(r.terms) == 1 and next(iter(r.terms)).tag is None
                         for r in rels)
    if not monomial_ideal and len(rels) > 1:
        raise SyzygyUnavailable(
            "syzygy stages need a monomial (or principal) degree-0 ideal")
    rel_monoms = []
    for r in rels:
        if monomial_ideal:
            rel_monoms.append({to_middle[g]: e for g, e in next(iter(r.terms)).gens})

    def lcm_of(subset):
        out = {}
        for idx in subset:
            for g, e in rel_monoms[idx].items():
                out[g] = max(out.get(g, 0), e)
        return out

    taylor_name = {}
    for s in range(1, depth + 1):
        subsets = list(combinations(range(len(rels)), s))
        if not subsets:
            break
        for k, subset in enumerate(subsets):
            name = f"e{k + 1}_{s}"
            taylor_name[subset] = name
            gens.append((name, -s))
            images[name] = None  # maps to zero in X
            if s == 1:
                # translate the relation into stage-0 names
                terms = {}
                for mon, c in rels[subset[0]].terms.items():
                    key = tuple(sorted(((to_middle[g], e) for g, e in mon.gens)))
                    terms[key] = c
                diff[name] = ("rel", terms)
            else:
                lcm_s = lcm_of(subset)
                parts = []
                for pos, idx in enumerate(subset):
                    sub = tuple(j for j in subset if j != idx)
                    lcm_sub = lcm_of(sub)
                    quot = tuple(sorted((g, lcm_s[g] - lcm_sub.get(g, 0))
                                        for g in lcm_s if lcm_s[g] - lcm_sub.get(g, 0)))
                    parts.append((Fraction((-1) ** pos), quot, taylor_name[sub]))
                diff[name] = ("taylor", parts)

    shell = DGAlgebra(None, gens, {}, (), X.regime)

    def build_diff(spec):
        if spec == 0:
            return {}
        kind, data = spec
        if kind == "rel":
            terms = {}
            for key, c in data.items():
                gens_t = tuple(sorted(key, key=lambda ge: shell._order[ge[0]]))
                terms[Monomial(gens_t, None)] = c
            return terms
        out = shell.scalar(0)
        for c, quot, nm in data:
            gens_t = tuple(sorted(quot, key=lambda ge: shell._order[ge[0]]))
            out = out + shell.element({Monomial(gens_t, None): c}) * shell.gen(nm)
        return out.terms

    middle = DGAlgebra(None, gens, {n: build_diff(diff[n]) for n in diff},
                       (), X.regime, name=f"res({X.name})", graded_free=True)
    right_images = {n: (X.gen(images[n]) if images[n] else X.scalar(0))
                    for n in images}
    right = Morphism(middle, X, right_images, check_chain=True)
    left = Morphism(f.source, middle, {g.name: middle.gen(g.name)
                                       for g in f.source.gens},
                    semifree_over=f.source)
    assert right.compose(left).equals_on_generators(f)
    return Factorization(middle, left, right, "C_FW", window=(-depth + 1, 0),
                         notes={"stages": depth,
                                "generator_map": dict(to_middle)})


# ----- (CW,F): contractible pairs onto the negative part -----

def factor_cw_f(f: Morphism, trunc: Truncation = DEFAULT_TRUNCATION) -> Factorization:
    """Factor f: P -> X as a trivial cofibration followed by a fibration.

    One contractible pair (u, z = du) is adjoined per negative-degree
    normal-form monomial of X inside the truncation, with u mapping onto the
    monomial and z onto its differential.  The left leg is exactly a weak
    equivalence (contractible pairs); the right leg is surjective in strictly
    negative degrees within the truncation, exactly when X's negative part
    is finite there.
    """
    X = f.target
    if X.regime != NONPOSITIVE:
        raise SyzygyUnavailable("pair factoring needs the non-positive regime")
    neg_mons = [m for m in X.normal_monomials(trunc.lo, -1, trunc.word_max)]
    pair_names = []
    new_gens = []
    diff = {}
    for k, m in enumerate(neg_mons):
        d = X.monomial_degree(m)
        u, z = f"u{k + 1}_p", f"z{k + 1}_p"
        new_gens.extend([(u, d), (z, d + 1)])
        diff[u] = None  # set after shell exists: d(u) = z
        pair_names.append((u, z, m))
    middle, left = f.source.adjoin(
        new_gens, {u: {Monomial(((z, 1),), None): Fraction(1)}
                   for (u, z, _) in pair_names})
    images = {g.name: f.images[g.name] for g in f.source.gens}
    for u, z, m in pair_names:
        images[u] = X.element({m: Fraction(1)})
        images[z] = X.element({m: Fraction(1)}).d()
    right = Morphism(middle, X, images, check_chain=True)
    assert right.compose(left).equals_on_generators(f)
    pairs = [(u, z) for (u, z, _) in pair_names]
    return Factorization(middle, left, right, "CW_F",
                         window=(trunc.lo, trunc.hi),
                         notes={"contractible_pairs": pairs})


def contractible_pairs_certificate(left: Morphism, pairs) -> bool:
    """Exact triviality certificate: every adjoined generator sits in a pair
    (u, z) with d(u) = z and d(z) = 0."""
    extra = {g.name for g in left.adjoined_generators()}
    listed = {n for pair in pairs for n in pair}
    if extra != listed:
        return False
    tgt = left.target
    for u, z in pairs:
        if tgt.diff[u] != tgt.gen(z) or not tgt.diff[z].is_zero():
            return False
    return True


# ----- killer-algebra graded lifting -----

def killer_extend(alg: DGAlgebra, name=None):
    """Adjoin a degree -1 generator with d = 1 (kills all cohomology)."""
    theta = name or "theta"
    while alg.has_gen(theta):
        theta += "_"
    ext, incl = alg.adjoin([(theta, -1)], {theta: {Monomial((), None): Fraction(1)}},
                           name=f"{alg.name}[killer]")
    return ext, incl, theta


def killer_contract(z: Element, theta: str) -> Element:
    """Explicit h with d(h) = z for a cocycle z in a killer extension."""
    alg = z.alg
    h = alg.scalar(0)
    for mon, c in z.terms.items():
        if any(g == theta for g, _ in mon.gens):
            continue
        deg = alg.monomial_degree(mon)
        sign = 1 if deg % 2 == 0 else -1
        h = h + alg.element({mon: c * sign}) * alg.gen(theta)
    assert (h.d() - z).is_zero(), "killer contraction applied to a non-cocycle"
    return h


def graded_lift(problem: LiftingProblem, trunc: Truncation = DEFAULT_TRUNCATION,
                section=None) -> Morphism:
    """Graded-algebra solution of a lifting square (no chain condition).

    Requires i semifree-certified and p surjective in every degree occupied by
    the adjoined generators.  The lift goes through the killer extension of
    the target sides, where the kernel has an explicit contraction, and then
    projects the killer variable away; both triangles commute exactly.
    """
    i, p, top, bottom = problem.i, problem.p, problem.top, problem.bottom
    if not i.is_semifree_extension():
        raise SyzygyUnavailable("graded_lift needs a semifree certificate on i")
    S, R = p.source, p.target
    S2, inc_s, theta_s = killer_extend(S)
    R2, inc_r, theta_r = killer_extend(R)
    p2 = Morphism(S2, R2, {**{g.name: inc_r.apply(p.images[g.name]) for g in S.gens},
                           theta_s: R2.gen(theta_r)}, ring_map=p.ring_map)
    images = {g.name: inc_s.apply(top.images[g.name]) for g in i.source.gens}
    partial = dict(images)

    def eval_partial(elt):
        out = S2.scalar(0)
        for mon, c in elt.terms.items():
            part = S2.scalar(c) if mon.tag is None else S2.base_elt(mon.tag) * c
            for g, e in mon.gens:
                part = part * (partial[g] ** e)
            out = out + part
        return out

    for g in i.adjoined_generators():
        if section is not None:
            s0 = inc_s.apply(section(bottom.images[g.name]))
        else:
            cands = [S.element({m: Fraction(1)})
                     for m in S.normal_monomials(g.degree, g.degree, trunc.word_max)]
            sol = affine_solve(cands, [(p.apply, bottom.images[g.name])])
            if sol is None:
                raise NotSurjective(
                    f"no preimage of {bottom.images[g.name]} within the truncation")
            s0 = inc_s.apply(sol)
        defect = s0.d() - eval_partial(i.target.diff[g.name])
        assert p2.apply(defect).is_zero(), "defect escaped the kernel"
        h = killer_contract(defect, theta_s)
        val = s0 - h
        partial[g.name] = val
    beta_images = {**{g.name: S.gen(g.name) for g in S.gens}, theta_s: S.scalar(0)}
    beta = Morphism(S2, S, beta_images)
    gamma = Morphism(i.target, S, {n: beta.apply(v) for n, v in partial.items()},
                     ring_map=top.ring_map)
    for g in i.source.gens:
        assert gamma.apply(i.images[g.name]) == top.images[g.name]
    for g in i.target.gens:
        assert p.apply(gamma.images[g.name]) == bottom.images[g.name]
    return gamma


# ----- DG lifting (MC4) -----

def dg_lift(problem: LiftingProblem, trunc: Truncation = DEFAULT_TRUNCATION,
            pairing="C_FW", pairs=None, constraints=None):
    """Chain-level lift of a lifting square; both triangles commute exactly.

    pairing "C_FW": i any semifree cofibration, p a trivial fibration (the
    correction classes are solved inside ker p, which is acyclic).
    pairing "CW_F": i a trivial cofibration presented by contractible pairs
    (pass them via `pairs`), p a fibration.
    `constraints` is a list of (linear_fn, value_fn) pairs: for every adjoined
    generator g the lift must satisfy linear_fn(h(g)) == value_fn(g); used by
    the Artin lifting-of-liftings to pin the reduction.
    """
    i, p, top, bottom = problem.i, problem.p, problem.top, problem.bottom
    if not i.is_semifree_extension():
        raise SyzygyUnavailable("dg_lift needs a semifree certificate on i")
    S = p.source
    images = {g.name: top.images[g.name] for g in i.source.gens}

    def eval_partial(elt):
        out = S.scalar(0)
        for mon, c in elt.terms.items():
            part = S.scalar(c) if mon.tag is None else S.base_elt(mon.tag) * c
            for g, e in mon.gens:
                part = part * (images[g] ** e)
            out = out + part
        return out

    extra = constraints or []
    if pairing == "CW_F":
        grouped = {u: z for (u, z) in (pairs or [])}
        partners = {z: u for (u, z) in (pairs or [])}
        adjoined = [g.name for g in i.adjoined_generators()]
        if set(adjoined) != set(grouped) | set(partners):
            raise SyzygyUnavailable("CW_F lifting needs the contractible pairs")
        for g in i.adjoined_generators():
            if g.name in partners:
                continue  # z-variables are forced by their partners
            z = grouped[g.name]
            cands = [S.element({m: Fraction(1)})
                     for m in S.normal_monomials(g.degree, g.degree, trunc.word_max)]
            conds = [(p.apply, bottom.images[g.name])]
            for fn, val in extra:
                conds.append((fn, val(g.name)))
            sol = affine_solve(cands, conds)
            if sol is None:
                raise NotSurjective(f"no admissible preimage for {g.name}")
            images[g.name] = sol
            images[z] = sol.d()
            if p.apply(images[z]) != bottom.images[z]:
                raise ObstructionNotExact(images[z], "pair partner image mismatch")
            for fn, val in extra:
                if fn(images[z]) != val(z):
                    raise ReductionMismatch(f"pair partner {z} violates a constraint")
    else:
        for g in i.adjoined_generators():
            lifted_dg = eval_partial(i.target.diff[g.name])
            cands = [S.element({m: Fraction(1)})
                     for m in S.normal_monomials(g.degree, g.degree, trunc.word_max)]
            conds = [(p.apply, bottom.images[g.name]),
                     (lambda e: e.d(), lifted_dg)]
            for fn, val in extra:
                conds.append((fn, val(g.name)))
            sol = affine_solve(cands, conds)
            if sol is None:
                raise ObstructionNotExact(
                    lifted_dg, f"no chain lift for {g.name} within the truncation")
            images[g.name] = sol
    h = Morphism(i.target, S, images, check_chain=True)
    for g in i.source.gens:
        assert h.apply(i.images[g.name]) == top.images[g.name]
    for g in i.target.gens:
        assert p.apply(h.images[g.name]) == bottom.images[g.name]
    return h


def lift_lifting_over_artin(ext: RingMorphism, problem: LiftingProblem,
                            h_b: Morphism, trunc: Truncation = DEFAULT_TRUNCATION,
                            pairing="C_FW", pairs=None) -> Morphism:
    """Lift a solved lifting square along a surjection of coefficient rings.

    The square lives over ext.source; h_b solves the square reduced along ext
    (its algebras must be the base changes of the square's).  The returned
    h_a solves the original square and reduces to h_b generator-exactly.
    """
    if not ext.is_surjective():
        raise NotSurjectiveBase("coefficient surjection required")
    i, p, top, bottom = problem.i, problem.p, problem.top, problem.bottom
    Q_b, red_q = i.target.base_change(ext, name=i.target.name + "@B")
    S_b, red_s = p.source.base_change(ext, name=p.source.name + "@B")
    if set(h_b.source.gen_names()) != set(Q_b.gen_names()) or \
            set(h_b.target.gen_names()) != set(S_b.gen_names()):
        raise ReductionMismatch("h_b does not live on the reduced square")
    hb_images = {g.name: S_b.element(dict(h_b.images[g.name].terms))
                 for g in h_b.source.gens}
    R_b, red_r = p.target.base_change(ext, name=p.target.name + "@B")
    p_b = Morphism(S_b, R_b, {g.name: red_r.apply(p.images[g.name])
                              for g in p.source.gens})
    # verify h_b solves the reduced square exactly
    for g in i.source.gens:
        lhs = _eval_images(hb_images, red_q.apply(i.images[g.name]), S_b)
        if lhs != red_s.apply(top.images[g.name]):
            raise ReductionMismatch(f"h_b fails the top triangle at {g.name}")
    for g in i.target.gens:
        if p_b.apply(hb_images[g.name]) != red_r.apply(bottom.images[g.name]):
            raise ReductionMismatch(f"h_b fails the bottom triangle at {g.name}")
    constraints = [(red_s.apply, lambda name: hb_images[name])]
    h_a = dg_lift(problem, trunc, pairing=pairing, pairs=pairs,
                  constraints=constraints)
    for g in i.target.gens:
        if red_s.apply(h_a.images[g.name]) != hb_images[g.name]:
            raise ReductionMismatch(f"lift does not reduce to h_b at {g.name}")
    return h_a


def _eval_images(images, elt, target: DGAlgebra):
    out = target.scalar(0)
    for mon, c in elt.terms.items():
        part = target.scalar(c) if mon.tag is None else target.base_elt(mon.tag) * c
        for g, e in mon.gens:
            part = part * (images[g] ** e)
        out = out + part
    return out
