"""Model-structure predicates, factorizations, graded and DG lifting."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from dgdef import exactlinalg as lin
from dgdef.algebra import (Morphism, UNBOUNDED, graded_map, make_free_dga,
                           make_morphism)
from dgdef.artin import make_artin_ring, residue_map
from dgdef.deform import base_extend
from dgdef.errors import NotSurjective, ReductionMismatch, SyzygyUnavailable
from dgdef.homology import Truncation, cohomology, extract_complex
from dgdef.model import (LiftingProblem, classify, contractible_pairs_certificate,
                         dg_lift, factor_c_fw, factor_cw_f, graded_lift,
                         lift_lifting_over_artin, surjective_in_degrees)


def base_q():
    return make_free_dga(None, [], {}, name="Q")


def test_classify_semifree_inclusion():
    Q = base_q()
    X = make_free_dga(None, [("x", 0), ("e", -1)], {"e": "x^2"})
    Xsub = make_free_dga(None, [("x", 0)], {})
    i = make_morphism(Xsub, X, {"x": "x"})
    mc = classify(i, Truncation(-2, 0, 4))
    assert mc.semifree_extension and mc.cofibration_certificate


def test_classify_trivial_fibration_q():
    B = make_free_dga(None, [("x", 1), ("y", -1)], {"y": "y*x"}, regime=UNBOUNDED)
    D = make_free_dga(None, [("x", 1), ("y", -1), ("z", 0)], {"y": "z"},
                      regime=UNBOUNDED)
    q = make_morphism(D, B, {"x": "x", "y": "y", "z": "y*x"})
    mc = classify(q, Truncation(-3, 0, 5))
    assert mc.fibration and mc.surjective_all_degrees
    # weak equivalence certified per weight component (each one is finite)
    tr = Truncation(-3, 2, 6, weights=({"y": 1, "z": 1},))
    for w in range(0, 4):
        mc_w = classify(q, tr, component=(w,))
        assert mc_w.weak_equivalence


def test_classify_identity_has_all_flags():
    Q = base_q()
    mc = classify(Morphism.identity(Q), Truncation(-2, 0, 4))
    assert mc.fibration and mc.weak_equivalence and mc.semifree_extension


def test_factor_c_fw_hypersurface_matches_koszul_tate_oracle():
    """Resolution of the double point agrees with the two-term oracle."""
    Q = base_q()
    X = make_free_dga(None, [("x", 0)], {}, relations=["x^2"])
    fac = factor_c_fw(make_morphism(Q, X, {}), 3)
    M = fac.middle
    assert sorted((g.name, g.degree) for g in M.gens) == \
        [("e1_0", 0), ("e1_1", -1)]
    assert str(M.diff["e1_1"]) == "e1_0^2"
    # oracle: per weight component (x -> 1, e -> 2) the complex is finite and
    # has H^0 matching the monomial count of X, H^{-1} = H^{-2} = 0
    tr = Truncation(-2, 0, 12, weights=({"e1_0": 1, "e1_1": 2},))
    h0 = 0
    for w in range(0, 8):
        cx = extract_complex(M, tr, component=(w,), demand_closed=True)
        rep = cohomology(cx)
        h0 += rep.dim(0)
        assert rep.dim(-1) == 0 and rep.dim(-2) == 0
    assert h0 == len(X.normal_monomials(0, 0, 8))  # dim H^0 = dim X


def test_factor_c_fw_taylor_stages():
    Q = base_q()
    X = make_free_dga(None, [("x", 0), ("y", 0)], {},
                      relations=["x^3", "y^2", "x^2*y"])
    fac = factor_c_fw(make_morphism(Q, X, {}), 2)
    M = fac.middle
    names = sorted(g.name for g in M.gens)
    assert names == ["e1_0", "e1_1", "e1_2", "e2_0", "e2_1", "e2_2",
                     "e3_1", "e3_2"]
    stage1 = sorted(str(M.diff[n]) for n in ("e1_1", "e2_1", "e3_1"))
    assert stage1 == sorted(["e1_0^3", "e2_0^2", "e1_0^2*e2_0"])
    # Taylor differentials square to zero (checked at construction) and the
    # right leg is an exact chain map
    assert fac.right.is_chain_map()
    assert fac.left.is_semifree_extension()
    mc = classify(fac.left, Truncation(-1, 0, 3))
    assert mc.semifree_extension


def test_factor_c_fw_identity_trivial():
    X = make_free_dga(None, [("x", 0)], {}, relations=["x^2"])
    fac = factor_c_fw(Morphism.identity(X), 2)
    assert fac.middle is X
    assert fac.notes.get("trivial")


def test_factor_c_fw_rejects_unsupported():
    Q = base_q()
    X = make_free_dga(None, [("x", 0), ("y", 0)], {},
                      relations=["x^2 - y^3", "x*y"])
    with pytest.raises(SyzygyUnavailable):
        factor_c_fw(make_morphism(Q, X, {}), 2)


def test_factor_cw_f_flags_and_identity():
    Q = base_q()
    Qx = make_free_dga(None, [("x", 0)], {})
    fac = factor_cw_f(make_morphism(Q, Qx, {}), Truncation(-3, 0, 4))
    assert fac.notes["contractible_pairs"] == []
    mc = classify(fac.right, Truncation(-3, 0, 4))
    assert mc.fibration   # vacuously: no negative part
    ident = factor_cw_f(Morphism.identity(Qx), Truncation(-2, 0, 3))
    assert ident.right.compose(ident.left).equals_on_generators(
        Morphism.identity(Qx))


def test_factor_cw_f_negative_part():
    Qx = make_free_dga(None, [("x", 0)], {})
    Qxy = make_free_dga(None, [("x", 0), ("y", -1)], {})
    fac = factor_cw_f(make_morphism(Qx, Qxy, {"x": "x"}), Truncation(-2, 0, 3))
    pairs = fac.notes["contractible_pairs"]
    assert len(pairs) == 3          # y, x*y, x^2*y within word length 3
    assert contractible_pairs_certificate(fac.left, pairs)
    mc = classify(fac.right, Truncation(-2, 0, 3))
    assert mc.fibration
    assert fac.right.compose(fac.left).equals_on_generators(
        make_morphism(Qx, Qxy, {"x": "x"}))
    # the left leg is a weak equivalence: contractible pairs
    mcl = classify(fac.left, Truncation(-2, 0, 3))
    assert mcl.weak_equivalence


def test_graded_lift_of_reduced_idempotent():
    A = make_artin_ring([("eps", 0)], relations=["eps^2"])
    R = make_free_dga(None, [("x", 0), ("y", -1)], {})
    host = base_extend(R, A)
    RA = host.with_differential({"x": {}, "y": host._coerce("eps*x").terms})
    RB, rho = RA.base_change(residue_map(A))
    P = make_free_dga(A, [], {})
    iPA = Morphism(P, RA, {}, semifree_over=P)
    fB = graded_map(RB, RB, {"x": "x", "y": 0})
    prob = LiftingProblem(iPA, rho, Morphism(P, RA, {}), fB.compose(rho))
    r = graded_lift(prob, Truncation(-3, 0, 5))
    assert r.images["x"] == RA.gen("x")
    assert r.images["y"].is_zero()
    # graded identities hold exactly; the chain defect is the obstruction
    assert not r.is_chain_map()


def test_graded_lift_iso_case():
    A = make_artin_ring([("eps", 0)], relations=["eps^2"])
    S = make_free_dga(A, [("x", 0)], {})
    P = make_free_dga(A, [], {})
    i = Morphism(P, S, {}, semifree_over=P)
    p = Morphism.identity(S)
    bottom = Morphism(S, S, {"x": "x + eps*x^2"})
    prob = LiftingProblem(i, p, Morphism(P, S, {}), bottom)
    gamma = graded_lift(prob, Truncation(-2, 0, 4))
    assert gamma.images["x"] == bottom.images["x"]


def test_dg_lift_identity_fibration():
    A = make_artin_ring([("eps", 0)], relations=["eps^2"])
    S = make_free_dga(A, [("x", 0), ("c", -1)], {})
    P = make_free_dga(A, [], {})
    Qa = make_free_dga(A, [("x", 0)], {})
    i = Morphism(P, Qa, {}, semifree_over=P)
    top = Morphism(P, S, {})
    bottom = make_morphism(Qa, S, {"x": "x"})
    prob = LiftingProblem(i, Morphism.identity(S), top, bottom)
    h = dg_lift(prob, Truncation(-2, 0, 4))
    assert h.images["x"] == S.gen("x")


def test_dg_lift_with_coboundary_correction():
    """Lifting against the resolution projection: the naive preimage has a
    nonzero chain defect that is corrected inside the acyclic kernel."""
    S = make_free_dga(None, [("x", 0), ("e", -1), ("c", -1), ("z", 0)],
                      {"e": "x^2", "c": "z"})
    X = make_free_dga(None, [("x", 0)], {}, relations=["x^2"])
    p = make_morphism(S, X, {"x": "x", "e": 0, "c": 0, "z": 0})
    mc = classify(p, Truncation(-2, 0, 4))
    assert mc.fibration and mc.surjective_all_degrees
    tr = Truncation(-2, 0, 10, weights=({"x": 1, "e": 2}, {"c": 1, "z": 1}))
    for v in range(0, 4):
        for w in range(0, 3):
            mc_vw = classify(p, tr, component=(v, w))
            assert mc_vw.weak_equivalence
    Qx = make_free_dga(None, [("x", 0)], {})
    T = make_free_dga(None, [("x", 0), ("u", -1)], {"u": "x^2"})
    iT = make_morphism(Qx, T, {"x": "x"})
    top = make_morphism(Qx, S, {"x": "x"})
    bottom = make_morphism(T, X, {"x": "x", "u": 0})
    prob = LiftingProblem(iT, p, top, bottom)
    h = dg_lift(prob, Truncation(-2, 0, 4))
    assert h.images["u"].d() == S.gen("x") * S.gen("x")
    assert p.apply(h.images["u"]).is_zero()


def test_lift_lifting_over_artin_round_trip():
    A = make_artin_ring([("eps", 0)], relations=["eps^2"])
    P = make_free_dga(A, [], {})
    Qa = make_free_dga(A, [("x", 0)], {})
    S = make_free_dga(A, [("x", 0), ("c", -1)], {})
    Ra = make_free_dga(A, [("x", 0)], {})
    i = Morphism(P, Qa, {}, semifree_over=P)
    p = make_morphism(S, Ra, {"x": "x", "c": 0})
    top = Morphism(P, S, {})
    bottom = make_morphism(Qa, Ra, {"x": "x"})
    prob = LiftingProblem(i, p, top, bottom)
    # known solution over A reduces to a solution over Q
    h_known = make_morphism(Qa, S, {"x": "x"})
    Q_b, _ = Qa.base_change(residue_map(A))
    S_b, red_s = S.base_change(residue_map(A))
    h_b = Morphism(Q_b, S_b, {"x": "x"})
    h_a = lift_lifting_over_artin(residue_map(A), prob, h_b, Truncation(-2, 0, 4))
    for g in Qa.gens:
        assert red_s.apply(h_a.images[g.name]) == h_b.images[g.name]
        assert p.apply(h_a.images[g.name]) == bottom.images[g.name]


def test_lift_lifting_rejects_non_solution():
    A = make_artin_ring([("eps", 0)], relations=["eps^2"])
    P = make_free_dga(A, [], {})
    Qa = make_free_dga(A, [("x", 0)], {})
    S = make_free_dga(A, [("x", 0), ("c", 0)], {})
    Ra = make_free_dga(A, [("x", 0)], {})
    i = Morphism(P, Qa, {}, semifree_over=P)
    p = make_morphism(S, Ra, {"x": "x", "c": 0})
    prob = LiftingProblem(i, p, Morphism(P, S, {}),
                          make_morphism(Qa, Ra, {"x": "x"}))
    Q_b, _ = Qa.base_change(residue_map(A))
    S_b, _ = S.base_change(residue_map(A))
    bad = Morphism(Q_b, S_b, {"x": "c"})   # not a solution of the reduced square
    with pytest.raises(ReductionMismatch):
        lift_lifting_over_artin(residue_map(A), prob, bad, Truncation(-2, 0, 4))


def test_pullback_surjectivity_predicate(seed=13, trials=100):
    """Random desk fibrations: S -> R x_{R@Q} (S@Q) is surjective in
    negative degrees (the nilpotent-kernel pullback surjectivity)."""
    A = make_artin_ring([("eps", 0)], relations=["eps^2"])
    rng = random.Random(seed)
    rm = residue_map(A)
    for _ in range(trials):
        degs = [0, -1] + ([-2] if rng.random() < 0.5 else [])
        gens = [(f"g{i}", d) for i, d in enumerate(degs)]
        S = make_free_dga(A, gens, {})
        keep = [g for g, _ in gens if rng.random() < 0.7] or [gens[0][0]]
        R = make_free_dga(A, [(n, d) for n, d in gens if n in keep], {})
        p = make_morphism(S, R, {n: (n if n in keep else 0) for n, _ in gens})
        S_b, red_s = S.base_change(rm)
        R_b, red_r = R.base_change(rm)
        p_b = Morphism(S_b, R_b, {g.name: red_r.apply(p.images[g.name])
                                  for g in S.gens})
        for d in (-2, -1):
            r_mons = R.normal_monomials(d, d, 3)
            sb_mons = S_b.normal_monomials(d, d, 3)
            rb_mons = R_b.normal_monomials(d, d, 3)
            rb_index = {m: i for i, m in enumerate(rb_mons)}
            # constraint rows for the pullback: red_r(r) - p_b(sbar) = 0
            ncols = len(r_mons) + len(sb_mons)
            rows = [[Fraction(0)] * ncols for _ in rb_mons]
            for i, m in enumerate(r_mons):
                for mm, c in red_r.apply(R.element({m: Fraction(1)})).terms.items():
                    rows[rb_index[mm]][i] = c
            for i, m in enumerate(sb_mons):
                for mm, c in p_b.apply(S_b.element({m: Fraction(1)})).terms.items():
                    rows[rb_index[mm]][len(r_mons) + i] -= c
            pullback_dim = (len(lin.nullspace(rows)) if rb_mons else ncols)
            # image of S_d: (p(m), red_s(m)) in the same coordinates
            r_index = {m: i for i, m in enumerate(r_mons)}
            sb_index = {m: i for i, m in enumerate(sb_mons)}
            img_vecs = []
            for m in S.normal_monomials(d, d, 3):
                e = S.element({m: Fraction(1)})
                vec = [Fraction(0)] * ncols
                for mm, c in p.apply(e).terms.items():
                    vec[r_index[mm]] = c
                for mm, c in red_s.apply(e).terms.items():
                    vec[len(r_mons) + sb_index[mm]] = c
                img_vecs.append(vec)
            assert lin.rank_of_span(img_vecs) == pullback_dim
