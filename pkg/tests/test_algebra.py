"""Exact algebra core: signs, differentials, morphisms, pushouts, parsing."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from dgdef.algebra import (Monomial, Morphism, UNBOUNDED, graded_map,
                           make_free_dga, make_morphism, parse_poly, pushout)
from dgdef.artin import make_artin_ring
from dgdef.errors import (ChainMapFailure, DegreeMismatch, DSquareNonzero,
                          MixedAlgebras, NonpositiveViolation)


def two_line_algebra():
    return make_free_dga(None, [("x", 1), ("y", -1)], {"y": "y*x"},
                         regime=UNBOUNDED, name="B")


def test_odd_square_vanishes():
    B = two_line_algebra()
    y = B.gen("y")
    assert (y * y).is_zero()
    assert (B.gen("x") * B.gen("x")).is_zero()


def test_koszul_sign_on_odd_pair():
    B = two_line_algebra()
    x, y = B.gen("x"), B.gen("y")
    assert x * y == -(y * x)


def test_unit_is_cocycle():
    B = two_line_algebra()
    assert B.scalar(1).d().is_zero()


def test_dsquare_check_rejects_bad_differential():
    with pytest.raises(DSquareNonzero):
        # du = z, dz = w gives d(d(u)) = w != 0
        make_free_dga(None, [("u", -2), ("z", -1), ("w", 0)],
                      {"u": "z", "z": "w"})


def test_degree_mismatch_rejected():
    with pytest.raises(DegreeMismatch):
        make_free_dga(None, [("x", 0), ("y", -1)], {"y": "x*x*y"})


def test_nonpositive_violation():
    with pytest.raises(NonpositiveViolation):
        make_free_dga(None, [("x", 1)], {})


def test_killer_algebra_and_free_base():
    K = make_free_dga(None, [("u", -1)], {"u": "1"})
    assert str(K.diff["u"]) == "1"
    Q = make_free_dga(None, [], {})
    assert Q.scalar(3).d().is_zero()
    assert not Q.gens


def test_leibniz_hand_oracle_for_yt():
    """d(yt) in the pushout: hand expansion (dy)t - y(dt) = yxt - yxt = 0."""
    A = make_free_dga(None, [("x", 1)], {}, regime=UNBOUNDED)
    B = two_line_algebra()
    Xt = make_free_dga(None, [("x", 1), ("t", 0)], {"t": "x*t"}, regime=UNBOUNDED)
    P, _, _ = pushout(make_morphism(A, Xt, {"x": "x"}),
                      make_morphism(A, B, {"x": "x"}))
    y, t = P.gen("y"), P.gen("t")
    hand = y.d() * t - y * t.d()          # (dy)t + (-1)^{|y|} y (dt)
    assert (y * t).d() == hand
    assert (y * t).d().is_zero()


def test_make_morphism_chain_failure_carries_defect():
    A = make_artin_ring([("eps", 0)], relations=["eps^2"])
    RA = make_free_dga(A, [("x", 0), ("y", -1)], {"y": "eps*x"})
    with pytest.raises(ChainMapFailure) as err:
        make_morphism(RA, RA, {"x": "x", "y": "eps*y"})
    assert "eps" in str(err.value.defect)


def test_identity_and_q_are_chain_maps():
    B = two_line_algebra()
    assert Morphism.identity(B).is_chain_map()
    D = make_free_dga(None, [("x", 1), ("y", -1), ("z", 0)], {"y": "z"},
                      regime=UNBOUNDED)
    q = make_morphism(D, B, {"x": "x", "y": "y", "z": "y*x"})
    assert q.is_chain_map()


def test_pushout_of_counterexample_instance():
    A = make_free_dga(None, [("x", 1)], {}, regime=UNBOUNDED)
    B = two_line_algebra()
    Xt = make_free_dga(None, [("x", 1), ("t", 0)], {"t": "x*t"}, regime=UNBOUNDED)
    P, iX, iB = pushout(make_morphism(A, Xt, {"x": "x"}),
                        make_morphism(A, B, {"x": "x"}))
    assert sorted((g.name, g.degree) for g in P.gens) == \
        [("t", 0), ("x", 1), ("y", -1)]
    assert str(P.diff["t"]) == "x*t"
    assert P.diff["y"] == -(P.gen("x") * P.gen("y"))
    assert iX.is_chain_map() and iB.is_chain_map()


def test_pushout_unit():
    A = make_free_dga(None, [("x", 0)], {})
    X = make_free_dga(None, [("x", 0), ("t", -1)], {})
    P, iX, iA = pushout(make_morphism(A, X, {"x": "x"}),
                        Morphism.identity(A))
    assert sorted(g.name for g in P.gens) == ["t", "x"]
    assert iX.images["t"] == P.gen("t")


def test_pushout_associativity_on_presentations():
    A = make_free_dga(None, [("x", 0)], {}, name="A")
    X = make_free_dga(None, [("x", 0), ("t", -1)], {}, name="X")
    B = make_free_dga(None, [("x", 0), ("y", -1)], {}, name="B")
    C = make_free_dga(None, [("x", 0), ("y", -1), ("w", -2)], {}, name="C")
    f = make_morphism(A, X, {"x": "x"})
    g = make_morphism(A, B, {"x": "x"})
    h = make_morphism(B, C, {"x": "x", "y": "y"})
    XB, _, inc_b = pushout(f, g)
    XBC, _, _ = pushout(inc_b, h)
    XC, _, _ = pushout(f, h.compose(g))
    assert sorted((gg.name, gg.degree) for gg in XBC.gens) == \
        sorted((gg.name, gg.degree) for gg in XC.gens)
    for gg in XBC.gens:
        assert XBC.diff[gg.name].terms == XC.diff[gg.name].terms


def test_mixed_algebras_rejected():
    A = make_free_dga(None, [("x", 0)], {})
    B = make_free_dga(None, [("x", 0)], {})
    with pytest.raises(MixedAlgebras):
        A.gen("x") * B.gen("x")


def test_random_d_squared_and_koszul(seed=11, trials=300):
    rng = random.Random(seed)
    B = make_free_dga(None, [("x", 1), ("y", -1), ("t", 0), ("s", -2)],
                      {"y": "y*x", "t": "x*t"}, regime=UNBOUNDED)
    mons = B.normal_monomials(-5, 3, 4)
    for _ in range(trials):
        terms = {}
        for _ in range(3):
            m = mons[rng.randrange(len(mons))]
            terms[m] = Fraction(rng.randrange(-5, 6) or 1)
        a = B.element(terms)
        assert a.d().d().is_zero()
        comps = a.homogeneous_components()
        if len(comps) >= 2:
            degs = sorted(comps)
            u, v = comps[degs[0]], comps[degs[1]]
            sign = -1 if (degs[0] % 2 and degs[1] % 2) else 1
            assert u * v == v * u * sign


def test_random_leibniz(seed=5, trials=200):
    rng = random.Random(seed)
    B = make_free_dga(None, [("x", 0), ("e1", -1), ("e2", -1), ("s", -2)],
                      {"e1": "x^2", "e2": "x^2", "s": "x*e1 - x*e2"})
    mons = B.normal_monomials(-4, 0, 4)
    for _ in range(trials):
        m1 = mons[rng.randrange(len(mons))]
        m2 = mons[rng.randrange(len(mons))]
        a = B.element({m1: Fraction(rng.randrange(1, 5))})
        b = B.element({m2: Fraction(rng.randrange(-4, 0))})
        da = a.degree()
        if da is None:
            continue
        sign = -1 if da % 2 else 1
        assert (a * b).d() == a.d() * b + a * b.d() * sign


def test_parse_poly_rationals_and_powers():
    B = make_free_dga(None, [("x", 0), ("y", -1)], {})
    e = parse_poly("3/2*x^2 - x*y + 1/3", B)
    assert e.terms[Monomial((("x", 2),), None)] == Fraction(3, 2)
    assert e.terms[Monomial((), None)] == Fraction(1, 3)
    # str round-trip
    again = parse_poly(str(e), B)
    assert again == e


def test_graded_map_does_not_require_chain():
    A = make_artin_ring([("eps", 0)], relations=["eps^2"])
    RA = make_free_dga(A, [("x", 0), ("y", -1)], {"y": "eps*x"})
    r = graded_map(RA, RA, {"x": "x", "y": 0})
    assert not r.is_chain_map()
    assert r.chain_defects()[0][0] == "y"
