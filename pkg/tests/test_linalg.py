"""Exact linear algebra: Bareiss ranks, solving, nullspaces."""

from __future__ import annotations

import random
from fractions import Fraction

from dgdef import exactlinalg as lin


def test_bareiss_rank_known():
    assert lin.bareiss_rank([[1, 2], [2, 4]]) == 1
    assert lin.bareiss_rank([[1, 2], [3, 4]]) == 2
    assert lin.bareiss_rank([[Fraction(1, 2), Fraction(1, 3)],
                             [Fraction(1, 4), Fraction(1, 6)]]) == 1
    assert lin.bareiss_rank([]) == 0
    assert lin.bareiss_rank([[0, 0], [0, 0]]) == 0


def test_solve_and_verify():
    A = [[1, 2, 0], [0, 1, 1]]
    b = [3, 2]
    x = lin.solve(A, b)
    assert x is not None
    for row, rhs in zip(A, b):
        assert sum(Fraction(r) * v for r, v in zip(row, x)) == rhs
    assert lin.solve([[1, 1], [1, 1]], [0, 1]) is None


def test_nullspace_dimensions():
    ns = lin.nullspace([[1, 2, 3]])
    assert len(ns) == 2
    for v in ns:
        assert sum(Fraction(c) * x for c, x in zip([1, 2, 3], v)) == 0


def test_randomized_rank_consistency(seed=3, trials=100):
    rng = random.Random(seed)
    for _ in range(trials):
        n, m = rng.randrange(1, 5), rng.randrange(1, 5)
        mat = [[Fraction(rng.randrange(-4, 5), rng.randrange(1, 4))
                for _ in range(m)] for _ in range(n)]
        r1 = lin.bareiss_rank(mat)
        _, pivots = lin.rref(mat)
        assert r1 == len(pivots)
        assert r1 + len(lin.nullspace(mat)) == m


def test_in_span():
    assert lin.in_span([[1, 0], [0, 1]], [5, -3])
    assert not lin.in_span([[1, 1]], [1, 2])
    assert lin.in_span([], [0, 0])
