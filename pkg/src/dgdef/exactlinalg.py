"""Exact linear algebra over the rationals.

Matrices are lists of rows of Fractions (or ints).  Ranks go through
fraction-free Bareiss elimination on a denominator-cleared integer copy;
solving and nullspaces use exact Gauss-Jordan.  Pivoting is deterministic:
first nonzero entry in row-major order.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _integer_rows(rows):
    """Scale each row by its denominator lcm; rank is unchanged."""
    out = []
    for row in rows:
        den = 1
        for x in row:
            f = Fraction(x)
            den = _lcm(den, f.denominator)
        out.append([int(Fraction(x) * den) for x in row])
    return out


def bareiss_rank(rows) -> int:
    """Rank of a matrix via fraction-free Bareiss elimination."""
    if not rows or not rows[0]:
        return 0
    m = _integer_rows(rows)
    n_rows, n_cols = len(m), len(m[0])
    rank = 0
    prev = 1
    piv_row = 0
    for col in range(n_cols):
        sel = None
        for r in range(piv_row, n_rows):
            if m[r][col] != 0:
                sel = r
                break
        if sel is None:
            continue
        if sel != piv_row:
            m[piv_row], m[sel] = m[sel], m[piv_row]
        p = m[piv_row][col]
        for r in range(piv_row + 1, n_rows):
            for c in range(col + 1, n_cols):
                m[r][c] = (m[r][c] * p - m[r][col] * m[piv_row][c]) // prev
            m[r][col] = 0
        prev = p
        piv_row += 1
        rank += 1
        if piv_row == n_rows:
            break
    return rank


def rref(rows):
    """Reduced row echelon form (exact, in a copy); returns (rref, pivot_cols)."""
    m = [[Fraction(x) for x in row] for row in rows]
    if not m or not m[0]:
        return m, []
    n_rows, n_cols = len(m), len(m[0])
    pivots = []
    piv_row = 0
    for col in range(n_cols):
        sel = None
        for r in range(piv_row, n_rows):
            if m[r][col] != 0:
                sel = r
                break
        if sel is None:
            continue
        m[piv_row], m[sel] = m[sel], m[piv_row]
        p = m[piv_row][col]
        m[piv_row] = [x / p for x in m[piv_row]]
        for r in range(n_rows):
            if r != piv_row and m[r][col] != 0:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[piv_row])]
        pivots.append(col)
        piv_row += 1
        if piv_row == n_rows:
            break
    return m, pivots


def solve(rows, rhs):
    """One exact solution of A x = b, or None if infeasible.

    Free variables are set to zero (deterministic minimal-support choice).
    """
    if not rows:
        return [] if all(Fraction(b) == 0 for b in rhs) else None
    n_cols = len(rows[0])
    aug = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(rows, rhs)]
    red, pivots = rref(aug)
    for row in red:
        if all(x == 0 for x in row[:-1]) and row[-1] != 0:
            return None
    sol = [Fraction(0)] * n_cols
    for i, col in enumerate(pivots):
        if col == n_cols:  # pivot in the rhs column: infeasible (caught above)
            return None
        sol[col] = red[i][-1]
    return sol


def nullspace(rows):
    """Basis of the kernel of A (list of coordinate vectors)."""
    if not rows or not rows[0]:
        return []
    n_cols = len(rows[0])
    red, pivots = rref(rows)
    pivot_set = set(pivots)
    basis = []
    for free in range(n_cols):
        if free in pivot_set:
            continue
        vec = [Fraction(0)] * n_cols
        vec[free] = Fraction(1)
        for i, col in enumerate(pivots):
            vec[col] = -red[i][free]
        basis.append(vec)
    return basis


def in_span(vectors, target) -> bool:
    """Whether target lies in the span of the given vectors."""
    if all(Fraction(x) == 0 for x in target):
        return True
    if not vectors:
        return False
    cols = [[Fraction(v[i]) for v in vectors] for i in range(len(target))]
    return solve(cols, target) is not None


def rank_of_span(vectors) -> int:
    if not vectors:
        return 0
    return bareiss_rank(vectors)
