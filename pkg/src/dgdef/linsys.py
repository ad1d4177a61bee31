"""Affine solving for element-valued linear conditions.

Unknowns are rational coefficients over a candidate monomial list; conditions
are linear maps applied to the candidate combination, each required to equal a
right-hand-side element.  Solutions are deterministic (first RREF solution).
"""

from __future__ import annotations

from fractions import Fraction

from . import exactlinalg as lin


def affine_solve(cands, conditions):
    """Solve sum(c_k * cand_k) subject to cond(x) == rhs for all conditions.

    cands: list of Elements (the span of the unknown);
    conditions: list of (linear_fn, rhs_element) pairs, where linear_fn maps an
    element of the candidates' algebra to an element of any algebra.
    Returns the solution Element, or None when infeasible.
    """
    if not cands:
        ok = all(rhs.is_zero() for _, rhs in conditions)
        return None if not ok else None  # caller treats no-candidate case itself
    alg = cands[0].alg
    rows = []
    rhs_vec = []
    for fn, rhs in conditions:
        images = [fn(c) for c in cands]
        support = []
        seen = set()
        for e in images + [rhs]:
            for m in e.terms:
                if m not in seen:
                    seen.add(m)
                    support.append(m)
        for m in support:
            rows.append([img.terms.get(m, Fraction(0)) for img in images])
            rhs_vec.append(rhs.terms.get(m, Fraction(0)))
    sol = lin.solve(rows, rhs_vec)
    if sol is None:
        return None
    out = alg.scalar(0)
    for c, cand in zip(sol, cands):
        if c:
            out = out + cand * c
    return out


def combination_solve(columns, rhs):
    """Coefficients c with sum(c_k * columns_k) == rhs, over paired value lists.

    columns: list of value-tuples (each a tuple of Elements, one per slot);
    rhs: the target tuple of Elements.  Returns list of Fractions or None.
    """
    if not columns:
        return [] if all(e.is_zero() for e in rhs) else None
    nslots = len(rhs)
    rows = []
    rhs_vec = []
    for s in range(nslots):
        support = []
        seen = set()
        for col in columns:
            for m in col[s].terms:
                if m not in seen:
                    seen.add(m)
                    support.append(m)
        for m in rhs[s].terms:
            if m not in seen:
                seen.add(m)
                support.append(m)
        for m in support:
            rows.append([col[s].terms.get(m, Fraction(0)) for col in columns])
            rhs_vec.append(rhs[s].terms.get(m, Fraction(0)))
    return lin.solve(rows, rhs_vec)
