"""Graded (possibly twisted) derivations determined by generator values.

A derivation of degree n assigns to each generator an element of the target
algebra with degree shifted by n, extended by the signed Leibniz rule; a
twist morphism f turns it into an f-derivation
    eta(ab) = eta(a) f(b) + (-1)^{|eta||a|} f(a) eta(b).
Coefficient tags pass through with the Koszul sign against the derivation.
"""

from __future__ import annotations

from fractions import Fraction

from .algebra import DGAlgebra, Element, Morphism
from .errors import DegreeMismatch


class Derivation:
    def __init__(self, source: DGAlgebra, target: DGAlgebra, values, degree: int,
                 twist: Morphism = None, check_degrees=True):
        self.source = source
        self.target = target
        self.degree = degree
        self.twist = twist
        if twist is None and source is not target:
            raise DegreeMismatch(
                "a derivation into a different algebra needs a twist morphism")
        self.values = {}
        for g in source.gens:
            val = target._coerce(values.get(g.name, 0))
            if check_degrees and not val.is_zero():
                d = val.degree()
                if d != g.degree + degree:
                    raise DegreeMismatch(
                        f"derivation value on {g.name} has degree {d}, "
                        f"expected {g.degree + degree}")
            self.values[g.name] = val

    def _push(self, elt: Element) -> Element:
        """Image of an element under the twist (identity when untwisted)."""
        if self.twist is None:
            return elt
        return self.twist.apply(elt)

    def _push_gen_power(self, g: str, e: int) -> Element:
        if self.twist is None:
            return self.source.gen(g) ** e
        return self.twist.images[g] ** e

    def apply(self, elt: Element) -> Element:
        tgt = self.target
        out = tgt.scalar(0)
        for mon, coeff in elt.terms.items():
            tag_deg = elt.alg.tag_degree(mon.tag)
            sign = -1 if (self.degree % 2 and tag_deg % 2) else 1
            part = self._apply_factors(list(mon.gens))
            if part.is_zero():
                continue
            if mon.tag is not None:
                part = tgt.base_elt(mon.tag) * part
            out = out + part * (coeff * sign)
        return out

    def _apply_factors(self, facs) -> Element:
        tgt = self.target
        if not facs:
            return tgt.scalar(0)
        (g, e), rest = facs[0], facs[1:]
        gdeg = self.source.degree_of(g)
        head = self._apply_gen_power(g, e)
        tail_pushed = tgt.scalar(1)
        for h, k in rest:
            tail_pushed = tail_pushed * self._push_gen_power(h, k)
        total = head * tail_pushed
        if rest:
            sign = -1 if (self.degree % 2 and (gdeg * e) % 2) else 1
            total = total + self._push_gen_power(g, e) * self._apply_factors(rest) * sign
        return total

    def _apply_gen_power(self, g: str, e: int) -> Element:
        gdeg = self.source.degree_of(g)
        val = self.values[g]
        if e == 1:
            return val
        out = self.target.scalar(0)
        for j in range(e):
            sign = -1 if (self.degree % 2 and (j * gdeg) % 2) else 1
            out = out + (self._push_gen_power(g, j) * val
                         * self._push_gen_power(g, e - 1 - j)) * sign
        return out

    def __call__(self, elt):
        return self.apply(elt)

    def __add__(self, other: "Derivation") -> "Derivation":
        if other.degree != self.degree:
            raise DegreeMismatch("cannot add derivations of different degrees")
        return Derivation(self.source, self.target,
                          {g.name: self.values[g.name] + other.values[g.name]
                           for g in self.source.gens},
                          self.degree, twist=self.twist, check_degrees=False)

    def __sub__(self, other):
        return self + (other * Fraction(-1))

    def __mul__(self, scalar) -> "Derivation":
        return Derivation(self.source, self.target,
                          {g.name: self.values[g.name] * Fraction(scalar)
                           for g in self.source.gens},
                          self.degree, twist=self.twist, check_degrees=False)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.values.values())

    def __eq__(self, other):
        return (isinstance(other, Derivation) and self.degree == other.degree
                and all(self.values[g.name] == other.values[g.name]
                        for g in self.source.gens))

    def __repr__(self):
        vals = ", ".join(f"{g.name}->{self.values[g.name]}"
                         for g in self.source.gens
                         if not self.values[g.name].is_zero())
        return f"Der^{self.degree}[{vals or '0'}]"


def d_derivation(alg: DGAlgebra) -> Derivation:
    """The differential itself, as a degree-1 derivation."""
    return Derivation(alg, alg, {g.name: alg.diff[g.name] for g in alg.gens}, 1)


def delta(eta: Derivation) -> Derivation:
    """[d, eta] = d∘eta - (-1)^{|eta|} eta∘d (untwisted derivations)."""
    alg = eta.source
    sign = -1 if eta.degree % 2 else 1
    values = {}
    for g in alg.gens:
        values[g.name] = eta.values[g.name].d() - eta.apply(alg.diff[g.name]) * sign
    return Derivation(alg, eta.target, values, eta.degree + 1, twist=eta.twist,
                      check_degrees=False)


def bracket(a: Derivation, b: Derivation) -> Derivation:
    """[a, b] = a∘b - (-1)^{|a||b|} b∘a (untwisted, same algebra)."""
    alg = a.source
    sign = -1 if (a.degree % 2 and b.degree % 2) else 1
    values = {}
    for g in alg.gens:
        values[g.name] = a.apply(b.values[g.name]) - b.apply(a.values[g.name]) * sign
    return Derivation(alg, alg, values, a.degree + b.degree, check_degrees=False)
