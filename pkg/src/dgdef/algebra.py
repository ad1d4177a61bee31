"""Graded-commutative polynomial DG-algebras with exact rational coefficients.

Monomials are sparse tuples ((name, exp), ...) sorted by the owning algebra's
generator order (degree descending, then name), with an optional coefficient
tag naming a basis monomial of an Artin coefficient ring.  Odd generators
square to zero, and each transposition of odd factors flips the sign.
All arithmetic is exact; there are no floats anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, NamedTuple, Optional

from .errors import (
    ChainMapFailure,
    DegreeMismatch,
    DSquareNonzero,
    MixedAlgebras,
    NonpositiveViolation,
    ParseError,
    SyzygyUnavailable,
)

NONPOSITIVE = "nonpositive"
UNBOUNDED = "unbounded"

_COMPLETION_CAP = 400
_DCLOSURE_CAP = 40


class Generator(NamedTuple):
    name: str
    degree: int


class Monomial(NamedTuple):
    """Sorted sparse factor tuple with an optional Artin-basis coefficient tag."""

    gens: tuple              # ((name, exp), ...)
    tag: Optional[str] = None

    def word_length(self) -> int:
        return sum(e for _, e in self.gens)

    def is_unit(self) -> bool:
        return not self.gens and self.tag is None


ONE = Monomial((), None)


def _merge_factors(fac1, fac2, order, parity):
    """Merge two sorted factor tuples; returns (merged, sign) or (None, 0).

    The sign counts crossings of odd factors (Koszul rule); an odd generator
    meeting itself yields zero.
    """
    out = []
    sign = 1
    # a factor taken from fac2 crosses every odd factor of fac1 not yet consumed
    odd_left = sum(e for (g, e) in fac1 if parity[g])
    i = j = 0
    n1, n2 = len(fac1), len(fac2)
    while i < n1 and j < n2:
        g1, e1 = fac1[i]
        g2, e2 = fac2[j]
        if order[g1] < order[g2]:
            out.append((g1, e1))
            if parity[g1]:
                odd_left -= e1
            i += 1
        elif order[g1] > order[g2]:
            if parity[g2] and (e2 * odd_left) % 2:
                sign = -sign
            out.append((g2, e2))
            j += 1
        else:
            if parity[g1]:
                return None, 0
            out.append((g1, e1 + e2))
            i += 1
            j += 1
    out.extend(fac1[i:])
    out.extend(fac2[j:])
    return tuple(out), sign


def _divide_factors(fac, lead):
    """Quotient factor tuple fac / lead, or None when lead does not divide."""
    have = dict(fac)
    for g, e in lead:
        if have.get(g, 0) < e:
            return None
    quot = []
    lead_map = dict(lead)
    for g, e in fac:
        r = e - lead_map.get(g, 0)
        if r:
            quot.append((g, r))
    return tuple(quot)


class DGAlgebra:
    """Presentation of a graded-commutative DG-algebra over Q or an Artin ring."""

    def __init__(self, base, gens, diff, relations=(), regime=NONPOSITIVE,
                 name="", graded_free=None):
        self.base = base  # None for Q, else an ArtinRing
        self.gens = [Generator(*g) if not isinstance(g, Generator) else g for g in gens]
        self.regime = regime
        self.name = name
        names = [g.name for g in self.gens]
        if len(set(names)) != len(names):
            raise DegreeMismatch("generator names not distinct")
        if base is not None:
            clash = set(names) & set(base.gen_names())
            if clash:
                raise DegreeMismatch(f"generator names shadow base generators: {sorted(clash)}")
        if regime == NONPOSITIVE:
            for g in self.gens:
                if g.degree > 0:
                    raise NonpositiveViolation(f"generator {g.name} has degree {g.degree} > 0")
        ordered = sorted(self.gens, key=lambda g: (-g.degree, g.name))
        self._order = {g.name: i for i, g in enumerate(ordered)}
        self._degree = {g.name: g.degree for g in self.gens}
        self._parity = {g.name: g.degree % 2 != 0 for g in self.gens}
        self.rules = []
        self._rule_leads = []

        self.diff = {}
        for g in self.gens:
            val = diff.get(g.name, 0) if diff else 0
            elt = self._coerce(val)
            for mon, _ in elt.terms.items():
                if self.monomial_degree(mon) != g.degree + 1:
                    raise DegreeMismatch(
                        f"d({g.name}) term {self._str_monomial(mon)} has degree "
                        f"{self.monomial_degree(mon)}, expected {g.degree + 1}")
            self.diff[g.name] = elt

        rel_elts = [self._coerce(r) for r in relations]
        self.relations = [r for r in rel_elts if r.terms]
        self._complete_rules(self.relations)
        self.diff = {k: self.element(self.reduce(v.terms)) for k, v in self.diff.items()}
        for g in self.gens:
            defect = self.reduce(self.d_terms(self.diff[g.name].terms))
            if defect:
                raise DSquareNonzero(g.name, self.element(defect))
        if graded_free is None:
            graded_free = not self.relations
        self.graded_free = graded_free

    # ----- basic generator data -----
    def gen_names(self):
        return [g.name for g in self.gens]

    def degree_of(self, name: str) -> int:
        return self._degree[name]

    def has_gen(self, name: str) -> bool:
        return name in self._degree

    def tag_degree(self, tag) -> int:
        if tag is None:
            return 0
        return self.base.label_degree(tag)

    def monomial_degree(self, mon: Monomial) -> int:
        return sum(self._degree[g] * e for g, e in mon.gens) + self.tag_degree(mon.tag)

    def order_key(self, mon: Monomial):
        vec = [0] * len(self._order)
        for g, e in mon.gens:
            vec[self._order[g]] = e
        tag_idx = -1 if mon.tag is None else self.base.label_index(mon.tag)
        return (mon.word_length(), tuple(vec), tag_idx)

    # ----- term arithmetic (dict monomial -> Fraction) -----
    def _coerce(self, val) -> "Element":
        if isinstance(val, Element):
            if val.alg is not self:
                raise MixedAlgebras("element belongs to a different algebra")
            return val
        if isinstance(val, dict):
            return self.element(val)
        if isinstance(val, str):
            return parse_poly(val, self)
        if isinstance(val, (int, Fraction)):
            return self.scalar(val)
        raise TypeError(f"cannot coerce {val!r} to an element")

    def scalar(self, c) -> "Element":
        c = Fraction(c)
        return Element(self, {ONE: c} if c else {})

    def gen(self, name: str) -> "Element":
        if name not in self._degree:
            raise KeyError(name)
        return self.element({Monomial(((name, 1),), None): Fraction(1)})

    def base_elt(self, tag) -> "Element":
        return self.element({Monomial((), tag): Fraction(1)})

    def element(self, terms) -> "Element":
        return Element(self, self.reduce(terms))

    def raw_element(self, terms) -> "Element":
        """Element without normal-form reduction (internal use)."""
        return Element(self, {m: Fraction(c) for m, c in terms.items() if c})

    def mul_terms(self, t1, t2):
        out = {}
        for m1, c1 in t1.items():
            for m2, c2 in t2.items():
                gens, sign = _merge_factors(m1.gens, m2.gens, self._order, self._parity)
                if gens is None:
                    continue
                if m2.tag is not None and (sum(self._degree[g] * e for g, e in m1.gens) % 2) \
                        and (self.tag_degree(m2.tag) % 2):
                    sign = -sign
                c = c1 * c2 * sign
                if m1.tag is None and m2.tag is None:
                    key = Monomial(gens, None)
                    out[key] = out.get(key, Fraction(0)) + c
                else:
                    for tag, tc in self.base.mul_labels(m1.tag, m2.tag).items():
                        key = Monomial(gens, tag)
                        out[key] = out.get(key, Fraction(0)) + c * tc
        return {m: c for m, c in out.items() if c}

    def d_terms(self, terms):
        """Leibniz extension of the differential, term by term."""
        out = {}

        def add(t, scale=Fraction(1)):
            for m, c in t.items():
                out[m] = out.get(m, Fraction(0)) + c * scale

        for mon, coeff in terms.items():
            if mon.tag is not None:
                for tag, tc in self.base.diff_label(mon.tag).items():
                    add(self.mul_terms({Monomial((), tag): Fraction(1)},
                                       {Monomial(mon.gens, None): Fraction(1)}),
                        coeff * tc)
            sign = 1 if self.tag_degree(mon.tag) % 2 == 0 else -1
            prefix_deg = 0
            for i, (g, e) in enumerate(mon.gens):
                dg = self.diff[g].terms
                if dg:
                    # d hits one copy of g: e * prefix * g^(e-1) * dg * suffix
                    pre = mon.gens[:i] + (((g, e - 1),) if e > 1 else ())
                    suf = mon.gens[i + 1:]
                    part = self.mul_terms({Monomial(pre, mon.tag): Fraction(1)}, dg)
                    part = self.mul_terms(part, {Monomial(suf, None): Fraction(1)})
                    s = sign * (1 if prefix_deg % 2 == 0 else -1)
                    add(part, coeff * e * s)
                prefix_deg += self._degree[g] * e
        return {m: c for m, c in out.items() if c}

    # ----- normal forms -----
    def reduce(self, terms):
        work = {m: Fraction(c) for m, c in terms.items() if c}
        while True:
            hit = None
            for mon in work:
                for lead, rest in self.rules:
                    quot = _divide_factors(mon.gens, lead)
                    if quot is not None:
                        hit = (mon, lead, rest, quot)
                        break
                if hit:
                    break
            if hit is None:
                return work
            mon, lead, rest, quot = hit
            coeff = work.pop(mon)
            merged, sign = _merge_factors(quot, lead, self._order, self._parity)
            assert merged == mon.gens and sign != 0
            repl = self.mul_terms({Monomial(quot, mon.tag): coeff * sign}, rest)
            for m, c in repl.items():
                v = work.get(m, Fraction(0)) + c
                if v:
                    work[m] = v
                else:
                    work.pop(m, None)

    def is_normal_monomial(self, mon: Monomial) -> bool:
        return all(_divide_factors(mon.gens, lead) is None for lead, _ in self.rules)

    def _leading(self, terms):
        """Leading (monomial, coeff) by the graded term order; unit-tag required."""
        best = None
        for m, c in terms.items():
            if best is None or self.order_key(m) > self.order_key(best):
                best = m
        if best is None:
            return None
        if best.tag is not None:
            raise SyzygyUnavailable(
                f"relation with non-unit leading coefficient tag: {self._str_monomial(best)}")
        return best, terms[best]

    def _complete_rules(self, relations):
        pending = []
        for r in relations:
            terms = dict(r.terms)
            degs = {self.monomial_degree(m) for m in terms}
            if len(degs) > 1:
                raise DegreeMismatch("relation is not homogeneous")
            pending.append(terms)
            # d-closure: the ideal must be a DG ideal
            cur = terms
            for _ in range(_DCLOSURE_CAP):
                cur = self.d_terms(cur)
                if not cur:
                    break
                pending.append(dict(cur))
            else:
                raise SyzygyUnavailable("d-closure of a relation did not terminate")

        while pending:
            if len(self.rules) > _COMPLETION_CAP:
                raise SyzygyUnavailable("rewrite-system completion exceeded the configured bound")
            terms = self.reduce(pending.pop(0))
            if not terms:
                continue
            lead, c = self._leading(terms)
            rest = {m: -v / c for m, v in terms.items() if m != lead}
            new_rule = (lead.gens, rest)
            spairs = self._spairs(new_rule)
            self.rules.append(new_rule)
            self.rules.sort(key=lambda rule: self.order_key(Monomial(rule[0], None)))
            pending.extend(spairs)
        # tail-reduce rule right-hand sides for canonical output
        self.rules = [(lead, self.reduce(rest)) for lead, rest in self.rules]

    def _spairs(self, new_rule):
        lead2, rest2 = new_rule
        rel2 = {Monomial(lead2, None): Fraction(1)}
        for m, c in rest2.items():
            rel2[m] = rel2.get(m, Fraction(0)) - c
        out = []
        # overlap with implicit odd squares g^2 = 0
        for g, _ in lead2:
            if self._parity[g]:
                prod = self.mul_terms({Monomial(((g, 1),), None): Fraction(1)}, rel2)
                if prod:
                    out.append(prod)
        for lead1, rest1 in self.rules:
            shared = set(dict(lead1)) & set(dict(lead2))
            all_even = not any(self._parity[g] for g, _ in lead1 + lead2)
            if not shared and all_even:
                continue  # Buchberger's coprimality criterion (even variables)
            if not shared:
                continue
            lcm = {}
            for g, e in lead1:
                lcm[g] = max(lcm.get(g, 0), e)
            for g, e in lead2:
                lcm[g] = max(lcm.get(g, 0), e)
            lcm_fac = tuple(sorted(lcm.items(), key=lambda ge: self._order[ge[0]]))
            u1 = _divide_factors(lcm_fac, lead1)
            u2 = _divide_factors(lcm_fac, lead2)
            rel1 = {Monomial(lead1, None): Fraction(1)}
            for m, c in rest1.items():
                rel1[m] = rel1.get(m, Fraction(0)) - c
            e1 = self.mul_terms({Monomial(u1, None): Fraction(1)}, rel1)
            e2 = self.mul_terms({Monomial(u2, None): Fraction(1)}, rel2)
            key = Monomial(lcm_fac, None)
            c1 = e1.get(key, Fraction(0))
            c2 = e2.get(key, Fraction(0))
            s = {}
            for m, c in e1.items():
                s[m] = s.get(m, Fraction(0)) + c * c2
            for m, c in e2.items():
                s[m] = s.get(m, Fraction(0)) - c * c1
            s = {m: c for m, c in s.items() if c}
            if s:
                out.append(s)
        return out

    # ----- monomial enumeration -----
    def normal_monomials(self, lo, hi, word_max, include_tags=True, allow_gen=None):
        """Normal-form monomials with degree in [lo, hi] and word length <= word_max.

        Deterministic order: word length, then exponent vector, then tag index.
        """
        ordered = sorted(self.gens, key=lambda g: (-g.degree, g.name))
        if allow_gen is not None:
            ordered = [g for g in ordered if allow_gen(g.name)]
        tags = [None]
        if self.base is not None and include_tags:
            tags = [None] + list(self.base.nonunit_labels())
        out = []

        def descend(i, fac, deg, word):
            if i == len(ordered):
                for tag in tags:
                    d = deg + self.tag_degree(tag)
                    if lo <= d <= hi:
                        mon = Monomial(tuple(fac), tag)
                        if self.is_normal_monomial(mon):
                            out.append(mon)
                return
            g = ordered[i]
            slack = word_max - word
            max_tag = max((self.tag_degree(t) for t in tags), default=0)
            later_pos = max((h.degree for h in ordered[i + 1:] if h.degree > 0), default=0)
            e_max = 1 if (g.degree % 2) else slack
            for e in range(0, e_max + 1):
                ndeg = deg + e * g.degree
                nword = word + e
                if nword > word_max:
                    break
                if ndeg + (word_max - nword) * later_pos + max_tag < lo:
                    continue  # degree can only sink further below the window
                descend(i + 1, fac + ([(g.name, e)] if e else []), ndeg, nword)

        descend(0, [], 0, 0)
        out.sort(key=self.order_key)
        return out

    # ----- derived constructors -----
    def adjoin(self, new_gens, new_diff, name=""):
        """Semifree extension: adjoin generators; returns (algebra, inclusion).

        Differentials of the new generators may be given as expressions over
        the extended generator set (strings or term dicts).
        """
        gens = list(self.gens) + [Generator(*g) for g in new_gens]
        shell = DGAlgebra(self.base, gens, {}, (), self.regime)
        diff = {g.name: transport_terms(self.diff[g.name].terms, self, shell)
                for g in self.gens}
        for n, v in new_diff.items():
            diff[n] = shell._coerce(v).terms
        rels = [transport_terms(r.terms, self, shell) for r in self.relations]
        alg = DGAlgebra(self.base, gens, diff, rels, self.regime, name=name,
                        graded_free=self.graded_free)
        incl = Morphism(self, alg, {g.name: alg.gen(g.name) for g in self.gens},
                        semifree_over=self)
        return alg, incl

    def with_differential(self, diff, name=""):
        """Same graded presentation, new differential (checked)."""
        return DGAlgebra(self.base, list(self.gens), diff, list(self.relations),
                         self.regime, name=name, graded_free=self.graded_free)

    def base_change(self, ring_map, name=""):
        """Coefficient extension/reduction along an Artin ring morphism.

        ring_map maps labels of self.base to the new ring (or to Q when its
        target is None).  Returns (algebra, projection morphism).
        """
        def conv(elt, target):
            out = {}
            for mon, c in elt.terms.items():
                if mon.tag is None:
                    key = Monomial(mon.gens, None)
                    out[key] = out.get(key, Fraction(0)) + c
                else:
                    for tag, tc in ring_map.label_image(mon.tag).items():
                        key = Monomial(mon.gens, tag)
                        out[key] = out.get(key, Fraction(0)) + c * tc
            return out

        new_base = ring_map.target
        probe = DGAlgebra(new_base, list(self.gens), {}, (), self.regime)
        diff = {g.name: probe.raw_element(conv(self.diff[g.name], new_base)).terms
                for g in self.gens}
        rels = [probe.raw_element(conv(r, new_base)).terms for r in self.relations]
        alg = DGAlgebra(new_base, list(self.gens), diff, rels, self.regime,
                        name=name, graded_free=self.graded_free)
        proj = Morphism(self, alg, {g.name: alg.gen(g.name) for g in self.gens},
                        ring_map=ring_map)
        return alg, proj

    # ----- display -----
    def _str_monomial(self, mon: Monomial) -> str:
        parts = []
        if mon.tag is not None:
            parts.append(str(mon.tag))
        for g, e in mon.gens:
            parts.append(g if e == 1 else f"{g}^{e}")
        return "*".join(parts) if parts else "1"

    def __repr__(self):
        kind = "Q" if self.base is None else f"Artin({self.base.name})"
        gens = ",".join(f"{g.name}:{g.degree}" for g in self.gens)
        return f"DGAlgebra<{self.name or 'anon'}|{kind}|{gens}|{len(self.relations)} rels>"


def _transport(elt: "Element", target: DGAlgebra) -> "Element":
    """Move an element to an algebra with the same (or larger) generator set."""
    return target.raw_element({m: c for m, c in elt.terms.items()})


def transport_terms(terms, src: DGAlgebra, tgt: DGAlgebra):
    """Re-sort term monomials by the target's generator order, with signs."""
    out = {}
    for mon, c in terms.items():
        sign = 1
        seq = []
        for n, e in mon.gens:
            seq.extend([n] * e)
        arr = list(seq)
        for i in range(1, len(arr)):
            j = i
            while j > 0 and tgt._order[arr[j - 1]] > tgt._order[arr[j]]:
                if tgt._parity[arr[j - 1]] and tgt._parity[arr[j]]:
                    sign = -sign
                arr[j - 1], arr[j] = arr[j], arr[j - 1]
                j -= 1
        gens = []
        for n in arr:
            if gens and gens[-1][0] == n:
                gens[-1] = (n, gens[-1][1] + 1)
            else:
                gens.append((n, 1))
        key = Monomial(tuple(gens), mon.tag)
        out[key] = out.get(key, Fraction(0)) + c * sign
    return {m: c for m, c in out.items() if c}


class Element:
    """Exact linear combination of sign-normalized monomials, always reduced."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg: DGAlgebra, terms):
        self.alg = alg
        self.terms = {m: Fraction(c) for m, c in terms.items() if c}

    def __add__(self, other):
        other = self.alg._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, Fraction(0)) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Element(self.alg, out)

    __radd__ = __add__

    def __neg__(self):
        return Element(self.alg, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self.alg._coerce(other))

    def __rsub__(self, other):
        return self.alg._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Element(self.alg, {m: c * other for m, c in self.terms.items()})
        other = self.alg._coerce(other)
        return self.alg.element(self.alg.mul_terms(self.terms, other.terms))

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return self.alg._coerce(other) * self

    def __pow__(self, n: int):
        out = self.alg.scalar(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Element):
            return self.alg is other.alg and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == self.alg.scalar(other).terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def d(self) -> "Element":
        return self.alg.element(self.alg.d_terms(self.terms))

    def degree(self):
        """Degree of a homogeneous element (None for 0); raises if mixed."""
        degs = {self.alg.monomial_degree(m) for m in self.terms}
        if not degs:
            return None
        if len(degs) > 1:
            raise DegreeMismatch(f"element not homogeneous: {self}")
        return degs.pop()

    def homogeneous_components(self):
        out = {}
        for m, c in self.terms.items():
            out.setdefault(self.alg.monomial_degree(m), {})[m] = c
        return {d: Element(self.alg, t) for d, t in sorted(out.items())}

    def coefficients_in_labels(self, labels) -> bool:
        """True when every term's tag lies in the given label set."""
        return all(m.tag in labels for m in self.terms)

    def __str__(self):
        if not self.terms:
            return "0"
        items = sorted(self.terms.items(), key=lambda mc: self.alg.order_key(mc[0]))
        parts = []
        for m, c in items:
            ms = self.alg._str_monomial(m)
            if ms == "1":
                parts.append(str(c))
            elif c == 1:
                parts.append(ms)
            elif c == -1:
                parts.append(f"-{ms}")
            else:
                parts.append(f"{c}*{ms}")
        s = " + ".join(parts)
        return s.replace("+ -", "- ")

    __repr__ = __str__


class Morphism:
    """Generator-assignment map of DG-algebras, with an exact chain certificate.

    ring_map (optional) carries the coefficient-ring morphism for base change;
    otherwise source and target must share the same coefficient ring object.
    semifree_over records the subalgebra this morphism freely extends, when
    constructed that way.
    """

    def __init__(self, source: DGAlgebra, target: DGAlgebra, images,
                 ring_map=None, check_chain=False, semifree_over=None):
        self.source = source
        self.target = target
        self.ring_map = ring_map
        self.semifree_over = semifree_over
        if ring_map is None and source.base is not target.base:
            raise MixedAlgebras("source and target have different coefficient rings")
        self.images = {}
        for g in source.gens:
            img = target._coerce(images[g.name])
            d = img.degree()
            if d is not None and d != g.degree:
                raise DegreeMismatch(
                    f"image of {g.name} has degree {d}, expected {g.degree}")
            self.images[g.name] = img
        self.chain_map = None
        if check_chain:
            self.verify_chain()

    # -- evaluation --
    def _map_tag(self, tag):
        if tag is None:
            return {None: Fraction(1)}
        if self.ring_map is not None:
            return self.ring_map.label_image(tag)
        return {tag: Fraction(1)}

    def apply(self, elt: Element) -> Element:
        if elt.alg is not self.source:
            raise MixedAlgebras("element not over the source algebra")
        tgt = self.target
        total = {}
        for mon, coeff in elt.terms.items():
            acc = {ONE: Fraction(1)}
            for g, e in mon.gens:
                img = self.images[g].terms
                for _ in range(e):
                    acc = tgt.mul_terms(acc, img)
                    if not acc:
                        break
                if not acc:
                    break
            if not acc:
                continue
            for tag, tc in self._map_tag(mon.tag).items():
                part = tgt.mul_terms({Monomial((), tag): Fraction(1)}, acc)
                for m, c in part.items():
                    v = total.get(m, Fraction(0)) + coeff * tc * c
                    if v:
                        total[m] = v
                    else:
                        total.pop(m, None)
        return tgt.element(total)

    def __call__(self, elt: Element) -> Element:
        return self.apply(elt)

    def chain_defects(self):
        """List of (gen, defect) with defect = d(f(g)) - f(d(g)), reduced."""
        out = []
        for g in self.source.gens:
            defect = self.images[g.name].d() - self.apply(self.source.diff[g.name])
            if not defect.is_zero():
                out.append((g.name, defect))
        return out

    def verify_chain(self):
        defects = self.chain_defects()
        if defects:
            self.chain_map = False
            raise ChainMapFailure(defects[0][0], defects[0][1])
        self.chain_map = True
        return self

    def is_chain_map(self) -> bool:
        if self.chain_map is None:
            self.chain_map = not self.chain_defects()
        return self.chain_map

    def compose(self, first: "Morphism") -> "Morphism":
        """self ∘ first."""
        if first.target is not self.source:
            raise MixedAlgebras("composition mismatch")
        if first.ring_map is not None and self.ring_map is not None:
            rm = self.ring_map.compose(first.ring_map)
        else:
            rm = self.ring_map or first.ring_map
        images = {g.name: self.apply(first.images[g.name]) for g in first.source.gens}
        return Morphism(first.source, self.target, images, ring_map=rm)

    def equals_on_generators(self, other: "Morphism") -> bool:
        return (self.source is other.source and self.target is other.target
                and all(self.images[g.name] == other.images[g.name]
                        for g in self.source.gens))

    @staticmethod
    def identity(alg: DGAlgebra) -> "Morphism":
        return Morphism(alg, alg, {g.name: alg.gen(g.name) for g in alg.gens})

    def is_semifree_extension(self) -> bool:
        """Syntactic check: target = source with adjoined generators."""
        src, tgt = self.source, self.target
        if self.ring_map is not None or src.base is not tgt.base:
            return False
        for g in src.gens:
            if not tgt.has_gen(g.name) or tgt.degree_of(g.name) != g.degree:
                return False
            if self.images[g.name] != tgt.gen(g.name):
                return False
            if self.apply(src.diff[g.name]) != tgt.diff[g.name]:
                return False
        src_rules = {lead for lead, _ in src.rules}
        tgt_rules = {lead for lead, _ in tgt.rules}
        return src_rules == tgt_rules

    def adjoined_generators(self):
        """Target generators not coming from the source, differential-ordered."""
        src_names = set(self.source.gen_names())
        extra = [g for g in self.target.gens if g.name not in src_names]
        return sorted(extra, key=lambda g: (-g.degree, g.name))

    def __repr__(self):
        imgs = ", ".join(f"{g.name}->{self.images[g.name]}" for g in self.source.gens)
        return f"Morphism[{imgs}]"


def make_free_dga(base, gens, diff=None, relations=(), regime=NONPOSITIVE, name=""):
    """Construct a (relatively free) DG-algebra presentation; checks d^2 = 0."""
    return DGAlgebra(base, gens, diff or {}, relations, regime, name=name)


def make_morphism(source, target, images, ring_map=None):
    """Chain morphism; raises ChainMapFailure with the offending defect."""
    return Morphism(source, target, images, ring_map=ring_map, check_chain=True)


def transport_morphism(m: Morphism, source: DGAlgebra = None,
                       target: DGAlgebra = None) -> Morphism:
    """Rebuild a morphism on presentation-equal copies of its algebras."""
    src = source if source is not None else m.source
    tgt = target if target is not None else m.target
    if set(src.gen_names()) != set(m.source.gen_names()) or \
            set(tgt.gen_names()) != set(m.target.gen_names()):
        raise MixedAlgebras("transport needs matching generator sets")
    images = {g.name: tgt.element(dict(m.images[g.name].terms)) for g in src.gens}
    return Morphism(src, tgt, images, ring_map=m.ring_map,
                    semifree_over=(src if m.semifree_over is m.source else m.semifree_over))


def graded_map(source, target, images, ring_map=None):
    """Graded-algebra map (no chain certificate asserted)."""
    return Morphism(source, target, images, ring_map=ring_map, check_chain=False)


def pushout(f: Morphism, g: Morphism, name=""):
    """Pushout X ⊗_A B of X <- A -> B; returns (P, X->P, B->P).

    Presentation: generators of both sides (B's renamed on clashes), relations
    identifying the two images of every A-generator.  Linear identifications
    are eliminated for a clean canonical presentation.
    """
    if f.source is not g.source:
        raise MixedAlgebras("pushout legs must share their source")
    X, B = f.target, g.target
    if X.base is not B.base:
        raise MixedAlgebras("pushout sides over different coefficient rings")
    rename = {}
    used = set(X.gen_names())
    for gen in B.gens:
        new = gen.name
        while new in used:
            new = new + "~"
        rename[gen.name] = new
        used.add(new)

    def move_b(elt: Element, target: DGAlgebra) -> dict:
        out = {}
        for mon, c in elt.terms.items():
            gens = tuple(sorted(((rename[n], e) for n, e in mon.gens),
                                key=lambda ge: target._order[ge[0]]))
            sign = _resort_sign(mon.gens, rename, B, target)
            out[Monomial(gens, mon.tag)] = out.get(Monomial(gens, mon.tag), Fraction(0)) + c * sign
        return out

    gens = list(X.gens) + [Generator(rename[b.name], b.degree) for b in B.gens]
    shell = DGAlgebra(X.base, gens, {}, (), X.regime)
    diff = {gen.name: _transport(X.diff[gen.name], shell).terms for gen in X.gens}
    for b in B.gens:
        diff[rename[b.name]] = move_b(B.diff[b.name], shell)
    rels = [_transport(r, shell).terms for r in X.relations]
    rels += [move_b(r, shell) for r in B.relations]
    for a in f.source.gens:
        ident = _transport(f.images[a.name], shell) - shell.raw_element(move_b(g.images[a.name], shell))
        if not ident.is_zero():
            rels.append(ident.terms)

    gens2, diff2, rels2, subst = _eliminate_linear(shell, gens, diff, rels)
    P = DGAlgebra(X.base, gens2, diff2, rels2, X.regime, name=name or f"{X.name}(x){B.name}")
    inc_x = Morphism(X, P, {gen.name: P.element(subst(gen.name)) for gen in X.gens})
    inc_b = Morphism(B, P, {b.name: P.element(subst(rename[b.name])) for b in B.gens})
    return P, inc_x, inc_b


def _resort_sign(facs, rename, src: DGAlgebra, tgt: DGAlgebra):
    """Koszul sign for re-sorting renamed factors into the target order."""
    seq = []
    for n, e in facs:
        seq.extend([rename[n]] * e)
    sign = 1
    # insertion sort counting odd-odd transpositions
    arr = list(seq)
    for i in range(1, len(arr)):
        j = i
        while j > 0 and tgt._order[arr[j - 1]] > tgt._order[arr[j]]:
            if tgt._parity[arr[j - 1]] and tgt._parity[arr[j]]:
                sign = -sign
            arr[j - 1], arr[j] = arr[j], arr[j - 1]
            j -= 1
    return sign


def _eliminate_linear(shell: DGAlgebra, gens, diff, rels):
    """Remove generators identified by relations of shape  c*g - expr."""
    gens = list(gens)
    diff = {k: dict(v) for k, v in diff.items()}
    rels = [dict(r) for r in rels]
    replaced = {}

    def substitute_everywhere(name, expr_terms):
        def apply_to(terms):
            out = {}
            for mon, c in terms.items():
                cur = {Monomial((), mon.tag): c}
                for gname, e in mon.gens:
                    if gname == name:
                        for _ in range(e):
                            cur = shell.mul_terms(cur, expr_terms)
                    else:
                        cur = shell.mul_terms(cur, {Monomial(((gname, e),), None): Fraction(1)})
                for m, cc in cur.items():
                    out[m] = out.get(m, Fraction(0)) + cc
            return {m: c for m, c in out.items() if c}
        for k in list(diff):
            diff[k] = apply_to(diff[k])
        for i in range(len(rels)):
            rels[i] = apply_to(rels[i])
        for k in list(replaced):
            replaced[k] = apply_to(replaced[k])
        replaced[name] = expr_terms

    progress = True
    while progress:
        progress = False
        for i, r in enumerate(rels):
            cands = []
            for mon, c in r.items():
                if mon.tag is None and len(mon.gens) == 1 and mon.gens[0][1] == 1:
                    gname = mon.gens[0][0]
                    others = {m: cc for m, cc in r.items() if m != mon}
                    if all(gname not in dict(m.gens) for m in others):
                        cands.append((gname, mon, c, others))
            if not cands:
                continue
            # prefer dropping renamed duplicates so original names survive
            cand = sorted(cands, key=lambda t: (0 if "~" in t[0] else 1, t[0]))[0]
            gname, mon, c, others = cand
            expr = {m: -cc / c for m, cc in others.items()}
            rels.pop(i)
            gens = [g for g in gens if g.name != gname]
            diff.pop(gname, None)
            substitute_everywhere(gname, expr)
            progress = True
            break

    diff2 = {k: dict(v) for k, v in diff.items()}
    rels2 = [dict(r) for r in rels if r]

    def subst(name):
        if name in replaced:
            return dict(replaced[name])
        return {Monomial(((name, 1),), None): Fraction(1)}

    return gens, diff2, rels2, subst


# ----- tiny exact polynomial parser -----

def parse_poly(text: str, alg: DGAlgebra) -> Element:
    """Parse '+ - * ^' expressions with rational literals over an algebra.

    Names resolve to generators first, then to coefficient-ring generators.
    """
    toks = _tokenize(text)
    pos = [0]

    def peek():
        return toks[pos[0]] if pos[0] < len(toks) else ("end", "")

    def take(kind=None):
        t = peek()
        if kind and t[0] != kind:
            raise ParseError(f"expected {kind}, found {t[1]!r}", column=pos[0])
        pos[0] += 1
        return t

    def atom():
        t = peek()
        if t[0] == "num":
            take()
            num = int(t[1])
            if peek() == ("op", "/"):
                take()
                den = int(take("num")[1])
                return alg.scalar(Fraction(num, den))
            return alg.scalar(num)
        if t[0] == "name":
            take()
            if alg.has_gen(t[1]):
                return alg.gen(t[1])
            if alg.base is not None:
                elt = alg.base.element_from_name(t[1])
                if elt is not None:
                    out = alg.scalar(0)
                    for tag, c in elt.items():
                        out = out + alg.base_elt(tag) * c
                    return out
            raise ParseError(f"unknown name {t[1]!r}", column=pos[0])
        if t == ("op", "("):
            take()
            e = expr()
            if peek() != ("op", ")"):
                raise ParseError("missing ')'", column=pos[0])
            take()
            return e
        if t == ("op", "-"):
            take()
            return -atom_pow()
        raise ParseError(f"unexpected token {t[1]!r}", column=pos[0])

    def atom_pow():
        e = atom()
        while peek() == ("op", "^"):
            take()
            n = int(take("num")[1])
            e = e ** n
        return e

    def term():
        e = atom_pow()
        while peek() == ("op", "*"):
            take()
            e = e * atom_pow()
        return e

    def expr():
        neg = False
        if peek() == ("op", "-"):
            take()
            neg = True
        e = term()
        if neg:
            e = -e
        while peek()[0] == "op" and peek()[1] in "+-":
            op = take()[1]
            rhs = term()
            e = e + rhs if op == "+" else e - rhs
        return e

    result = expr()
    if peek()[0] != "end":
        raise ParseError(f"trailing input {peek()[1]!r}", column=pos[0])
    return result


def _tokenize(text: str):
    toks = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            toks.append(("num", text[i:j]))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] in "_'~"):
                j += 1
            toks.append(("name", text[i:j]))
            i = j
        elif ch in "+-*^()/":
            toks.append(("op", ch))
            i += 1
        else:
            raise ParseError(f"bad character {ch!r}", column=i)
    return toks
