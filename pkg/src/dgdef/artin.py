"""Finite-dimensional local DG coefficient rings with residue field Q.

An ArtinRing is built from a presentation by enumerating normal-form
monomials into a finite basis and tabulating structure constants and the
differential.  Ring elements are dicts label -> Fraction, with the unit
label spelled None (matching the coefficient tags of algebra monomials).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import exactlinalg as lin
from .algebra import DGAlgebra, Monomial, NONPOSITIVE
from .errors import (
    DegreeMismatch,
    NotFiniteDimensional,
    NotSurjective,
    ResidueNotField,
)

_ENUM_WORD_CAP = 30


class ArtinRing:
    """Finite graded local ring: basis labels, exact tables, nilpotent ideal."""

    def __init__(self, labels, degrees, mult, diff, name="A", presentation=None):
        # labels[0] is the unit; elsewhere the unit label is spelled None.
        self.labels = list(labels)
        self.degrees = dict(zip(self.labels, degrees))
        self.mult = mult    # (l1, l2) -> {label-or-None: Fraction}, l1 <= l2 nonunit
        self.diff = diff    # label -> {label-or-None: Fraction}, nonunit keys
        self.name = name
        self.presentation = presentation
        self._index = {lab: i for i, lab in enumerate(self.labels)}
        self._check_local()
        self.nilpotency_index = self._nilpotency()

    # ----- interface used by DGAlgebra coefficient tags -----
    def gen_names(self):
        if self.presentation is None:
            return list(self.labels[1:])
        return self.presentation.gen_names()

    def label_degree(self, tag) -> int:
        return 0 if tag is None else self.degrees[tag]

    def label_index(self, tag) -> int:
        return 0 if tag is None else self._index[tag]

    def nonunit_labels(self):
        return self.labels[1:]

    def dim(self) -> int:
        return len(self.labels)

    def mul_labels(self, t1, t2):
        if t1 is None:
            return {t2: Fraction(1)}
        if t2 is None:
            return {t1: Fraction(1)}
        key = (t1, t2) if self._index[t1] <= self._index[t2] else (t2, t1)
        table = self.mult.get(key, {})
        if key != (t1, t2):
            d1, d2 = self.degrees[t1], self.degrees[t2]
            if d1 % 2 and d2 % 2:
                return {k: -v for k, v in table.items()}
        return dict(table)

    def diff_label(self, tag):
        if tag is None:
            return {}
        return dict(self.diff.get(tag, {}))

    def element_from_name(self, name):
        """Value of a presentation generator as a basis vector, or None."""
        if self.presentation is None or not self.presentation.has_gen(name):
            return None
        red = self.presentation.gen(name)
        return self._vector_of(red)

    def _vector_of(self, elt):
        out = {}
        for mon, c in elt.terms.items():
            lab = None if mon.is_unit() else self.presentation._str_monomial(mon)
            if lab is not None and lab not in self._index:
                raise ResidueNotField(f"monomial {lab} escaped the enumerated basis")
            out[lab] = out.get(lab, Fraction(0)) + c
        return {k: v for k, v in out.items() if v}

    # ----- element (dict) arithmetic -----
    def vec_mul(self, x, y):
        out = {}
        for l1, c1 in x.items():
            for l2, c2 in y.items():
                for lab, c in self.mul_labels(l1, l2).items():
                    v = out.get(lab, Fraction(0)) + c1 * c2 * c
                    if v:
                        out[lab] = v
                    else:
                        out.pop(lab, None)
        return out

    def vec_d(self, x):
        out = {}
        for lab, c in x.items():
            for l2, c2 in self.diff_label(lab).items():
                v = out.get(l2, Fraction(0)) + c * c2
                if v:
                    out[l2] = v
                else:
                    out.pop(l2, None)
        return out

    def vec_coords(self, x):
        coords = [Fraction(0)] * len(self.labels)
        for lab, c in x.items():
            coords[self.label_index(lab)] = Fraction(c)
        return coords

    def coords_vec(self, coords):
        out = {}
        for i, c in enumerate(coords):
            if c:
                out[None if i == 0 else self.labels[i]] = Fraction(c)
        return out

    def residue(self, x) -> Fraction:
        return Fraction(x.get(None, 0))

    def in_maximal_ideal(self, x) -> bool:
        return self.residue(x) == 0

    def ideal_power_vectors(self, k: int):
        """Basis vectors (coordinates) spanning m^k."""
        if k <= 0:
            vecs = [[Fraction(1 if i == j else 0) for i in range(len(self.labels))]
                    for j in range(len(self.labels))]
            return vecs
        current = [self.vec_coords({lab: Fraction(1)}) for lab in self.labels[1:]]
        for _ in range(k - 1):
            nxt = []
            for vec in current:
                x = self.coords_vec(vec)
                for lab in self.labels[1:]:
                    nxt.append(self.vec_coords(self.vec_mul(x, {lab: Fraction(1)})))
            current = _span_basis(nxt)
            if not current:
                return []
        return _span_basis(current)

    # ----- construction checks -----
    def _check_local(self):
        for (l1, l2), val in self.mult.items():
            if val.get(None):
                raise ResidueNotField(
                    f"product {l1}*{l2} has a unit component: residue ring is not Q")
        for lab, val in self.diff.items():
            if val.get(None):
                raise ResidueNotField(
                    f"d({lab}) has a unit component: the maximal ideal is not a DG ideal")

    def _nilpotency(self) -> int:
        k = 1
        while True:
            if not self.ideal_power_vectors(k):
                return k
            if k > len(self.labels) + 1:
                raise ResidueNotField("maximal ideal is not nilpotent")
            k += 1

    def __repr__(self):
        return f"ArtinRing<{self.name}|dim {len(self.labels)}>"

    def str_vec(self, x) -> str:
        if not x:
            return "0"
        parts = []
        for lab in [None] + self.labels[1:]:
            if lab in x and x[lab]:
                c = x[lab]
                s = "1" if lab is None else lab
                parts.append(s if c == 1 else f"{c}*{s}")
        return " + ".join(parts)


def _span_basis(vectors):
    """Row-reduce a vector list to an independent deterministic basis."""
    vectors = [v for v in vectors if any(c != 0 for c in v)]
    if not vectors:
        return []
    red, pivots = lin.rref(vectors)
    return [row for row in red[: len(pivots)]]


def make_artin_ring(gens, relations=(), diff=None, name="A", word_cap=_ENUM_WORD_CAP):
    """ArtinRing from a presentation; certifies finiteness, locality, d-closure."""
    for n, d in gens:
        if d > 0:
            raise DegreeMismatch(f"Artin generator {n} has positive degree")
    min_deg = min((d for _, d in gens), default=0)
    present = DGAlgebra(None, gens, diff or {}, relations, NONPOSITIVE,
                        name=f"{name}-presentation")
    basis = [Monomial((), None)]
    length = 1
    while True:
        lo = min_deg * length
        mons = [m for m in present.normal_monomials(lo, 0, length)
                if m.word_length() == length]
        if not mons:
            break  # normal monomials are divisibility-closed: longer ones cannot exist
        basis.extend(mons)
        length += 1
        if length > word_cap:
            raise NotFiniteDimensional(
                f"normal-form monomials persist at word length {word_cap}")
    labels = ["1"] + [present._str_monomial(m) for m in basis[1:]]
    degrees = [present.monomial_degree(m) for m in basis]
    index = {lab: i for i, lab in enumerate(labels)}

    def vec_of(elt):
        out = {}
        for mon, c in elt.terms.items():
            lab = "1" if mon.is_unit() else present._str_monomial(mon)
            if lab not in index:
                raise NotFiniteDimensional(f"product escapes the enumerated basis: {lab}")
            key = None if lab == "1" else lab
            out[key] = out.get(key, Fraction(0)) + c
        return {k: v for k, v in out.items() if v}

    mult = {}
    for i in range(1, len(basis)):
        for j in range(i, len(basis)):
            prod = present.element(present.mul_terms(
                {basis[i]: Fraction(1)}, {basis[j]: Fraction(1)}))
            mult[(labels[i], labels[j])] = vec_of(prod)
    dtab = {}
    for i in range(1, len(basis)):
        dval = present.element(present.d_terms({basis[i]: Fraction(1)}))
        dtab[labels[i]] = vec_of(dval)
    return ArtinRing(labels, degrees, mult, dtab, name=name, presentation=present)


QQ_RING_NAME = "Q"


def rational_field():
    """The base field viewed as the trivial coefficient ring (spelled None)."""
    return None


class RingMorphism:
    """Morphism of coefficient rings (target None means the residue field Q)."""

    def __init__(self, source: ArtinRing, target, images, name="", check=True):
        self.source = source
        self.target = target  # ArtinRing or None (= Q)
        self.images = {lab: dict(images.get(lab, {})) for lab in source.labels[1:]}
        self.name = name
        if check:
            self._verify()

    def label_image(self, tag):
        if tag is None:
            return {None: Fraction(1)}
        return dict(self.images[tag])

    def apply_vec(self, x):
        out = {}
        for lab, c in x.items():
            for l2, c2 in self.label_image(lab).items():
                v = out.get(l2, Fraction(0)) + c * c2
                if v:
                    out[l2] = v
                else:
                    out.pop(l2, None)
        return out

    def _tgt_mul(self, x, y):
        if self.target is None:
            c = Fraction(x.get(None, 0)) * Fraction(y.get(None, 0))
            return {None: c} if c else {}
        return self.target.vec_mul(x, y)

    def _tgt_d(self, x):
        if self.target is None:
            return {}
        return self.target.vec_d(x)

    def _verify(self):
        src = self.source
        for lab in src.labels[1:]:
            if self.target is not None:
                img_deg_ok = all(
                    self.target.label_degree(l2) == src.degrees[lab]
                    for l2 in self.images[lab])
            else:
                img_deg_ok = all(l2 is None and src.degrees[lab] == 0
                                 for l2 in self.images[lab])
            if not img_deg_ok:
                raise DegreeMismatch(f"ring morphism not degree-preserving on {lab}")
        for i, l1 in enumerate(src.labels[1:], start=1):
            for l2 in src.labels[i:]:
                lhs = self.apply_vec(src.mul_labels(l1, l2))
                rhs = self._tgt_mul(self.label_image(l1), self.label_image(l2))
                if lhs != rhs:
                    raise ResidueNotField(
                        f"ring morphism not multiplicative on {l1}*{l2}")
            lhs = self.apply_vec(src.diff_label(l1))
            rhs = self._tgt_d(self.label_image(l1))
            if lhs != rhs:
                raise ResidueNotField(f"ring morphism does not commute with d on {l1}")

    def compose(self, first: "RingMorphism") -> "RingMorphism":
        images = {lab: self.apply_vec(first.label_image(lab))
                  for lab in first.source.labels[1:]}
        return RingMorphism(first.source, self.target, images,
                            name=f"{self.name}o{first.name}", check=False)

    def target_dim(self) -> int:
        return 1 if self.target is None else self.target.dim()

    def matrix(self):
        """Columns indexed by source labels, rows by target labels."""
        tdim = self.target_dim()
        cols = []
        for lab in self.source.labels:
            img = self.label_image(None if lab == "1" else lab)
            col = [Fraction(0)] * tdim
            for l2, c in img.items():
                idx = 0 if l2 is None else self.target.label_index(l2)
                col[idx] = c
            cols.append(col)
        return [[cols[j][i] for j in range(len(cols))] for i in range(tdim)]

    def is_surjective(self) -> bool:
        return lin.bareiss_rank(self.matrix()) == self.target_dim()

    def kernel_vectors(self):
        """Basis of the kernel, as coordinate vectors over the source basis."""
        return lin.nullspace(self.matrix())


def residue_map(ring: ArtinRing) -> RingMorphism:
    """Projection onto the residue field Q (kills the maximal ideal)."""
    return RingMorphism(ring, None, {lab: {} for lab in ring.labels[1:]},
                        name=f"{ring.name}->Q", check=False)


def identity_ring_map(ring: ArtinRing) -> RingMorphism:
    return RingMorphism(ring, ring,
                        {lab: {lab: Fraction(1)} for lab in ring.labels[1:]},
                        name=f"id_{ring.name}", check=False)


@dataclass
class SmallExtension:
    """One-dimensional d-closed socle quotient step inside a surjection."""

    total: ArtinRing
    quotient: ArtinRing           # None is never used here; quotient may be trivial ring
    projection: RingMorphism
    socle: dict                   # element of total spanning the kernel
    socle_degree: int


def quotient_by_socle(ring: ArtinRing, socle):
    """Quotient ring A / Q·t for a socle element t; returns (ring, projection)."""
    coords = ring.vec_coords(socle)
    if coords[0] != 0:
        raise ResidueNotField("socle element must lie in the maximal ideal")
    pivot = max(i for i, c in enumerate(coords) if c != 0)
    keep = [i for i in range(len(ring.labels)) if i != pivot]
    labels = [ring.labels[i] for i in keep]
    degrees = [ring.degrees[ring.labels[i]] for i in keep]

    def project(vec):
        out = dict(vec)
        plab = ring.labels[pivot]
        if plab in out:
            c = out.pop(plab)
            scale = -c / coords[pivot]
            for i in keep[1:]:
                lab = ring.labels[i]
                v = out.get(lab, Fraction(0)) + scale * coords[i]
                if v:
                    out[lab] = v
                else:
                    out.pop(lab, None)
            u = out.get(None, Fraction(0)) + scale * coords[0]
            if u:
                out[None] = u
            else:
                out.pop(None, None)
        return out

    mult = {}
    for i1, l1 in enumerate(labels[1:], start=1):
        for l2 in labels[i1:]:
            mult[(l1, l2)] = project(ring.mul_labels(l1, l2))
    dtab = {lab: project(ring.diff_label(lab)) for lab in labels[1:]}
    quot = ArtinRing(labels, degrees, mult, dtab, name=f"{ring.name}/soc")
    images = {}
    for lab in ring.labels[1:]:
        images[lab] = project({lab: Fraction(1)})
    proj = RingMorphism(ring, quot, images, name=f"{ring.name}->{quot.name}")
    return quot, proj


def small_extension_tower(f: RingMorphism):
    """Decompose a surjection of coefficient rings into small extensions.

    Each step's kernel is one-dimensional, annihilated by the maximal ideal
    and d-closed; the socle pick follows: take the first basis vector of
    J ∩ ann(m), replacing v by d(v) when d(v) is nonzero.
    """
    if not f.is_surjective():
        raise NotSurjective("coefficient ring morphism is not surjective")
    ring = f.source
    kernel = f.kernel_vectors()
    if not kernel:
        return []
    # annihilator condition inside span(kernel): m * v = 0 for every m-label
    rows = []
    dim = len(ring.labels)
    for lab in ring.labels[1:]:
        for r in range(dim):
            row = []
            for kv in kernel:
                x = ring.coords_vec(kv)
                prod = ring.vec_mul({lab: Fraction(1)}, x)
                row.append(ring.vec_coords(prod)[r])
            rows.append(row)
    null = lin.nullspace(rows) if rows else [
        [Fraction(1 if i == j else 0) for j in range(len(kernel))] for i in range(len(kernel))]
    if not null:
        raise ResidueNotField("kernel meets the socle trivially: ring not local?")
    combo = null[0]
    v = {}
    for c, kv in zip(combo, kernel):
        for i, x in enumerate(kv):
            if c * x:
                lab = None if i == 0 else ring.labels[i]
                v[lab] = v.get(lab, Fraction(0)) + c * x
    # J and ann(m) are graded, so a homogeneous component stays inside both
    degs = {ring.label_degree(lab) for lab in v}
    if len(degs) != 1:
        d0 = min(degs)
        v = {lab: c for lab, c in v.items() if ring.label_degree(lab) == d0}
    dv = ring.vec_d(v)
    if dv:
        v = dv
    assert not f.apply_vec(v), "socle candidate escaped the kernel"
    assert not ring.vec_d(v), "socle candidate is not a cocycle"
    deg = next(iter({ring.label_degree(lab) for lab in v}))
    quot, proj = quotient_by_socle(ring, v)
    step = SmallExtension(ring, quot, proj, v, deg)
    f_next = RingMorphism(quot, f.target,
                          {lab: f.label_image(lab) for lab in quot.labels[1:]},
                          name=f.name, check=False)
    return [step] + small_extension_tower(f_next)


def ring_section(f: RingMorphism):
    """Deterministic linear section of a surjective coefficient morphism.

    Returns a dict target-label -> source vector with f(section(b)) = b and
    section(unit) = unit.
    """
    mat = f.matrix()
    src = f.source
    out = {None: {None: Fraction(1)}}
    labels = [] if f.target is None else f.target.labels[1:]
    for lab in labels:
        rhs = [Fraction(0)] * f.target_dim()
        rhs[f.target.label_index(lab)] = Fraction(1)
        sol = lin.solve(mat, rhs)
        if sol is None:
            raise NotSurjective(f"no preimage of {lab}")
        out[lab] = src.coords_vec(sol)
    return out


def kernel_filtration(f: RingMorphism):
    """Basis layers of the source adapted to powers of ker(f).

    Layer 0 represents A/J (built from a section); layer k >= 1 completes
    the span of J^{k+1} to that of J^k.  The union is a basis of A.
    """
    src = f.source
    section = ring_section(f)
    layer0 = [src.vec_coords(v) for v in section.values()]
    kernel = f.kernel_vectors()
    layers = [layer0]
    if not kernel:
        return layers, section
    # J^k spans: J^1 = ker f; J^{k+1} = span(J^k * m-labels) intersect J (ideal powers)
    powers = [kernel]
    while True:
        prev = powers[-1]
        prods = []
        for v in prev:
            x = src.coords_vec(v)
            for w in kernel:
                y = src.coords_vec(w)
                prods.append(src.vec_coords(src.vec_mul(x, y)))
        basis = _span_basis(prods)
        powers.append(basis)
        if not basis:
            break
    for k in range(len(powers) - 1):
        upper = powers[k]
        lower = powers[k + 1]
        layer = []
        span = [list(v) for v in lower]
        for v in upper:
            if not lin.in_span(span, v):
                layer.append(v)
                span.append(list(v))
        layers.append(layer)
    return layers, section


def decompose_by_layers(vec_coords, layers):
    """Coordinates of a source vector over the concatenated layer basis."""
    flat = [v for layer in layers for v in layer]
    cols = [[Fraction(flat[j][i]) for j in range(len(flat))]
            for i in range(len(vec_coords))]
    sol = lin.solve(cols, list(vec_coords))
    if sol is None:
        raise ResidueNotField("layer basis does not span the ring")
    out = []
    pos = 0
    for layer in layers:
        out.append(sol[pos:pos + len(layer)])
        pos += len(layer)
    return out
