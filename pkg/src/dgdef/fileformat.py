"""Line-oriented exact text formats for algebras, derivations, and problems.

Algebra description files:
    base artin <file> | base Q
    regime nonpositive|unbounded
    gen <name> <degree>
    diff <name> = <polynomial expression>
    rel <polynomial expression>
Expressions use + - * ^ with rational literals p/q.  Unknown directives are
errors; parsing is exact and serialize∘parse is canonical.
"""

from __future__ import annotations

import os
from fractions import Fraction

from .algebra import DGAlgebra, Morphism, NONPOSITIVE, UNBOUNDED, make_free_dga, parse_poly
from .artin import make_artin_ring, residue_map
from .errors import ParseError


class FileContext:
    """Parse cache so that shared algebra files yield shared objects."""

    def __init__(self):
        self.algebras = {}
        self.rings = {}

    def algebra(self, path):
        key = os.path.abspath(path)
        if key not in self.algebras:
            self.algebras[key] = parse_algebra_file(path, self)
        return self.algebras[key]

    def ring(self, path):
        key = os.path.abspath(path)
        if key not in self.rings:
            self.rings[key] = parse_artin_file(path, self)
        return self.rings[key]


def _lines(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if line:
                yield lineno, line


def parse_algebra_file(path, ctx: FileContext = None) -> DGAlgebra:
    ctx = ctx or FileContext()
    base = None
    regime = NONPOSITIVE
    gens = []
    diff_src = {}
    rel_src = []
    for lineno, line in _lines(path):
        parts = line.split(None, 1)
        head = parts[0]
        rest = parts[1] if len(parts) > 1 else ""
        if head == "base":
            if rest == "Q":
                base = None
            elif rest.startswith("artin "):
                ref = rest.split(None, 1)[1].strip()
                base = ctx.ring(os.path.join(os.path.dirname(path) or ".", ref))
            else:
                raise ParseError(f"bad base directive {rest!r}", line=lineno)
        elif head == "regime":
            if rest not in (NONPOSITIVE, UNBOUNDED):
                raise ParseError(f"bad regime {rest!r}", line=lineno)
            regime = rest
        elif head == "gen":
            bits = rest.split()
            if len(bits) != 2:
                raise ParseError("gen needs a name and a degree", line=lineno)
            try:
                gens.append((bits[0], int(bits[1])))
            except ValueError:
                raise ParseError(f"bad degree {bits[1]!r}", line=lineno)
        elif head == "diff":
            if "=" not in rest:
                raise ParseError("diff needs '<name> = <expr>'", line=lineno)
            name, expr = rest.split("=", 1)
            diff_src[name.strip()] = (expr.strip(), lineno)
        elif head == "rel":
            rel_src.append((rest, lineno))
        else:
            raise ParseError(f"unknown directive {head!r}", line=lineno)
    probe = DGAlgebra(base, gens, {}, (), regime)
    diff = {}
    for name, (expr, lineno) in diff_src.items():
        if not probe.has_gen(name):
            raise ParseError(f"diff for unknown generator {name!r}", line=lineno)
        diff[name] = parse_poly(expr, probe).terms
    rels = [parse_poly(expr, probe).terms for expr, _ in rel_src]
    return make_free_dga(base, gens, diff, rels, regime,
                         name=os.path.splitext(os.path.basename(path))[0])


def parse_artin_file(path, ctx: FileContext = None):
    """An Artin coefficient ring presented in the algebra file format."""
    alg = parse_algebra_file(path, ctx or FileContext())
    if alg.base is not None:
        raise ParseError("Artin ring files must be over base Q")
    return make_artin_ring([(g.name, g.degree) for g in alg.gens],
                           [dict(r.terms) for r in alg.relations],
                           {g.name: dict(alg.diff[g.name].terms) for g in alg.gens},
                           name=os.path.splitext(os.path.basename(path))[0])


def serialize_algebra(alg: DGAlgebra, base_ref: str = None) -> str:
    """Canonical text form: fixed directive order, sorted generators."""
    out = []
    if alg.base is None:
        out.append("base Q")
    else:
        out.append(f"base artin {base_ref or alg.base.name + '.dga'}")
    out.append(f"regime {alg.regime}")
    for g in sorted(alg.gens, key=lambda g: (-g.degree, g.name)):
        out.append(f"gen {g.name} {g.degree}")
    for g in sorted(alg.gens, key=lambda g: (-g.degree, g.name)):
        if not alg.diff[g.name].is_zero():
            out.append(f"diff {g.name} = {alg.diff[g.name]}")
    for r in sorted(alg.relations, key=str):
        out.append(f"rel {r}")
    return "\n".join(out) + "\n"


def parse_derivation_file(path, probe: DGAlgebra):
    """`degree <n>` plus `der <gen> = <expr>` lines; values over probe."""
    degree = None
    values = {}
    for lineno, line in _lines(path):
        parts = line.split(None, 1)
        head, rest = parts[0], (parts[1] if len(parts) > 1 else "")
        if head == "degree":
            degree = int(rest)
        elif head == "der":
            if "=" not in rest:
                raise ParseError("der needs '<gen> = <expr>'", line=lineno)
            name, expr = rest.split("=", 1)
            values[name.strip()] = parse_poly(expr.strip(), probe)
        else:
            raise ParseError(f"unknown directive {head!r}", line=lineno)
    if degree is None:
        raise ParseError("derivation file lacks a degree line")
    return degree, values


def parse_morphism_file(path, ctx: FileContext = None) -> Morphism:
    """source/target algebra files plus `send <gen> = <expr>` lines.

    `reduce-base` marks the residue reduction of an Artin-based source; the
    target must then be over Q.
    """
    ctx = ctx or FileContext()
    source = target = None
    sends = {}
    reduce_base = False
    base_dir = os.path.dirname(path) or "."
    for lineno, line in _lines(path):
        parts = line.split(None, 1)
        head, rest = parts[0], (parts[1] if len(parts) > 1 else "")
        if head == "source":
            source = ctx.algebra(os.path.join(base_dir, rest.strip()))
        elif head == "target":
            target = ctx.algebra(os.path.join(base_dir, rest.strip()))
        elif head == "send":
            if "=" not in rest:
                raise ParseError("send needs '<gen> = <expr>'", line=lineno)
            name, expr = rest.split("=", 1)
            sends[name.strip()] = expr.strip()
        elif head == "reduce-base":
            reduce_base = True
        else:
            raise ParseError(f"unknown directive {head!r}", line=lineno)
    if source is None or target is None:
        raise ParseError("morphism file needs source and target lines")
    images = {name: parse_poly(expr, target) for name, expr in sends.items()}
    for g in source.gens:
        images.setdefault(g.name, target.gen(g.name) if target.has_gen(g.name)
                          else target.scalar(0))
    rm = residue_map(source.base) if reduce_base else None
    return Morphism(source, target, images, ring_map=rm, check_chain=True)


def parse_problem_file(path, ctx: FileContext = None):
    """Four morphism roles (i, p, top, bottom) plus an optional pairing."""
    ctx = ctx or FileContext()
    base_dir = os.path.dirname(path) or "."
    roles = {}
    pairing = "C_FW"
    for lineno, line in _lines(path):
        parts = line.split(None, 1)
        head, rest = parts[0], (parts[1] if len(parts) > 1 else "")
        if head in ("i", "p", "top", "bottom"):
            roles[head] = parse_morphism_file(os.path.join(base_dir, rest.strip()), ctx)
        elif head == "pairing":
            if rest not in ("C_FW", "CW_F"):
                raise ParseError(f"bad pairing {rest!r}", line=lineno)
            pairing = rest
        else:
            raise ParseError(f"unknown directive {head!r}", line=lineno)
    missing = {"i", "p", "top", "bottom"} - set(roles)
    if missing:
        raise ParseError(f"problem file lacks roles: {sorted(missing)}")
    return roles, pairing
