"""Command-line entry point: verification runs, suites, and the calculus.

Exit codes: 0 = verified/pass, 2 = refuted/fail, 3 = inconclusive-truncation.
"""

from __future__ import annotations

import argparse
import json
import sys

from .algebra import Morphism, make_morphism, graded_map
from .artin import residue_map
from .deform import (base_extend, mc_check, mc_element, psi1_deform,
                     tangent_obstruction_dims)
from .errors import DgdefError
from .fileformat import (FileContext, parse_algebra_file, parse_artin_file,
                         parse_derivation_file, parse_morphism_file,
                         parse_problem_file, serialize_algebra)
from .homology import Truncation
from .idempotent import Idempotent, lift_factorization, lift_trivial_idempotent_dg, make_idempotent
from .model import Factorization, LiftingProblem, dg_lift, factor_c_fw, factor_cw_f
from .report import EXIT_CODES, REPORT_SCHEMA, VerificationReport
from .scenarios import EXAMPLE_IDS, run_example
from .suites import SUITE_NAMES, run_suite


def _window(text):
    lo, hi = text.split(":")
    return int(lo), int(hi)


def _trunc_from(args):
    lo, hi = getattr(args, "window", None) or (-6, 0)
    return Truncation(lo, hi, getattr(args, "max_wordlen", None) or 8)


def _emit(report: VerificationReport, json_path):
    payload = report.to_json()
    print(f"[{payload['status']}] {payload['example_id']} "
          f"({payload['wall_time_ms']} ms)")
    for item in payload["evidence"]:
        print(f"  - {item['claim']}")
    for note in payload["notes"]:
        print(f"  note: {note}")
    if json_path:
        report.dump(json_path)
        print(f"wrote {json_path}")
    return report.exit_code()


def cmd_verify(args):
    report = run_example(args.example, word_max=args.max_wordlen,
                         window=args.window)
    return _emit(report, args.json)


def cmd_props(args):
    report = run_suite(args.suite, args.trials, args.seed)
    return _emit(report, args.json)


def cmd_schema(args):
    print(json.dumps(REPORT_SCHEMA, indent=2, sort_keys=True))
    return 0


def cmd_factor(args):
    ctx = FileContext()
    alg = ctx.algebra(args.file)
    from .algebra import DGAlgebra
    source = DGAlgebra(alg.base, [], {}, (), alg.regime, graded_free=True)
    f = Morphism(source, alg, {})
    trunc = _trunc_from(args)
    if args.kind == "cfw":
        fac = factor_c_fw(f, args.depth, trunc)
    else:
        fac = factor_cw_f(f, trunc)
    print("# middle")
    print(serialize_algebra(fac.middle), end="")
    cert = {
        "kind": fac.kind,
        "window": fac.window,
        "left_images": {g.name: str(fac.left.images[g.name])
                        for g in fac.left.source.gens},
        "right_images": {g.name: str(fac.right.images[g.name])
                         for g in fac.middle.gens},
        "notes": {k: str(v) for k, v in fac.notes.items()},
    }
    print(json.dumps({"certificate": cert}, indent=2, sort_keys=True))
    return 0


def cmd_lift(args):
    roles, pairing = parse_problem_file(args.file)
    problem = LiftingProblem(roles["i"], roles["p"], roles["top"], roles["bottom"])
    trunc = _trunc_from(args)
    h = dg_lift(problem, trunc, pairing=pairing)
    print(json.dumps({"lift": {g.name: str(h.images[g.name])
                               for g in h.source.gens},
                      "chain_map": h.is_chain_map()}, indent=2, sort_keys=True))
    return 0


def cmd_lift_idem(args):
    ctx = FileContext()
    ring = None
    algebra = None
    idem_lines = {}
    import os
    base_dir = os.path.dirname(args.file) or "."
    with open(args.file, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            head, _, rest = line.partition(" ")
            rest = rest.strip()
            if head == "ring":
                ring = ctx.ring(os.path.join(base_dir, rest))
            elif head == "algebra":
                algebra = ctx.algebra(os.path.join(base_dir, rest))
            elif head == "idem":
                name, _, expr = rest.partition("=")
                idem_lines[name.strip()] = expr.strip()
            else:
                raise DgdefError(f"unknown directive {head!r} in instance file")
    if ring is None or algebra is None or algebra.base is not ring:
        raise DgdefError("instance file needs a ring and an algebra over it")
    trunc = _trunc_from(args)
    ext = residue_map(ring)
    reduced, _ = algebra.base_change(ext, name=algebra.name + "@Q")
    from .algebra import parse_poly, DGAlgebra
    images = {n: parse_poly(e, reduced) for n, e in idem_lines.items()}
    for g in reduced.gens:
        images.setdefault(g.name, reduced.gen(g.name))
    f_b = make_idempotent(make_morphism(reduced, reduced, images), trunc)
    P = DGAlgebra(ring, [], {}, (), algebra.regime, graded_free=True)
    g_a = Morphism(P, algebra, {}, semifree_over=P)
    e_a = Idempotent(Morphism(P, P, {}))
    lifted, certs = lift_trivial_idempotent_dg(ext, g_a, e_a, f_b, trunc)
    out = {
        "lift": {g.name: str(lifted.morphism.images[g.name]) for g in algebra.gens},
        "certificates": {k: certs[k] for k in
                         ("chain_map", "idempotent", "reduction",
                          "compatibility", "weak_equivalence")},
        "steps": certs["steps"],
    }
    print(json.dumps(out, indent=2, sort_keys=True, default=str))
    return 0


def cmd_lift_fact(args):
    ctx = FileContext()
    import os
    base_dir = os.path.dirname(args.file) or "."
    ring = source = target = left = right = None
    maps = {}
    pairs = []
    with open(args.file, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            head, _, rest = line.partition(" ")
            rest = rest.strip()
            if head == "ring":
                ring = ctx.ring(os.path.join(base_dir, rest))
            elif head == "source":
                source = ctx.algebra(os.path.join(base_dir, rest))
            elif head == "target":
                target = ctx.algebra(os.path.join(base_dir, rest))
            elif head == "map":
                name, _, expr = rest.partition("=")
                maps[name.strip()] = expr.strip()
            elif head == "left":
                left = parse_morphism_file(os.path.join(base_dir, rest), ctx)
            elif head == "right":
                right = parse_morphism_file(os.path.join(base_dir, rest), ctx)
            elif head == "pair":
                u, z = rest.split()
                pairs.append((u, z))
            else:
                raise DgdefError(f"unknown directive {head!r} in instance file")
    if None in (ring, source, target, left, right):
        raise DgdefError("instance file needs ring, source, target, left, right")
    from .algebra import parse_poly
    images = {n: parse_poly(e, target) for n, e in maps.items()}
    for g in source.gens:
        images.setdefault(g.name, target.gen(g.name))
    f = make_morphism(source, target, images)
    kind = "C_FW" if args.kind == "cfw" else "CW_F"
    notes = {"contractible_pairs": pairs} if pairs else {}
    given = Factorization(left.target, left, right, kind, notes=notes)
    lifted = lift_factorization(residue_map(ring), f, given, kind, _trunc_from(args))
    out = {
        "middle": serialize_algebra(lifted.middle),
        "left": {g.name: str(lifted.left.images[g.name])
                 for g in lifted.left.source.gens},
        "right": {g.name: str(lifted.right.images[g.name])
                  for g in lifted.middle.gens},
        "notes": {k: str(v) for k, v in lifted.notes.items()},
    }
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def _load_mc(args):
    ctx = FileContext()
    alg = ctx.algebra(args.algebra)
    ring = ctx.ring(args.artin)
    host = base_extend(alg, ring)
    degree, values = parse_derivation_file(args.xi, host)
    if degree != 1:
        raise DgdefError("Maurer-Cartan data must have degree 1")
    return alg, ring, host, mc_element(alg, ring, values, host=host)


def cmd_mc(args):
    alg, ring, host, xi = _load_mc(args)
    ok, defects = mc_check(xi)
    print(json.dumps({
        "maurer_cartan": ok,
        "defects": {k: str(v) for k, v in defects.items()},
    }, indent=2, sort_keys=True))
    return 0 if ok else 2


def cmd_deform(args):
    alg, ring, host, xi = _load_mc(args)
    sd = psi1_deform(alg, ring, xi)
    text = serialize_algebra(sd.total, base_ref=args.artin)
    if args.emit:
        with open(args.emit, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.emit}")
    else:
        print(text, end="")
    print(json.dumps({"certificates": {k: str(v) for k, v in
                                       sd.certificates.items()}},
                     indent=2, sort_keys=True))
    return 0


def cmd_tangent(args):
    ctx = FileContext()
    alg = ctx.algebra(args.algebra)
    degrees = [int(d) for d in args.degrees.split(",")]
    dims, fac = tangent_obstruction_dims(alg, args.depth, degrees,
                                         _trunc_from(args))
    print(json.dumps({"dimensions": {str(k): v for k, v in dims.items()},
                      "resolution_window": fac.window}, indent=2, sort_keys=True))
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="dgdef",
        description="Exact deformation calculus for commutative DG-algebras "
                    "in non-positive degrees")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run a catalogued verification scenario")
    p.add_argument("example", choices=EXAMPLE_IDS)
    p.add_argument("--max-wordlen", type=int, default=None)
    p.add_argument("--window", type=_window, default=None)
    p.add_argument("--json", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("props", help="run a randomized property suite")
    p.add_argument("--suite", choices=SUITE_NAMES, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--json", default=None)
    p.set_defaults(func=cmd_props)

    p = sub.add_parser("factor", help="factor the base map of an algebra")
    p.add_argument("--kind", choices=("cfw", "cwf"), required=True)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--max-wordlen", type=int, default=None)
    p.add_argument("--window", type=_window, default=None)
    p.add_argument("file")
    p.set_defaults(func=cmd_factor)

    p = sub.add_parser("lift", help="solve a lifting square from a problem file")
    p.add_argument("file")
    p.add_argument("--max-wordlen", type=int, default=None)
    p.add_argument("--window", type=_window, default=None)
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("lift-idem", help="lift a trivial idempotent over an Artin base")
    p.add_argument("file")
    p.add_argument("--max-wordlen", type=int, default=None)
    p.add_argument("--window", type=_window, default=None)
    p.set_defaults(func=cmd_lift_idem)

    p = sub.add_parser("lift-fact", help="lift a factorization over an Artin base")
    p.add_argument("--kind", choices=("cfw", "cwf"), required=True)
    p.add_argument("file")
    p.add_argument("--max-wordlen", type=int, default=None)
    p.add_argument("--window", type=_window, default=None)
    p.set_defaults(func=cmd_lift_fact)

    p = sub.add_parser("mc", help="check the Maurer-Cartan equation")
    p.add_argument("algebra")
    p.add_argument("--artin", required=True)
    p.add_argument("--xi", required=True)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("deform", help="build the strict deformation of an algebra")
    p.add_argument("algebra")
    p.add_argument("--artin", required=True)
    p.add_argument("--xi", required=True)
    p.add_argument("--emit", default=None)
    p.set_defaults(func=cmd_deform)

    p = sub.add_parser("tangent", help="tangent/obstruction dimensions")
    p.add_argument("algebra")
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--degrees", default="1,2")
    p.add_argument("--max-wordlen", type=int, default=None)
    p.add_argument("--window", type=_window, default=None)
    p.set_defaults(func=cmd_tangent)

    p = sub.add_parser("schema", help="print the report JSON schema")
    p.set_defaults(func=cmd_schema)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DgdefError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
