"""Seeded randomized property suites with counterexample shrinking.

Each suite is deterministic for a fixed (name, trials, seed): per-trial
generators derive their seeds from a splittable scheme so trials could run
in any order.  Failures are minimized by deleting terms from the offending
random elements while the failure persists.
"""

from __future__ import annotations

import random
import time
from fractions import Fraction

from . import exactlinalg as lin
from .algebra import DGAlgebra, Monomial, Morphism, graded_map, make_free_dga
from .artin import make_artin_ring, residue_map
from .derivation import Derivation
from .deform import (base_extend, exp_automorphism, gauge_transform, mc_check,
                     mc_element, MCElement)
from .errors import DgdefError
from .homology import Truncation, invert_flat_over_artin, nakayama_check
from .idempotent import lift_idempotent_graded
from .report import STATUS_REFUTED, STATUS_VERIFIED, VerificationReport

SUITE_NAMES = ("koszul", "leibniz", "idempotent", "nakayama", "killer",
               "mcgauge", "tower")


def run_suite(name: str, trials: int, seed: int) -> VerificationReport:
    if name not in SUITE_NAMES:
        raise DgdefError(f"unknown suite {name!r}; known: {', '.join(SUITE_NAMES)}")
    if trials < 1:
        raise DgdefError("trials must be at least 1")
    started = time.monotonic()
    rep = VerificationReport(f"suite:{name}", seed=seed)
    failures = []
    runner = _SUITES[name]
    for trial in range(trials):
        rng = random.Random((seed << 20) ^ (trial * 0x9E3779B1))
        failure = runner(rng)
        if failure is not None:
            failures.append({"trial": trial, **failure})
            break
    if failures:
        rep.status = STATUS_REFUTED
        rep.claim(f"{name}: failed at trial {failures[0]['trial']}", failures[0])
    else:
        rep.claim(f"{name}: {trials}/{trials} randomized trials passed "
                  "with zero tolerated failures", {"trials": trials, "seed": seed})
    return rep.finish(started)


def shrink_terms(terms, still_fails):
    """Greedy term deletion while the failure persists."""
    current = dict(terms)
    changed = True
    while changed and len(current) > 1:
        changed = False
        for mon in list(current):
            trial = {m: c for m, c in current.items() if m != mon}
            if trial and still_fails(trial):
                current = trial
                changed = True
                break
    return current


# ----- random builders -----

def _random_algebra(rng, unbounded=False):
    degs = [0, -1, -2] if not unbounded else [1, 0, -1]
    n = rng.randrange(2, 4)
    gens = [(f"g{i}", rng.choice(degs)) for i in range(n)]
    return make_free_dga(None, gens, {},
                         regime=("unbounded" if unbounded else "nonpositive"),
                         name="Rnd")


def _random_element(rng, alg, degree=None, word=3, terms=3):
    lo = degree if degree is not None else -4
    hi = degree if degree is not None else 1 if alg.regime == "unbounded" else 0
    mons = alg.normal_monomials(lo, hi, word)
    if degree is not None:
        mons = [m for m in mons if alg.monomial_degree(m) == degree]
    out = {}
    for _ in range(terms):
        if not mons:
            break
        m = mons[rng.randrange(len(mons))]
        out[m] = out.get(m, Fraction(0)) + Fraction(rng.randrange(-4, 5) or 1)
    return alg.element(out)


def _suite_koszul(rng):
    alg = _random_algebra(rng, unbounded=rng.random() < 0.4)
    degrees = sorted({alg.monomial_degree(m)
                      for m in alg.normal_monomials(-4, 2, 3)})
    if not degrees:
        return None
    da = degrees[rng.randrange(len(degrees))]
    db = degrees[rng.randrange(len(degrees))]
    a = _random_element(rng, alg, degree=da)
    b = _random_element(rng, alg, degree=db)
    sign = -1 if (da % 2 and db % 2) else 1
    defect = a * b - b * a * sign
    if not defect.is_zero():
        shrunk = shrink_terms(a.terms, lambda t: not (
            alg.element(t) * b - b * alg.element(t) * sign).is_zero())
        return {"property": "graded commutativity", "a": str(alg.element(shrunk)),
                "b": str(b), "defect": str(defect)}
    for g in alg.gens:
        if g.degree % 2:
            sq = alg.gen(g.name) * alg.gen(g.name)
            if not sq.is_zero():
                return {"property": "odd square", "generator": g.name}
    return None


def _leibniz_family(rng):
    kind = rng.randrange(3)
    if kind == 0:
        c = rng.randrange(-3, 4) or 1
        return make_free_dga(None, [("x", 1), ("y", -1), ("t", 0)],
                             {"y": f"{c}*y*x", "t": f"{c}*x*t"},
                             regime="unbounded", name="L0")
    if kind == 1:
        c = rng.randrange(1, 4)
        return make_free_dga(None, [("x", 0), ("e", -1)], {"e": f"{c}*x^2"},
                             name="L1")
    return make_free_dga(None, [("u", -1), ("z", 0), ("w", -2), ("s", -1)],
                         {"u": "z", "w": f"{rng.randrange(-2, 3)}*z*s"}, name="L2")


def _suite_leibniz(rng):
    alg = _leibniz_family(rng)
    a = _random_element(rng, alg)
    b = _random_element(rng, alg)
    comps = a.homogeneous_components()
    if not comps:
        return None
    deg, a_h = sorted(comps.items())[rng.randrange(len(comps))]
    lhs = (a_h * b).d()
    rhs = a_h.d() * b + a_h * b.d() * ((-1) ** (deg % 2))
    if lhs != rhs:
        return {"property": "Leibniz", "a": str(a_h), "b": str(b),
                "lhs": str(lhs), "rhs": str(rhs)}
    dd = a.d().d()
    if not dd.is_zero():
        return {"property": "d squared", "a": str(a), "dd": str(dd)}
    return None


_IDEM_CACHE = {}


def _idem_setup():
    if "P" not in _IDEM_CACHE:
        ring = make_artin_ring([("eps", 0)], relations=["eps^2"], name="Aeps")
        R = make_free_dga(None, [("x", 0), ("y", -1)], {}, name="Rxy")
        P = base_extend(R, ring)
        base = make_free_dga(ring, [], {}, name="base")
        _IDEM_CACHE.update({"ring": ring, "P": P, "base": base})
    return _IDEM_CACHE


def _suite_idempotent(rng):
    data = _idem_setup()
    ring, P = data["ring"], data["P"]
    # honest idempotent e0 plus an eps-perturbation rho
    e0 = {"x": P.gen("x") if rng.random() < 0.8 else P.scalar(0),
          "y": P.gen("y") if rng.random() < 0.5 else P.scalar(0)}
    rho = {"x": _random_element(rng, P, degree=0, word=2, terms=2),
           "y": _random_element(rng, P, degree=-1, word=2, terms=2)}
    images = {k: e0[k] + P.base_elt("eps") * rho[k] for k in e0}
    g = graded_map(P, P, images)
    i = graded_map(data["base"], P, {})
    e = graded_map(data["base"], data["base"], {})
    try:
        f = lift_idempotent_graded(g, [{"eps": Fraction(1)}], i=i, e=e)
    except DgdefError as exc:
        return {"property": "3g^2-2g^3", "error": str(exc),
                "g": {k: str(v) for k, v in images.items()}}
    for gen in P.gens:
        if f.apply(f.images[gen.name]) != f.images[gen.name]:
            return {"property": "output idempotency", "gen": gen.name}
        delta = f.images[gen.name] - g.images[gen.name]
        if any(m.tag != "eps" for m in delta.terms):
            return {"property": "congruence mod J", "gen": gen.name,
                    "delta": str(delta)}
    return None


_NAK_CACHE = {}


def _nak_setup():
    if "rings" not in _NAK_CACHE:
        _NAK_CACHE["rings"] = [
            make_artin_ring([("eps", 0)], relations=["eps^2"], name="Aeps"),
            make_artin_ring([("t", 0)], relations=["t^3"], name="At3"),
        ]
        R = make_free_dga(None, [("x", 0), ("y", -1)], {}, name="Rxy")
        _NAK_CACHE["hosts"] = [base_extend(R, ring) for ring in _NAK_CACHE["rings"]]
    return _NAK_CACHE


def _suite_nakayama(rng):
    data = _nak_setup()
    pick = rng.randrange(2)
    ring, host = data["rings"][pick], data["hosts"][pick]
    # generator-linear part L (block-diagonal by degree) + nilpotent noise
    a = Fraction(rng.randrange(-2, 3))
    b = Fraction(rng.randrange(-2, 3))
    mlab = ring.labels[1]
    images = {
        "x": host.gen("x") * a + host.base_elt(mlab) * _random_element(
            rng, host, degree=0, word=2, terms=2),
        "y": host.gen("y") * b + host.base_elt(mlab) * _random_element(
            rng, host, degree=-1, word=2, terms=2),
    }
    f = Morphism(host, host, images)
    verdict, ev = nakayama_check(f, Truncation(-2, 0, 4))
    expect_iso = a != 0 and b != 0
    if (verdict == "iso") != expect_iso:
        return {"property": "iso iff reduction iso", "a": str(a), "b": str(b),
                "verdict": verdict}
    if expect_iso:
        gbar = graded_map(host, host, {"x": host.gen("x") * (1 / a),
                                       "y": host.gen("y") * (1 / b)})
        inv = invert_flat_over_artin(f, gbar)
        if inv is None:
            return {"property": "explicit nilpotent-series inverse", "a": str(a),
                    "b": str(b)}
    return None


def _suite_killer(rng):
    # random finite module as a trivial extension, tensored with the killer
    n = rng.randrange(1, 4)
    degs = [rng.choice([0, -1, -2]) for _ in range(n)]
    gens = [(f"m{i}", degs[i]) for i in range(n)]
    rels = [f"m{i}*m{j}" for i in range(n) for j in range(i, n)]
    diff = {}
    for i in range(n):   # random internal differential pairing m_i -> m_j
        for j in range(n):
            if degs[j] == degs[i] + 1 and j not in diff.values() and rng.random() < 0.5:
                diff[f"m{i}"] = f"{rng.randrange(1, 4)}*m{j}"
                break
    for src, tgt in list(diff.items()):
        tgt_name = tgt.split("*")[-1]
        if tgt_name in diff:
            del diff[tgt_name]  # keep d^2 = 0
    M = make_free_dga(None, gens + [("th", -1)], {**diff, "th": "1"},
                      relations=rels, name="KM")
    lo = min(degs) - 2
    from .homology import extract_complex, cohomology
    cx = extract_complex(M, Truncation(lo, 0, 3), demand_closed=True)
    hrep = cohomology(cx)
    dims = {d: hrep.dim(d) for d in cx.degrees() if d > lo}
    if any(dims.values()):
        return {"property": "killer acyclicity", "dims": dims,
                "module_degrees": degs}
    return None


_MC_CACHE = {}


def _mc_setup():
    if "hosts" not in _MC_CACHE:
        R = make_free_dga(None, [("x", 0), ("y", -1)], {}, name="Rxy")
        rings = [
            make_artin_ring([("eps", 0)], relations=["eps^2"], name="Aeps"),
            make_artin_ring([("t", 0)], relations=["t^3"], name="At3"),
            make_artin_ring([("u", -1)], relations=["u^2"], name="Au"),
        ]
        _MC_CACHE["R"] = R
        _MC_CACHE["rings"] = rings
        _MC_CACHE["hosts"] = [base_extend(R, ring) for ring in rings]
    return _MC_CACHE


def _random_m_derivation(rng, host, ring, degree):
    values = {}
    for g in host.gens:
        vdeg = g.degree + degree
        mons = [m for m in host.normal_monomials(vdeg, vdeg, 3)
                if m.tag is not None]
        out = {}
        for _ in range(2):
            if not mons:
                break
            m = mons[rng.randrange(len(mons))]
            out[m] = out.get(m, Fraction(0)) + Fraction(rng.randrange(-2, 3))
        values[g.name] = host.element(out)
    return Derivation(host, host, values, degree, check_degrees=False)


def _suite_mcgauge(rng):
    data = _mc_setup()
    pick = rng.randrange(len(data["rings"]))
    ring, host, R = data["rings"][pick], data["hosts"][pick], data["R"]
    theta0 = _random_m_derivation(rng, host, ring, 0)
    base_xi = MCElement(R, ring, host,
                        Derivation(host, host,
                                   {g.name: host.scalar(0) for g in host.gens}, 1))
    xi = gauge_transform(theta0, base_xi)   # guaranteed Maurer-Cartan
    ok, defects = mc_check(xi)
    if not ok:
        return {"property": "gauge produces MC", "defects": str(defects)}
    theta = _random_m_derivation(rng, host, ring, 0)
    xi2 = gauge_transform(theta, xi)
    ok2, defects2 = mc_check(xi2)
    if not ok2:
        return {"property": "gauge preserves MC", "defects": str(defects2)}
    phi = exp_automorphism(theta)
    phi_inv = exp_automorphism(theta * Fraction(-1))
    for g in host.gens:
        if phi.apply(phi_inv.images[g.name]) != host.gen(g.name):
            return {"property": "exp(theta)exp(-theta) = id", "gen": g.name}
    a = _random_element(rng, host, degree=0, word=2, terms=2)
    b = _random_element(rng, host, degree=-1, word=2, terms=2)
    if phi.apply(a * b) != phi.apply(a) * phi.apply(b):
        return {"property": "exp(theta) multiplicative", "a": str(a), "b": str(b)}
    if ring.nilpotency_index == 2:
        # square-zero base: MC is exactly delta(xi) = 0, both directions
        eta = _random_m_derivation(rng, host, ring, 1)
        cand = MCElement(R, ring, host, eta)
        ok3, _ = mc_check(cand)
        delta_vals = {g.name: eta.values[g.name].d() + eta.apply(host.diff[g.name])
                      for g in host.gens}
        linear_zero = all(v.is_zero() for v in delta_vals.values())
        if ok3 != linear_zero:
            return {"property": "MC iff linear over square-zero",
                    "mc": ok3, "delta_zero": linear_zero}
    return None


def _suite_tower(rng):
    from .artin import small_extension_tower, RingMorphism
    kind = rng.randrange(3)
    if kind == 0:
        k = rng.randrange(2, 5)
        ring = make_artin_ring([("t", 0)], relations=[f"t^{k}"], name=f"T{k}")
    elif kind == 1:
        ring = make_artin_ring([("a", 0), ("b", 0)],
                               relations=["a^2", "b^2", "a*b"], name="T2v")
    else:
        ring = make_artin_ring([("u", 0), ("e", -1)],
                               relations=["u^2", "e^2", "u*e"],
                               diff={"e": "u"}, name="Tue")
    f = residue_map(ring)
    tower = small_extension_tower(f)
    kernel_dim = len(f.kernel_vectors())
    if len(tower) != kernel_dim:
        return {"property": "tower length equals kernel dimension",
                "len": len(tower), "dim": kernel_dim}
    for step in tower:
        tot = step.total
        if tot.vec_d(step.socle):
            return {"property": "socle is a cocycle", "socle": tot.str_vec(step.socle)}
        for lab in tot.labels[1:]:
            if tot.vec_mul({lab: Fraction(1)}, step.socle):
                return {"property": "socle is annihilated by the maximal ideal",
                        "label": lab}
        if len(step.projection.kernel_vectors()) != 1:
            return {"property": "small extension kernel is one-dimensional"}
    # composing the tower reproduces the original surjection
    comp = None
    for step in tower:
        comp = step.projection if comp is None else step.projection.compose(comp)
    for lab in ring.labels[1:]:
        lhs = f.label_image(lab)
        rhs_vec = comp.label_image(lab) if comp else {lab: Fraction(1)}
        # both land in Q via the final quotient (dimension 1): compare residues
        lhs_res = lhs.get(None, Fraction(0))
        rhs_res = rhs_vec.get(None, Fraction(0))
        if lhs_res != rhs_res:
            return {"property": "tower composite reproduces the surjection",
                    "label": lab}
    return None


_SUITES = {
    "koszul": _suite_koszul,
    "leibniz": _suite_leibniz,
    "idempotent": _suite_idempotent,
    "nakayama": _suite_nakayama,
    "killer": _suite_killer,
    "mcgauge": _suite_mcgauge,
    "tower": _suite_tower,
}
