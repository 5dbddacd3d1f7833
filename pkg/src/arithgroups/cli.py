"""Command line runner: ``arithgroups <area> <action> [options]``.

Reports are JSON on stdout.  Exit status 0 means decided, 2 means an
honest bound-relative negative or undecided comparison, 1 means an input
or module error (reported on stderr with its module-qualified code).
"""

from __future__ import annotations

import argparse
import itertools
import json
import logging
import random
import sys
from fractions import Fraction
from typing import List, Optional, Sequence

import sympy

from . import brauer, geodesics, hforms, isogeny, mulrel, rootsys, titsindex
from .errors import ArithGroupsError
from .numfield import QQ, AlgebraicNumber, NumberField, Place

log = logging.getLogger("arithgroups")

EXIT_OK, EXIT_ERROR, EXIT_UNDECIDED = 0, 1, 2


class InputError(ArithGroupsError, ValueError):
    module = "cli"


# ---------------------------------------------------------------------------
# parsing helpers
# ---------------------------------------------------------------------------

def parse_element(text, field: NumberField) -> AlgebraicNumber:
    """Parse ``"3/2"`` or a polynomial in ``a`` (the field generator), e.g. ``"1+a"``."""
    if isinstance(text, (int, Fraction)):
        return field(text)
    a = sympy.Symbol("a")
    try:
        expr = sympy.sympify(str(text).replace("^", "**"), locals={"a": a})
        poly = sympy.Poly(expr, a)
    except (sympy.SympifyError, sympy.PolynomialError, TypeError) as exc:
        raise InputError(f"cannot parse element {text!r}") from exc
    out = field.zero()
    for c in poly.all_coeffs():
        q = sympy.Rational(c)
        out = out * field.gen() + field(Fraction(int(q.p), int(q.q)))
    return out


def _split(text: str) -> List[str]:
    return [s.strip() for s in str(text).split(",") if s.strip()]


def _field(text: Optional[str]) -> NumberField:
    return QQ if not text else NumberField(text)


def _int_list(text: str) -> List[int]:
    return [int(s) for s in _split(text)]


def _matrix(text: str) -> List[List[Fraction]]:
    return [[Fraction(x) for x in _split(row)] for row in text.split(";")]


def _budget(args) -> mulrel.SearchBudget:
    kw = {}
    if args.budget_exp is not None:
        kw["exponent_bound"] = args.budget_exp
    if args.precision is not None:
        kw["precision_bits"] = args.precision
    return mulrel.SearchBudget(**kw)


def _load_json(args) -> dict:
    if not args.json:
        return {}
    with open(args.json) as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_rootsys(args):
    t = rootsys.RootSystemType.parse(args.type)
    rs = rootsys.build_root_system(t)
    if args.action == "weyl":
        W = rootsys.weyl_group(rs)
        aut = rootsys.automorphism_structure(rs)
        return {"type": f"{t.family}{t.rank}", "weyl_order": W.order,
                "nontrivial_conjugacy_classes": W.nontrivial_conjugacy_classes,
                "aut_order": aut.aut_order, "aut_mod_weyl": aut.quotient_descriptor,
                "minus_identity_in_weyl": rootsys.minus_identity_in_weyl(rs)}, EXIT_OK
    if args.action == "irreducible":
        W = rootsys.weyl_perm_group(rs)
        gens = [rs.simple_reflection(j) for j in range(rs.rank)]
        return {"type": f"{t.family}{t.rank}", "weyl_irreducible": rootsys.acts_irreducibly(gens, rs),
                "minus_identity_irreducible": rootsys.acts_irreducibly([rs.minus_identity()], rs)}, EXIT_OK
    if args.action == "match":
        rs2 = rootsys.build_root_system(args.type2 or args.type)
        res = rootsys.match_root_systems(_matrix(args.map), rs, rs2)
        return {"result": str(res)}, EXIT_OK
    raise InputError(f"unknown rootsys action {args.action}")


def cmd_weakcomm(args):
    doc = _load_json(args)
    F = _field(doc.get("field", args.field))
    budget = _budget(args)
    if args.action == "check":
        e1 = [parse_element(x, F) for x in (doc.get("e1") or _split(args.e1 or ""))]
        e2 = [parse_element(x, F) for x in (doc.get("e2") or _split(args.e2 or ""))]
        if not e1 or not e2:
            raise InputError("both --e1 and --e2 are required")
        res = mulrel.is_weakly_commensurable(e1, e2, doc.get("mode", args.mode), budget)
        status = EXIT_UNDECIDED if (not res.answer and res.completeness != "certified") else EXIT_OK
        return res.to_json(), status
    if args.action == "relations":
        vals = [parse_element(x, F) for x in (doc.get("values") or _split(args.values or ""))]
        R = mulrel.relation_lattice(mulrel.MultiplicativeTuple(vals, F), budget)
        return R.to_json(), EXIT_OK if R.certified else EXIT_UNDECIDED
    raise InputError(f"unknown weakcomm action {args.action}")


def _comparison_report(a, b, choices=None):
    agree, count = brauer.corpus_agreement(a, b, choices)
    return {"algebra1": a.to_json(), "algebra2": b.to_json(),
            "valid": [bool(brauer.validate_csa(a)), bool(brauer.validate_csa(b))],
            "comparison": brauer.compare(a, b).to_json(),
            "corpus": {"agree": agree, "profiles": count}}


def cmd_brauer(args):
    if args.action == "example65":
        places = _int_list(args.places)
        extra = _int_list(args.extra) if args.extra else []
        a, b = brauer.build_example_65(args.d, places, quaternionic=args.quaternionic, extra_places=extra)
        return _comparison_report(a, b), EXIT_OK
    if args.action == "example66":
        d1, d2, ev1, ev2 = brauer.build_example_66(args.d, args.L, _int_list(args.primes))
        ps = ev1.places
        profiles = list(itertools.product(sorted({1, args.d}), repeat=len(ps)))
        agree = all(ev1(dict(zip(ps, c))) == ev2(dict(zip(ps, c))) for c in profiles)
        return {"data1": d1.to_json(), "data2": d2.to_json(),
                "unitary_involution": [brauer.admits_unitary_involution(d1), brauer.admits_unitary_involution(d2)],
                "comparison": brauer.compare(d1.algebra, d2.algebra).to_json(),
                "evaluators_agree": agree, "profiles": len(profiles)}, EXIT_OK
    if args.action == "compare":
        doc = _load_json(args)
        a = brauer.CSAInvariants.from_json(doc["algebra1"])
        b = brauer.CSAInvariants.from_json(doc["algebra2"])
        return _comparison_report(a, b), EXIT_OK
    raise InputError(f"unknown brauer action {args.action}")


def _torus(doc: dict) -> isogeny.TorusElementData:
    F = _field(doc.get("field"))
    mod = isogeny.GaloisModule(doc["action"])
    vals = [parse_element(x, F) for x in doc["values"]]
    auts = [parse_element(x, F) for x in doc["automorphisms"]] if doc.get("automorphisms") else None
    return isogeny.TorusElementData(mod, vals, auts)


def cmd_isogeny(args):
    budget = _budget(args)
    if args.action == "build":
        doc = _load_json(args)
        if not doc:
            raise InputError("isogeny build needs --json")
        t1, t2 = _torus(doc["t1"]), _torus(doc["t2"])
        res = isogeny.build_isogeny(t1, doc["chi1"], t2, doc["chi2"], budget)
        return res.to_json(), EXIT_OK
    if args.action == "demo":
        inst = isogeny.generate_instance(random.Random(args.seed), corrupt=args.corrupt)
        out = {"template": inst.template, "chi1": inst.chi1, "chi2": inst.chi2, "corrupted": inst.corrupted}
        try:
            out["result"] = isogeny.build_isogeny(inst.t1, inst.chi1, inst.t2, inst.chi2, budget).to_json()
        except isogeny.KernelMismatch as exc:
            out["result"] = {"error": exc.code, "message": str(exc)}
        return out, EXIT_OK
    raise InputError(f"unknown isogeny action {args.action}")


def cmd_tits(args):
    if args.action == "aggregate":
        doc = _load_json(args)
        if not doc:
            raise InputError("tits aggregate needs --json")
        fam = titsindex.LocalIndexFamily.from_json(doc)
    elif args.action == "synthetic":
        fam = titsindex.synthetic_family(args.type, random.Random(args.seed)).family
    else:
        raise InputError(f"unknown tits action {args.action}")
    orbits, rank = titsindex.everywhere_distinguished(fam)
    return {"family": fam.to_json(),
            "everywhere_distinguished": [titsindex._label(o) for o in orbits], "global_rank": rank,
            "min_rank": titsindex.min_rank_check(fam).to_json()}, EXIT_OK


def cmd_geodesics(args):
    bits = args.precision or 128
    if args.action == "length":
        F = _field(args.field)
        vals = [parse_element(x, F) for x in _split(args.simple_values)]
        p = geodesics.RootValueProfile.from_simple_values(args.type, vals)
        L = geodesics.length(p, bits, _budget(args))
        return L.to_json(), EXIT_OK
    if args.action == "fuchsian":
        box = geodesics.QuaternionOrderBox(Fraction(args.a), Fraction(args.b), args.bound)
        return [f.to_json() for f in geodesics.fuchsian_sample(box, bits)], EXIT_OK
    if args.action == "qspan":
        def lengths(text):
            return [geodesics.single_log_length(Fraction(x), 1, 0, bits) for x in _split(text or "")]
        res = geodesics.qspan_equal(lengths(args.logs1), lengths(args.logs2), _budget(args))
        return res.to_json(), EXIT_UNDECIDED if res.verdict == "undecided" else EXIT_OK
    raise InputError(f"unknown geodesics action {args.action}")


def cmd_hforms(args):
    if args.action == "family":
        center = hforms.center_order(args.type)
        if args.quadratic_d:
            sc = hforms.recipe_914(args.type, args.quadratic_d, args.t, args.L)
            layout = sc.layout
        else:
            layout = hforms.simple_layout(args.t, center.ell)
        rep = hforms.certify_family(layout, center)
        out = rep.to_json()
        out["center"] = center.to_json()
        out["layout"] = layout.to_json()
        if args.vectors:
            out["vectors"] = [hforms.build_invariant_vector(layout, center, e).to_json()
                              for e in hforms.all_epsilons(args.t)]
        return out, EXIT_OK
    raise InputError(f"unknown hforms action {args.action}")


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    # global flags may come before or after the subcommand; the copy on the
    # subparsers suppresses defaults so it does not clobber earlier values
    def flags(suppress: bool) -> argparse.ArgumentParser:
        dflt = argparse.SUPPRESS if suppress else None
        c = argparse.ArgumentParser(add_help=False)
        c.add_argument("--json", default=dflt, help="read inputs from a JSON document")
        c.add_argument("--budget-exp", type=int, default=dflt, help="exponent bound for relation searches")
        c.add_argument("--precision", type=int, default=dflt, help="working precision in bits")
        c.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS if suppress else False)
        return c

    top, common = flags(False), flags(True)
    p = argparse.ArgumentParser(prog="arithgroups", parents=[top],
                                description="Weak commensurability computations on arithmetic group data.")
    sub = p.add_subparsers(dest="area", required=True)

    r = sub.add_parser("rootsys", parents=[common])
    r.add_argument("action", choices=["weyl", "irreducible", "match"])
    r.add_argument("--type", required=True)
    r.add_argument("--type2")
    r.add_argument("--map", help="rows separated by ';', entries by ','")
    r.set_defaults(func=cmd_rootsys)

    w = sub.add_parser("weakcomm", parents=[common])
    w.add_argument("action", choices=["check", "relations"])
    w.add_argument("--e1")
    w.add_argument("--e2")
    w.add_argument("--values")
    w.add_argument("--field", help="defining polynomial in x; elements are polynomials in a")
    w.add_argument("--mode", choices=["neat", "strict"], default="neat")
    w.set_defaults(func=cmd_weakcomm)

    b = sub.add_parser("brauer", parents=[common])
    b.add_argument("action", choices=["example65", "example66", "compare"])
    b.add_argument("--d", type=int, default=3)
    b.add_argument("--places", default="5,7,11,13")
    b.add_argument("--quaternionic", action="store_true")
    b.add_argument("--extra", help="fifth finite place for the quaternionic variant")
    b.add_argument("--L", type=int, default=-1, help="L = Q(sqrt L)")
    b.add_argument("--primes", default="5,13")
    b.set_defaults(func=cmd_brauer)

    i = sub.add_parser("isogeny", parents=[common])
    i.add_argument("action", choices=["build", "demo"])
    i.add_argument("--seed", type=int, default=0)
    i.add_argument("--corrupt", action="store_true")
    i.set_defaults(func=cmd_isogeny)

    t = sub.add_parser("tits", parents=[common])
    t.add_argument("action", choices=["aggregate", "synthetic"])
    t.add_argument("--type", default="B3")
    t.add_argument("--seed", type=int, default=0)
    t.set_defaults(func=cmd_tits)

    g = sub.add_parser("geodesics", parents=[common])
    g.add_argument("action", choices=["length", "fuchsian", "qspan"])
    g.add_argument("--type", default="A1")
    g.add_argument("--simple-values", default="4")
    g.add_argument("--field")
    g.add_argument("--a", default="1")
    g.add_argument("--b", default="1")
    g.add_argument("--bound", type=int, default=2)
    g.add_argument("--logs1", help="comma-separated a_i for lengths log a_i")
    g.add_argument("--logs2")
    g.set_defaults(func=cmd_geodesics)

    h = sub.add_parser("hforms", parents=[common])
    h.add_argument("action", choices=["family"])
    h.add_argument("--type", required=True)
    h.add_argument("--t", type=int, default=1)
    h.add_argument("--quadratic-d", type=int, default=None, help="use the real quadratic scenario over Q(sqrt D)")
    h.add_argument("--L", default=None, help="inner, outer, or e in Q")
    h.add_argument("--vectors", action="store_true")
    h.set_defaults(func=cmd_hforms)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        report, status = args.func(args)
    except ArithGroupsError as exc:
        print(json.dumps({"error": exc.code, "message": str(exc)}), file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(json.dumps({"error": "cli.InputError", "message": str(exc)}), file=sys.stderr)
        return EXIT_ERROR
    if isinstance(report, list):
        for row in report:
            print(json.dumps(row, sort_keys=True))
    else:
        print(json.dumps(report, sort_keys=True, indent=2))
    return status


if __name__ == "__main__":
    sys.exit(main())
