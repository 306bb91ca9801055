"""Command-line front end.

Exit codes: 0 for a definitive verdict (positive or negative), 2 when the
answer is inconclusive at the requested bound, 1 on errors.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from . import __version__
from .alphabets import AlphabetError, RegularMapError
from .ca import CAError, WindowPattern, apply_window, compose, minimal_memory, restrict
from .decide import decide_1d
from .groups import (CosetSpace, FiniteIndexSubgroup, FreeAbelian, GroupError, diagonal,
                     sublattice, subgroup_schedule)
from .limits import closed_image_probe, cubing_example_probe, kt_example_probe, quadratic_example_probe
from .parsing import PolySyntaxError
from .periodic import (DEFAULT_INDEX_BOUND, DEFAULT_MAX_DIAGONAL, build_tilde, certify_inverse,
                       conjugation_check, injectivity_scan, rho, surjectivity_scan, synthesize_inverse)
from .report import dumps, make_report
from .rulefile import RuleFileError, parse_rule_file, serialize

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2


class UsageError(ValueError):
    pass


# -- argument helpers ------------------------------------------------------------

def _read(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load(path):
    text = _read(path)
    return parse_rule_file(text), text


def _element(G, text):
    text = text.strip()
    if isinstance(G, FreeAbelian):
        g = tuple(int(x) for x in text.split(","))
        if len(g) != G.rank:
            raise UsageError(f"element {text!r} needs {G.rank} coordinates")
        return g
    return G.index_of(text)


def parse_subgroup(G, text) -> FiniteIndexSubgroup:
    """``k`` for kZ^d, ``v;v;...`` for the lattice spanned by d vectors, or element names for a finite group."""
    text = text.strip()
    if isinstance(G, FreeAbelian):
        if ";" not in text and "," not in text:
            return diagonal(int(text), G)
        gens = [_element(G, part) for part in text.split(";")]
        if len(gens) != G.rank:
            raise UsageError(f"a finite-index sublattice of Z^{G.rank} needs {G.rank} generators")
        return sublattice([[gens[j][i] for j in range(G.rank)] for i in range(G.rank)], G)
    elems = frozenset(_element(G, x) for x in text.replace(",", " ").split())
    if any(G.mul(a, b) not in elems for a in elems for b in elems):
        raise UsageError("the given elements do not form a subgroup")
    return FiniteIndexSubgroup(G, elements=elems)


def parse_schedule(G, text, index_bound):
    """``default``, ``index`` (purely by index), ``diagonal`` (kZ^d only), or subgroups separated by ``|``."""
    text = (text or "default").strip()
    if text == "default":
        return list(subgroup_schedule(G, index_bound, diagonal_first=True, max_diagonal=DEFAULT_MAX_DIAGONAL))
    if text == "index":
        return list(subgroup_schedule(G, index_bound, diagonal_first=False))
    if text == "diagonal":
        if not isinstance(G, FreeAbelian):
            raise UsageError("diagonal schedules need G = Z^d")
        return [diagonal(k, G) for k in range(1, index_bound + 1) if k ** G.rank <= index_bound]
    return [parse_subgroup(G, part) for part in text.split("|")]


def _points(A, text):
    return [A.parse(tok) for tok in text.split()]


def _cells(G, args):
    if args.interval:
        lo, _, hi = args.interval.partition(":")
        if not isinstance(G, FreeAbelian) or G.rank != 1:
            raise UsageError("--interval needs G = Z")
        return [(n,) for n in range(int(lo), int(hi) + 1)]
    if args.cells:
        return [_element(G, part) for part in args.cells.split(";")]
    raise UsageError("give --interval or --cells")


def _fmt_ca(ca):
    G = ca.group
    return {"memory": [G.fmt(g) for g in ca.memory], "memory_kind": ca.memory_kind,
            "rule": ca.rule.describe_body(), "provenance": ca.rule.provenance,
            "rule_file": serialize(ca)}


def _sample_mode(ca):
    return "exhaustive" if ca.alphabet.is_finite else "verified-on-samples"


def _symbolic_mode(ca):
    if ca.alphabet.is_finite:
        return "exhaustive"
    return "verified-on-samples" if ca.rule.provenance == "verified-on-samples" else "symbolic"


# -- commands ---------------------------------------------------------------------

def cmd_info(args):
    ca, text = _load(args.rule)
    small = minimal_memory(ca)
    result = {"group": str(ca.group), "alphabet": ca.alphabet.describe(), **_fmt_ca(ca),
              "minimal_memory": [ca.group.fmt(g) for g in small.memory],
              "minimal_memory_kind": small.memory_kind}
    if ca.alphabet.is_finite:
        result["alphabet_size"] = ca.alphabet.size
    return make_report("info", [(args.rule, text)], "parsed", _sample_mode(ca), result), EXIT_OK


def cmd_compose(args):
    outer, t1 = _load(args.outer)
    inner, t2 = _load(args.inner)
    ca = compose(outer, inner)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(serialize(ca))
    return make_report("compose", [(args.outer, t1), (args.inner, t2)], "composed",
                       _symbolic_mode(ca), _fmt_ca(ca)), EXIT_OK


def cmd_restrict(args):
    ca, text = _load(args.rule)
    G = ca.group
    if isinstance(G, FreeAbelian):
        basis = [_element(G, part) for part in args.basis.split(";")] if args.basis.strip() else []
    else:
        basis = [_element(G, x) for x in args.basis.replace(",", " ").split()]
    small = restrict(ca, basis)
    result = {"subgroup_group": str(small.group), **_fmt_ca(small)}
    return make_report("restrict", [(args.rule, text)], "restricted", _symbolic_mode(ca), result,
                       parameters={"basis": args.basis}), EXIT_OK


def cmd_min_memory(args):
    ca, text = _load(args.rule)
    small = minimal_memory(ca)
    mode = "exhaustive" if ca.alphabet.is_finite else "symbolic"
    return make_report("min-memory", [(args.rule, text)], small.memory_kind, mode, _fmt_ca(small)), EXIT_OK


def cmd_apply(args):
    ca, text = _load(args.rule)
    A, G = ca.alphabet, ca.group
    cells = _cells(G, args)
    values = _points(A, args.values)
    if len(values) != len(cells):
        raise UsageError(f"{len(cells)} cells but {len(values)} values")
    out = apply_window(ca, WindowPattern.from_mapping(G, dict(zip(cells, values))))
    result = {"window": [G.fmt(g) for g in out.window], "values": [A.fmt(v) for v in out.values]}
    return make_report("apply", [(args.rule, text)], "applied", _symbolic_mode(ca), result), EXIT_OK


def cmd_fix(args):
    ca, text = _load(args.rule)
    A, G = ca.alphabet, ca.group
    cs = CosetSpace(parse_subgroup(G, args.subgroup))
    tilde = build_tilde(ca, cs)
    result = {"representatives": [G.fmt(r) for r in cs.representatives],
              "dependencies": [list(d) for d in tilde.deps]}
    if args.values:
        z = _points(A, args.values)
        result["input"] = [A.fmt(x) for x in z]
        result["image"] = [A.fmt(x) for x in tilde.apply(rho(cs, z).values)]
    if A.is_finite:
        ok, witness = conjugation_check(ca, cs, tilde)
        mode = "exhaustive"
    else:
        rng = random.Random(args.seed)
        pts = list(A.samples) or [(0,) * A.dim, (1,) * A.dim]
        samples = [tuple(rng.choice(pts) for _ in range(cs.index)) for _ in range(args.samples)]
        ok, witness = conjugation_check(ca, cs, tilde, samples=samples)
        mode = "verified-on-samples"
    result["conjugation_identity"] = ok
    if witness is not None:
        result["witness"] = [A.fmt(x) for x in witness]
    return make_report("fix", [(args.rule, text)], "conjugation identity holds" if ok else "conjugation identity fails",
                       mode, result, parameters={"subgroup": cs.subgroup.to_json()}), EXIT_OK


def cmd_scan(args):
    ca, text = _load(args.rule)
    schedule = parse_schedule(ca.group, args.schedule, args.index_bound)
    params = {"index_bound": args.index_bound, "schedule": args.schedule or "default"}
    results = {}
    conclusive = True
    verdicts = []
    if args.kind in ("injectivity", "both"):
        r = injectivity_scan(ca, args.index_bound, schedule=schedule)
        results["injectivity"] = r.to_json()
        conclusive &= r.conclusive
        verdicts.append(r.verdict)
    if args.kind in ("surjectivity", "both"):
        r = surjectivity_scan(ca, args.index_bound, schedule=schedule, probe_horizon=args.window)
        results["surjectivity"] = r.to_json()
        conclusive &= r.conclusive
        verdicts.append(r.verdict)
    mode = "exhaustive" if conclusive else "inconclusive at bound"
    rep = make_report("scan", [(args.rule, text)], "; ".join(verdicts), mode, results, parameters=params)
    return rep, EXIT_OK if conclusive else EXIT_INCONCLUSIVE


def cmd_invert(args):
    ca, text = _load(args.rule)
    schedule = parse_schedule(ca.group, args.schedule, args.index_bound) if ca.alphabet.is_finite else None
    res = synthesize_inverse(ca, args.index_bound, schedule=schedule, degree_cap=args.degree_cap,
                             radius_cap=args.radius_cap)
    out = res.to_json()
    if res.success:
        out["inverse"]["rule_file"] = serialize(res.inverse)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(serialize(res.inverse))
        verdict, code = "invertible", EXIT_OK
        mode = "exhaustive" if ca.alphabet.is_finite else "symbolic"
    elif res.certificate:
        verdict, code, mode = "not invertible (not injective)", EXIT_OK, "exhaustive"
    else:
        verdict, code, mode = "no inverse found within bounds", EXIT_INCONCLUSIVE, "inconclusive at bound"
    params = {"index_bound": args.index_bound, "degree_cap": args.degree_cap, "radius_cap": args.radius_cap,
              "schedule": args.schedule or "default"}
    return make_report("invert", [(args.rule, text)], verdict, mode, out, parameters=params), code


def cmd_certify(args):
    tau, t1 = _load(args.rule)
    sigma, t2 = _load(args.candidate)
    ok, transcript = certify_inverse(tau, sigma)
    mode = "exhaustive" if tau.alphabet.is_finite else "symbolic"
    return make_report("certify", [(args.rule, t1), (args.candidate, t2)],
                       "inverse" if ok else "not an inverse", mode, transcript), EXIT_OK


def cmd_probe(args):
    ca, text = _load(args.rule)
    A, G = ca.alphabet, ca.group
    cs = CosetSpace(parse_subgroup(G, args.subgroup))
    d = rho(cs, _points(A, args.target))
    res = closed_image_probe(ca, d, horizon=args.window, preimage_index_bound=args.index_bound)
    verdicts = {"preimage-found": "target is in the image",
                "empty-at-stage": "target is not in the closure of the image",
                "undetermined": "undetermined at bound"}
    code = EXIT_INCONCLUSIVE if res.status == "undetermined" else EXIT_OK
    mode = "inconclusive at bound" if code else "exhaustive"
    return make_report("probe", [(args.rule, text)], verdicts[res.status], mode, res.to_json(),
                       parameters={"window": args.window, "subgroup": cs.subgroup.to_json()}), code


def cmd_decide(args):
    ca, text = _load(args.rule)
    dec = decide_1d(ca)
    words = ["injective" if dec.injective else "not injective",
             "surjective" if dec.surjective else "not surjective"]
    return make_report("decide-1d", [(args.rule, text)], ", ".join(words), "exhaustive",
                       dec.to_json(ca.alphabet)), EXIT_OK


def cmd_examples(args):
    if args.name == "quadratic":
        res = quadratic_example_probe(args.window)
        ok = res["all_fibers_nonempty"] and not res["constant_preimage_rational_roots"]
        verdict = "every window fiber nonempty; no constant rational preimage" if ok else "reproduction failed"
        params = {"window": args.window}
        mode = "symbolic"
    elif args.name == "kt":
        res = kt_example_probe(args.degree_cap)
        ok = res["inconsistent_for_all"] and res["kernel_zero_for_all"]
        verdict = "no bounded-degree preimage of 1; trivial kernel" if ok else "reproduction failed"
        params = {"degree_cap": args.degree_cap}
        mode = "symbolic"
    else:
        res = cubing_example_probe()
        verdict = "(2:1) has no rational preimage"
        params = {}
        mode = "exhaustive"
    return make_report(f"examples {args.name}", [], verdict, mode, res, parameters=params), EXIT_OK


# -- parser ---------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="algca", description="Exact tools for cellular automata with polynomial local rules.")
    p.add_argument("--version", action="version", version=f"algca {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", metavar="PATH", help="also write the JSON report to PATH")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled checks (default 0)")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_, description=help_)
        sp.set_defaults(func=fn)
        return sp

    def bound_flags(sp):
        sp.add_argument("--index-bound", type=int, default=DEFAULT_INDEX_BOUND,
                        help=f"largest subgroup index to scan (default {DEFAULT_INDEX_BOUND})")
        sp.add_argument("--schedule", help="default | index | diagonal | subgroups separated by '|'")

    sp = add("info", cmd_info, "describe a rule file")
    sp.add_argument("rule")
    sp = add("compose", cmd_compose, "compose two CAs (OUTER after INNER)")
    sp.add_argument("outer")
    sp.add_argument("inner")
    sp.add_argument("--out", help="write the composite as a rule file")
    sp = add("restrict", cmd_restrict, "restrict to the subgroup spanned by --basis")
    sp.add_argument("rule")
    sp.add_argument("--basis", required=True, help="Z^d: vectors 'a,b;c,d'; finite groups: element names")
    sp = add("min-memory", cmd_min_memory, "shrink the memory set")
    sp.add_argument("rule")
    sp = add("apply", cmd_apply, "apply the CA to a finite pattern")
    sp.add_argument("rule")
    sp.add_argument("--interval", help="window lo:hi on Z")
    sp.add_argument("--cells", help="window cells separated by ';'")
    sp.add_argument("--values", required=True, help="one point per cell, space separated")
    sp = add("fix", cmd_fix, "the finite map on H-periodic configurations, with the conjugation check")
    sp.add_argument("rule")
    sp.add_argument("--subgroup", required=True, help="k for kZ^d, generators 'a,b;c,d', or element names")
    sp.add_argument("--values", help="one point per coset, space separated")
    sp.add_argument("--samples", type=int, default=50, help="sample count over Q (default 50)")
    sp = add("scan", cmd_scan, "search periodic configurations for collisions and missing images")
    sp.add_argument("rule")
    sp.add_argument("--kind", choices=("injectivity", "surjectivity", "both"), default="both")
    sp.add_argument("--window", type=int, default=6, help="probe horizon for missing images (default 6)")
    bound_flags(sp)
    sp = add("invert", cmd_invert, "synthesize and certify an inverse CA")
    sp.add_argument("rule")
    sp.add_argument("--degree-cap", type=int, default=4, help="ansatz degree cap over Q (default 4)")
    sp.add_argument("--radius-cap", type=int, default=2, help="ansatz memory radius cap over Q (default 2)")
    sp.add_argument("--out", help="write the inverse as a rule file")
    bound_flags(sp)
    sp = add("certify", cmd_certify, "check that CANDIDATE is a two-sided inverse of RULE")
    sp.add_argument("rule")
    sp.add_argument("candidate")
    sp = add("probe", cmd_probe, "closed-image probe for a periodic target")
    sp.add_argument("rule")
    sp.add_argument("--subgroup", required=True, help="period of the target")
    sp.add_argument("--target", required=True, help="one point per coset, space separated")
    sp.add_argument("--window", type=int, default=6, help="window horizon n for [-n, n]^d (default 6)")
    sp.add_argument("--index-bound", type=int, default=16, help="largest period index for preimage search")
    sp = add("decide-1d", cmd_decide, "decide injectivity and surjectivity over Z")
    sp.add_argument("rule")
    sp = add("examples", cmd_examples, "reproduce the quadratic, K[t] and cubing counter-examples")
    sp.add_argument("name", choices=("quadratic", "kt", "cubing"))
    sp.add_argument("--window", type=int, default=10, help="quadratic: largest window [0, L] (default 10)")
    sp.add_argument("--degree-cap", type=int, default=10, help="kt: largest degree bound (default 10)")
    return p


def run_command(argv) -> tuple[dict | None, int]:
    """Parse ``argv`` and run one command; returns (report, exit code)."""
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        report, code = args.func(args)
    except SystemExit as e:
        return EXIT_ERROR if e.code not in (0, None) else EXIT_OK
    except (RuleFileError, PolySyntaxError, UsageError, CAError, GroupError, AlphabetError,
            RegularMapError, OSError, ValueError) as e:
        print(json.dumps({"error": type(e).__name__, "message": str(e)}), file=sys.stderr)
        return EXIT_ERROR
    text = dumps(report)
    print(text)
    if getattr(args, "report", None):
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
