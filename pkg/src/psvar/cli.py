"""Command-line front end.

Exit codes: 0 computed with a true verdict (or a pure computation),
1 computed with a false verdict, 2 usage or parse error, 3 resource
limit exceeded.  ``--json`` emits a report conforming to
``schemas/report.schema.json``; otherwise a human-readable summary is
printed.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .algebra import DEFAULT_MAX_ELEMENTS, term_to_prefix
from .congruences import all_congruences
from .errors import (
    AlgebraFormatError,
    BoundExceededError,
    PsvarError,
    ResourceLimitError,
)
from .freealg import free_algebra
from .io import algebra_to_obj, build_report, parse_algebra_file
from .variety import (
    ClassOfAlgebras,
    FilterSpec,
    Generators,
    close_class,
    filter_from_class,
    member,
    pointwise_entourage,
    verify_correspondence,
    verify_pointwise_uniformity,
)

EXIT_TRUE = 0
EXIT_FALSE = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", action="store_true", help="emit a JSON report on stdout")
    p.add_argument("--k", type=int, default=2, help="free-algebra arity (default 2)")
    p.add_argument("--m-bound", type=int, default=3, dest="m_bound",
                   help="tuple-length bound for substitutions (default 3)")
    p.add_argument("--arity-bound", type=int, default=3, dest="arity_bound",
                   help="filter arity bound (default 3)")
    p.add_argument("--size-bound", type=int, default=6, dest="size_bound",
                   help="universe size bound (default 6)")
    p.add_argument("--max-elements", type=int, default=DEFAULT_MAX_ELEMENTS,
                   dest="max_elements", help="resource cap on constructed algebras")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized pools")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="psvar",
        description="Finite universal algebra: free algebras, congruence "
        "lattices, and certified pseudovariety membership.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("show", help="validate and display an algebra file")
    p.add_argument("--algebra", required=True)
    _add_common(p)

    p = sub.add_parser("free", help="build a free algebra over base algebras")
    p.add_argument("--base", required=True, nargs="+")
    _add_common(p)

    p = sub.add_parser("conlat", help="enumerate the congruence lattice")
    p.add_argument("--algebra", required=True)
    _add_common(p)

    p = sub.add_parser("member", help="decide pseudovariety membership")
    p.add_argument("--algebra", required=True)
    p.add_argument("--generators", nargs="+", help="generator algebra files (generators mode)")
    p.add_argument("--class", dest="class_files", nargs="+",
                   help="class member files (filter mode; requires --base)")
    p.add_argument("--base", nargs="+", help="base algebras fixing the variety (filter mode)")
    p.add_argument("--tuple", dest="gen_tuple",
                   help="comma-separated generating tuple for the candidate")
    _add_common(p)

    p = sub.add_parser("close", help="close a class under H, Sf, Pf")
    p.add_argument("algebras", nargs="+")
    p.add_argument("--ops", default="H,Sf,Pf", help="comma-separated subset of H,Sf,Pf")
    _add_common(p)

    p = sub.add_parser("verify-correspondence", help="class/filter correspondence check")
    p.add_argument("--base", required=True, nargs="+")
    _add_common(p)

    p = sub.add_parser("verify-pointwise", help="pointwise-uniformity basis check")
    p.add_argument("--algebra", required=True)
    _add_common(p)

    p = sub.add_parser("entourages", help="pointwise entourages of an algebra")
    p.add_argument("--algebra", required=True)
    p.add_argument("--tuple", dest="at_tuple", help="comma-separated tuple (default: all)")
    _add_common(p)

    return parser


def _parse_tuple(text: str):
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise PsvarError(f"bad tuple {text!r}; expected comma-separated integers")


def _emit(report: dict, args, human_lines) -> None:
    if args.json:
        json.dump(report, sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        for line in human_lines:
            print(line)


def _cmd_show(args) -> int:
    alg = parse_algebra_file(args.algebra)
    t0 = time.perf_counter()
    report = build_report(
        "show", True, size=alg.size,
        algebra=algebra_to_obj(alg),
        timings={"total_s": time.perf_counter() - t0},
    )
    lines = [f"algebra {alg.name or args.algebra}: size {alg.size}"]
    for (sym, arity), table in zip(alg.signature.symbols, alg.tables):
        lines.append(f"  {sym}/{arity}: {list(table)}")
    _emit(report, args, lines)
    return EXIT_TRUE


def _cmd_free(args) -> int:
    base = [parse_algebra_file(f) for f in args.base]
    t0 = time.perf_counter()
    F = free_algebra(args.k, base, args.max_elements)
    elements = [
        {
            "witness": term_to_prefix(F.witness(i)),
            "value_vectors": [list(v) for v in F.vectors[i]],
        }
        for i in range(len(F))
    ]
    report = build_report(
        "free", True, arity=args.k,
        element_count=len(F), elements=elements,
        timings={"total_s": time.perf_counter() - t0},
    )
    lines = [f"free algebra on {args.k} generators: {len(F)} elements"]
    for e in elements:
        lines.append(f"  {json.dumps(e['witness'])}")
    _emit(report, args, lines)
    return EXIT_TRUE


def _cmd_conlat(args) -> int:
    alg = parse_algebra_file(args.algebra)
    t0 = time.perf_counter()
    congs = all_congruences(alg, bound=max(args.size_bound, 10))
    report = build_report(
        "conlat", True, size=alg.size,
        congruences=[list(c.partition.class_of) for c in congs],
        count=len(congs),
        timings={"total_s": time.perf_counter() - t0},
    )
    lines = [f"{len(congs)} congruences of {alg.name or args.algebra}:"]
    lines += [f"  {list(c.partition.class_of)}" for c in congs]
    _emit(report, args, lines)
    return EXIT_TRUE


def _cmd_member(args) -> int:
    alg = parse_algebra_file(args.algebra)
    gen_tuple = _parse_tuple(args.gen_tuple) if args.gen_tuple else None
    t0 = time.perf_counter()
    if args.generators:
        gens = tuple(parse_algebra_file(f) for f in args.generators)
        spec = Generators(gens)
        mode = "generators"
    elif args.class_files and args.base:
        base = [parse_algebra_file(f) for f in args.base]
        members = tuple(parse_algebra_file(f) for f in args.class_files)
        filt = filter_from_class(
            ClassOfAlgebras(members, args.size_bound),
            base, args.arity_bound, args.max_elements,
        )
        spec = FilterSpec(filt)
        mode = "filter"
    else:
        raise PsvarError("member requires --generators, or --class with --base")
    verdict, cert = member(alg, spec, generating_tuple=gen_tuple,
                           max_elements=args.max_elements)
    report = build_report(
        "member", verdict,
        arity=getattr(cert, "arity", None),
        tuple_bound=args.m_bound, size=args.size_bound,
        certificates=[cert], mode=mode,
        timings={"total_s": time.perf_counter() - t0},
    )
    lines = [f"member: {verdict} ({mode} mode, certificate {type(cert).__name__})"]
    _emit(report, args, lines)
    return EXIT_TRUE if verdict else EXIT_FALSE


def _cmd_close(args) -> int:
    algs = tuple(parse_algebra_file(f) for f in args.algebras)
    ops = [o.strip() for o in args.ops.split(",") if o.strip()]
    t0 = time.perf_counter()
    closed, info = close_class(
        ClassOfAlgebras(algs, args.size_bound), ops, args.size_bound
    )
    report = build_report(
        "close", True, size=args.size_bound,
        ops=ops,
        truncated=info["truncated"],
        members=[algebra_to_obj(a) for a in closed.representatives],
        timings={"total_s": time.perf_counter() - t0},
    )
    lines = [
        f"closure under {{{','.join(ops)}}} within size {args.size_bound}: "
        f"{len(closed.representatives)} isomorphism classes"
        + (" (truncated)" if info["truncated"] else "")
    ]
    lines += [f"  size {a.size}: {a.name}" for a in closed.representatives]
    _emit(report, args, lines)
    return EXIT_TRUE


def _cmd_verify_correspondence(args) -> int:
    base = [parse_algebra_file(f) for f in args.base]
    result = verify_correspondence(
        base, args.size_bound, args.arity_bound, args.m_bound, args.max_elements
    )
    report = build_report(
        "verify-correspondence", result["verdict"],
        arity=args.arity_bound, tuple_bound=args.m_bound, size=args.size_bound,
        details=result,
        timings=result["timings"],
    )
    lines = [
        f"correspondence verdict: {result['verdict']} "
        f"({result['num_sf_closed_subclasses']} subclasses, "
        f"{result['inverse_substitution_checked']} substitutions checked)"
    ]
    _emit(report, args, lines)
    return EXIT_TRUE if result["verdict"] else EXIT_FALSE


def _cmd_verify_pointwise(args) -> int:
    alg = parse_algebra_file(args.algebra)
    result = verify_pointwise_uniformity(alg, args.k, args.max_elements)
    report = build_report(
        "verify-pointwise", result["verdict"],
        arity=args.k, size=alg.size,
        details=result,
        timings=result["timings"],
    )
    lines = [f"pointwise uniformity verdict: {result['verdict']}"]
    _emit(report, args, lines)
    return EXIT_TRUE if result["verdict"] else EXIT_FALSE


def _cmd_entourages(args) -> int:
    import itertools

    alg = parse_algebra_file(args.algebra)
    t0 = time.perf_counter()
    if args.at_tuple:
        tuples = [_parse_tuple(args.at_tuple)]
    else:
        tuples = list(itertools.product(range(alg.size), repeat=args.k))
    entries = []
    for a_bar in tuples:
        if any(not 0 <= a < alg.size for a in a_bar) or len(a_bar) != args.k:
            raise PsvarError(f"tuple {a_bar} is not a {args.k}-tuple over the domain")
        e = pointwise_entourage(alg, args.k, a_bar)
        entries.append(
            {"tuple": list(a_bar), "num_operations": e.num_points,
             "pairs": sorted([list(p) for p in e.pairs])}
        )
    report = build_report(
        "entourages", True, arity=args.k, size=alg.size,
        entourages=entries,
        timings={"total_s": time.perf_counter() - t0},
    )
    lines = [f"{len(entries)} pointwise entourages at arity {args.k}"]
    for ent in entries:
        lines.append(f"  tuple {ent['tuple']}: {len(ent['pairs'])} pairs "
                     f"on {ent['num_operations']} operations")
    _emit(report, args, lines)
    return EXIT_TRUE


_HANDLERS = {
    "show": _cmd_show,
    "free": _cmd_free,
    "conlat": _cmd_conlat,
    "member": _cmd_member,
    "close": _cmd_close,
    "verify-correspondence": _cmd_verify_correspondence,
    "verify-pointwise": _cmd_verify_pointwise,
    "entourages": _cmd_entourages,
}


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_TRUE
    try:
        return _HANDLERS[args.command](args)
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except BoundExceededError as exc:
        print(f"bound exceeded: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (AlgebraFormatError, PsvarError) as exc:
        detail = ""
        if isinstance(exc, AlgebraFormatError) and exc.json_path:
            detail = f" (at {exc.json_path} in {exc.path})"
        print(f"error: {exc}{detail}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
