"""Command-line interface.

Exit codes: 0 yes/ok, 3 no, 2 inconclusive, 1 usage error. Verification
exits 0 when every suite passes and 4 otherwise.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import homomorphisms as hm
from .errors import CapabilityError, ConicHomError, InconclusiveError, ParameterError
from .graph import PRODUCTS
from .io import decision_to_dict, dumps_graph, graph_to_dict, load_graph, theta_to_dict
from .corpus import DEFAULT_SEED
from .solver import SolverOptions
from .theta import ConeTag, big_theta, theta

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INCONCLUSIVE = 2
EXIT_NO = 3
EXIT_VERIFY_FAIL = 4


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--feas-tol", type=_positive, default=1e-9, help="solver feasibility tolerance")
    common.add_argument("--gap-tol", type=_positive, default=1e-9, help="solver relative gap tolerance")
    common.add_argument("--json", metavar="PATH", help="also write the result JSON to PATH")
    common.add_argument("--verbose", action="store_true", help="solver trace on stderr")

    p = argparse.ArgumentParser(prog="conichom", description="Conic graph homomorphisms and theta functions.")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("theta", parents=[common], help="evaluate theta^K or Theta^K")
    t.add_argument("graph", help="generator string (cycle:5, kneser:5:2, ...) or graph JSON file")
    t.add_argument("--cone", default="splus", choices=[c.value for c in ConeTag])
    t.add_argument("--kind", default="theta", choices=["theta", "big_theta"])

    h = sub.add_parser("hom", parents=[common], help="decide a conic homomorphism X -> Y")
    h.add_argument("x")
    h.add_argument("y")
    h.add_argument("--cone", default="splus", choices=[c.value for c in ConeTag])
    h.add_argument("--mode", default="strong", choices=["strong", "weak"])
    h.add_argument("--witness", action="store_true", help="include the witness matrix in the JSON")

    v = sub.add_parser("verify", parents=[common], help="run theorem-verification suites")
    v.add_argument("suite", nargs="?", default="all")
    v.add_argument("--seed", type=int, default=DEFAULT_SEED)
    v.add_argument("--max-size", type=_positive_int, default=10, help="largest corpus graph order")
    v.add_argument("--workers", type=_positive_int, default=1)

    pr = sub.add_parser("product", parents=[common], help="build a graph product")
    pr.add_argument("op", choices=sorted(PRODUCTS))
    pr.add_argument("x")
    pr.add_argument("y")
    return p


def _emit(obj, args) -> None:
    text = json.dumps(obj, indent=2, sort_keys=False)
    print(text)
    if getattr(args, "json", None):
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def _opts(args) -> SolverOptions:
    return SolverOptions(feas_tol=args.feas_tol, gap_tol=args.gap_tol, verbose=args.verbose)


def cmd_theta(args) -> int:
    g = load_graph(args.graph)
    fn = theta if args.kind == "theta" else big_theta
    res = fn(g, ConeTag.parse(args.cone), _opts(args))
    _emit(theta_to_dict(res), args)
    return EXIT_OK if res.attained else EXIT_INCONCLUSIVE


def cmd_hom(args) -> int:
    x, y = load_graph(args.x), load_graph(args.y)
    dec = hm.decide_hom(x, y, ConeTag.parse(args.cone), args.mode, _opts(args))
    out = {"x": args.x, "y": args.y, "cone": args.cone, "mode": args.mode}
    out.update(decision_to_dict(dec, include_matrix=args.witness))
    _emit(out, args)
    return {hm.YES: EXIT_OK, hm.NO: EXIT_NO}.get(dec.verdict, EXIT_INCONCLUSIVE)


def cmd_verify(args) -> int:
    from .verify import SUITES, run_verification

    names = None if args.suite == "all" else [args.suite]
    if names and names[0] not in SUITES:
        raise ParameterError(f"unknown suite {args.suite!r}; choose from all, {', '.join(SUITES)}")
    report = run_verification(names, seed=args.seed, max_size=args.max_size, workers=args.workers)
    for line in report.lines():
        print(line)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(report.to_json(), fh, indent=2)
    return EXIT_OK if report.ok else EXIT_VERIFY_FAIL


def cmd_product(args) -> int:
    g = PRODUCTS[args.op](load_graph(args.x), load_graph(args.y))
    print(dumps_graph(g))
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(graph_to_dict(g), fh)
    return EXIT_OK


COMMANDS = {"theta": cmd_theta, "hom": cmd_hom, "verify": cmd_verify, "product": cmd_product}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except (ParameterError, CapabilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InconclusiveError as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except ConicHomError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE


if __name__ == "__main__":
    sys.exit(main())
