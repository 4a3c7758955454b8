"""Command-line front end.

::

    causalprune identify --graph g.txt --do X --effect Y [--algorithm id|pid]
                         [--order topological|reverse-topological | --order-list A,B]
                         [--format text|latex|json] [--metrics] [--trace]
                         [--evaluate --seed 7 --card 2]
    causalprune dsep --graph g.txt --x A --y B [--given C,D]

Exit status is 0 when the effect is identified, 2 when identification fails
(the hedge is printed as JSON) and 1 on usage or input errors.  ``dsep``
prints ``d-separated`` or ``d-connected`` and exits 0 either way.  Graph files that
declare latent vertices are projected onto their observed vertices first.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Sequence

from .expression import render
from .graph import GraphError, LatentDag, Smg, latent_project_dag
from .graphio import parse_graph, parse_graph_file
from .identify import IdentificationError, IdentifyResult, identify
from .oracle import OracleError, check_expression, sample_scm
from .separation import d_separated

__all__ = ["main", "build_parser", "run_query", "parse_graph_file", "parse_graph"]

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FAIL = 2

VERIFY_TOLERANCE = 1e-9


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits with 2 by default, which is reserved for FAIL
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _csv(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="causalprune", description="Identify causal effects from semi-Markovian graphs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    q = sub.add_parser("identify", help="express P_x(y) in terms of the observational joint")
    q.add_argument("--graph", required=True, help="graph file")
    q.add_argument("--do", type=_csv, default=[], help="comma-separated treatment variables")
    q.add_argument("--effect", type=_csv, required=True, help="comma-separated outcome variables")
    q.add_argument("--algorithm", choices=["id", "pid"], default="pid")
    order = q.add_mutually_exclusive_group()
    order.add_argument("--order", choices=["topological", "reverse-topological"], default="reverse-topological",
                       help="order in which the latent-projection step tries vertices")
    order.add_argument("--order-list", type=_csv, help="explicit comma-separated latent-projection order")
    q.add_argument("--format", choices=["text", "latex", "json"], default="text")
    q.add_argument("--metrics", action="store_true", help="print size metrics of the expression")
    q.add_argument("--trace", action="store_true", help="print every recursion step")
    q.add_argument("--evaluate", action="store_true", help="check the expression on a random model")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--card", type=int, default=2)

    d = sub.add_parser("dsep", help="test d-separation")
    d.add_argument("--graph", required=True)
    d.add_argument("--x", type=_csv, required=True)
    d.add_argument("--y", type=_csv, required=True)
    d.add_argument("--given", type=_csv, default=[])
    return parser


def _load(path: str) -> Smg:
    g = parse_graph_file(path)
    return latent_project_dag(g) if isinstance(g, LatentDag) else g


def _print_text(result: IdentifyResult, args, out) -> None:
    if args.trace:
        for step in result.trace:
            print(step, file=out)
    if not result.identified:
        print("FAIL: effect is not identifiable; hedge:", file=out)
        print(json.dumps(result.hedge.to_dict(), indent=2), file=out)
        return
    print(render(result.expression, args.format), file=out)
    if args.metrics:
        print("metrics: " + ", ".join(f"{k}={v}" for k, v in result.to_dict()["metrics"].items()), file=out)


def run_query(argv: Sequence[str] | None = None, out=None) -> int:
    """Run one command line; returns the exit status."""
    out = out if out is not None else sys.stdout
    args = build_parser().parse_args(argv)
    try:
        g = _load(args.graph)
        if args.command == "dsep":
            separated = d_separated(g, args.x, args.y, args.given)
            print("d-separated" if separated else "d-connected", file=out)
            return EXIT_OK

        order = args.order_list if args.order_list is not None else args.order
        result = identify(g, args.effect, args.do, args.algorithm, order)
        if args.format == "json":
            print(json.dumps(result.to_dict(), indent=2), file=out)
        else:
            _print_text(result, args, out)
        if not result.identified:
            return EXIT_FAIL
        if args.evaluate:
            model = sample_scm(g, args.seed, args.card)
            diff = check_expression(result.expression, model, args.effect, args.do)
            verdict = "<=" if diff <= VERIFY_TOLERANCE else ">"
            print(f"verified: max-diff={diff:.3e} {verdict} {VERIFY_TOLERANCE:g}", file=out)
            if diff > VERIFY_TOLERANCE:
                return EXIT_ERROR
        return EXIT_OK
    except (OSError, GraphError, IdentificationError, OracleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(run_query(argv))


if __name__ == "__main__":
    main()
