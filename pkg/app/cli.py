"""Command line entry point: `simulate` runs one experiment and writes its metrics."""

import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from app.core.errors import BatchDynamicError
from app.core.logging import setup_logging
from app.engine.message import BandwidthMode
from app.schemas.experiment import BatchKind, BatchSource, ExperimentConfig, GraphKind, GraphSource, Scenario
from app.services.experiment_service import run_experiment

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ORACLE = 1
EXIT_ERROR = 2


def _parse_gen(value: str) -> GraphSource:
    parts = value.split(",")
    if len(parts) not in (3, 4):
        raise argparse.ArgumentTypeError("expected KIND,n,seed[,m]")
    try:
        kind = GraphKind(parts[0])
        numbers = [int(x) for x in parts[1:]]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))
    return GraphSource(kind=kind, n=numbers[0], seed=numbers[1], m=numbers[2] if len(numbers) == 3 else None)


def _parse_gen_batches(value: str) -> BatchSource:
    parts = value.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("expected KIND,alpha,count,seed")
    try:
        return BatchSource(kind=BatchKind(parts[0]), alpha=int(parts[1]), count=int(parts[2]), seed=int(parts[3]))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="batch-congest", description="Batch dynamic CONGEST experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a scenario over a batch trace")
    sim.add_argument("--scenario", required=True, choices=[s.value for s in Scenario])
    graph = sim.add_mutually_exclusive_group(required=True)
    graph.add_argument("--graph", metavar="PATH")
    graph.add_argument("--gen", metavar="KIND,n,seed", type=_parse_gen)
    sim.add_argument("--labelling", metavar="PATH", help="initial labels for a --graph file")
    batches = sim.add_mutually_exclusive_group(required=True)
    batches.add_argument("--batches", metavar="PATH")
    batches.add_argument("--gen-batches", metavar="KIND,alpha,count,seed", type=_parse_gen_batches)
    sim.add_argument("--bandwidth", default="default", choices=[m.value for m in BandwidthMode])
    sim.add_argument("--words", type=int, default=1, help="words per edge per round (B)")
    sim.add_argument("--oracle", default="on", choices=["on", "off"])
    sim.add_argument("--metrics", metavar="OUT.csv")
    sim.add_argument("--json", metavar="OUT.json")
    sim.add_argument("--transcript", metavar="OUT.txt")
    sim.add_argument("--summary", action="store_true")
    sim.add_argument("--k", type=int, default=3, help="clique size or cycle length for the clique and cycle scenarios")
    sim.add_argument("--radius", type=int, default=1, help="radius for the local scenarios")
    sim.add_argument("--log-level", default=None)
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    graph = args.gen if args.gen is not None else GraphSource(path=args.graph)
    if args.labelling:
        graph = graph.model_copy(update={"labelling_path": args.labelling})
    batches = args.gen_batches if args.gen_batches is not None else BatchSource(path=args.batches)
    return ExperimentConfig(
        scenario=Scenario(args.scenario),
        graph=graph,
        batches=batches,
        bandwidth_mode=BandwidthMode(args.bandwidth),
        bandwidth=args.words,
        oracle=args.oracle == "on",
        k=args.k,
        radius=args.radius,
        metrics_path=args.metrics,
        json_path=args.json,
        transcript_path=args.transcript,
        summary=args.summary,
    )


def simulate(args: argparse.Namespace) -> int:
    try:
        config = config_from_args(args)
        result = run_experiment(config)
    except (BatchDynamicError, ValidationError, OSError) as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return EXIT_ERROR
    if not result.ok:
        logger.error("%d of %d batches failed their oracle check", len(result.report.mismatches()), len(result.rows))
        return EXIT_ORACLE
    if result.summary is not None:
        s = result.summary
        print(f"c_alpha={s.c_alpha:.4f} c_diameter={s.c_diameter:.4f} residual={s.residual:.4f}")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(getattr(args, "log_level", None))
    if args.command == "simulate":
        return simulate(args)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
