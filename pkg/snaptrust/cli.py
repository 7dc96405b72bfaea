"""
Command-line entry point: ``python -m snaptrust.cli <command> [flags]``.
"""

import argparse
import logging
import sys
from typing import Any

from .base import SnapTrustError
from .commands import CommandCollection, CommandResult
from .config import RunConfig, resolve_config

logger = logging.getLogger(__name__)

COMMANDS = ("ingest", "train", "evaluate", "attack", "ablate", "sweep", "explain", "homophily")


def _sweep_value(text: str) -> int | float | str:
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="snaptrust", description="Trust evaluation on snapshot sequences of trust graphs."
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON file with configuration sections")
    parser.add_argument("--profile", choices=["otc", "alpha"])
    parser.add_argument("--dataset", help="delimited edge list: source,target,rating,timestamp")
    parser.add_argument("--scheme", choices=["bitcoin", "advogato"])
    parser.add_argument("--snapshots", type=int)
    parser.add_argument("--segmentation", choices=["time", "event"])
    parser.add_argument("--task", choices=["single", "multi", "unobserved"])
    parser.add_argument("--train-upto", type=int)
    parser.add_argument("--horizon", type=int)
    parser.add_argument(
        "--variant",
        choices=[
            "full",
            "trustor_only",
            "trustee_only",
            "temporal_mean",
            "temporal_decay",
            "static_mean",
        ],
    )
    parser.add_argument("--attack", choices=["bad", "good", "onoff", "none"])
    parser.add_argument("--defense", choices=["on", "off"])
    parser.add_argument("--threshold", type=float)
    parser.add_argument("--layers", type=int)
    parser.add_argument("--heads", type=int)
    parser.add_argument("--seeds", type=int, nargs="+")
    parser.add_argument("--epochs", type=int)
    parser.add_argument("--workers", type=int)
    parser.add_argument("--out", help="output directory (default: $SNAPTRUST_OUTPUT_ROOT/<command>)")
    parser.add_argument("--sweep-param")
    parser.add_argument("--sweep-values", type=_sweep_value, nargs="+")
    parser.add_argument("--query", type=int, nargs=2, metavar=("SOURCE", "TARGET"))
    parser.add_argument("--plots", action="store_true", default=None)
    parser.add_argument("--log-level", default="INFO")
    return parser


def overrides_from_args(args: argparse.Namespace) -> dict[str, Any]:
    """Command-line flags as a partial config mapping; unset flags stay None."""
    return {
        "data": {
            "dataset": args.dataset,
            "scheme": args.scheme,
            "snapshots": args.snapshots,
            "segmentation": args.segmentation,
        },
        "spatial": {
            "threshold": args.threshold,
            "layers": args.layers,
            "defense": None if args.defense is None else args.defense == "on",
        },
        "temporal": {"heads": args.heads},
        "train": {"epochs": args.epochs},
        "task": {
            "kind": args.task,
            "train_upto": args.train_upto,
            "horizon": args.horizon,
            "variant": args.variant,
            "seeds": args.seeds,
        },
        "attack": {"kind": args.attack},
        "output": {
            "directory": args.out,
            "workers": args.workers,
            "plots": args.plots,
            "query": args.query,
        },
        "sweep": {"parameter": args.sweep_param, "values": args.sweep_values},
    }


def run(command: str, config: RunConfig) -> CommandResult:
    return CommandCollection.default().run(name=command, config=config)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=args.log_level.upper(),
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
    )
    try:
        config = resolve_config(
            overrides_from_args(args), config_file=args.config, profile=args.profile
        )
    except SnapTrustError as e:
        print(e.message, file=sys.stderr)
        return e.exit_status

    result = run(args.command, config)
    if result.output:
        print(result.output)
    if result.error:
        print(result.error, file=sys.stderr)
    for artifact in result.artifacts:
        logger.info("wrote %s", artifact)
    return result.exit_status


if __name__ == "__main__":
    sys.exit(main())
