"""
Poisson Geometry Toolkit
========================

Main entrypoint. Loads a chart manifest, runs one command and prints a JSON
report on stdout; logs go to stderr.

Usage:
    python -m src.main check manifests/so3.yaml
    python -m src.main classes manifests/so3.yaml --k 1,2
    PG_SEED=3 ./pg geodesic manifests/symplectic.yaml --x0 0,0 --alpha0 1,0 --out geo.csv

Exit codes: 0 all residuals pass, 1 a computation failed its tolerance or
could not be carried out, 2 input error.
"""

import argparse
import logging
import sys
from typing import List, Optional

from src.cli import COMMANDS, Manifest, ManifestError, RunContext, UsageError
from src.config import Config
from src.connection import MetricError
from src.expr import EvaluationError
from src.multivec import DensityError, DimensionMismatchError
from src.transport import PathError

EXIT_OK, EXIT_FAILED, EXIT_INPUT = 0, 1, 2

COMPUTATION_ERRORS = (EvaluationError, PathError, MetricError, DensityError, DimensionMismatchError)


def setup_logging(config: Config) -> None:
    log_format = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
    log_level = getattr(logging, config.logging.level.upper(), logging.INFO)

    handlers = [logging.StreamHandler(sys.stderr)]
    if config.logging.file:
        handlers.append(logging.FileHandler(config.logging.file))

    logging.basicConfig(
        level=log_level,
        format=log_format,
        handlers=handlers,
        force=True,
    )


logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pg", description="Poisson geometry on coordinate charts")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("manifest", help="path to a YAML chart manifest")
    common.add_argument("--seed", type=int, default=None, help="sampling seed (default: PG_SEED or 0)")
    common.add_argument("--steps", type=int, default=None, help="RK4 steps on [0, 1]")
    common.add_argument("--points", type=int, default=None, help="sample points for residuals")
    common.add_argument("--config", default="config.yaml", help="toolkit config file")
    common.add_argument("--no-timestamp", action="store_true", help="omit timestamp and wall time")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common], help="Jacobi and contravariant-calculus battery")

    geo = sub.add_parser("geodesic", parents=[common], help="integrate a geodesic")
    geo.add_argument("--x0", help="comma-separated start point")
    geo.add_argument("--alpha0", help="comma-separated start covector")
    geo.add_argument("--T", type=float, default=1.0, help="time horizon")
    geo.add_argument("--out", help="CSV trajectory path")

    tr = sub.add_parser("transport", parents=[common], help="parallel transport of a covector")
    tr.add_argument("--path", default="loop")
    tr.add_argument("--beta0", help="comma-separated start covector")

    hol = sub.add_parser("holonomy", parents=[common], help="linear holonomy of a closed path")
    hol.add_argument("--path", default="loop")

    cls = sub.add_parser("classes", parents=[common], help="secondary characteristic classes m_k")
    cls.add_argument("--k", default="1", help="comma-separated orders")

    sub.add_parser("modular", parents=[common], help="modular vector field and first-class comparison")

    integ = sub.add_parser("integral", parents=[common], help="line integral along a cotangent path")
    integ.add_argument("--path", default="loop")
    integ.add_argument("--field", help="comma-separated vector field components (default: v_mu)")
    return parser


def run(args: argparse.Namespace, config: Config) -> int:
    manifest = Manifest.load(args.manifest)
    steps = args.steps or manifest.steps or config.integrator.steps
    if steps < 1:
        raise UsageError(f"--steps must be >= 1, got {steps}")
    ctx = RunContext(
        seed=args.seed if args.seed is not None else config.sampling.seed,
        points=args.points or config.sampling.points,
        steps=steps,
        low=config.sampling.low,
        high=config.sampling.high,
        tolerance=config.tolerance,
        options={k: v for k, v in vars(args).items() if k not in ("manifest", "command", "seed", "steps", "points")},
    )
    logger.debug(f"{args.command} {manifest.name}: seed {ctx.seed}, {ctx.points} points, {ctx.steps} steps")
    doc = COMMANDS[args.command](manifest, ctx)
    print(doc.to_json(timestamp=not args.no_timestamp))
    return doc.exit_code


def main(argv: Optional[List[str]] = None) -> int:
    """CLI entrypoint."""
    args = build_parser().parse_args(argv)

    config = Config.load(args.config)
    setup_logging(config)
    if not config.validate():
        return EXIT_INPUT
    config.print_config()

    try:
        return run(args, config)
    except (ManifestError, UsageError) as e:
        logger.error(f"❌ {e}")
        return EXIT_INPUT
    except COMPUTATION_ERRORS as e:
        logger.error(f"❌ {args.command} failed: {e}")
        return EXIT_FAILED
    except ValueError as e:
        # expression parse errors raised outside manifest loading (--field)
        logger.error(f"❌ {e}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
