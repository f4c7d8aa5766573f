import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from ebayes.errors import UsageError
from ebayes.harness import name_to_experiment, run
from ebayes.harness.config import build_config, load_config
from ebayes.harness.models import ExperimentConfig
from ebayes.harness.report import write_report

logger = logging.getLogger("ebayes.cli")

VERIFY_ALL = "verify-all"
VERIFY_SUITES = ("lemma-suite", "bridge-suite", "test-errors")

EXIT_OK = 0
EXIT_FAILURES = 1
EXIT_USAGE = 2


def _epilog() -> str:
    lines = ["experiments and their CSV columns (after 'replicate', before 'error'):"]
    for name, experiment in name_to_experiment.items():
        lines.append(f"  {name}: {experiment.description}")
        lines.append(f"      {','.join(experiment.columns)}")
    lines.append(f"  {VERIFY_ALL}: runs {', '.join(VERIFY_SUITES)} with their default parameters")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ebayes-lab",
        description="Run empirical Bayes experiments and numeric lemma checks.",
        epilog=_epilog(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("experiment", choices=[*name_to_experiment, VERIFY_ALL])
    parser.add_argument("--config", default=None, help="Flat 'key = value' configuration file.")
    parser.add_argument("--out-dir", default=None, help="Output directory (default: the config's out_dir or 'results').")
    parser.add_argument("--seed", type=int, default=None, help="Master seed, overrides the config.")
    parser.add_argument("--replicates", type=int, default=None, help="Number of replicates, overrides the config.")
    parser.add_argument("--workers", type=int, default=None, help="Parallel workers over replicates.")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true", help="Log debug messages.")
    verbosity.add_argument("--quiet", action="store_true", help="Log warnings and errors only.")
    return parser


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)


def configure_logging(args: argparse.Namespace) -> None:
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, stream=sys.stderr, format="%(asctime)s %(levelname)s %(name)s: %(message)s", force=True)


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    """
    Builds the configuration of a single experiment from the config file and the command-line overrides.

    Raises:
        UsageError: If the config file names a different experiment or is malformed.
        FileNotFoundError: If the config file does not exist.
    """
    overrides = {"seed": args.seed, "replicates": args.replicates, "workers": args.workers, "out_dir": args.out_dir}
    if args.config is None:
        return build_config({"experiment": args.experiment}, **overrides)
    cfg = load_config(args.config, **overrides)
    if cfg.experiment != args.experiment:
        raise UsageError(f"{args.config} configures {cfg.experiment!r}, not {args.experiment!r}.")
    return cfg


def run_and_write(cfg: ExperimentConfig) -> int:
    report = run(cfg)
    for path in write_report(report, Path(cfg.out_dir)):
        logger.info("wrote %s", path)
    if not report.passed:
        logger.warning("%s finished with failures: replicates %s, all_passed=%s", cfg.experiment, report.failures, report.summary.get("all_passed"))
        return EXIT_FAILURES
    return EXIT_OK


def verify_all(args: argparse.Namespace) -> int:
    if args.config is not None:
        raise UsageError(f"{VERIFY_ALL} runs the default configurations and takes no --config.")
    codes = []
    for name in VERIFY_SUITES:
        cfg = build_config({"experiment": name}, seed=args.seed, replicates=args.replicates, workers=args.workers, out_dir=args.out_dir)
        codes.append(run_and_write(cfg))
    return max(codes)


def main(argv: Optional[List[str]] = None) -> int:
    args = parse_args(argv)
    configure_logging(args)
    try:
        if args.experiment == VERIFY_ALL:
            return verify_all(args)
        return run_and_write(resolve_config(args))
    except (UsageError, FileNotFoundError) as exc:
        logger.error("%s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
