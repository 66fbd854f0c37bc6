"""
Command-line driver for dependent-censoring survival analysis with learned
Archimedean copulas.

Commands:

- `generate`: Generate a synthetic dataset (Linear-Risk or Nonlinear-Risk)
  with a controlled censoring dependency, or induce dependent censoring on a
  user CSV file of covariates and outcomes (semi-synthetic data).
- `train`: Train a survival copula model by maximizing the censored
  log-likelihood, writing a checkpoint and the per-epoch history.
- `evaluate`: Evaluate a checkpoint (calibration, Kendall's tau, test
  log-likelihood and, when a ground truth is available, Survival-l1).
- `sweep`: Compare dependent and independent training over a grid of
  copula families and Kendall's tau values.
- `export-copula`: Export CDF, log-density and scatter data of a trained
  (and optionally the ground-truth) copula for plotting.

Every command accepts a YAML or JSON configuration file (`--config`);
command-line flags override its values. Exit codes: 0 on success, 2 on
configuration errors, 3 on I/O errors and 4 on numerical failures.
"""

import argparse
import logging
import os
import sys
from collections.abc import Callable, Sequence
from typing import Any

import numpy as np
import torch

from copula_survival.exceptions import ConfigError, NumericalError

from .command_config import (
    build_evaluate_config,
    build_export_config,
    build_generate_config,
    build_sweep_config,
    build_train_config,
    load_raw_config,
    resolve_output_dir,
)
from .commands import (
    cmd_evaluate,
    cmd_export_copula,
    cmd_generate,
    cmd_sweep,
    cmd_train,
)

logger = logging.getLogger()

EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_IO_ERROR = 3
EXIT_NUMERICAL_ERROR = 4


def configure_logging(log_path: str, debug: bool) -> None:
    os.makedirs(os.path.dirname(log_path) or ".", exist_ok=True)
    logging.basicConfig(
        filename=log_path,
        level=logging.DEBUG,
        format="%(asctime)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
        force=True,
    )

    if not debug:
        disable_debug_logging()


def disable_debug_logging() -> None:
    """Disable logging from child loggers."""
    logger.info(
        "Debug logging is disabled. Run with the `--debug` argument to "
        "enable it."
    )

    for handler in logger.handlers:
        handler.setLevel(logging.CRITICAL + 1)


def _add_common_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--config",
        type=str,
        default=None,
        help="The path to a YAML or JSON configuration file.",
    )
    parser.add_argument(
        "--output-dir",
        type=str,
        default=None,
        help="The output directory. Defaults to `<root>/<command>`, where "
        "the root is read from `COPULA_SURVIVAL_OUTPUT_DIR` (default "
        "`logs`).",
    )
    parser.add_argument(
        "--seed",
        type=int,
        default=None,
        help="The Random Number Generator seed for reproducibility.",
    )
    parser.add_argument(
        "--verbose",
        type=int,
        default=1,
        choices=[0, 1, 2],
        help="The verbosity level: 0 = no output, 1 = minimal output, 2 = "
        "detailed output.",
    )
    parser.add_argument(
        "--debug",
        action="store_true",
        help="Enable debugging logging.",
    )


def _add_training_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--max-epochs", type=int, default=None)
    parser.add_argument("--batch-size", type=int, default=None)
    parser.add_argument("--learning-rate", type=float, default=None)
    parser.add_argument("--patience", type=int, default=None)


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="copula-survival",
        description="Survival analysis under dependent censoring with "
        "learned Archimedean copulas",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    generate = subparsers.add_parser(
        "generate", help="Generate a synthetic or semi-synthetic dataset."
    )
    _add_common_args(generate)
    generate.add_argument(
        "--spec",
        type=str,
        default=None,
        help="The built-in dataset: `linear-risk` or `nonlinear-risk`.",
    )
    generate.add_argument("--copula", type=str, default=None)
    generate.add_argument("--tau", type=float, default=None)
    generate.add_argument("--theta", type=float, default=None)
    generate.add_argument("--n", type=int, default=None)
    generate.add_argument(
        "--source-csv",
        type=str,
        default=None,
        help="A CSV file of covariates with the outcome in the last column. "
        "If set, censoring is induced on it (semi-synthetic data).",
    )

    train = subparsers.add_parser("train", help="Train a model.")
    _add_common_args(train)
    train.add_argument("--dataset", type=str, default=None)
    train.add_argument(
        "--copula",
        type=str,
        default=None,
        help="The model copula: `network`, `clayton`, `frank`, `gumbel` or "
        "`independence`.",
    )
    train.add_argument("--marginal", type=str, default=None)
    train.add_argument("--risk", type=str, default=None)
    train.add_argument(
        "--objective", type=str, default=None, choices=["dep", "indep"]
    )
    _add_training_args(train)

    evaluate = subparsers.add_parser(
        "evaluate", help="Evaluate a trained model."
    )
    _add_common_args(evaluate)
    evaluate.add_argument("--checkpoint", type=str, default=None)
    evaluate.add_argument("--dataset", type=str, default=None)
    evaluate.add_argument("--ground-truth", type=str, default=None)
    evaluate.add_argument(
        "--split", type=str, default=None, choices=["test", "all"]
    )
    evaluate.add_argument("--bins", type=int, default=None)
    evaluate.add_argument("--grid-size", type=int, default=None)

    sweep = subparsers.add_parser(
        "sweep", help="Run a censoring dependency sweep."
    )
    _add_common_args(sweep)
    sweep.add_argument("--spec", type=str, default=None)
    sweep.add_argument("--families", type=str, nargs="+", default=None)
    sweep.add_argument("--taus", type=float, nargs="+", default=None)
    sweep.add_argument("--repeats", type=int, default=None)
    sweep.add_argument("--n", type=int, default=None)
    sweep.add_argument(
        "--num-processes",
        type=int,
        default=None,
        help="The number of processes used for parallelization.",
    )
    _add_training_args(sweep)

    export = subparsers.add_parser(
        "export-copula", help="Export copula plot data."
    )
    _add_common_args(export)
    export.add_argument("--checkpoint", type=str, default=None)
    export.add_argument("--ground-truth", type=str, default=None)
    export.add_argument("--resolution", type=int, default=None)
    export.add_argument("--samples", type=int, default=None)

    return parser.parse_args(argv)


def _training_overrides(args: argparse.Namespace) -> dict[str, Any]:
    return {
        "max_epochs": args.max_epochs,
        "batch_size": args.batch_size,
        "learning_rate": args.learning_rate,
        "patience": args.patience,
        "seed": args.seed,
    }


def _run_generate(args: argparse.Namespace, raw: dict[str, Any]) -> Any:
    config = build_generate_config(
        raw,
        {
            "spec": args.spec,
            "copula": args.copula,
            "tau": args.tau,
            "theta": args.theta,
            "n": args.n,
            "seed": args.seed,
            "source_csv": args.source_csv,
            "output_dir": args.output_dir,
        },
    )
    return config, cmd_generate


def _run_train(args: argparse.Namespace, raw: dict[str, Any]) -> Any:
    config = build_train_config(
        raw,
        {"dataset": args.dataset, "output_dir": args.output_dir},
        {"copula": args.copula, "marginal": args.marginal, "risk": args.risk},
        {**_training_overrides(args), "objective": args.objective},
    )
    return config, cmd_train


def _run_evaluate(args: argparse.Namespace, raw: dict[str, Any]) -> Any:
    config = build_evaluate_config(
        raw,
        {
            "checkpoint": args.checkpoint,
            "dataset": args.dataset,
            "ground_truth": args.ground_truth,
            "split": args.split,
            "bins": args.bins,
            "grid_size": args.grid_size,
            "seed": args.seed,
            "output_dir": args.output_dir,
        },
    )
    return config, cmd_evaluate


def _run_sweep(args: argparse.Namespace, raw: dict[str, Any]) -> Any:
    config = build_sweep_config(
        raw,
        {"output_dir": args.output_dir},
        {
            "spec": args.spec,
            "families": args.families,
            "taus": args.taus,
            "repeats": args.repeats,
            "n": args.n,
            "num_processes": args.num_processes,
            "seed": args.seed,
        },
        _training_overrides(args),
    )
    return config, cmd_sweep


def _run_export(args: argparse.Namespace, raw: dict[str, Any]) -> Any:
    config = build_export_config(
        raw,
        {
            "checkpoint": args.checkpoint,
            "ground_truth": args.ground_truth,
            "resolution": args.resolution,
            "samples": args.samples,
            "seed": args.seed,
            "output_dir": args.output_dir,
        },
    )
    return config, cmd_export_copula


COMMAND_BUILDERS: dict[
    str, Callable[[argparse.Namespace, dict[str, Any]], Any]
] = {
    "generate": _run_generate,
    "train": _run_train,
    "evaluate": _run_evaluate,
    "sweep": _run_sweep,
    "export-copula": _run_export,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = parse_args(argv)
    command = args.command
    verbose = args.verbose

    try:
        raw = load_raw_config(args.config)
        config, run_command = COMMAND_BUILDERS[command](args, raw)
        output_dir = resolve_output_dir(config.output_dir, command)

        os.makedirs(output_dir, exist_ok=True)
        log_path = os.path.join(output_dir, f"{command}.log")
        configure_logging(log_path, args.debug)

        if verbose and args.debug:
            print("Debug logging enabled")
            print(f"  Logging debug output to: {log_path}")

        logger.info(f"[CLI] Running `{command}` with config: {config}")

        # Seed global generators; every command also seeds its own
        if args.seed is not None:
            torch.manual_seed(args.seed)
            np.random.seed(args.seed)

        paths = run_command(config, output_dir, verbose)

    except ConfigError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR

    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO_ERROR

    except NumericalError as e:
        logger.exception(f"[CLI] Numerical failure in `{command}`")
        print(f"Numerical error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL_ERROR

    except ValueError as e:
        print(f"Invalid input: {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR

    if verbose > 1:
        for path in paths:
            print(f"  Wrote {path}")

    logger.info(f"[CLI] `{command}` finished")

    return EXIT_OK


def main_entry() -> None:
    sys.exit(main())
