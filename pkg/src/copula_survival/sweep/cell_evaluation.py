"""
Evaluation of a single dependency sweep cell.

A cell generates a synthetic dataset whose censoring dependency follows the
cell's copula family and Kendall's tau, then trains two models on it: one
with the dependent-censoring objective and a learned copula, and one with
the independent-censoring objective. Both are scored by Survival-l1 against
the generating event marginal on the test split.
"""

import logging
import math
from typing import Any

from copula_survival.datagen.synthetic import (
    builtin_specs,
    generate_synthetic,
)
from copula_survival.exceptions import NumericalError
from copula_survival.likelihood.survival_model import Objective
from copula_survival.metrics.survival_metrics import survival_l1
from copula_survival.training.train_config import ModelConfig, TrainConfig
from copula_survival.training.trainer import fit

from .sweep_config import RunStatus, SweepCell, SweepConfig

logger = logging.getLogger(__name__)

RUN_COLUMNS = (
    "cell_index",
    "family",
    "tau",
    "repeat",
    "seed",
    "model",
    "survival_l1",
    "best_epoch",
    "censoring_rate",
    "status",
    "error",
)


def evaluate_sweep_cell(
    cell: SweepCell,
    sweep_config: SweepConfig,
    model_config: ModelConfig,
    train_config: TrainConfig,
) -> list[tuple[RunStatus, dict[str, Any]]]:
    """
    Generate the dataset of a sweep cell, train the dependent and the
    independent model on it and score both.

    Args:
        cell (SweepCell): The sweep cell.
        sweep_config (SweepConfig): The sweep configuration.
        model_config (ModelConfig): The model specification of the
            dependent model.
        train_config (TrainConfig): The training hyperparameters. The
            objective and seed are set per run.

    Returns:
        list[tuple[RunStatus, dict[str, Any]]]: One status and result row
            per trained model (`dep`, then `indep`).
    """
    # Covariate coefficients are shared by every cell of the sweep
    spec = builtin_specs(n=sweep_config.n, seed=sweep_config.seed)[
        sweep_config.spec
    ]
    spec = spec._replace(copula=cell.family, tau=cell.tau, seed=cell.seed)
    dataset, truth = generate_synthetic(spec)

    runs = []
    for objective in Objective:
        row: dict[str, Any] = {
            **cell._asdict(),
            "model": objective.value,
            "censoring_rate": dataset.censoring_rate,
        }
        try:
            result = fit(
                dataset,
                model_config,
                train_config._replace(
                    objective=objective.value, seed=cell.seed
                ),
            )
            test_data = dataset.subset(result.splits.test)
            row["survival_l1"] = survival_l1(
                truth.event_marginal,
                result.model.event_marginal,
                test_data,
                grid_size=sweep_config.grid_size,
            )
            row["best_epoch"] = result.state.best_epoch
            row["status"] = RunStatus.SUCCESS.name
            row["error"] = ""
            runs.append((RunStatus.SUCCESS, row))

        except NumericalError as e:
            logger.error(
                f"Sweep cell {cell.cell_index} ({objective.value}) failed: "
                f"{e}"
            )
            row.update(
                survival_l1=math.nan,
                best_epoch=0,
                status=RunStatus.FAILURE.name,
                error=str(e),
            )
            runs.append((RunStatus.FAILURE, row))

    return runs


def failed_cell_rows(
    cell: SweepCell, error: str
) -> list[tuple[RunStatus, dict[str, Any]]]:
    # Rows for a cell whose evaluation raised before any model was scored
    return [
        (
            RunStatus.FAILURE,
            {
                **cell._asdict(),
                "model": objective.value,
                "survival_l1": math.nan,
                "best_epoch": 0,
                "censoring_rate": math.nan,
                "status": RunStatus.FAILURE.name,
                "error": error,
            },
        )
        for objective in Objective
    ]
