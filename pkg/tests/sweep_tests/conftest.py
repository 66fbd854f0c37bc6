import math
from typing import Any

import pytest

from copula_survival.sweep.sweep_config import (
    RunStatus,
    SweepCell,
    SweepConfig,
)


def make_run_row(
    cell: SweepCell,
    model: str,
    value: float,
    status: RunStatus,
    error: str = "",
) -> dict[str, Any]:
    return {
        **cell._asdict(),
        "model": model,
        "survival_l1": value,
        "best_epoch": 0 if math.isnan(value) else 2,
        "censoring_rate": 0.4,
        "status": status.name,
        "error": error,
    }


@pytest.fixture
def test_sweep_config() -> SweepConfig:
    return SweepConfig(
        families=["clayton", "frank"],
        taus=[0.0, 0.5],
        repeats=2,
        n=200,
        seed=3,
        grid_size=50,
    )


@pytest.fixture
def test_cell() -> SweepCell:
    return SweepCell(
        cell_index=0, family="clayton", tau=0.5, repeat=0, seed=11
    )


@pytest.fixture
def test_results() -> dict[RunStatus, list[dict[str, Any]]]:
    cells = [
        SweepCell(
            cell_index=i, family="clayton", tau=0.5, repeat=i, seed=i
        )
        for i in range(2)
    ]

    return {
        RunStatus.SUCCESS: [
            make_run_row(cells[1], "indep", 0.3, RunStatus.SUCCESS),
            make_run_row(cells[0], "dep", 0.1, RunStatus.SUCCESS),
            make_run_row(cells[1], "dep", 0.2, RunStatus.SUCCESS),
        ],
        RunStatus.FAILURE: [
            make_run_row(
                cells[0],
                "indep",
                math.nan,
                RunStatus.FAILURE,
                error="Non-finite log-likelihood.",
            ),
        ],
    }
