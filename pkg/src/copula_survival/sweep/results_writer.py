"""
File writing utilities for dependency sweep results.

This module writes the per-run result table, the per-cell summary table
(mean and standard deviation of Survival-l1 over repeats) and a readable
text report of the sweep configuration and results.
"""

import math
import os
from datetime import datetime
from typing import Any, Callable, NamedTuple, TextIO

import pandas as pd

from copula_survival.likelihood.survival_model import Objective
from copula_survival.training.train_config import ModelConfig, TrainConfig
from copula_survival.utilities.data_io import write_rows_csv

from .cell_evaluation import RUN_COLUMNS
from .sweep_config import RunStatus, SweepConfig

SUMMARY_GROUP_COLUMNS = ["family", "tau", "model"]
SUMMARY_COLUMNS = (
    "family",
    "tau",
    "model",
    "mean_survival_l1",
    "std_survival_l1",
    "num_runs",
)


def all_runs(
    results: dict[RunStatus, list[dict[str, Any]]],
) -> list[dict[str, Any]]:
    rows = [row for rows in results.values() for row in rows]

    return sorted(
        rows, key=lambda r: (r["cell_index"], r.get("model", ""))
    )


def summarize_runs(
    results: dict[RunStatus, list[dict[str, Any]]],
) -> list[dict[str, Any]]:
    """
    Aggregate Survival-l1 over repeats for every (family, tau, model).

    Failed runs count towards `num_runs` but not towards the statistics.

    Returns:
        list[dict[str, Any]]: The summary rows, in declaration order.
    """
    frame = pd.DataFrame(all_runs(results), columns=list(RUN_COLUMNS))
    if frame.empty:
        return []

    grouped = frame.groupby(SUMMARY_GROUP_COLUMNS, sort=False)[
        "survival_l1"
    ]
    summary = pd.DataFrame(
        {
            "mean_survival_l1": grouped.mean(),
            "std_survival_l1": grouped.std(ddof=0),
            "num_runs": grouped.size(),
        }
    ).reset_index()

    return [
        {column: row[column] for column in SUMMARY_COLUMNS}
        for row in summary.to_dict("records")
    ]


def write_sweep_csvs(
    output_dir: str, results: dict[RunStatus, list[dict[str, Any]]]
) -> tuple[str, str]:
    """
    Write the per-run and summary result tables of a dependency sweep.

    Returns:
        tuple[str, str]: The paths to the per-run and summary CSV files.
    """
    runs_path = write_rows_csv(
        os.path.join(output_dir, "sweep_runs.csv"),
        all_runs(results),
        columns=RUN_COLUMNS,
    )
    summary_path = write_rows_csv(
        os.path.join(output_dir, "sweep_summary.csv"),
        summarize_runs(results),
        columns=SUMMARY_COLUMNS,
    )

    return runs_path, summary_path


def write_results_to_file(
    output_dir: str,
    elapsed_time: float,
    num_processes: int,
    sweep_config: SweepConfig,
    model_config: ModelConfig,
    train_config: TrainConfig,
    results: dict[RunStatus, list[dict[str, Any]]],
    file_name: str | None = None,
) -> str:
    """
    Write a complete report of the results and configurations of a
    dependency sweep to a file.

    Args:
        output_dir (str): The directory to save the report.
        elapsed_time (float): The sweep duration in seconds.
        num_processes (int): The number of parallel worker processes.
        sweep_config (SweepConfig): The sweep configuration.
        model_config (ModelConfig): The model specification.
        train_config (TrainConfig): The training hyperparameters.
        results (dict[RunStatus, list[dict[str, Any]]]): A dictionary
            mapping run statuses to lists of result rows.
        file_name (str | None): The name of the output file. If `None`, a
            timestamped file name will be used.

    Returns:
        str: The full path to the saved report file.
    """
    os.makedirs(output_dir, exist_ok=True)

    timestamp = datetime.now()
    if file_name is None:
        name_timestamp = timestamp.strftime("%Y%m%d_%H%M%S")
        file_name = f"sweep_report_{name_timestamp}.txt"

    output_file = os.path.join(output_dir, file_name)

    with open(output_file, "w") as f:
        report_timestamp = timestamp.strftime("%Y-%m-%d %H:%M:%S")
        f.write(f"Report generated at: {report_timestamp}\n\n")

        hours, remaining = divmod(elapsed_time, 3600)
        minutes, seconds = divmod(remaining, 60)
        f.write(
            f"Sweep duration: {int(hours)}h {int(minutes)}m "
            f"{seconds:.2f}s\n"
        )
        f.write(f"Number of parallel processes: {num_processes}\n")
        f.write("\n")

        for title, params in (
            ("Sweep parameters", sweep_config),
            ("Model parameters", model_config),
            ("Training parameters", train_config),
        ):
            f.write(f"{title}:\n")
            write_params_to_file(f, params)
            f.write("\n")

        num_cells = (
            len(sweep_config.families)
            * len(sweep_config.taus)
            * sweep_config.repeats
        )
        f.write("Sweep summary:\n")
        f.write(f"  Total cells: {num_cells}\n")
        f.write(f"  Training runs per cell: {len(Objective)}\n")
        f.write("\n")

        f.write("Survival-l1 by family, tau and model:\n")
        for row in summarize_runs(results):
            f.write(f"  {format_result_dict(row)}\n")
        f.write("\n")

        total_runs = sum(len(v) for v in results.values())
        write_result_section(
            f=f,
            title="Successful Runs",
            result_list=results.get(RunStatus.SUCCESS, []),
            total_runs=total_runs,
            sort_key=lambda r: (r["cell_index"], r["model"]),
        )
        f.write("\n")

        write_result_section(
            f=f,
            title="Failed Runs",
            result_list=results.get(RunStatus.FAILURE, []),
            total_runs=total_runs,
            sort_key=lambda r: r["cell_index"],
        )

    return output_file


def write_params_to_file(f: TextIO, params: NamedTuple) -> None:
    for key, value in params._asdict().items():
        f.write(f"  {key}: {value}\n")


def write_result_section(
    f: TextIO,
    title: str,
    result_list: list[dict[str, Any]],
    total_runs: int,
    sort_key: Callable[[dict[str, Any]], Any],
) -> None:
    """
    Write a formatted section of sorted sweep results to a file.

    Args:
        f (TextIO): The file object to write to.
        title (str): The result section title (e.g., "Successful Runs").
        result_list (list[dict[str, Any]]): A list of result rows.
        total_runs (int): The total number of training runs.
        sort_key (Callable): The key function for sorting the result list.
    """
    sorted_results = sorted(result_list, key=sort_key)

    f.write(f"{title} ({len(sorted_results)}/{total_runs}):\n")

    if not sorted_results:
        f.write("  No runs.\n")
    else:
        for result in sorted_results:
            f.write(f"  {format_result_dict(result)}\n")


def format_result_dict(result: dict[str, Any]) -> str:
    formatted = {}
    for key, value in result.items():
        if isinstance(value, float) and math.isnan(value):
            formatted[key] = "NaN"
        elif isinstance(value, str):
            formatted[key] = f'"{value}"'
        else:
            formatted[key] = value

    return ", ".join(f"{key}={value}" for key, value in formatted.items())
