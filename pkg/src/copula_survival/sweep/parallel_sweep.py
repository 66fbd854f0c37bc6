"""
Run the main process of a parallel censoring dependency sweep.

The main process fills a queue with sweep cells, spawns worker processes
with `torch.multiprocessing` and tracks their progress. Each cell owns an
independent seed, so results do not depend on which worker evaluated it;
they are gathered in declaration order once every worker has finished.
"""

import logging
import time
from typing import Any

import torch.multiprocessing as mp
from tqdm import tqdm

from copula_survival.training.train_config import ModelConfig, TrainConfig

from .cell_evaluation import evaluate_sweep_cell, failed_cell_rows
from .parallel_worker import worker_sweep
from .resource_usage_logging import (
    get_available_memory_percent,
    log_system_resources,
)
from .sweep_config import RunStatus, SweepCell, SweepConfig

# Retrieve main process logger
logger = logging.getLogger(__name__)

PROGRESS_POLL_INTERVAL = 0.5


def sort_results(
    results: list[dict[str, Any]],
) -> list[dict[str, Any]]:
    # Declaration order: cell index, then `dep` before `indep`
    return sorted(
        results, key=lambda r: (r["cell_index"], r.get("model", ""))
    )


def run_sweep_serial(
    cells: list[SweepCell],
    sweep_config: SweepConfig,
    model_config: ModelConfig,
    train_config: TrainConfig,
    verbose: int = 0,
) -> dict[RunStatus, list[dict[str, Any]]]:
    results: dict[RunStatus, list[dict[str, Any]]] = {
        RunStatus.SUCCESS: [],
        RunStatus.FAILURE: [],
    }
    for cell in tqdm(cells, desc="Sweep", disable=verbose < 1):
        try:
            runs = evaluate_sweep_cell(
                cell, sweep_config, model_config, train_config
            )
        except Exception as e:
            logger.exception(f"[MAIN] Exception in cell {cell.cell_index}")
            runs = failed_cell_rows(cell, str(e))

        for status, row in runs:
            results[status].append(row)

    return results


def parallel_sweep(
    cells: list[SweepCell],
    sweep_config: SweepConfig,
    model_config: ModelConfig,
    train_config: TrainConfig,
    verbose: int = 0,
) -> dict[RunStatus, list[dict[str, Any]]]:
    """
    Evaluate dependency sweep cells in parallel worker processes.

    With a single process, cells are evaluated in the main process.

    Args:
        cells (list[SweepCell]): The sweep cells to evaluate.
        sweep_config (SweepConfig): The sweep configuration, including the
            number of worker processes.
        model_config (ModelConfig): The model specification.
        train_config (TrainConfig): The training hyperparameters.
        verbose (int): The verbosity level: 0 = no output, 1 = progress bar,
            2 = detailed output.

    Returns:
        dict[RunStatus, list[dict[str, Any]]]: A dictionary mapping run
            statuses to lists of result rows, in declaration order.
    """
    num_processes = min(sweep_config.num_processes, len(cells))
    logger.info(
        f"Starting dependency sweep of {len(cells)} cells with "
        f"{num_processes} processes."
    )
    # Log system resources before starting multiprocessing
    log_system_resources(indent_level=1)

    if num_processes <= 1:
        results = run_sweep_serial(
            cells, sweep_config, model_config, train_config, verbose
        )
    else:
        results = _run_worker_pool(
            cells,
            num_processes,
            sweep_config,
            model_config,
            train_config,
            verbose,
        )

    logger.info("[MAIN] Dependency sweep finished")
    log_system_resources()  # Log system usage after processing

    return {status: sort_results(rows) for status, rows in results.items()}


def _run_worker_pool(
    cells: list[SweepCell],
    num_processes: int,
    sweep_config: SweepConfig,
    model_config: ModelConfig,
    train_config: TrainConfig,
    verbose: int,
) -> dict[RunStatus, list[dict[str, Any]]]:
    cell_queue: mp.Queue = mp.Queue()
    for cell in cells:
        cell_queue.put(cell)

    # Shared memory structures
    manager = mp.Manager()
    successful_results = manager.list()
    failed_results = manager.list()
    lock = mp.Lock()
    progress = mp.Value("i", 0)

    processes: list[mp.Process] = []
    for process_id in range(num_processes):
        p = mp.Process(
            target=worker_sweep,
            args=(
                process_id,
                cell_queue,
                successful_results,
                failed_results,
                lock,
                progress,
                sweep_config,
                model_config,
                train_config,
            ),
        )
        processes.append(p)
        p.start()

        logger.info(f"[MAIN] Created {process_id + 1} processes")

    with tqdm(total=len(cells), disable=verbose < 1) as progress_bar:
        while any(p.is_alive() for p in processes):
            with lock:
                update_progress_bar(
                    progress_bar=progress_bar,
                    progress_value=progress.value,
                    n_successful_runs=len(successful_results),
                    total_runs=2 * len(cells),
                )

            time.sleep(PROGRESS_POLL_INTERVAL)

        progress_bar.n = progress.value
        progress_bar.refresh()

    for p in processes:
        p.join()

    return {
        RunStatus.SUCCESS: list(successful_results),
        RunStatus.FAILURE: list(failed_results),
    }


def update_progress_bar(
    progress_bar: tqdm,
    progress_value: int,
    n_successful_runs: int,
    total_runs: int,
) -> None:
    progress_bar.n = progress_value
    available_mem_percent = get_available_memory_percent()
    progress_bar.desc = (
        f"Progress: {n_successful_runs}/{total_runs} successful runs | "
        f"Available RAM: {available_mem_percent:2.2f}%"
    )

    progress_bar.refresh()
