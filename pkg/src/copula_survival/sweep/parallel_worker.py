"""
Worker process for a parallel dependency sweep.

Each worker takes sweep cells from a shared queue, evaluates them
independently and stores the result rows in shared lists based on their
outcome. Workers terminate when no cells remain.
"""

import logging
from multiprocessing.managers import ListProxy
from multiprocessing.sharedctypes import Synchronized
from multiprocessing.synchronize import Lock
from queue import Empty

import torch
import torch.multiprocessing as mp

from copula_survival.training.train_config import ModelConfig, TrainConfig

from .cell_evaluation import evaluate_sweep_cell, failed_cell_rows
from .sweep_config import RunStatus, SweepCell, SweepConfig

# Retrieve main process logger
logger = logging.getLogger(__name__)


def worker_sweep(
    process_id: int,
    cell_queue: mp.Queue,
    successful_results: ListProxy,
    failed_results: ListProxy,
    lock: Lock,
    progress: Synchronized,
    sweep_config: SweepConfig,
    model_config: ModelConfig,
    train_config: TrainConfig,
) -> None:
    """
    Parallel worker process that evaluates dependency sweep cells.

    Args:
        process_id (int): The ID of this process, assigned by the main
            process.
        cell_queue (mp.Queue): The queue that contains the sweep cells to
            evaluate.
        successful_results (ListProxy): A shared list used for storing result
            rows of successful training runs.
        failed_results (ListProxy): A shared list used for storing result
            rows of failed training runs.
        lock (Lock): A lock used for synchronizing access to result lists.
        progress (Synchronized): The shared count of finished runs.
        sweep_config (SweepConfig): The sweep configuration.
        model_config (ModelConfig): The model specification.
        train_config (TrainConfig): The training hyperparameters.
    """
    logger.info(f"[Worker] Process {process_id} started")

    # Cells are the unit of parallelism
    torch.set_num_threads(1)

    while True:
        try:
            cell: SweepCell = cell_queue.get(timeout=1)
        except Empty:
            logger.info(f"[Worker] Process {process_id} found no more cells.")
            break

        logger.info(
            f"[Worker] Process {process_id} evaluating cell: "
            f"{cell._asdict()}."
        )

        try:
            runs = evaluate_sweep_cell(
                cell, sweep_config, model_config, train_config
            )
        except Exception as e:
            logger.exception(f"[Worker] Exception in process {process_id}")
            runs = failed_cell_rows(cell, str(e))

        with lock:
            for status, row in runs:
                if status == RunStatus.SUCCESS:
                    successful_results.append(row)
                else:
                    failed_results.append(row)

        with progress.get_lock():
            progress.value += 1

    logger.info(f"[Worker] ----- Process {process_id} finished -----")
