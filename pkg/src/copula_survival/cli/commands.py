"""
Implementations of the command-line driver's commands.

Every command writes its outputs and a `provenance.json` file (command,
resolved configuration, seed and package version) to its output directory.
"""

import logging
import os
import time

from copula_survival.copulas.archimedean_copula import (
    ArchimedeanCopula,
    copula_from_tau,
    create_copula,
)
from copula_survival.copulas.copula_export import export_copula_data
from copula_survival.datagen.semi_synthetic import induce_semisynthetic
from copula_survival.datagen.synthetic import (
    builtin_specs,
    generate_synthetic,
)
from copula_survival.exceptions import ConfigError, TrainingDivergedError
from copula_survival.likelihood.survival_dataset import SurvivalDataset
from copula_survival.metrics.eval_report import (
    evaluate_model,
    write_calibration_csv,
    write_report,
)
from copula_survival.sweep.parallel_sweep import parallel_sweep
from copula_survival.sweep.results_writer import (
    write_results_to_file,
    write_sweep_csvs,
)
from copula_survival.sweep.sweep_config import build_sweep_cells
from copula_survival.training.checkpoint import (
    load_checkpoint,
    save_checkpoint,
    save_model_bundle,
)
from copula_survival.training.train_config import EpochRecord
from copula_survival.training.trainer import DataSplits, fit
from copula_survival.utilities.data_io import (
    provenance,
    read_covariate_outcome_csv,
    read_dataset_csv,
    write_dataset_csv,
    write_json,
    write_rows_csv,
)

from .command_config import (
    EvaluateConfig,
    ExportConfig,
    GenerateConfig,
    SweepCommandConfig,
    TrainCommandConfig,
    config_to_dict,
    require,
)

logger = logging.getLogger(__name__)

DATASET_FILE = "dataset.csv"
GROUND_TRUTH_CSV_FILE = "ground_truth.csv"
GROUND_TRUTH_FILE = "ground_truth.json"
CHECKPOINT_FILE = "checkpoint.json"
HISTORY_FILE = "history.csv"
REPORT_FILE = "report.json"
CALIBRATION_FILE = "calibration.csv"
PROVENANCE_FILE = "provenance.json"
HISTORY_COLUMNS = EpochRecord._fields


def _generate_copula(config: GenerateConfig) -> ArchimedeanCopula:
    if config.tau is not None:
        return copula_from_tau(config.copula, config.tau)

    return create_copula(config.copula, theta=config.theta, trainable=False)


def cmd_generate(
    config: GenerateConfig, output_dir: str, verbose: int = 0
) -> list[str]:
    """
    Generate a synthetic dataset, or induce censoring on a user CSV file of
    covariates and outcomes when `source_csv` is set.

    Returns:
        list[str]: The paths to the written files.
    """
    if config.source_csv is not None:
        x, y = read_covariate_outcome_csv(config.source_csv)
        dataset, truth = induce_semisynthetic(
            x, y, _generate_copula(config), seed=config.seed
        )
        latents = None
    else:
        spec = builtin_specs(
            n=config.n, seed=config.seed, copula=config.copula, tau=config.tau
        )[config.spec]._replace(theta=config.theta)
        dataset, truth = generate_synthetic(spec)
        latents = (truth.latent_T, truth.latent_U)

    paths = [
        write_dataset_csv(os.path.join(output_dir, DATASET_FILE), dataset)
    ]
    if latents is not None:
        paths.append(
            write_dataset_csv(
                os.path.join(output_dir, GROUND_TRUTH_CSV_FILE),
                dataset,
                *latents,
            )
        )

    paths.append(
        save_model_bundle(
            os.path.join(output_dir, GROUND_TRUTH_FILE), truth.as_model()
        )
    )
    paths.append(
        write_json(
            os.path.join(output_dir, PROVENANCE_FILE),
            provenance("generate", config._asdict(), config.seed),
        )
    )

    if verbose:
        print(
            f"Generated {len(dataset)} records (censoring rate "
            f"{dataset.censoring_rate:.3f}) in {output_dir}"
        )

    return paths


def _write_history(output_dir: str, history: list[EpochRecord]) -> str:
    return write_rows_csv(
        os.path.join(output_dir, HISTORY_FILE),
        [record._asdict() for record in history],
        columns=HISTORY_COLUMNS,
    )


def cmd_train(
    config: TrainCommandConfig, output_dir: str, verbose: int = 0
) -> list[str]:
    """
    Train a survival copula model and write its checkpoint and per-epoch
    history.

    Returns:
        list[str]: The paths to the written files.

    Raises:
        TrainingDivergedError: If training diverges. The history up to the
            divergence is written first.
    """
    dataset = read_dataset_csv(require(config.dataset, "dataset"))
    provenance_path = write_json(
        os.path.join(output_dir, PROVENANCE_FILE),
        provenance("train", config_to_dict(config), config.training.seed),
    )

    try:
        result = fit(dataset, config.model, config.training, verbose=verbose)
    except TrainingDivergedError as e:
        _write_history(output_dir, e.history)
        raise

    paths = [
        provenance_path,
        save_checkpoint(
            os.path.join(output_dir, CHECKPOINT_FILE),
            result,
            config.model,
            config.training,
        ),
        _write_history(output_dir, result.state.history),
    ]

    if verbose:
        print(
            f"Best validation log-likelihood {result.state.best_val_ll:.6f} "
            f"at epoch {result.state.best_epoch}"
        )

    return paths


def _evaluation_records(
    config: EvaluateConfig,
    dataset: SurvivalDataset,
    splits: DataSplits | None,
) -> SurvivalDataset:
    if config.split == "all" or splits is None:
        return dataset

    test_indices = splits.test
    if len(test_indices) and int(test_indices.max()) >= len(dataset):
        raise ConfigError(
            "The checkpoint's test split does not match the dataset."
        )

    return dataset.subset(test_indices)


def cmd_evaluate(
    config: EvaluateConfig, output_dir: str, verbose: int = 0
) -> list[str]:
    """
    Evaluate a checkpoint and write the report and calibration data.

    Without an explicit ground truth, a `ground_truth.json` file next to the
    dataset is used when present; otherwise Survival-l1 is omitted.

    Returns:
        list[str]: The paths to the written files.
    """
    checkpoint = load_checkpoint(require(config.checkpoint, "checkpoint"))
    dataset_path = require(config.dataset, "dataset")
    dataset = _evaluation_records(
        config, read_dataset_csv(dataset_path), checkpoint.splits
    )

    ground_truth_path = config.ground_truth
    if ground_truth_path is None:
        candidate = os.path.join(
            os.path.dirname(dataset_path), GROUND_TRUTH_FILE
        )
        ground_truth_path = candidate if os.path.exists(candidate) else None

    truth = (
        load_checkpoint(ground_truth_path).model
        if ground_truth_path is not None
        else None
    )

    report = evaluate_model(
        checkpoint.model,
        dataset,
        truth=truth,
        bins=config.bins,
        grid_size=config.grid_size,
        tau_samples=config.tau_samples,
        seed=config.seed,
    )

    paths = [
        write_report(report, os.path.join(output_dir, REPORT_FILE)),
        write_calibration_csv(
            report, os.path.join(output_dir, CALIBRATION_FILE)
        ),
        write_json(
            os.path.join(output_dir, PROVENANCE_FILE),
            provenance(
                "evaluate",
                {**config._asdict(), "ground_truth": ground_truth_path},
                config.seed,
            ),
        ),
    ]

    if verbose:
        print(f"Evaluated {report.num_records} records")
        if report.survival_l1 is not None:
            print(f"  Survival-l1: {report.survival_l1:.6f}")
        for note in report.notes:
            print(f"  {note}")

    return paths


def cmd_sweep(
    config: SweepCommandConfig, output_dir: str, verbose: int = 0
) -> list[str]:
    """
    Run a censoring dependency sweep and write the per-run table, the
    summary table and a text report.

    Returns:
        list[str]: The paths to the written files.
    """
    start_time = time.time()
    cells = build_sweep_cells(config.sweep)

    if verbose:
        print(
            f"Sweeping {len(cells)} cells with "
            f"{config.sweep.num_processes} processes"
        )

    results = parallel_sweep(
        cells, config.sweep, config.model, config.training, verbose=verbose
    )
    elapsed_time = time.time() - start_time

    runs_path, summary_path = write_sweep_csvs(output_dir, results)
    report_path = write_results_to_file(
        output_dir=output_dir,
        elapsed_time=elapsed_time,
        num_processes=config.sweep.num_processes,
        sweep_config=config.sweep,
        model_config=config.model,
        train_config=config.training,
        results=results,
        file_name="sweep_report.txt",
    )

    return [
        runs_path,
        summary_path,
        report_path,
        write_json(
            os.path.join(output_dir, PROVENANCE_FILE),
            provenance("sweep", config_to_dict(config), config.sweep.seed),
        ),
    ]


def cmd_export_copula(
    config: ExportConfig, output_dir: str, verbose: int = 0
) -> list[str]:
    """
    Export the CDF grid, log-density grid and scatter sample of a trained
    copula, and of the ground-truth copula when one is given.

    Returns:
        list[str]: The paths to the written files.
    """
    sources = [("learned", require(config.checkpoint, "checkpoint"))]
    if config.ground_truth is not None:
        sources.append(("ground_truth", config.ground_truth))

    paths = []
    for prefix, path in sources:
        copula = load_checkpoint(path).model.copula
        paths.extend(
            export_copula_data(
                copula,
                output_dir,
                prefix,
                resolution=config.resolution,
                num_samples=config.samples,
                seed=config.seed,
            )
        )

        if verbose > 1:
            print(f"  Exported `{copula.family}` copula data from {path}")

    paths.append(
        write_json(
            os.path.join(output_dir, PROVENANCE_FILE),
            provenance("export-copula", config._asdict(), config.seed),
        )
    )

    return paths
