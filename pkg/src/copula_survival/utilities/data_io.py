"""
CSV and JSON file helpers for datasets, ground truths and reports.

Dataset CSV files have a header with the columns `x_0, ..., x_{d-1}, time,
event`; ground-truth CSV files add `latent_T` and `latent_U`. Floats are
written with 17 significant digits so files round-trip exactly and repeated
runs produce byte-identical output.
"""

import json
import os
from collections.abc import Sequence
from importlib import metadata
from typing import Any

import pandas as pd
import torch

from copula_survival.likelihood.survival_dataset import SurvivalDataset

FLOAT_FORMAT = "%.17g"
TIME_COLUMN = "time"
EVENT_COLUMN = "event"
COVARIATE_PREFIX = "x_"
PACKAGE_NAME = "copula-survival"


def ensure_parent_dir(path: str) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)


def dataset_to_frame(dataset: SurvivalDataset) -> pd.DataFrame:
    frame = pd.DataFrame(
        dataset.x.numpy(),
        columns=[
            f"{COVARIATE_PREFIX}{i}" for i in range(dataset.covariate_dim)
        ],
    )
    frame[TIME_COLUMN] = dataset.t.numpy()
    frame[EVENT_COLUMN] = dataset.delta.numpy().astype(int)

    return frame


def write_dataset_csv(
    path: str,
    dataset: SurvivalDataset,
    latent_T: torch.Tensor | None = None,
    latent_U: torch.Tensor | None = None,
) -> str:
    """
    Write a dataset to a CSV file, optionally with the latent event and
    censoring times of a synthetic ground truth.

    Returns:
        str: The path to the written file.
    """
    frame = dataset_to_frame(dataset)
    if latent_T is not None and latent_U is not None:
        frame["latent_T"] = latent_T.detach().numpy()
        frame["latent_U"] = latent_U.detach().numpy()

    ensure_parent_dir(path)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)

    return path


def _non_numeric_lines(frame: pd.DataFrame) -> list[int]:
    numeric = frame.apply(pd.to_numeric, errors="coerce")
    bad_rows = numeric.isna().any(axis=1)

    # Line 1 is the header
    return [int(index) + 2 for index in frame.index[bad_rows]]


def _read_numeric_csv(path: str) -> pd.DataFrame:
    frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    bad_lines = _non_numeric_lines(frame)
    if bad_lines:
        raise ValueError(
            f"`{path}` has missing or non-numeric values on line(s) "
            f"{', '.join(str(line) for line in bad_lines)}."
        )

    return frame.apply(pd.to_numeric)


def read_dataset_csv(path: str) -> SurvivalDataset:
    """
    Read a dataset CSV written by `write_dataset_csv`.

    Raises:
        OSError: If the file cannot be read.
        ValueError: If required columns are missing or any row holds
            non-numeric values.
    """
    frame = _read_numeric_csv(path)

    missing = [
        column
        for column in (TIME_COLUMN, EVENT_COLUMN)
        if column not in frame.columns
    ]
    if missing:
        raise ValueError(
            f"`{path}` is missing column(s): {', '.join(missing)}."
        )

    covariate_columns = sorted(
        (c for c in frame.columns if c.startswith(COVARIATE_PREFIX)),
        key=lambda c: int(c[len(COVARIATE_PREFIX) :]),
    )
    if not covariate_columns:
        raise ValueError(f"`{path}` has no covariate columns.")

    return SurvivalDataset(
        x=torch.from_numpy(
            frame[covariate_columns].to_numpy(dtype="float64")
        ),
        t=torch.from_numpy(frame[TIME_COLUMN].to_numpy(dtype="float64")),
        delta=torch.from_numpy(
            frame[EVENT_COLUMN].to_numpy(dtype="float64")
        ),
    )


def read_covariate_outcome_csv(
    path: str,
) -> tuple[torch.Tensor, torch.Tensor]:
    """
    Read a headed CSV file of numeric covariates followed by an outcome in
    the last column.

    Args:
        path (str): The CSV file path.

    Returns:
        tuple[torch.Tensor, torch.Tensor]: The covariates, with shape
            `(n, d)`, and the outcomes, with shape `(n,)`.

    Raises:
        OSError: If the file cannot be read.
        ValueError: If the file has fewer than two columns or no rows, or if
            any row holds non-numeric values (the message lists their line
            numbers).
    """
    frame = _read_numeric_csv(path)
    if frame.shape[1] < 2 or frame.shape[0] == 0:
        raise ValueError(
            f"`{path}` must have a header, at least one covariate column, "
            "an outcome column and one or more rows."
        )

    values = torch.from_numpy(frame.to_numpy(dtype="float64"))

    return values[:, :-1].contiguous(), values[:, -1].contiguous()


def write_rows_csv(
    path: str, rows: Sequence[dict[str, Any]], columns: Sequence[str]
) -> str:
    ensure_parent_dir(path)
    pd.DataFrame(list(rows), columns=list(columns)).to_csv(
        path, index=False, float_format=FLOAT_FORMAT
    )

    return path


def write_json(path: str, data: Any) -> str:
    ensure_parent_dir(path)
    with open(path, "w") as f:
        json.dump(data, f, indent=2)

    return path


def package_version() -> str:
    try:
        return metadata.version(PACKAGE_NAME)
    except metadata.PackageNotFoundError:
        return "unknown"


def provenance(
    command: str, config: dict[str, Any], seed: int | None
) -> dict[str, Any]:
    """
    Build the provenance record written next to every command's outputs.
    """
    return {
        "command": command,
        "config": config,
        "seed": seed,
        "package": PACKAGE_NAME,
        "version": package_version(),
        "torch_version": torch.__version__,
    }
