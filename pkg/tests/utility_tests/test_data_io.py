import json
from pathlib import Path

import pytest
import torch

from copula_survival.likelihood.survival_dataset import SurvivalDataset
from copula_survival.utilities.data_io import (
    PACKAGE_NAME,
    provenance,
    read_covariate_outcome_csv,
    read_dataset_csv,
    write_dataset_csv,
    write_json,
    write_rows_csv,
)


def test_dataset_csv_round_trip(
    small_dataset: SurvivalDataset, tmp_path: Path
) -> None:
    path = write_dataset_csv(
        str(tmp_path / "data" / "dataset.csv"), small_dataset
    )

    header = Path(path).read_text().splitlines()[0]
    assert header == "x_0,x_1,time,event"

    dataset = read_dataset_csv(path)

    assert torch.equal(dataset.x, small_dataset.x)
    assert torch.equal(dataset.t, small_dataset.t)
    assert torch.equal(dataset.delta, small_dataset.delta)


def test_dataset_csv_with_latent_times(
    small_dataset: SurvivalDataset, tmp_path: Path
) -> None:
    latent = small_dataset.t + 1

    path = write_dataset_csv(
        str(tmp_path / "truth.csv"), small_dataset, latent, latent
    )

    header = Path(path).read_text().splitlines()[0]
    assert header.endswith(",latent_T,latent_U")

    # Latent columns are ignored when reading a dataset
    assert read_dataset_csv(path).covariate_dim == 2


def test_covariates_sorted_numerically(tmp_path: Path) -> None:
    path = tmp_path / "dataset.csv"
    columns = [f"x_{i}" for i in (10, 2, 0, 1, 3, 4, 5, 6, 7, 8, 9)]
    path.write_text(
        ",".join(columns + ["time", "event"])
        + "\n"
        + ",".join(c[2:] for c in columns)
        + ",1.5,1\n"
    )

    dataset = read_dataset_csv(str(path))

    assert dataset.x[0].tolist() == [float(i) for i in range(11)]


@pytest.mark.parametrize(
    "content, match",
    [
        ("x_0,time\n0.1,1.0\n", "missing column\\(s\\): event"),
        ("a,time,event\n0.1,1.0,1\n", "no covariate columns"),
        (
            "x_0,time,event\n0.1,1.0,1\n0.2,abc,0\n0.3,1.0,1\n0.4,,1\n",
            "line\\(s\\) 3, 5",
        ),
    ],
)
def test_read_dataset_errors(
    content: str, match: str, tmp_path: Path
) -> None:
    path = tmp_path / "dataset.csv"
    path.write_text(content)

    with pytest.raises(ValueError, match=match):
        read_dataset_csv(str(path))


def test_read_missing_dataset(tmp_path: Path) -> None:
    with pytest.raises(OSError):
        read_dataset_csv(str(tmp_path / "missing.csv"))


def test_read_covariate_outcome_csv(tmp_path: Path) -> None:
    path = tmp_path / "source.csv"
    path.write_text("age,dose,y\n30,1,2.5\n40,0,3.5\n")

    x, y = read_covariate_outcome_csv(str(path))

    assert x.tolist() == [[30.0, 1.0], [40.0, 0.0]]
    assert y.tolist() == [2.5, 3.5]
    assert x.dtype == torch.float64


@pytest.mark.parametrize(
    "content",
    ["y\n1.0\n", "a,y\n"],
)
def test_read_covariate_outcome_csv_shape_errors(
    content: str, tmp_path: Path
) -> None:
    path = tmp_path / "source.csv"
    path.write_text(content)

    with pytest.raises(ValueError, match="at least one covariate column"):
        read_covariate_outcome_csv(str(path))


def test_write_rows_csv(tmp_path: Path) -> None:
    path = write_rows_csv(
        str(tmp_path / "nested" / "rows.csv"),
        [{"a": 0.1, "b": 1}, {"a": 1 / 3, "b": 2}],
        columns=("a", "b"),
    )

    lines = Path(path).read_text().splitlines()
    assert lines == ["a,b", "0.10000000000000001,1", "0.33333333333333331,2"]


def test_write_json_and_provenance(tmp_path: Path) -> None:
    record = provenance("train", {"seed": 3}, 3)
    path = write_json(str(tmp_path / "provenance.json"), record)

    with open(path) as f:
        data = json.load(f)

    assert data["command"] == "train"
    assert data["config"] == {"seed": 3}
    assert data["seed"] == 3
    assert data["package"] == PACKAGE_NAME
    assert {"version", "torch_version"} <= set(data)
