import os

import numpy as np
import pandas as pd
import pytest

from copula_survival.copulas.archimedean_copula import ArchimedeanCopula
from copula_survival.copulas.closed_form_generators import ClaytonGenerator
from copula_survival.copulas.copula_export import (
    copula_grids,
    export_copula_data,
)


@pytest.fixture
def clayton_copula() -> ArchimedeanCopula:
    return ArchimedeanCopula(ClaytonGenerator(2.0))


def test_copula_grids(clayton_copula: ArchimedeanCopula) -> None:
    cdf_rows, density_rows = copula_grids(clayton_copula, resolution=5)

    assert len(cdf_rows) == 25
    assert len(density_rows) == 25

    # The CDF grid covers the closed unit square, the density grid does not
    assert {row["u"] for row in cdf_rows} == {0.0, 0.25, 0.5, 0.75, 1.0}
    assert all(0 < row["u"] < 1 for row in density_rows)
    assert all(0 < row["v"] < 1 for row in density_rows)
    assert all(np.isfinite(row["log_density"]) for row in density_rows)


def test_copula_grids_invalid_resolution(
    clayton_copula: ArchimedeanCopula,
) -> None:
    with pytest.raises(ValueError, match="resolution"):
        copula_grids(clayton_copula, resolution=1)


def test_export_copula_data(
    clayton_copula: ArchimedeanCopula, tmp_path: str
) -> None:
    output_dir = os.path.join(tmp_path, "export")

    paths = export_copula_data(
        clayton_copula,
        output_dir,
        prefix="learned",
        resolution=4,
        num_samples=30,
        seed=1,
    )

    assert [os.path.basename(path) for path in paths] == [
        "learned_cdf_grid.csv",
        "learned_log_density_grid.csv",
        "learned_scatter.csv",
    ]

    cdf = pd.read_csv(paths[0])
    density = pd.read_csv(paths[1])
    scatter = pd.read_csv(paths[2])

    assert list(cdf.columns) == ["u", "v", "cdf"]
    assert list(density.columns) == ["u", "v", "log_density"]
    assert list(scatter.columns) == ["u", "v"]
    assert len(cdf) == 16
    assert len(density) == 16
    assert len(scatter) == 30

    # Boundary axioms: C(0, v) = 0 and C(1, v) = v
    assert (cdf.loc[cdf["u"] == 0, "cdf"] == 0).all()
    upper_edge = cdf[cdf["u"] == 1]
    np.testing.assert_allclose(
        upper_edge["cdf"], upper_edge["v"], rtol=0, atol=1e-12
    )
    assert scatter["u"].between(0, 1, inclusive="neither").all()


def test_export_is_deterministic_given_seed(
    clayton_copula: ArchimedeanCopula, tmp_path: str
) -> None:
    first = export_copula_data(
        clayton_copula, os.path.join(tmp_path, "a"), "c", 3, 20, seed=5
    )
    second = export_copula_data(
        clayton_copula, os.path.join(tmp_path, "b"), "c", 3, 20, seed=5
    )

    for path_a, path_b in zip(first, second, strict=True):
        with open(path_a) as file_a, open(path_b) as file_b:
            assert file_a.read() == file_b.read()
