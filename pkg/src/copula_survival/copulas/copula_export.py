"""
Plot data for inspecting a copula: a CDF grid over the closed unit square, a
log-density grid strictly inside it, and a scatter sample.
"""

import os

import numpy as np
import torch

from copula_survival.utilities.data_io import write_rows_csv

from .archimedean_copula import ArchimedeanCopula

DEFAULT_RESOLUTION = 50
DEFAULT_NUM_SAMPLES = 1000


def _grid_rows(
    u: torch.Tensor, v: torch.Tensor, values: torch.Tensor, name: str
) -> list[dict[str, float]]:
    return [
        {"u": float(a), "v": float(b), name: float(c)}
        for a, b, c in zip(
            u.flatten().tolist(),
            v.flatten().tolist(),
            values.flatten().tolist(),
            strict=True,
        )
    ]


def copula_grids(
    copula: ArchimedeanCopula, resolution: int = DEFAULT_RESOLUTION
) -> tuple[list[dict[str, float]], list[dict[str, float]]]:
    """
    Evaluate the copula CDF on a `resolution x resolution` grid over
    `[0, 1]^2` and the log-density on a grid of the same size strictly
    inside `(0, 1)^2`.

    Raises:
        ValueError: If `resolution < 2`.
    """
    if resolution < 2:
        raise ValueError(f"The resolution must be >= 2, got {resolution}.")

    closed = torch.linspace(0, 1, resolution, dtype=torch.float64)
    interior = torch.linspace(0, 1, resolution + 2, dtype=torch.float64)[
        1:-1
    ]

    with torch.no_grad():
        u, v = torch.meshgrid(closed, closed, indexing="ij")
        cdf_rows = _grid_rows(u, v, copula.cdf(u, v), "cdf")

        u, v = torch.meshgrid(interior, interior, indexing="ij")
        density_rows = _grid_rows(
            u, v, copula.log_density(u, v), "log_density"
        )

    return cdf_rows, density_rows


def export_copula_data(
    copula: ArchimedeanCopula,
    output_dir: str,
    prefix: str,
    resolution: int = DEFAULT_RESOLUTION,
    num_samples: int = DEFAULT_NUM_SAMPLES,
    seed: int = 0,
) -> list[str]:
    """
    Write the CDF grid, log-density grid and scatter sample of a copula to
    CSV files named `<prefix>_cdf_grid.csv`, `<prefix>_log_density_grid.csv`
    and `<prefix>_scatter.csv`.

    Returns:
        list[str]: The paths to the written files.
    """
    cdf_rows, density_rows = copula_grids(copula, resolution)
    samples = copula.sample(num_samples, np.random.default_rng(seed))

    return [
        write_rows_csv(
            os.path.join(output_dir, f"{prefix}_cdf_grid.csv"),
            cdf_rows,
            columns=("u", "v", "cdf"),
        ),
        write_rows_csv(
            os.path.join(output_dir, f"{prefix}_log_density_grid.csv"),
            density_rows,
            columns=("u", "v", "log_density"),
        ),
        write_rows_csv(
            os.path.join(output_dir, f"{prefix}_scatter.csv"),
            [{"u": float(u), "v": float(v)} for u, v in samples.tolist()],
            columns=("u", "v"),
        ),
    ]
