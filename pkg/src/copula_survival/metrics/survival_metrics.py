"""
Survival estimation metrics: Survival-l1 against a known ground truth and
calibration-curve data.

Survival-l1 measures the mean normalized area between the true and the
estimated conditional survival curves,

    (1 / |D|) sum_i (1 / t_max_i)
        * int_0^t_max_i |S(t | x_i) - S_hat(t | x_i)| dt

where `t_max_i` is the time at which the true survival of record `i` drops
to `SURVIVAL_L1_TAIL`. Calibration bins compare the mean predicted event
probability `1 - S_hat(t_i | x_i)` with the observed event rate.
"""

from typing import NamedTuple

import numpy as np
import torch

from copula_survival.likelihood.survival_dataset import SurvivalDataset
from copula_survival.marginals.survival_marginals import SurvivalMarginal
from copula_survival.utilities.math_utils import trapezoid_integral

DEFAULT_GRID_SIZE = 512
DEFAULT_NUM_BINS = 10
SURVIVAL_L1_TAIL = 1e-3


class CalibrationBin(NamedTuple):
    mean_predicted: float
    observed_rate: float
    count: int


def survival_l1(
    truth: SurvivalMarginal | None,
    model: SurvivalMarginal,
    dataset: SurvivalDataset,
    grid_size: int = DEFAULT_GRID_SIZE,
) -> float:
    """
    Compute the Survival-l1 distance between the true and the estimated
    event survival functions over the records of a dataset.

    Args:
        truth (SurvivalMarginal | None): The true event marginal.
        model (SurvivalMarginal): The estimated event marginal.
        dataset (SurvivalDataset): The records whose covariates are
            evaluated.
        grid_size (int): The number of uniform grid points per record.

    Returns:
        float: The nonnegative Survival-l1 value.

    Raises:
        ValueError: If `truth` is missing or `grid_size < 2`.
    """
    if truth is None:
        raise ValueError("Survival-l1 requires a ground truth.")

    if grid_size < 2:
        raise ValueError(f"The grid size must be >= 2, got {grid_size}.")

    x = dataset.x
    with torch.no_grad():
        tail = torch.full(
            (len(dataset),), SURVIVAL_L1_TAIL, dtype=torch.float64
        )
        t_max = truth.quantile(tail, x)
        fractions = torch.linspace(0, 1, grid_size, dtype=torch.float64)
        grid = t_max.unsqueeze(-1) * fractions

        gap = torch.abs(truth.survival(grid, x) - model.survival(grid, x))
        per_record = trapezoid_integral(gap, grid) / t_max

    return float(per_record.mean().item())


def predicted_event_probability(
    model: SurvivalMarginal, dataset: SurvivalDataset
) -> torch.Tensor:
    with torch.no_grad():
        return 1 - model.survival(dataset.t, dataset.x)


def calibration_curve(
    model: SurvivalMarginal,
    dataset: SurvivalDataset,
    bins: int = DEFAULT_NUM_BINS,
) -> list[CalibrationBin]:
    """
    Compute calibration-curve data from equal-count bins of the predicted
    event probability `1 - S_hat(t_i | x_i)`.

    Records are sorted by predicted probability (ties keep record order) and
    split into `bins` contiguous groups whose sizes differ by at most one.

    Args:
        model (SurvivalMarginal): The estimated event marginal.
        dataset (SurvivalDataset): The evaluated records.
        bins (int): The number of bins.

    Returns:
        list[CalibrationBin]: The bins, in increasing predicted probability.

    Raises:
        ValueError: If `bins < 1` or the dataset has fewer records than
            bins.
    """
    if bins < 1:
        raise ValueError(f"The number of bins must be >= 1, got {bins}.")

    if len(dataset) < bins:
        raise ValueError(
            f"Cannot split {len(dataset)} records into {bins} bins."
        )

    predicted = predicted_event_probability(model, dataset).numpy()
    events = dataset.delta.numpy()
    order = np.argsort(predicted, kind="stable")

    return [
        CalibrationBin(
            mean_predicted=float(predicted[indices].mean()),
            observed_rate=float(events[indices].mean()),
            count=int(indices.size),
        )
        for indices in np.array_split(order, bins)
    ]
