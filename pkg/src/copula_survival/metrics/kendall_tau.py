from collections.abc import Sequence

import numpy as np
import torch
from scipy import stats


def _tied_pairs(values: np.ndarray) -> int:
    _, counts = np.unique(values, return_counts=True)

    return int((counts * (counts - 1) // 2).sum())


def empirical_kendall_tau(
    pairs: np.ndarray | torch.Tensor | Sequence[tuple[float, float]],
) -> float:
    """
    Compute Kendall's tau-a of a set of pairs: the number of concordant
    minus discordant pairs over the number of all pairs. Pairs tied in
    either coordinate count as neither.

    The count runs in `O(n log n)` through `scipy.stats.kendalltau`, whose
    tau-b is rescaled to tau-a.

    Args:
        pairs (np.ndarray | torch.Tensor | Sequence[tuple[float, float]]):
            The pairs, with shape `(n, 2)`.

    Returns:
        float: The tau-a value in `[-1, 1]`.

    Raises:
        ValueError: If fewer than two pairs are given or the shape is not
            `(n, 2)`.
    """
    if isinstance(pairs, torch.Tensor):
        pairs = pairs.detach().cpu().numpy()

    values = np.asarray(pairs, dtype=np.float64)
    if values.ndim != 2 or values.shape[1] != 2:
        raise ValueError(
            f"Pairs must have shape (n, 2), got {values.shape}."
        )

    n = values.shape[0]
    if n < 2:
        raise ValueError(f"Kendall's tau requires >= 2 pairs, got {n}.")

    x, y = values[:, 0], values[:, 1]
    total_pairs = n * (n - 1) // 2
    untied_x = total_pairs - _tied_pairs(x)
    untied_y = total_pairs - _tied_pairs(y)
    if untied_x == 0 or untied_y == 0:
        return 0.0

    tau_b = stats.kendalltau(x, y, variant="b").statistic

    return float(tau_b * np.sqrt(float(untied_x) * untied_y) / total_pairs)
