import math

import torch

# Floor applied to probabilities before taking logs
PROB_FLOOR = 1e-300
LOG_PROB_FLOOR = math.log(PROB_FLOOR)


def rand_uniform(
    lower: float,
    upper: float,
    shape: tuple[int, ...],
    generator: torch.Generator | None = None,
    dtype: torch.dtype = torch.float64,
) -> torch.Tensor:
    return (upper - lower) * torch.rand(
        *shape, generator=generator, dtype=dtype
    ) + lower


def as_float64_tensor(value: float | torch.Tensor) -> torch.Tensor:
    if isinstance(value, torch.Tensor):
        return value.to(dtype=torch.float64)

    return torch.as_tensor(value, dtype=torch.float64)


def expand_like(values: torch.Tensor, target: torch.Tensor) -> torch.Tensor:
    """
    Append trailing singleton dimensions to `values` so that it broadcasts
    against `target` along its leading dimensions.

    For example, per-record risks of shape (n,) are expanded to (n, 1) when
    evaluated against a time grid of shape (n, G).

    Args:
        values (torch.Tensor): The tensor to expand.
        target (torch.Tensor): The tensor to broadcast against.

    Returns:
        torch.Tensor: A view of `values` with `target.dim()` dimensions (or
            `values` unchanged if it already has at least as many).
    """
    missing_dims = target.dim() - values.dim()
    if missing_dims <= 0:
        return values

    return values.reshape(values.shape + (1,) * missing_dims)


def trapezoid_integral(y: torch.Tensor, x: torch.Tensor) -> torch.Tensor:
    """
    Integrate `y` over `x` along the last dimension with the trapezoid rule.

    Args:
        y (torch.Tensor): Integrand values of shape (..., G).
        x (torch.Tensor): Integration grid of shape (..., G).

    Returns:
        torch.Tensor: The integral, with shape (...,).
    """
    return torch.trapezoid(y, x, dim=-1)
