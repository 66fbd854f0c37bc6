"""Central finite-difference gradients of module parameters."""

from collections.abc import Callable

import torch
from torch import nn

FD_STEP = 1e-6


def finite_difference_param_grads(
    module: nn.Module,
    func: Callable[[], torch.Tensor],
    step: float = FD_STEP,
) -> dict[str, torch.Tensor]:
    """
    Differentiate `func().sum()` with respect to every trainable parameter
    of `module` by central finite differences, one element at a time.

    Returns:
        dict[str, torch.Tensor]: Gradients keyed as in `named_parameters()`.
    """
    grads = {}
    with torch.no_grad():
        for name, param in module.named_parameters():
            if not param.requires_grad:
                continue

            grad = torch.zeros_like(param)
            flat_param = param.view(-1)
            flat_grad = grad.view(-1)
            for i in range(flat_param.numel()):
                original = flat_param[i].item()
                flat_param[i] = original + step
                upper = func().sum().item()
                flat_param[i] = original - step
                lower = func().sum().item()
                flat_param[i] = original
                flat_grad[i] = (upper - lower) / (2 * step)

            grads[name] = grad

    return grads
