"""
AdamW optimizer with decoupled weight decay.

Each step first shrinks every parameter multiplicatively,
`p <- p * (1 - lr * weight_decay)`, and then applies the bias-corrected Adam
update computed from the raw gradient. Gradients are checked for non-finite
values before any parameter is modified.
"""

from typing import Any, Callable, Iterable

import torch
from torch.optim import Optimizer

from copula_survival.exceptions import NumericalError

DEFAULT_BETAS = (0.9, 0.999)
DEFAULT_EPS = 1e-8


class AdamW(Optimizer):
    def __init__(
        self,
        params: Iterable[torch.Tensor] | Iterable[dict[str, Any]],
        lr: float = 1e-4,
        betas: tuple[float, float] = DEFAULT_BETAS,
        eps: float = DEFAULT_EPS,
        weight_decay: float = 0.0,
    ):
        if lr <= 0:
            raise ValueError(f"Invalid learning rate: {lr}.")
        if not (0 <= betas[0] < 1 and 0 <= betas[1] < 1):
            raise ValueError(f"Invalid beta parameters: {betas}.")
        if eps <= 0:
            raise ValueError(f"Invalid epsilon value: {eps}.")
        if weight_decay < 0:
            raise ValueError(f"Invalid weight decay value: {weight_decay}.")

        defaults = dict(lr=lr, betas=betas, eps=eps, weight_decay=weight_decay)
        super().__init__(params, defaults)

    @torch.no_grad()
    def step(  # type: ignore[override]
        self, closure: Callable[[], float] | None = None
    ) -> float | None:
        """
        Perform a single AdamW update.

        Raises:
            NumericalError: If any gradient contains non-finite values. No
                parameter is updated in that case.
        """
        loss = None
        if closure is not None:
            with torch.enable_grad():
                loss = closure()

        for group_idx, group in enumerate(self.param_groups):
            for p in group["params"]:
                if p.grad is not None and not torch.isfinite(p.grad).all():
                    raise NumericalError(
                        "Non-finite gradient in parameter group "
                        f"{group_idx}; AdamW step aborted."
                    )

        for group in self.param_groups:
            lr = group["lr"]
            beta1, beta2 = group["betas"]
            eps = group["eps"]
            weight_decay = group["weight_decay"]

            for p in group["params"]:
                if p.grad is None:
                    continue

                grad = p.grad
                state = self.state[p]
                if len(state) == 0:
                    state["step"] = 0
                    state["exp_avg"] = torch.zeros_like(p)
                    state["exp_avg_sq"] = torch.zeros_like(p)

                exp_avg, exp_avg_sq = state["exp_avg"], state["exp_avg_sq"]
                state["step"] += 1
                step = state["step"]

                # Decoupled weight decay
                if weight_decay != 0:
                    p.mul_(1 - lr * weight_decay)

                exp_avg.mul_(beta1).add_(grad, alpha=1 - beta1)
                exp_avg_sq.mul_(beta2).addcmul_(grad, grad, value=1 - beta2)

                bias_correction1 = 1 - beta1**step
                bias_correction2 = 1 - beta2**step

                denom = (exp_avg_sq / bias_correction2).sqrt().add_(eps)
                p.addcdiv_(exp_avg, denom, value=-lr / bias_correction1)

        return loss
