"""
Base class for Archimedean copula generators.

A generator `phi` is a decreasing map from `[0, inf]` onto `[0, 1]` with
`phi(0) = 1` and `phi(inf) = 0`. Subclasses implement the logarithm of the
absolute value of `phi` and of its first two derivatives, which keeps copula
partial derivatives and densities finite deep in the tails. Everything else
(evaluation, derivatives, inversion and parameter gradients) is derived here.
"""

import math
from abc import ABC, abstractmethod
from typing import Any

import torch
import torch.nn as nn

from copula_survival.utilities.math_utils import as_float64_tensor
from copula_survival.utilities.root_finding import solve_decreasing

# Relative tolerance of generator inversions
INVERSION_TOL = 1e-12
INVERSION_MAX_ITER = 200


def validate_time(t: torch.Tensor) -> None:
    if torch.isnan(t).any() or (t < 0).any():
        raise ValueError(
            "Generator arguments must lie in [0, inf]; got negative or NaN "
            "values."
        )


def validate_unit_interval(
    u: torch.Tensor, name: str, closed_lower: bool, closed_upper: bool
) -> None:
    lower_ok = (u >= 0) if closed_lower else (u > 0)
    upper_ok = (u <= 1) if closed_upper else (u < 1)
    if not bool((lower_ok & upper_ok).all()):
        lower_bracket = "[" if closed_lower else "("
        upper_bracket = "]" if closed_upper else ")"
        raise ValueError(
            f"`{name}` must lie in {lower_bracket}0, 1{upper_bracket}."
        )


class ArchimedeanGenerator(nn.Module, ABC):
    """
    An Archimedean copula generator with analytic derivatives.

    Attributes:
        family (str): The generator family name.
    """

    family: str = "generator"

    @abstractmethod
    def _log_abs_derivative(
        self, t: torch.Tensor, order: int
    ) -> torch.Tensor:
        """
        Compute `log |phi^(order)(t)|` for finite `t >= 0`.

        Args:
            t (torch.Tensor): Finite, nonnegative arguments.
            order (int): The derivative order (0, 1 or 2).

        Returns:
            torch.Tensor: The log-magnitudes, with the same shape as `t`.
        """

    def log_abs_derivative(
        self, t: torch.Tensor | float, order: int
    ) -> torch.Tensor:
        """
        Compute `log |phi^(order)(t)|` for `t` in `[0, inf]`.

        The order-0 value at `t = 0` is exactly 0 (i.e., `phi(0) = 1`), and
        every order evaluates to `-inf` at `t = inf`.

        Args:
            t (torch.Tensor | float): Nonnegative arguments (`inf` allowed).
            order (int): The derivative order (0, 1 or 2).

        Returns:
            torch.Tensor: The log-magnitudes.

        Raises:
            ValueError: If `t` contains negative or NaN values, or if `order`
                is not 0, 1 or 2.
        """
        if order not in (0, 1, 2):
            raise ValueError(
                f"Unsupported derivative order {order}. Valid orders: 0, 1, 2."
            )

        t = as_float64_tensor(t)
        validate_time(t)

        is_inf = torch.isinf(t)
        t_safe = torch.where(is_inf, torch.zeros_like(t), t)
        value = self._log_abs_derivative(t_safe, order)
        value = torch.where(is_inf, torch.full_like(value, -math.inf), value)
        if order == 0:
            value = torch.where(t == 0, torch.zeros_like(value), value)

        return value

    def forward(self, t: torch.Tensor | float) -> torch.Tensor:
        return torch.exp(self.log_abs_derivative(t, order=0))

    def derivative(
        self, t: torch.Tensor | float, order: int = 1
    ) -> torch.Tensor:
        """
        Evaluate the first (`order=1`, always <= 0) or second (`order=2`,
        always >= 0) derivative of the generator.

        Raises:
            ValueError: If `order` is not 1 or 2, or if `t` is negative.
        """
        if order not in (1, 2):
            raise ValueError(
                f"Unsupported derivative order {order}. Valid orders: 1, 2."
            )

        magnitude = torch.exp(self.log_abs_derivative(t, order))

        return -magnitude if order == 1 else magnitude

    def log_slope(self, t: torch.Tensor) -> torch.Tensor:
        # d/dt log phi(t) = phi'(t) / phi(t)
        return -torch.exp(
            self.log_abs_derivative(t, 1) - self.log_abs_derivative(t, 0)
        )

    def inverse(self, u: torch.Tensor | float) -> torch.Tensor:
        """
        Invert the generator, returning `t` with `phi(t) = u`.

        The default implementation solves `log phi(t) = log u` with a
        bracketed Newton iteration and attaches implicit-function gradients:
        `dt/dp = -(dphi/dp)(t) / phi'(t)` for every parameter `p`, and
        `dt/du = 1 / phi'(t)`.

        Args:
            u (torch.Tensor | float): Values in `(0, 1]`.

        Returns:
            torch.Tensor: The generator inverse. Exactly 0 where `u = 1`.

        Raises:
            ValueError: If `u` lies outside `(0, 1]`.
            InversionError: If the root search does not converge.
        """
        u = as_float64_tensor(u)
        validate_unit_interval(u, "u", closed_lower=False, closed_upper=True)

        log_u = torch.log(u)
        t_root = solve_decreasing(
            func=lambda z: self.log_abs_derivative(z, 0),
            dfunc=self.log_slope,
            target=log_u,
            lower=torch.zeros_like(u),
            tol=INVERSION_TOL,
            max_iter=INVERSION_MAX_ITER,
        )

        # Single Newton correction carrying the implicit gradients
        residual = self.log_abs_derivative(t_root, 0) - log_u
        t = t_root - residual / self.log_slope(t_root).detach()

        return torch.where(u == 1, torch.zeros_like(t), t)

    def closed_form_conditional_quantile(
        self, u: torch.Tensor, w: torch.Tensor
    ) -> torch.Tensor | None:
        """
        Return `v` solving `dC/du(u, v) = w` in closed form, or `None` if the
        family has no closed-form conditional inverse.
        """
        return None

    def closed_form_log_partials(
        self, u: torch.Tensor, v: torch.Tensor
    ) -> tuple[torch.Tensor, torch.Tensor] | None:
        """
        Return `(log dC/du, log dC/dv)` evaluated without inverting the
        generator, or `None` to use the generic formula.
        """
        return None

    @abstractmethod
    def kendall_tau(self) -> float:
        """Compute the analytic Kendall's tau of the induced copula."""

    @abstractmethod
    def to_dict(self) -> dict[str, Any]:
        """Serialize the generator parameters to a JSON-compatible dict."""

    def param_grads(self, t: torch.Tensor | float) -> dict[str, torch.Tensor]:
        """
        Compute the gradient of `sum(phi(t))` with respect to every raw
        parameter of the generator.

        Args:
            t (torch.Tensor | float): Nonnegative arguments.

        Returns:
            dict[str, torch.Tensor]: A dictionary mapping parameter names
                (as in `named_parameters()`) to gradients. Empty for
                parameter-free generators.
        """
        named_params = [
            (name, param)
            for name, param in self.named_parameters()
            if param.requires_grad
        ]
        if not named_params:
            return {}

        value = self(t).sum()
        grads = torch.autograd.grad(
            value, [param for _, param in named_params], allow_unused=True
        )

        return {
            name: (
                grad if grad is not None else torch.zeros_like(param)
            ).detach()
            for (name, param), grad in zip(named_params, grads, strict=True)
        }
