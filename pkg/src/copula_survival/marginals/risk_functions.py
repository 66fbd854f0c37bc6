"""
Covariate risk functions `psi(x)` used by proportional-hazards style
survival marginals.

Every risk function maps a covariate matrix of shape `(n, d)` to a vector of
log-risks of shape `(n,)` in 64-bit floating point.
"""

import math
from abc import ABC, abstractmethod
from typing import Any, Sequence

import torch
import torch.nn as nn

DEFAULT_MLP_HIDDEN = (32, 32, 32)


class RiskFunction(nn.Module, ABC):
    """
    A scalar log-risk function of the covariates.

    Attributes:
        input_dim (int): The covariate dimension.
    """

    kind: str = "risk"

    def __init__(self, input_dim: int):
        super().__init__()
        if input_dim < 0:
            raise ValueError(
                f"Covariate dimension must be nonnegative, got {input_dim}."
            )

        self.input_dim = input_dim

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        """
        Evaluate the log-risk of each covariate row.

        Args:
            x (torch.Tensor): Covariates, with shape `(n, d)` or `(d,)`.

        Returns:
            torch.Tensor: The log-risks, with shape `(n,)` (or a scalar for a
                single covariate vector).

        Raises:
            ValueError: If the covariate dimension does not match.
        """
        x = torch.as_tensor(x, dtype=torch.float64)
        if x.shape[-1] != self.input_dim:
            raise ValueError(
                f"Covariate dimension mismatch: expected {self.input_dim}, "
                f"got {x.shape[-1]}."
            )

        return self._risk(x)

    @abstractmethod
    def _risk(self, x: torch.Tensor) -> torch.Tensor: ...

    @abstractmethod
    def to_dict(self) -> dict[str, Any]: ...


class LinearRisk(RiskFunction):
    """Linear log-risk `psi(x) = beta . x` (no intercept)."""

    kind = "linear"

    def __init__(
        self,
        input_dim: int,
        beta: Sequence[float] | torch.Tensor | None = None,
        trainable: bool = True,
    ):
        super().__init__(input_dim)

        if beta is None:
            beta_tensor = torch.zeros(input_dim, dtype=torch.float64)
        else:
            beta_tensor = torch.as_tensor(beta, dtype=torch.float64).clone()

        if beta_tensor.shape != (input_dim,):
            raise ValueError(
                f"Linear risk coefficients must have shape ({input_dim},), "
                f"got {tuple(beta_tensor.shape)}."
            )

        self.beta = nn.Parameter(beta_tensor, requires_grad=trainable)

    def _risk(self, x: torch.Tensor) -> torch.Tensor:
        return x @ self.beta

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "input_dim": self.input_dim,
            "beta": self.beta.detach().tolist(),
        }


class MLPRisk(RiskFunction):
    """
    Multilayer perceptron log-risk with hyperbolic tangent activations and a
    linear scalar output layer.
    """

    kind = "mlp"

    def __init__(
        self, input_dim: int, hidden: Sequence[int] = DEFAULT_MLP_HIDDEN
    ):
        super().__init__(input_dim)

        self.hidden = [int(width) for width in hidden]
        layers: list[nn.Module] = []
        fan_in = input_dim
        for width in self.hidden:
            layers.append(nn.Linear(fan_in, width, dtype=torch.float64))
            layers.append(nn.Tanh())
            fan_in = width

        layers.append(nn.Linear(fan_in, 1, dtype=torch.float64))
        self.net = nn.Sequential(*layers)

    def _risk(self, x: torch.Tensor) -> torch.Tensor:
        return self.net(x).squeeze(-1)

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "input_dim": self.input_dim,
            "hidden": list(self.hidden),
            "state": {
                name: value.detach().tolist()
                for name, value in self.net.state_dict().items()
            },
        }


class SineRisk(RiskFunction):
    """
    Fixed sinusoidal log-risk `psi(x) = amplitude * sin(frequency * x_0 +
    phase)` of the first covariate.
    """

    kind = "sine"

    def __init__(
        self,
        input_dim: int = 1,
        amplitude: float = 2.0,
        frequency: float = math.pi,
        phase: float = 0.0,
    ):
        super().__init__(input_dim)
        if input_dim < 1:
            raise ValueError("Sine risk requires at least one covariate.")

        self.amplitude = amplitude
        self.frequency = frequency
        self.phase = phase

    def _risk(self, x: torch.Tensor) -> torch.Tensor:
        return self.amplitude * torch.sin(
            self.frequency * x[..., 0] + self.phase
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "input_dim": self.input_dim,
            "amplitude": self.amplitude,
            "frequency": self.frequency,
            "phase": self.phase,
        }


def create_risk_function(
    kind: str, input_dim: int, hidden: Sequence[int] | None = None
) -> RiskFunction:
    """
    Create a trainable risk function.

    Args:
        kind (str): The risk function kind (`linear` or `mlp`).
        input_dim (int): The covariate dimension.
        hidden (Sequence[int] | None): The MLP hidden layer widths. Defaults
            to three layers of 32 units.

    Returns:
        RiskFunction: The risk function.

    Raises:
        ValueError: If `kind` is not a trainable risk function kind.
    """
    if kind == LinearRisk.kind:
        return LinearRisk(input_dim)
    elif kind == MLPRisk.kind:
        return MLPRisk(
            input_dim, hidden if hidden is not None else DEFAULT_MLP_HIDDEN
        )

    raise ValueError(
        f"Unknown risk function kind `{kind}`. Valid kinds: linear, mlp."
    )


def risk_from_dict(data: dict[str, Any]) -> RiskFunction:
    kind = data["kind"]
    input_dim = int(data["input_dim"])

    if kind == LinearRisk.kind:
        return LinearRisk(input_dim, beta=data["beta"])
    elif kind == SineRisk.kind:
        return SineRisk(
            input_dim,
            amplitude=data["amplitude"],
            frequency=data["frequency"],
            phase=data["phase"],
        )
    elif kind == MLPRisk.kind:
        risk = MLPRisk(input_dim, hidden=data["hidden"])
        risk.net.load_state_dict(
            {
                name: torch.tensor(value, dtype=torch.float64)
                for name, value in data["state"].items()
            }
        )
        return risk

    raise ValueError(f"Unknown risk function kind `{kind}`.")
