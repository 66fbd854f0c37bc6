"""
Parametric conditional survival marginals `S(t | x)` and densities
`f(t | x) = -dS/dt`.

Two families are implemented:

- `WeibullCoxPH`: `S(t | x) = exp(-(t / rho)^nu * exp(psi(x)))`, with shape
  `nu > 0` and scale `rho > 0`.
- `LogNormal`: `log T | x ~ Normal(mu - psi(x), sigma)`, i.e.
  `S(t | x) = Phi(-(log t - mu + psi(x)) / sigma)`, with `sigma > 0`. A higher
  risk shifts the event time distribution towards earlier times.

Positive parameters are stored as raw log-parameters. Time arguments can be
per-record vectors of shape `(n,)` or per-record grids of shape `(n, G)`; the
risk of each record broadcasts along the trailing dimensions.
"""

import math
from abc import ABC, abstractmethod
from typing import Any

import torch
import torch.nn as nn

from copula_survival.utilities.math_utils import as_float64_tensor, expand_like

from .risk_functions import RiskFunction, risk_from_dict

LOG_SQRT_2PI = 0.5 * math.log(2 * math.pi)


def validate_times(t: torch.Tensor) -> None:
    if torch.isnan(t).any() or (t < 0).any():
        raise ValueError("Survival times must be nonnegative.")


class SurvivalMarginal(nn.Module, ABC):
    """
    A parametric conditional survival distribution.

    Attributes:
        risk (RiskFunction): The covariate risk function.
    """

    family: str = "marginal"

    def __init__(self, risk: RiskFunction):
        super().__init__()
        self.risk = risk

    @property
    def input_dim(self) -> int:
        return self.risk.input_dim

    @abstractmethod
    def _log_survival(
        self, t: torch.Tensor, psi: torch.Tensor
    ) -> torch.Tensor: ...

    @abstractmethod
    def _log_density(
        self, t: torch.Tensor, psi: torch.Tensor
    ) -> torch.Tensor: ...

    @abstractmethod
    def _quantile(self, u: torch.Tensor, psi: torch.Tensor) -> torch.Tensor:
        """Return `t` with `S(t | x) = u`, for `u` in `(0, 1)`."""

    @abstractmethod
    def parameter_dict(self) -> dict[str, float]: ...

    def _prepare(
        self, t: torch.Tensor | float, x: torch.Tensor
    ) -> tuple[torch.Tensor, torch.Tensor]:
        t = as_float64_tensor(t)
        validate_times(t)
        psi = expand_like(self.risk(x), t)

        return t, psi

    def log_survival(
        self, t: torch.Tensor | float, x: torch.Tensor
    ) -> torch.Tensor:
        """
        Compute `log S(t | x)`.

        Args:
            t (torch.Tensor | float): Nonnegative times, with shape `(n,)` or
                `(n, G)`.
            x (torch.Tensor): Covariates, with shape `(n, d)`.

        Returns:
            torch.Tensor: The log survival probabilities.

        Raises:
            ValueError: If `t` is negative or the covariate dimension does not
                match the risk function.
        """
        t, psi = self._prepare(t, x)

        return self._log_survival(t, psi)

    def survival(
        self, t: torch.Tensor | float, x: torch.Tensor
    ) -> torch.Tensor:
        return torch.exp(self.log_survival(t, x))

    def log_density(
        self, t: torch.Tensor | float, x: torch.Tensor
    ) -> torch.Tensor:
        t, psi = self._prepare(t, x)

        return self._log_density(t, psi)

    def density(
        self, t: torch.Tensor | float, x: torch.Tensor
    ) -> torch.Tensor:
        return torch.exp(self.log_density(t, x))

    def hazard(self, t: torch.Tensor | float, x: torch.Tensor) -> torch.Tensor:
        t, psi = self._prepare(t, x)

        return torch.exp(
            self._log_density(t, psi) - self._log_survival(t, psi)
        )

    def cumulative_hazard(
        self, t: torch.Tensor | float, x: torch.Tensor
    ) -> torch.Tensor:
        return -self.log_survival(t, x)

    def quantile(
        self, u: torch.Tensor | float, x: torch.Tensor
    ) -> torch.Tensor:
        """
        Invert the survival function (inverse transform sampling): return `t`
        such that `S(t | x) = u`.

        Args:
            u (torch.Tensor | float): Survival probabilities in `(0, 1)`.
            x (torch.Tensor): Covariates, with shape `(n, d)`.

        Returns:
            torch.Tensor: The times.

        Raises:
            ValueError: If `u` lies outside `(0, 1)`.
        """
        u = as_float64_tensor(u)
        if not bool(((u > 0) & (u < 1)).all()):
            raise ValueError("Survival quantile levels must lie in (0, 1).")

        psi = expand_like(self.risk(x), u)

        return self._quantile(u, psi)

    def param_grads(
        self, t: torch.Tensor | float, x: torch.Tensor
    ) -> dict[str, dict[str, torch.Tensor]]:
        """
        Compute the gradients of `sum S(t | x)` and `sum f(t | x)` with
        respect to every trainable parameter (shape, scale and risk
        function weights).

        Returns:
            dict[str, dict[str, torch.Tensor]]: A dictionary with keys
                `survival` and `density`, each mapping parameter names to
                gradients.
        """
        named_params = [
            (name, param)
            for name, param in self.named_parameters()
            if param.requires_grad
        ]
        params = [param for _, param in named_params]

        grads: dict[str, dict[str, torch.Tensor]] = {}
        for key, func in (
            ("survival", self.survival),
            ("density", self.density),
        ):
            value = func(t, x).sum()
            param_grads = torch.autograd.grad(value, params, allow_unused=True)
            grads[key] = {
                name: (
                    grad if grad is not None else torch.zeros_like(param)
                ).detach()
                for (name, param), grad in zip(
                    named_params, param_grads, strict=True
                )
            }

        return grads

    def to_dict(self) -> dict[str, Any]:
        return {
            "family": self.family,
            **self.parameter_dict(),
            "trainable": any(
                param.requires_grad
                for param in self.parameters(recurse=False)
            ),
            "risk": self.risk.to_dict(),
        }


class WeibullCoxPH(SurvivalMarginal):
    """
    Weibull proportional-hazards marginal
    `S(t | x) = exp(-(t / rho)^nu * exp(psi(x)))`.

    Attributes:
        log_nu (nn.Parameter): The log shape parameter.
        log_rho (nn.Parameter): The log scale parameter.
    """

    family = "weibull"

    def __init__(
        self,
        risk: RiskFunction,
        nu: float = 1.0,
        rho: float = 1.0,
        trainable: bool = True,
    ):
        super().__init__(risk)
        if not (nu > 0 and rho > 0):
            raise ValueError(
                f"Weibull parameters must be positive, got nu={nu}, rho={rho}."
            )

        self.log_nu = nn.Parameter(
            torch.tensor(math.log(nu), dtype=torch.float64),
            requires_grad=trainable,
        )
        self.log_rho = nn.Parameter(
            torch.tensor(math.log(rho), dtype=torch.float64),
            requires_grad=trainable,
        )

    @property
    def nu(self) -> torch.Tensor:
        return torch.exp(self.log_nu)

    @property
    def rho(self) -> torch.Tensor:
        return torch.exp(self.log_rho)

    def _cumulative_hazard(
        self, t: torch.Tensor, psi: torch.Tensor
    ) -> torch.Tensor:
        return torch.pow(t / self.rho, self.nu) * torch.exp(psi)

    def _log_survival(
        self, t: torch.Tensor, psi: torch.Tensor
    ) -> torch.Tensor:
        return -self._cumulative_hazard(t, psi)

    def _log_density(
        self, t: torch.Tensor, psi: torch.Tensor
    ) -> torch.Tensor:
        # f = (nu / rho) (t / rho)^(nu - 1) exp(psi) S
        return (
            self.log_nu
            - self.log_rho
            + torch.xlogy(self.nu - 1, t / self.rho)
            + psi
            - self._cumulative_hazard(t, psi)
        )

    def _quantile(self, u: torch.Tensor, psi: torch.Tensor) -> torch.Tensor:
        # t = rho * (-log(u) / exp(psi))^(1 / nu)
        return self.rho * torch.exp(
            (torch.log(-torch.log(u)) - psi) / self.nu
        )

    def parameter_dict(self) -> dict[str, float]:
        return {"nu": float(self.nu.item()), "rho": float(self.rho.item())}


class LogNormal(SurvivalMarginal):
    """
    Log-normal marginal with `log T | x ~ Normal(mu - psi(x), sigma)`.

    Attributes:
        mu (nn.Parameter): The location offset of `log T`.
        log_sigma (nn.Parameter): The log scale of `log T`.
    """

    family = "lognormal"

    def __init__(
        self,
        risk: RiskFunction,
        mu: float = 0.0,
        sigma: float = 1.0,
        trainable: bool = True,
    ):
        super().__init__(risk)
        if not sigma > 0:
            raise ValueError(
                f"Log-normal scale must be positive, got sigma={sigma}."
            )

        self.mu = nn.Parameter(
            torch.tensor(mu, dtype=torch.float64), requires_grad=trainable
        )
        self.log_sigma = nn.Parameter(
            torch.tensor(math.log(sigma), dtype=torch.float64),
            requires_grad=trainable,
        )

    @property
    def sigma(self) -> torch.Tensor:
        return torch.exp(self.log_sigma)

    def _standardize(
        self, t: torch.Tensor, psi: torch.Tensor
    ) -> torch.Tensor:
        return (torch.log(t) - self.mu + psi) / self.sigma

    def _log_survival(
        self, t: torch.Tensor, psi: torch.Tensor
    ) -> torch.Tensor:
        positive = t > 0
        t_safe = torch.where(positive, t, torch.ones_like(t))
        log_s = torch.special.log_ndtr(-self._standardize(t_safe, psi))

        return torch.where(positive, log_s, torch.zeros_like(log_s))

    def _log_density(
        self, t: torch.Tensor, psi: torch.Tensor
    ) -> torch.Tensor:
        positive = t > 0
        t_safe = torch.where(positive, t, torch.ones_like(t))
        z = self._standardize(t_safe, psi)
        log_f = (
            -0.5 * z**2 - LOG_SQRT_2PI - self.log_sigma - torch.log(t_safe)
        )

        return torch.where(positive, log_f, torch.full_like(log_f, -math.inf))

    def _quantile(self, u: torch.Tensor, psi: torch.Tensor) -> torch.Tensor:
        # S(t) = u  <=>  z = Phi^-1(1 - u) = -Phi^-1(u)
        return torch.exp(
            self.mu - psi - self.sigma * torch.special.ndtri(u)
        )

    def parameter_dict(self) -> dict[str, float]:
        return {
            "mu": float(self.mu.item()),
            "sigma": float(self.sigma.item()),
        }


MARGINAL_FAMILIES: dict[str, type[SurvivalMarginal]] = {
    WeibullCoxPH.family: WeibullCoxPH,
    LogNormal.family: LogNormal,
}


def create_marginal(
    family: str,
    risk: RiskFunction,
    params: dict[str, float] | None = None,
    trainable: bool = True,
) -> SurvivalMarginal:
    """
    Create a survival marginal of a given family.

    Args:
        family (str): The marginal family (`weibull` or `lognormal`).
        risk (RiskFunction): The covariate risk function.
        params (dict[str, float] | None): Family parameters (Weibull: `nu`,
            `rho`; log-normal: `mu`, `sigma`). Missing parameters take their
            defaults.
        trainable (bool): Whether the family parameters are trainable.

    Returns:
        SurvivalMarginal: The marginal.

    Raises:
        ValueError: If the family is unknown or a parameter is invalid.
    """
    if family not in MARGINAL_FAMILIES:
        raise ValueError(
            f"Unknown marginal family `{family}`. Valid families: "
            f"{', '.join(MARGINAL_FAMILIES)}."
        )

    return MARGINAL_FAMILIES[family](
        risk=risk, trainable=trainable, **(params or {})
    )


def marginal_from_dict(data: dict[str, Any]) -> SurvivalMarginal:
    data = dict(data)
    family = data.pop("family")
    risk = risk_from_dict(data.pop("risk"))
    trainable = data.pop("trainable", True)

    return create_marginal(family, risk, params=data, trainable=trainable)
