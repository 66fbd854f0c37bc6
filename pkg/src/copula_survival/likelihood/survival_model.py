from enum import Enum
from typing import Any

import torch
import torch.nn as nn

from copula_survival.copulas.archimedean_copula import (
    ArchimedeanCopula,
    copula_from_dict,
)
from copula_survival.marginals.survival_marginals import (
    SurvivalMarginal,
    marginal_from_dict,
)


class Objective(Enum):
    DEPENDENT = "dep"
    INDEPENDENT = "indep"


class SurvivalCopulaModel(nn.Module):
    """
    A joint model of the latent event time `T` and censoring time `U`: two
    conditional survival marginals linked by an Archimedean copula of their
    survival functions.

    Attributes:
        copula (ArchimedeanCopula): The copula of `(S_T(T | x), S_U(U | x))`.
        event_marginal (SurvivalMarginal): The event time marginal.
        censor_marginal (SurvivalMarginal): The censoring time marginal.
    """

    def __init__(
        self,
        copula: ArchimedeanCopula,
        event_marginal: SurvivalMarginal,
        censor_marginal: SurvivalMarginal,
    ):
        super().__init__()
        if event_marginal.input_dim != censor_marginal.input_dim:
            raise ValueError(
                "Event and censoring marginals must share the covariate "
                f"dimension, got {event_marginal.input_dim} and "
                f"{censor_marginal.input_dim}."
            )

        self.copula = copula
        self.event_marginal = event_marginal
        self.censor_marginal = censor_marginal

    @property
    def input_dim(self) -> int:
        return self.event_marginal.input_dim

    def marginal_parameters(self) -> list[nn.Parameter]:
        return [
            param
            for module in (self.event_marginal, self.censor_marginal)
            for param in module.parameters()
            if param.requires_grad
        ]

    def copula_parameters(self) -> list[nn.Parameter]:
        return [
            param for param in self.copula.parameters() if param.requires_grad
        ]

    def event_survival(
        self, t: torch.Tensor | float, x: torch.Tensor
    ) -> torch.Tensor:
        return self.event_marginal.survival(t, x)

    def validate_parameters(self) -> None:
        validate = getattr(self.copula.generator, "validate_parameters", None)
        if validate is not None:
            validate()

    def to_dict(self) -> dict[str, Any]:
        return {
            "copula": self.copula.to_dict(),
            "event_marginal": self.event_marginal.to_dict(),
            "censor_marginal": self.censor_marginal.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SurvivalCopulaModel":
        return cls(
            copula=copula_from_dict(data["copula"]),
            event_marginal=marginal_from_dict(data["event_marginal"]),
            censor_marginal=marginal_from_dict(data["censor_marginal"]),
        )
