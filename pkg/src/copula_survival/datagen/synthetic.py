"""
Synthetic right-censored survival data with a controlled censoring
dependency.

For each record, covariates are drawn from `Uniform[0, 1]^d`, a quantile
pair `(u1, u2)` is drawn from the requested copula, and the latent event and
censoring times are obtained by inverting Weibull proportional-hazards
survival functions:

    T = rho_T * (-log(u1) / exp(psi_T(x)))^(1 / nu_T)
    U = rho_U * (-log(u2) / exp(psi_U(x)))^(1 / nu_U)

The observed record is `(x, min(T, U), 1[T < U])`; ties count as censored.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, NamedTuple

import numpy as np
import torch

from copula_survival.copulas.archimedean_copula import (
    ArchimedeanCopula,
    copula_from_tau,
    create_copula,
)
from copula_survival.copulas.closed_form_generators import (
    CopulaFamily,
    parse_family,
    validate_tau,
)
from copula_survival.likelihood.survival_dataset import SurvivalDataset
from copula_survival.likelihood.survival_model import SurvivalCopulaModel
from copula_survival.marginals.risk_functions import (
    LinearRisk,
    SineRisk,
    risk_from_dict,
)
from copula_survival.marginals.survival_marginals import (
    SurvivalMarginal,
    WeibullCoxPH,
)

logger = logging.getLogger(__name__)

LINEAR_RISK_SPEC = "linear-risk"
NONLINEAR_RISK_SPEC = "nonlinear-risk"
DEFAULT_NUM_SAMPLES = 5000


class MarginalSpec(NamedTuple):
    nu: float
    rho: float
    risk: dict[str, Any]


class SyntheticSpec(NamedTuple):
    name: str
    n: int
    covariate_dim: int
    event: MarginalSpec
    censor: MarginalSpec
    copula: str = CopulaFamily.INDEPENDENCE.value
    tau: float | None = None
    theta: float | None = None
    seed: int = 0


@dataclass
class GroundTruth:
    """
    The latent quantities behind a generated dataset.

    Attributes:
        latent_T (torch.Tensor): The latent event times.
        latent_U (torch.Tensor): The latent censoring times.
        quantiles (torch.Tensor): The copula quantile pairs `(u, v)` used to
            produce the latent times, with shape `(n, 2)`.
        event_marginal (SurvivalMarginal): The generating event marginal.
        censor_marginal (SurvivalMarginal): The generating censoring
            marginal.
        copula (ArchimedeanCopula): The generating copula.
    """

    latent_T: torch.Tensor
    latent_U: torch.Tensor
    quantiles: torch.Tensor
    event_marginal: SurvivalMarginal
    censor_marginal: SurvivalMarginal
    copula: ArchimedeanCopula

    def survival(self, t: torch.Tensor, x: torch.Tensor) -> torch.Tensor:
        """Evaluate the true conditional event survival `S_T(t | x)`."""
        return self.event_marginal.survival(t, x)

    def as_model(self) -> SurvivalCopulaModel:
        return SurvivalCopulaModel(
            copula=self.copula,
            event_marginal=self.event_marginal,
            censor_marginal=self.censor_marginal,
        )


def validate_synthetic_spec(spec: SyntheticSpec) -> None:
    """
    Validate a synthetic dataset specification.

    Raises:
        ValueError: If the sample count, Weibull parameters or copula
            parameters are invalid.
    """
    if spec.n < 1:
        raise ValueError(f"The sample count must be >= 1, got {spec.n}.")

    for name, marginal in (("event", spec.event), ("censor", spec.censor)):
        if not (marginal.nu > 0 and marginal.rho > 0):
            raise ValueError(
                f"The {name} Weibull parameters must be positive, got "
                f"nu={marginal.nu}, rho={marginal.rho}."
            )

    family = parse_family(spec.copula)
    if family == CopulaFamily.NETWORK:
        raise ValueError("Synthetic data requires a closed-form copula.")

    # A tau of 0 selects the Independence copula for every family
    if spec.tau is not None and spec.tau != 0:
        validate_tau(family, spec.tau)


def build_marginal(spec: MarginalSpec) -> WeibullCoxPH:
    return WeibullCoxPH(
        risk=risk_from_dict(spec.risk),
        nu=spec.nu,
        rho=spec.rho,
        trainable=False,
    )


def build_copula(spec: SyntheticSpec) -> ArchimedeanCopula:
    family = parse_family(spec.copula)
    if spec.tau is not None:
        return copula_from_tau(family, spec.tau)

    return create_copula(family, theta=spec.theta, trainable=False)


def generate_synthetic(
    spec: SyntheticSpec,
) -> tuple[SurvivalDataset, GroundTruth]:
    """
    Generate a synthetic right-censored dataset.

    Args:
        spec (SyntheticSpec): The dataset specification.

    Returns:
        tuple[SurvivalDataset, GroundTruth]: The observed dataset and its
            latent ground truth.

    Raises:
        ValueError: If the specification is invalid.
    """
    validate_synthetic_spec(spec)

    rng = np.random.default_rng(spec.seed)
    x = torch.from_numpy(rng.uniform(size=(spec.n, spec.covariate_dim)))

    copula = build_copula(spec)
    event_marginal = build_marginal(spec.event)
    censor_marginal = build_marginal(spec.censor)

    with torch.no_grad():
        quantiles = copula.sample(spec.n, rng)
        latent_T = event_marginal.quantile(quantiles[:, 0], x)
        latent_U = censor_marginal.quantile(quantiles[:, 1], x)

    dataset = SurvivalDataset(
        x=x,
        t=torch.minimum(latent_T, latent_U),
        delta=(latent_T < latent_U).to(torch.float64),
    )

    logger.info(
        f"Generated `{spec.name}` dataset with {spec.n} records "
        f"(censoring rate: {dataset.censoring_rate:.3f})"
    )

    return dataset, GroundTruth(
        latent_T=latent_T,
        latent_U=latent_U,
        quantiles=quantiles,
        event_marginal=event_marginal,
        censor_marginal=censor_marginal,
        copula=copula,
    )


def builtin_specs(
    n: int = DEFAULT_NUM_SAMPLES,
    seed: int = 0,
    copula: str = CopulaFamily.INDEPENDENCE.value,
    tau: float | None = None,
) -> dict[str, SyntheticSpec]:
    """
    Build the Linear-Risk and Nonlinear-Risk dataset specifications.

    Linear-Risk uses 10 covariates with `psi(x) = beta . x` and coefficients
    drawn from `Uniform[0, 1]^10` (seeded by `seed`). Nonlinear-Risk uses one
    covariate with `psi_T(x) = 2 sin(pi x)` and `psi_U(x) = 2 sin(pi x + 0.5)`.

    Args:
        n (int): The number of records.
        seed (int): The seed for coefficients and sampling.
        copula (str): The copula family.
        tau (float | None): The copula's Kendall's tau.

    Returns:
        dict[str, SyntheticSpec]: The specifications by name.
    """
    linear_dim = 10
    beta_rng = np.random.default_rng(seed)
    beta_T, beta_U = beta_rng.uniform(size=(2, linear_dim))

    linear = SyntheticSpec(
        name=LINEAR_RISK_SPEC,
        n=n,
        covariate_dim=linear_dim,
        event=MarginalSpec(
            nu=4.0, rho=14.0, risk=LinearRisk(linear_dim, beta_T).to_dict()
        ),
        censor=MarginalSpec(
            nu=3.0, rho=16.0, risk=LinearRisk(linear_dim, beta_U).to_dict()
        ),
        copula=copula,
        tau=tau,
        seed=seed,
    )
    nonlinear = SyntheticSpec(
        name=NONLINEAR_RISK_SPEC,
        n=n,
        covariate_dim=1,
        event=MarginalSpec(
            nu=4.0,
            rho=17.0,
            risk=SineRisk(1, amplitude=2.0, frequency=math.pi).to_dict(),
        ),
        censor=MarginalSpec(
            nu=3.0,
            rho=16.0,
            risk=SineRisk(
                1, amplitude=2.0, frequency=math.pi, phase=0.5
            ).to_dict(),
        ),
        copula=copula,
        tau=tau,
        seed=seed,
    )

    return {LINEAR_RISK_SPEC: linear, NONLINEAR_RISK_SPEC: nonlinear}
