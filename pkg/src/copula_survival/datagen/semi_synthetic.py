"""
Semi-synthetic censoring induction for real covariate/outcome data.

Every outcome of the source dataset is treated as an observed event. A
Weibull proportional-hazards event model is fitted to it by maximum
likelihood, and a censoring model with the same risk function and a larger
shape (`nu_U = nu_T / CENSOR_SHAPE_RATIO`) is derived from the fit. Each
record's censoring time is then drawn conditionally on its event quantile
through the requested copula, which injects the copula's dependency between
the event and censoring times.
"""

import logging

import numpy as np
import torch

from copula_survival.copulas.archimedean_copula import (
    UNIFORM_EPS,
    ArchimedeanCopula,
)
from copula_survival.exceptions import NumericalError
from copula_survival.likelihood.survival_dataset import SurvivalDataset
from copula_survival.marginals.risk_functions import LinearRisk
from copula_survival.marginals.survival_marginals import WeibullCoxPH

from .synthetic import GroundTruth

logger = logging.getLogger(__name__)

CENSOR_SHAPE_RATIO = 0.8
LBFGS_MAX_ITER = 500


def _validate_outcomes(x: torch.Tensor, y: torch.Tensor) -> None:
    if x.dim() != 2 or y.dim() != 1 or x.shape[0] != y.shape[0]:
        raise ValueError(
            f"Covariates of shape {tuple(x.shape)} do not match "
            f"{tuple(y.shape)} outcomes."
        )

    if not torch.isfinite(y).all() or (y <= 0).any():
        raise ValueError("Outcomes must be finite and positive.")


def fit_weibull_event_model(
    x: torch.Tensor, y: torch.Tensor, max_iter: int = LBFGS_MAX_ITER
) -> WeibullCoxPH:
    """
    Fit a Weibull proportional-hazards model with a linear risk function to
    fully observed outcomes by maximum likelihood (L-BFGS with a
    strong-Wolfe line search).

    Args:
        x (torch.Tensor): The covariates, with shape `(n, d)`.
        y (torch.Tensor): The positive outcomes, with shape `(n,)`.
        max_iter (int): The maximum number of L-BFGS iterations.

    Returns:
        WeibullCoxPH: The fitted model, with frozen parameters.

    Raises:
        ValueError: If the outcomes are not positive or do not match the
            covariates.
        NumericalError: If the fit produces non-finite parameters or
            log-likelihood.
    """
    x = torch.as_tensor(x, dtype=torch.float64)
    y = torch.as_tensor(y, dtype=torch.float64)
    _validate_outcomes(x, y)

    model = WeibullCoxPH(
        risk=LinearRisk(x.shape[1]), nu=1.0, rho=float(y.mean().item())
    )
    optimizer = torch.optim.LBFGS(
        model.parameters(),
        lr=1.0,
        max_iter=max_iter,
        tolerance_grad=1e-10,
        tolerance_change=1e-14,
        line_search_fn="strong_wolfe",
    )

    def closure() -> torch.Tensor:
        optimizer.zero_grad()
        loss = -model.log_density(y, x).mean()
        loss.backward()
        return loss

    optimizer.step(closure)

    with torch.no_grad():
        mean_ll = model.log_density(y, x).mean()

    params = torch.cat([p.detach().flatten() for p in model.parameters()])
    if not torch.isfinite(params).all() or not torch.isfinite(mean_ll):
        raise NumericalError("The Weibull event model fit did not converge.")

    logger.info(
        f"Fitted Weibull event model (nu={model.nu.item():.4f}, "
        f"rho={model.rho.item():.4f}, mean log-likelihood "
        f"{mean_ll.item():.4f})"
    )

    model.requires_grad_(False)

    return model


def induce_semisynthetic(
    x: torch.Tensor,
    y: torch.Tensor,
    copula: ArchimedeanCopula,
    seed: int = 0,
) -> tuple[SurvivalDataset, GroundTruth]:
    """
    Induce dependent censoring on a dataset of fully observed outcomes.

    Args:
        x (torch.Tensor): The covariates, with shape `(n, d)`.
        y (torch.Tensor): The positive outcomes, used as event times.
        copula (ArchimedeanCopula): The copula linking event and censoring
            quantiles.
        seed (int): The seed for the conditional sampling draws.

    Returns:
        tuple[SurvivalDataset, GroundTruth]: The censored dataset and the
            fitted event/censoring models with the quantile pairs.

    Raises:
        ValueError: If the outcomes are not positive or do not match the
            covariates.
        NumericalError: If the event model fit fails.
    """
    x = torch.as_tensor(x, dtype=torch.float64)
    y = torch.as_tensor(y, dtype=torch.float64)
    if x.dim() == 1:
        x = x.unsqueeze(-1)

    event_marginal = fit_weibull_event_model(x, y)
    beta = event_marginal.risk.to_dict()["beta"]
    censor_marginal = WeibullCoxPH(
        risk=LinearRisk(x.shape[1], beta, trainable=False),
        nu=event_marginal.nu.item() / CENSOR_SHAPE_RATIO,
        rho=event_marginal.rho.item(),
        trainable=False,
    )

    rng = np.random.default_rng(seed)
    w = torch.from_numpy(
        np.clip(rng.random(y.shape[0]), UNIFORM_EPS, 1 - UNIFORM_EPS)
    )

    with torch.no_grad():
        u = torch.clamp(
            event_marginal.survival(y, x), UNIFORM_EPS, 1 - UNIFORM_EPS
        )
        v = torch.clamp(
            copula.conditional_sample(u, w), UNIFORM_EPS, 1 - UNIFORM_EPS
        )
        latent_U = censor_marginal.quantile(v, x)

    dataset = SurvivalDataset(
        x=x, t=torch.minimum(y, latent_U), delta=(y < latent_U).double()
    )

    logger.info(
        f"Induced censoring on {len(dataset)} records with `{copula.family}` "
        f"copula (censoring rate: {dataset.censoring_rate:.3f})"
    )

    return dataset, GroundTruth(
        latent_T=y.clone(),
        latent_U=latent_U,
        quantiles=torch.stack([u, v], dim=1),
        event_marginal=event_marginal,
        censor_marginal=censor_marginal,
        copula=copula,
    )
