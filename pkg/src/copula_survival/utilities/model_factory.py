import torch

from copula_survival.copulas.archimedean_copula import (
    ArchimedeanCopula,
    copula_from_tau,
    create_copula,
)
from copula_survival.copulas.closed_form_generators import (
    CopulaFamily,
    parse_family,
)
from copula_survival.likelihood.survival_dataset import SurvivalDataset
from copula_survival.likelihood.survival_model import SurvivalCopulaModel
from copula_survival.marginals.risk_functions import create_risk_function
from copula_survival.marginals.survival_marginals import (
    SurvivalMarginal,
    create_marginal,
)
from copula_survival.training.train_config import ModelConfig


def create_model_copula(
    config: ModelConfig, torch_generator: torch.Generator | None = None
) -> ArchimedeanCopula:
    family = parse_family(config.copula)
    if family in (CopulaFamily.NETWORK, CopulaFamily.INDEPENDENCE):
        return create_copula(
            family, widths=config.widths, torch_generator=torch_generator
        )

    return copula_from_tau(family, config.init_tau, trainable=True)


def create_initial_marginal(
    config: ModelConfig, dataset: SurvivalDataset
) -> SurvivalMarginal:
    """
    Create a trainable marginal initialized from the observed times: Weibull
    scales start at the mean observed time and log-normal locations at the
    mean log observed time.
    """
    risk = create_risk_function(
        config.risk, dataset.covariate_dim, hidden=config.mlp_hidden
    )
    positive_times = dataset.t[dataset.t > 0]
    if config.marginal == "weibull":
        params = {"nu": 1.0, "rho": float(positive_times.mean().item())}
    else:
        params = {
            "mu": float(torch.log(positive_times).mean().item()),
            "sigma": 1.0,
        }

    return create_marginal(config.marginal, risk, params=params)


def create_model(
    config: ModelConfig,
    dataset: SurvivalDataset,
    torch_generator: torch.Generator | None = None,
) -> SurvivalCopulaModel:
    """
    Create an untrained survival copula model for a dataset.

    Args:
        config (ModelConfig): The model specification.
        dataset (SurvivalDataset): The dataset used for initializing the
            marginal scales and the covariate dimension.
        torch_generator (torch.Generator | None): The random generator used
            for generator network initialization.

    Returns:
        SurvivalCopulaModel: The model.
    """
    return SurvivalCopulaModel(
        copula=create_model_copula(config, torch_generator),
        event_marginal=create_initial_marginal(config, dataset),
        censor_marginal=create_initial_marginal(config, dataset),
    )
