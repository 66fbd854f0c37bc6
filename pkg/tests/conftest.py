import numpy as np
import pytest
import torch

from copula_survival.copulas.generator_network import GeneratorNetwork
from copula_survival.likelihood.survival_dataset import SurvivalDataset
from copula_survival.marginals.risk_functions import LinearRisk
from copula_survival.marginals.survival_marginals import (
    LogNormal,
    WeibullCoxPH,
)
from copula_survival.training.train_config import ModelConfig, TrainConfig


@pytest.fixture
def unit_exponential() -> WeibullCoxPH:
    # S(t) = exp(-t) for every covariate
    return WeibullCoxPH(
        risk=LinearRisk(1, [0.0], trainable=False),
        nu=1.0,
        rho=1.0,
        trainable=False,
    )


@pytest.fixture
def rate_two_exponential() -> WeibullCoxPH:
    # S(t) = exp(-2 t) for every covariate
    return WeibullCoxPH(
        risk=LinearRisk(1, [0.0], trainable=False),
        nu=1.0,
        rho=0.5,
        trainable=False,
    )


@pytest.fixture
def weibull_marginal() -> WeibullCoxPH:
    return WeibullCoxPH(risk=LinearRisk(2, [0.3, -0.2]), nu=1.3, rho=1.1)


@pytest.fixture
def lognormal_marginal() -> LogNormal:
    return LogNormal(risk=LinearRisk(2, [-0.1, 0.4]), mu=0.2, sigma=0.8)


@pytest.fixture
def degenerate_network() -> GeneratorNetwork:
    # A single unit with a unit rate: phi(t) = exp(-t)
    network = GeneratorNetwork(widths=[1])
    with torch.no_grad():
        network.phi_B[0].zero_()

    return network


@pytest.fixture
def random_network() -> GeneratorNetwork:
    return GeneratorNetwork(
        widths=[10, 10], generator=torch.Generator().manual_seed(0)
    )


@pytest.fixture
def small_dataset() -> SurvivalDataset:
    rng = np.random.default_rng(0)
    n = 10

    return SurvivalDataset(
        x=torch.from_numpy(rng.uniform(size=(n, 2))),
        t=torch.from_numpy(rng.uniform(0.2, 2.0, size=n)),
        delta=torch.tensor([1, 0, 1, 1, 0, 1, 0, 0, 1, 1]),
    )


@pytest.fixture
def small_model_config() -> ModelConfig:
    return ModelConfig(copula="clayton", init_tau=0.2, widths=[2, 2])


@pytest.fixture
def fast_train_config() -> TrainConfig:
    return TrainConfig(
        learning_rate=1e-2, batch_size=64, max_epochs=3, patience=2, seed=0
    )
