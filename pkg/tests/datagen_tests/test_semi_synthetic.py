import math

import pytest
import torch
from torch.testing import assert_close

from copula_survival.copulas.archimedean_copula import (
    ArchimedeanCopula,
    copula_from_tau,
)
from copula_survival.copulas.closed_form_generators import (
    IndependenceGenerator,
)
from copula_survival.datagen.semi_synthetic import (
    CENSOR_SHAPE_RATIO,
    fit_weibull_event_model,
    induce_semisynthetic,
)
from copula_survival.marginals.risk_functions import LinearRisk
from copula_survival.marginals.survival_marginals import WeibullCoxPH


@pytest.fixture
def weibull_outcomes() -> tuple[torch.Tensor, torch.Tensor]:
    # Fully observed outcomes of a known Weibull proportional-hazards model
    generator = torch.Generator().manual_seed(0)
    x = torch.rand(3000, 2, generator=generator, dtype=torch.float64)
    truth = WeibullCoxPH(
        LinearRisk(2, [0.8, -0.5], trainable=False),
        nu=2.0,
        rho=3.0,
        trainable=False,
    )
    u = torch.rand(3000, generator=generator, dtype=torch.float64)

    with torch.no_grad():
        y = truth.quantile(u, x)

    return x, y


def test_fit_weibull_event_model(
    weibull_outcomes: tuple[torch.Tensor, torch.Tensor],
) -> None:
    x, y = weibull_outcomes

    model = fit_weibull_event_model(x, y)

    assert model.nu.item() == pytest.approx(2.0, rel=0.1)
    assert model.rho.item() == pytest.approx(3.0, rel=0.1)
    assert_close(
        model.risk.beta.detach(),
        torch.tensor([0.8, -0.5], dtype=torch.float64),
        rtol=0.0,
        atol=0.2,
    )
    assert not any(p.requires_grad for p in model.parameters())


def test_induced_censoring_follows_copula(
    weibull_outcomes: tuple[torch.Tensor, torch.Tensor],
) -> None:
    x, y = weibull_outcomes
    copula = copula_from_tau("clayton", 0.5)

    dataset, truth = induce_semisynthetic(x, y, copula, seed=1)

    assert torch.equal(truth.latent_T, y)
    assert torch.equal(dataset.t, torch.minimum(y, truth.latent_U))
    assert torch.equal(dataset.delta, (y < truth.latent_U).double())
    assert 0 < dataset.num_censored < len(dataset)
    assert truth.copula is copula

    with torch.no_grad():
        v = truth.censor_marginal.survival(truth.latent_U, x)
        u = truth.event_marginal.survival(y, x)

    assert_close(v, truth.quantiles[:, 1])
    assert_close(u, truth.quantiles[:, 0])


def test_censoring_model_shares_event_risk(
    weibull_outcomes: tuple[torch.Tensor, torch.Tensor],
) -> None:
    x, y = weibull_outcomes

    _, truth = induce_semisynthetic(
        x, y, ArchimedeanCopula(IndependenceGenerator())
    )

    event, censor = truth.event_marginal, truth.censor_marginal
    assert censor.nu.item() == pytest.approx(
        event.nu.item() / CENSOR_SHAPE_RATIO
    )
    assert censor.rho.item() == pytest.approx(event.rho.item())
    assert torch.equal(censor.risk.beta, event.risk.beta)


def test_induction_is_deterministic(
    weibull_outcomes: tuple[torch.Tensor, torch.Tensor],
) -> None:
    x, y = weibull_outcomes
    copula = copula_from_tau("frank", 0.3)

    _, first = induce_semisynthetic(x[:200], y[:200], copula, seed=4)
    _, second = induce_semisynthetic(x[:200], y[:200], copula, seed=4)
    _, other = induce_semisynthetic(x[:200], y[:200], copula, seed=5)

    assert torch.equal(first.latent_U, second.latent_U)
    assert not torch.equal(first.latent_U, other.latent_U)


def test_single_covariate_vector() -> None:
    generator = torch.Generator().manual_seed(2)
    x = torch.rand(50, generator=generator, dtype=torch.float64)
    y = 0.5 + torch.rand(50, generator=generator, dtype=torch.float64)

    dataset, _ = induce_semisynthetic(x, y, copula_from_tau("gumbel", 0.2))

    assert dataset.x.shape == (50, 1)


@pytest.mark.parametrize(
    "y, match",
    [
        (torch.tensor([1.0, 0.0, 2.0]), "finite and positive"),
        (torch.tensor([1.0, math.nan, 2.0]), "finite and positive"),
        (torch.tensor([1.0, 2.0]), "do not match"),
    ],
)
def test_invalid_outcomes(y: torch.Tensor, match: str) -> None:
    x = torch.ones(3, 2, dtype=torch.float64)

    with pytest.raises(ValueError, match=match):
        induce_semisynthetic(x, y, copula_from_tau("clayton", 0.3))
