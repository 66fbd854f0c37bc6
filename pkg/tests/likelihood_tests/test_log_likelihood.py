import logging
import math

import pytest
import torch
from torch.testing import assert_close

from copula_survival.copulas.archimedean_copula import (
    ArchimedeanCopula,
    copula_from_tau,
)
from copula_survival.copulas.closed_form_generators import (
    ClaytonGenerator,
    IndependenceGenerator,
)
from copula_survival.copulas.generator_network import GeneratorNetwork
from copula_survival.exceptions import NumericalError
from copula_survival.likelihood.log_likelihood import (
    loglik_dep,
    loglik_dep_terms,
    loglik_grad,
    loglik_indep,
    loglik_indep_terms,
    model_log_likelihood,
)
from copula_survival.likelihood.survival_dataset import (
    SurvivalDataset,
    SurvivalRecord,
)
from copula_survival.likelihood.survival_model import (
    Objective,
    SurvivalCopulaModel,
)
from copula_survival.marginals.survival_marginals import (
    LogNormal,
    WeibullCoxPH,
)
from tests.finite_differences import finite_difference_param_grads

LOG_LIKELIHOOD_LOGGER = "copula_survival.likelihood.log_likelihood"


@pytest.fixture
def clayton_model(
    weibull_marginal: WeibullCoxPH, lognormal_marginal: LogNormal
) -> SurvivalCopulaModel:
    return SurvivalCopulaModel(
        copula=ArchimedeanCopula(ClaytonGenerator(2.0)),
        event_marginal=weibull_marginal,
        censor_marginal=lognormal_marginal,
    )


def test_independence_copula_matches_independent_likelihood(
    weibull_marginal: WeibullCoxPH,
    lognormal_marginal: LogNormal,
    small_dataset: SurvivalDataset,
) -> None:
    copula = ArchimedeanCopula(IndependenceGenerator())

    with torch.no_grad():
        dep = loglik_dep_terms(
            copula, weibull_marginal, lognormal_marginal, small_dataset
        )
        indep = loglik_indep_terms(
            weibull_marginal, lognormal_marginal, small_dataset, full=True
        )

    assert_close(dep, indep, rtol=1e-12, atol=1e-12)


def test_clayton_likelihood_values(
    unit_exponential: WeibullCoxPH, rate_two_exponential: WeibullCoxPH
) -> None:
    copula = ArchimedeanCopula(ClaytonGenerator(2.0))
    t = 0.5

    # u = S_T(t) = exp(-0.5) and v = S_U(t) = exp(-1)
    u, v = math.exp(-t), math.exp(-2 * t)
    log_inner = math.log(u**-2 + v**-2 - 1)
    expected_event = -t + (-3 * math.log(u) - 1.5 * log_inner)
    expected_censored = (
        math.log(2.0) - 2 * t + (-3 * math.log(v) - 1.5 * log_inner)
    )

    with torch.no_grad():
        event = loglik_dep(
            copula,
            unit_exponential,
            rate_two_exponential,
            SurvivalRecord(x=(0.0,), t=t, delta=1),
        )
        censored = loglik_dep(
            copula,
            unit_exponential,
            rate_two_exponential,
            SurvivalRecord(x=(0.0,), t=t, delta=0),
        )

    assert event.item() == pytest.approx(expected_event, rel=1e-12)
    assert censored.item() == pytest.approx(expected_censored, rel=1e-12)


def test_reduced_independent_likelihood(
    unit_exponential: WeibullCoxPH, rate_two_exponential: WeibullCoxPH
) -> None:
    event = SurvivalRecord(x=(0.0,), t=1.0, delta=1)
    censored = SurvivalRecord(x=(0.0,), t=2.0, delta=0)

    with torch.no_grad():
        assert loglik_indep(
            unit_exponential, rate_two_exponential, event, full=False
        ).item() == pytest.approx(-1.0)
        assert loglik_indep(
            unit_exponential, rate_two_exponential, censored, full=False
        ).item() == pytest.approx(-2.0)

        # The full form adds log S_U(1) = -2 and log f_U(2) = log 2 - 4
        assert loglik_indep(
            unit_exponential, rate_two_exponential, event
        ).item() == pytest.approx(-3.0)
        assert loglik_indep(
            unit_exponential, rate_two_exponential, censored
        ).item() == pytest.approx(math.log(2.0) - 6.0)


def test_model_log_likelihood_objectives(
    clayton_model: SurvivalCopulaModel, small_dataset: SurvivalDataset
) -> None:
    with torch.no_grad():
        dep = model_log_likelihood(clayton_model, small_dataset)
        indep = model_log_likelihood(
            clayton_model, small_dataset, Objective.INDEPENDENT
        )
        dep_terms = loglik_dep_terms(
            clayton_model.copula,
            clayton_model.event_marginal,
            clayton_model.censor_marginal,
            small_dataset,
        )
        indep_terms = loglik_indep_terms(
            clayton_model.event_marginal,
            clayton_model.censor_marginal,
            small_dataset,
        )

    assert dep.item() == pytest.approx(dep_terms.mean().item())
    assert indep.item() == pytest.approx(indep_terms.mean().item())
    assert dep.item() != pytest.approx(indep.item())


def test_non_finite_term_reports_record_index(
    unit_exponential: WeibullCoxPH, rate_two_exponential: WeibullCoxPH
) -> None:
    dataset = SurvivalDataset(
        x=[0.0, 0.0, math.nan, 0.0], t=[1.0, 1.0, 1.0, 1.0], delta=[1] * 4
    )

    with pytest.raises(NumericalError, match="record 2") as exc_info:
        loglik_indep_terms(unit_exponential, rate_two_exponential, dataset)

    assert exc_info.value.record_index == 2


def test_clamped_terms_are_logged(
    unit_exponential: WeibullCoxPH,
    rate_two_exponential: WeibullCoxPH,
    caplog: pytest.LogCaptureFixture,
) -> None:
    # log S_T(1000) = -1000 lies below log(1e-300)
    dataset = SurvivalDataset(x=[0.0], t=[1000.0], delta=[0])

    with caplog.at_level(logging.WARNING, logger=LOG_LIKELIHOOD_LOGGER):
        terms = loglik_indep_terms(
            unit_exponential, rate_two_exponential, dataset, full=False
        )

    assert terms.item() == pytest.approx(math.log(1e-300))
    assert "1/1 log-likelihood terms were clamped" in caplog.text


def test_dependent_likelihood_survives_tiny_survival(
    unit_exponential: WeibullCoxPH, rate_two_exponential: WeibullCoxPH
) -> None:
    copula = ArchimedeanCopula(ClaytonGenerator(2.0))
    dataset = SurvivalDataset(x=[0.0, 0.0], t=[800.0, 0.3], delta=[0, 1])

    with torch.no_grad():
        terms = loglik_dep_terms(
            copula, unit_exponential, rate_two_exponential, dataset
        )

    assert torch.all(torch.isfinite(terms))
    assert torch.all(terms >= 2 * math.log(1e-300))


def test_loglik_grad_matches_backward(
    clayton_model: SurvivalCopulaModel, small_dataset: SurvivalDataset
) -> None:
    mean_ll, grads = loglik_grad(clayton_model, small_dataset)

    clayton_model.zero_grad()
    model_log_likelihood(clayton_model, small_dataset).backward()

    assert mean_ll == pytest.approx(
        model_log_likelihood(clayton_model, small_dataset).item()
    )
    assert "copula.generator.raw_theta" in grads
    for name, param in clayton_model.named_parameters():
        assert param.grad is not None
        assert_close(grads[name], param.grad)


@pytest.mark.parametrize("event_family", ["weibull", "lognormal"])
@pytest.mark.parametrize("family", ["clayton", "frank", "gumbel", "network"])
def test_loglik_grad_matches_finite_differences(
    family: str,
    event_family: str,
    weibull_marginal: WeibullCoxPH,
    lognormal_marginal: LogNormal,
    random_network: GeneratorNetwork,
    small_dataset: SurvivalDataset,
) -> None:
    copula = (
        ArchimedeanCopula(random_network)
        if family == "network"
        else copula_from_tau(family, 0.4, trainable=True)
    )
    event_marginal, censor_marginal = (
        (weibull_marginal, lognormal_marginal)
        if event_family == "weibull"
        else (lognormal_marginal, weibull_marginal)
    )
    model = SurvivalCopulaModel(
        copula=copula,
        event_marginal=event_marginal,
        censor_marginal=censor_marginal,
    )

    _, grads = loglik_grad(model, small_dataset)
    expected = finite_difference_param_grads(
        model, lambda: model_log_likelihood(model, small_dataset)
    )

    assert grads.keys() == expected.keys()
    assert any(name.startswith("copula.") for name in grads)
    for name, grad in grads.items():
        assert_close(grad, expected[name], rtol=1e-4, atol=1e-7)


def test_loglik_grad_is_invariant_to_duplication(
    clayton_model: SurvivalCopulaModel, small_dataset: SurvivalDataset
) -> None:
    doubled = small_dataset.subset(list(range(10)) * 2)

    mean_ll, grads = loglik_grad(clayton_model, small_dataset)
    doubled_ll, doubled_grads = loglik_grad(clayton_model, doubled)

    assert doubled_ll == pytest.approx(mean_ll, rel=1e-12)
    for name, grad in grads.items():
        assert_close(doubled_grads[name], grad, rtol=1e-10, atol=1e-14)


def test_independent_objective_has_no_copula_gradient(
    clayton_model: SurvivalCopulaModel, small_dataset: SurvivalDataset
) -> None:
    _, grads = loglik_grad(
        clayton_model, small_dataset, Objective.INDEPENDENT
    )

    assert grads["copula.generator.raw_theta"].item() == 0.0
    assert grads["event_marginal.log_nu"].item() != 0.0
