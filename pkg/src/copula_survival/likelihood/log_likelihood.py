"""
Right-censored log-likelihoods under dependent and independent censoring.

For a record `(x, t, delta)` with `u = S_T(t | x)` and `v = S_U(t | x)`, the
dependent-censoring log-likelihood of a copula `C` of `(S_T(T), S_U(U))` is

    delta = 1:  log f_T(t | x) + log dC/du(u, v)
    delta = 0:  log f_U(t | x) + log dC/dv(u, v)

and the (full) independent-censoring log-likelihood is

    delta = 1:  log f_T(t | x) + log S_U(t | x)
    delta = 0:  log f_U(t | x) + log S_T(t | x)

The reduced independent form drops the censoring-marginal factors. Both
coincide when `C` is the independence copula.

All terms are computed in log space. Survival probabilities are floored at
1e-300 before entering the copula, and every log term is clamped at
`log(1e-300)`; a warning is logged when more than 1% of a batch is clamped.
"""

import logging

import torch

from copula_survival.copulas.archimedean_copula import ArchimedeanCopula
from copula_survival.exceptions import NumericalError
from copula_survival.marginals.survival_marginals import SurvivalMarginal
from copula_survival.utilities.math_utils import LOG_PROB_FLOOR

from .survival_dataset import SurvivalDataset, SurvivalRecord
from .survival_model import Objective, SurvivalCopulaModel

logger = logging.getLogger(__name__)

# Fraction of clamped terms above which a diagnostic warning is logged
CLAMP_WARNING_FRACTION = 0.01


def _as_dataset(data: SurvivalDataset | SurvivalRecord) -> SurvivalDataset:
    if isinstance(data, SurvivalRecord):
        return SurvivalDataset.from_records([data])

    return data


def _clamp_log_terms(
    *terms: torch.Tensor,
) -> tuple[torch.Tensor, torch.Tensor]:
    # Clamp each log term at the floor, flagging records with clamped terms
    clamped = torch.zeros_like(terms[0], dtype=torch.bool)
    total = torch.zeros_like(terms[0])
    for term in terms:
        clamped = clamped | (term < LOG_PROB_FLOOR)
        total = total + torch.clamp(term, min=LOG_PROB_FLOOR)

    return total, clamped


def _check_terms(terms: torch.Tensor, clamped: torch.Tensor) -> None:
    non_finite = ~torch.isfinite(terms)
    if non_finite.any():
        index = int(torch.nonzero(non_finite)[0].item())
        raise NumericalError(
            f"Non-finite log-likelihood term for record {index}.",
            record_index=index,
        )

    num_clamped = int(clamped.sum().item())
    if num_clamped > CLAMP_WARNING_FRACTION * terms.numel():
        logger.warning(
            f"{num_clamped}/{terms.numel()} log-likelihood terms were clamped "
            f"at log(1e-300)."
        )


def _floored_survival(log_survival: torch.Tensor) -> torch.Tensor:
    return torch.exp(torch.clamp(log_survival, min=LOG_PROB_FLOOR))


def loglik_dep_terms(
    copula: ArchimedeanCopula,
    event_marginal: SurvivalMarginal,
    censor_marginal: SurvivalMarginal,
    data: SurvivalDataset | SurvivalRecord,
) -> torch.Tensor:
    """
    Compute the per-record dependent-censoring log-likelihood terms.

    Args:
        copula (ArchimedeanCopula): The copula linking the event and
            censoring survival functions.
        event_marginal (SurvivalMarginal): The event time marginal.
        censor_marginal (SurvivalMarginal): The censoring time marginal.
        data (SurvivalDataset | SurvivalRecord): The records.

    Returns:
        torch.Tensor: The log-likelihood terms, with shape `(n,)`.

    Raises:
        NumericalError: If a term is non-finite. The error carries the index
            of the first offending record.
    """
    dataset = _as_dataset(data)
    x, t, delta = dataset.x, dataset.t, dataset.delta

    u = _floored_survival(event_marginal.log_survival(t, x))
    v = _floored_survival(censor_marginal.log_survival(t, x))
    log_partial_u, log_partial_v = copula.log_partials(u, v)

    is_event = delta == 1
    log_density = torch.where(
        is_event,
        event_marginal.log_density(t, x),
        censor_marginal.log_density(t, x),
    )
    log_partial = torch.where(is_event, log_partial_u, log_partial_v)

    terms, clamped = _clamp_log_terms(log_density, log_partial)
    _check_terms(terms, clamped)

    return terms


def loglik_dep(
    copula: ArchimedeanCopula,
    event_marginal: SurvivalMarginal,
    censor_marginal: SurvivalMarginal,
    record: SurvivalRecord,
) -> torch.Tensor:
    """Compute the dependent-censoring log-likelihood of a single record."""
    return loglik_dep_terms(copula, event_marginal, censor_marginal, record)[0]


def loglik_indep_terms(
    event_marginal: SurvivalMarginal,
    censor_marginal: SurvivalMarginal,
    data: SurvivalDataset | SurvivalRecord,
    full: bool = True,
) -> torch.Tensor:
    """
    Compute the per-record independent-censoring log-likelihood terms.

    Args:
        event_marginal (SurvivalMarginal): The event time marginal.
        censor_marginal (SurvivalMarginal): The censoring time marginal.
        data (SurvivalDataset | SurvivalRecord): The records.
        full (bool): Whether to include the censoring-marginal factors
            (`S_U` for events, `f_U` for censorings). If `False`, the reduced
            form `delta log f_T + (1 - delta) log S_T` is returned.

    Returns:
        torch.Tensor: The log-likelihood terms, with shape `(n,)`.

    Raises:
        NumericalError: If a term is non-finite.
    """
    dataset = _as_dataset(data)
    x, t, delta = dataset.x, dataset.t, dataset.delta
    is_event = delta == 1

    event_term = torch.where(
        is_event,
        event_marginal.log_density(t, x),
        event_marginal.log_survival(t, x),
    )
    if full:
        censor_term = torch.where(
            is_event,
            censor_marginal.log_survival(t, x),
            censor_marginal.log_density(t, x),
        )
        terms, clamped = _clamp_log_terms(event_term, censor_term)
    else:
        terms, clamped = _clamp_log_terms(event_term)

    _check_terms(terms, clamped)

    return terms


def loglik_indep(
    event_marginal: SurvivalMarginal,
    censor_marginal: SurvivalMarginal,
    record: SurvivalRecord,
    full: bool = True,
) -> torch.Tensor:
    """Compute the independent-censoring log-likelihood of a single record."""
    return loglik_indep_terms(event_marginal, censor_marginal, record, full)[0]


def model_log_likelihood(
    model: SurvivalCopulaModel,
    data: SurvivalDataset,
    objective: Objective = Objective.DEPENDENT,
) -> torch.Tensor:
    """
    Compute the mean log-likelihood of a model over a dataset.

    The independent objective uses the full independence likelihood so that
    both marginals are fitted.
    """
    if objective == Objective.DEPENDENT:
        terms = loglik_dep_terms(
            model.copula, model.event_marginal, model.censor_marginal, data
        )
    else:
        terms = loglik_indep_terms(
            model.event_marginal, model.censor_marginal, data, full=True
        )

    return terms.mean()


def loglik_grad(
    model: SurvivalCopulaModel,
    batch: SurvivalDataset,
    objective: Objective = Objective.DEPENDENT,
) -> tuple[float, dict[str, torch.Tensor]]:
    """
    Compute the mean log-likelihood of a batch and its gradient with respect
    to every trainable copula and marginal parameter.

    Gradients of learned generators chain through the implicit derivative of
    the generator inverse.

    Args:
        model (SurvivalCopulaModel): The model.
        batch (SurvivalDataset): The batch of records.
        objective (Objective): The likelihood objective.

    Returns:
        tuple[float, dict[str, torch.Tensor]]: The mean log-likelihood and a
            dictionary mapping parameter names (as in `named_parameters()`)
            to gradients.

    Raises:
        NumericalError: If the log-likelihood or any gradient is non-finite.
    """
    named_params = [
        (name, param)
        for name, param in model.named_parameters()
        if param.requires_grad
    ]

    mean_ll = model_log_likelihood(model, batch, objective)
    grads = torch.autograd.grad(
        mean_ll, [param for _, param in named_params], allow_unused=True
    )

    grad_record: dict[str, torch.Tensor] = {}
    for (name, param), grad in zip(named_params, grads, strict=True):
        grad = grad if grad is not None else torch.zeros_like(param)
        if not torch.isfinite(grad).all():
            raise NumericalError(
                f"Non-finite log-likelihood gradient for parameter `{name}`."
            )

        grad_record[name] = grad.detach()

    return float(mean_ll.item()), grad_record
