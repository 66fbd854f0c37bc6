"""
End-to-end maximum likelihood training of survival copula models.

Training follows a mini-batch loop: a fixed train/validation/test split, a
fixed shuffle order per epoch, one joint gradient of the batch
log-likelihood per step, and AdamW updates applied to two parameter groups
(marginals and copula). Training stops once the validation log-likelihood
has not improved for `patience` epochs, and the best-validation snapshot is
restored.

Runs are deterministic given the configuration seed: the split, shuffle
order and model initialization all draw from seeded generators.
"""

import copy
import logging
import math
from typing import NamedTuple

import torch
from tqdm import tqdm

from copula_survival.exceptions import NumericalError, TrainingDivergedError
from copula_survival.likelihood.log_likelihood import (
    loglik_grad,
    model_log_likelihood,
)
from copula_survival.likelihood.survival_dataset import SurvivalDataset
from copula_survival.likelihood.survival_model import (
    Objective,
    SurvivalCopulaModel,
)
from copula_survival.utilities.model_factory import create_model

from .adamw import AdamW
from .train_config import (
    EpochRecord,
    ModelConfig,
    TrainConfig,
    TrainState,
    validate_model_config,
    validate_train_config,
)

logger = logging.getLogger(__name__)


class DataSplits(NamedTuple):
    train: torch.Tensor
    val: torch.Tensor
    test: torch.Tensor


class FitResult(NamedTuple):
    model: SurvivalCopulaModel
    state: TrainState
    splits: DataSplits
    optimizer: AdamW


def split_indices(
    n: int, config: TrainConfig, generator: torch.Generator
) -> DataSplits:
    """
    Randomly split `n` record indices into train, validation and test sets.

    Raises:
        ValueError: If any split would be empty.
    """
    n_train = int(math.floor(config.train_fraction * n))
    n_val = int(math.floor(config.val_fraction * n))
    n_test = int(math.floor(config.test_fraction * n))
    if min(n_train, n_val, n_test) < 1:
        raise ValueError(
            f"Dataset of {n} records is too small for the split fractions "
            f"({config.train_fraction}, {config.val_fraction}, "
            f"{config.test_fraction})."
        )

    perm = torch.randperm(n, generator=generator)

    return DataSplits(
        train=perm[:n_train],
        val=perm[n_train : n_train + n_val],
        test=perm[n_train + n_val : n_train + n_val + n_test],
    )


def create_optimizer(
    model: SurvivalCopulaModel, config: TrainConfig
) -> AdamW:
    param_groups = [
        {
            "params": model.marginal_parameters(),
            "weight_decay": config.weight_decay,
        }
    ]
    copula_params = model.copula_parameters()
    if copula_params and config.objective == Objective.DEPENDENT.value:
        param_groups.append(
            {
                "params": copula_params,
                "weight_decay": config.copula_weight_decay,
            }
        )

    return AdamW(param_groups, lr=config.learning_rate)


def train_epoch(
    model: SurvivalCopulaModel,
    optimizer: AdamW,
    train_data: SurvivalDataset,
    batch_size: int,
    objective: Objective,
    generator: torch.Generator,
) -> float:
    """
    Run one training epoch over shuffled mini-batches.

    Returns:
        float: The record-weighted mean training log-likelihood.
    """
    perm = torch.randperm(len(train_data), generator=generator)
    named_params = dict(model.named_parameters())

    total_ll = 0.0
    for batch_indices in perm.split(batch_size):
        batch = train_data.subset(batch_indices)
        mean_ll, grads = loglik_grad(model, batch, objective)

        # Maximize the log-likelihood
        optimizer.zero_grad()
        for name, grad in grads.items():
            named_params[name].grad = -grad

        optimizer.step()
        model.validate_parameters()

        total_ll += mean_ll * len(batch)

    return total_ll / len(train_data)


def evaluate_log_likelihood(
    model: SurvivalCopulaModel, data: SurvivalDataset, objective: Objective
) -> float:
    # Non-finite validation terms count as divergence
    try:
        with torch.no_grad():
            return float(model_log_likelihood(model, data, objective).item())
    except NumericalError:
        return math.nan


def fit(
    dataset: SurvivalDataset,
    model_config: ModelConfig,
    train_config: TrainConfig,
    model: SurvivalCopulaModel | None = None,
    verbose: int = 0,
) -> FitResult:
    """
    Fit a survival copula model by maximizing the censored log-likelihood.

    Args:
        dataset (SurvivalDataset): The full dataset, split internally.
        model_config (ModelConfig): The model specification. Ignored when
            `model` is provided.
        train_config (TrainConfig): The training hyperparameters.
        model (SurvivalCopulaModel | None): An optional initial model. If
            `None`, a model is created from `model_config` with a seeded
            initialization.
        verbose (int): The verbosity level: 0 = no output, 1 = progress bar,
            2 = per-epoch log-likelihoods.

    Returns:
        FitResult: The best-validation model, the training state, the split
            indices and the optimizer.

    Raises:
        ConfigError: If the configuration is invalid.
        ValueError: If the dataset lacks events or censorings.
        TrainingDivergedError: If the validation log-likelihood becomes NaN
            or -inf, or a training step produces non-finite values.
    """
    validate_train_config(train_config)
    validate_model_config(model_config)

    if dataset.num_events == 0 or dataset.num_censored == 0:
        raise ValueError(
            "Training requires both observed events and censorings."
        )

    objective = Objective(train_config.objective)
    generator = torch.Generator().manual_seed(train_config.seed)
    splits = split_indices(len(dataset), train_config, generator)
    train_data = dataset.subset(splits.train)
    val_data = dataset.subset(splits.val)

    if model is None:
        init_generator = torch.Generator().manual_seed(train_config.seed)
        with torch.random.fork_rng():
            torch.manual_seed(train_config.seed)
            model = create_model(model_config, train_data, init_generator)

    optimizer = create_optimizer(model, train_config)
    state = TrainState(best_state=copy.deepcopy(model.state_dict()))

    logger.info(
        f"Training on {len(train_data)} records ({len(val_data)} validation) "
        f"with objective `{objective.value}`"
    )

    epochs = tqdm(
        range(1, train_config.max_epochs + 1),
        desc="Training",
        disable=verbose < 1,
    )
    for epoch in epochs:
        try:
            train_ll = train_epoch(
                model=model,
                optimizer=optimizer,
                train_data=train_data,
                batch_size=train_config.batch_size,
                objective=objective,
                generator=generator,
            )
        except NumericalError as e:
            state.history.append(EpochRecord(epoch, math.nan, math.nan))
            raise TrainingDivergedError(
                f"Training diverged at epoch {epoch}: {e}", state.history
            ) from e

        val_ll = evaluate_log_likelihood(model, val_data, objective)
        state.history.append(EpochRecord(epoch, train_ll, val_ll))

        if verbose > 1:
            print(
                f"  Epoch {epoch}: train_ll={train_ll:.6f}, "
                f"val_ll={val_ll:.6f}"
            )

        logger.debug(
            f"Epoch {epoch}: train_ll={train_ll:.6f}, val_ll={val_ll:.6f}"
        )

        if math.isnan(val_ll) or val_ll == -math.inf:
            raise TrainingDivergedError(
                f"Validation log-likelihood diverged at epoch {epoch}.",
                state.history,
            )

        if val_ll > state.best_val_ll:
            state.best_val_ll = val_ll
            state.best_epoch = epoch
            state.best_state = copy.deepcopy(model.state_dict())
            state.epochs_without_improvement = 0
        else:
            state.epochs_without_improvement += 1

        epochs.set_postfix(val_ll=f"{val_ll:.4f}")

        if state.epochs_without_improvement >= train_config.patience:
            logger.info(f"Early stopping at epoch {epoch}")
            break

    model.load_state_dict(state.best_state)
    state.optimizer_state = optimizer.state_dict()

    logger.info(
        f"Best validation log-likelihood {state.best_val_ll:.6f} at epoch "
        f"{state.best_epoch}"
    )

    return FitResult(
        model=model, state=state, splits=splits, optimizer=optimizer
    )
