import math
from dataclasses import dataclass, field
from typing import Any, NamedTuple

import torch

from copula_survival.copulas.closed_form_generators import (
    CopulaFamily,
    parse_family,
    validate_tau,
)
from copula_survival.exceptions import ConfigError
from copula_survival.likelihood.survival_model import Objective
from copula_survival.marginals.survival_marginals import MARGINAL_FAMILIES


class TrainConfig(NamedTuple):
    learning_rate: float = 1e-4
    weight_decay: float = 0.0
    copula_weight_decay: float = 0.0
    batch_size: int = 512
    max_epochs: int = 200
    patience: int = 10
    train_fraction: float = 0.5
    val_fraction: float = 0.3
    test_fraction: float = 0.2
    objective: str = Objective.DEPENDENT.value
    seed: int = 0


class ModelConfig(NamedTuple):
    copula: str = CopulaFamily.NETWORK.value
    widths: list[int] = [10, 10]
    init_tau: float = 0.1
    marginal: str = "weibull"
    risk: str = "linear"
    mlp_hidden: list[int] = [32, 32, 32]


class EpochRecord(NamedTuple):
    epoch: int
    train_ll: float
    val_ll: float


@dataclass
class TrainState:
    """
    Mutable training state tracked across epochs.

    The AdamW moment accumulators and step counts live in the optimizer
    state; `optimizer_state` holds a copy taken at the end of training.

    Attributes:
        best_val_ll (float): The best validation log-likelihood so far.
        best_epoch (int): The epoch of the best validation log-likelihood (0
            before the first epoch).
        best_state (dict[str, torch.Tensor]): A snapshot of the model
            parameters at the best epoch.
        history (list[EpochRecord]): The per-epoch log-likelihood history.
        epochs_without_improvement (int): The early stopping counter.
        optimizer_state (dict[str, Any]): The optimizer state dictionary.
    """

    best_val_ll: float = -math.inf
    best_epoch: int = 0
    best_state: dict[str, torch.Tensor] = field(default_factory=dict)
    history: list[EpochRecord] = field(default_factory=list)
    epochs_without_improvement: int = 0
    optimizer_state: dict[str, Any] = field(default_factory=dict)


def validate_train_config(config: TrainConfig) -> None:
    """
    Validate training hyperparameters.

    Raises:
        ConfigError: If any hyperparameter is outside its valid range.
    """
    fractions = (
        config.train_fraction,
        config.val_fraction,
        config.test_fraction,
    )
    if any(fraction <= 0 for fraction in fractions):
        raise ConfigError(
            f"Split fractions must be positive, got {list(fractions)}."
        )

    if sum(fractions) > 1 + 1e-12:
        raise ConfigError(
            f"Split fractions must sum to at most 1, got {sum(fractions)}."
        )

    if config.patience < 1:
        raise ConfigError(f"Patience must be >= 1, got {config.patience}.")

    if config.batch_size < 1 or config.max_epochs < 1:
        raise ConfigError("`batch_size` and `max_epochs` must be >= 1.")

    if config.learning_rate <= 0:
        raise ConfigError(
            f"Learning rate must be positive, got {config.learning_rate}."
        )

    if config.weight_decay < 0 or config.copula_weight_decay < 0:
        raise ConfigError("Weight decay values must be nonnegative.")

    valid_objectives = [objective.value for objective in Objective]
    if config.objective not in valid_objectives:
        raise ConfigError(
            f"Unknown objective `{config.objective}`. Valid objectives: "
            f"{', '.join(valid_objectives)}."
        )


def validate_model_config(config: ModelConfig) -> None:
    """
    Validate a model specification.

    Raises:
        ConfigError: If any field is invalid.
    """
    try:
        family = parse_family(config.copula)
        if family not in (CopulaFamily.NETWORK, CopulaFamily.INDEPENDENCE):
            validate_tau(family, config.init_tau)
    except ValueError as e:
        raise ConfigError(str(e)) from e

    if not config.widths or any(width < 1 for width in config.widths):
        raise ConfigError(
            "Generator widths must be a nonempty list of positive integers, "
            f"got {config.widths}."
        )

    if config.marginal not in MARGINAL_FAMILIES:
        raise ConfigError(
            f"Unknown marginal family `{config.marginal}`. Valid families: "
            f"{', '.join(MARGINAL_FAMILIES)}."
        )

    if config.risk not in ("linear", "mlp"):
        raise ConfigError(
            f"Unknown risk function `{config.risk}`. Valid kinds: linear, "
            "mlp."
        )
