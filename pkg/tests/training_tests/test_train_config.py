import pytest

from copula_survival.exceptions import ConfigError
from copula_survival.training.train_config import (
    ModelConfig,
    TrainConfig,
    validate_model_config,
    validate_train_config,
)


def test_default_configs_are_valid() -> None:
    validate_train_config(TrainConfig())
    validate_model_config(ModelConfig())

    assert TrainConfig().learning_rate == 1e-4
    assert TrainConfig().batch_size == 512
    assert TrainConfig().patience == 10
    assert ModelConfig().widths == [10, 10]


@pytest.mark.parametrize(
    "overrides, match",
    [
        ({"train_fraction": 0.0}, "positive"),
        ({"train_fraction": 0.6, "val_fraction": 0.4}, "sum to at most 1"),
        ({"patience": 0}, "Patience"),
        ({"batch_size": 0}, "batch_size"),
        ({"max_epochs": 0}, "max_epochs"),
        ({"learning_rate": -1e-3}, "Learning rate"),
        ({"copula_weight_decay": -1.0}, "Weight decay"),
        ({"objective": "joint"}, "Valid objectives"),
    ],
)
def test_invalid_train_config(
    overrides: dict[str, object], match: str
) -> None:
    config = TrainConfig()._replace(**overrides)

    with pytest.raises(ConfigError, match=match):
        validate_train_config(config)


@pytest.mark.parametrize(
    "overrides, match",
    [
        ({"copula": "student"}, "Valid families"),
        ({"copula": "clayton", "init_tau": 1.2}, "outside the valid range"),
        ({"copula": "gumbel", "init_tau": -0.1}, "outside the valid range"),
        ({"widths": []}, "widths"),
        ({"widths": [3, 0]}, "widths"),
        ({"marginal": "gamma"}, "marginal family"),
        ({"risk": "sine"}, "risk function"),
    ],
)
def test_invalid_model_config(
    overrides: dict[str, object], match: str
) -> None:
    config = ModelConfig()._replace(**overrides)

    with pytest.raises(ConfigError, match=match):
        validate_model_config(config)


def test_network_and_independence_ignore_init_tau() -> None:
    validate_model_config(ModelConfig(copula="network", init_tau=5.0))
    validate_model_config(ModelConfig(copula="independence", init_tau=5.0))
