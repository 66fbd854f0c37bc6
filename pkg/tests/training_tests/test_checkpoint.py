import json
import os

import pytest
import torch
from torch.testing import assert_close

from copula_survival.datagen.synthetic import (
    LINEAR_RISK_SPEC,
    builtin_specs,
    generate_synthetic,
)
from copula_survival.likelihood.log_likelihood import model_log_likelihood
from copula_survival.likelihood.survival_dataset import SurvivalDataset
from copula_survival.training.checkpoint import (
    load_checkpoint,
    save_checkpoint,
    save_model_bundle,
)
from copula_survival.training.train_config import ModelConfig, TrainConfig
from copula_survival.training.trainer import FitResult, create_optimizer, fit


@pytest.fixture
def fit_result(
    synthetic_dataset: SurvivalDataset,
    small_model_config: ModelConfig,
    fast_train_config: TrainConfig,
) -> FitResult:
    return fit(synthetic_dataset, small_model_config, fast_train_config)


def test_checkpoint_round_trip(
    fit_result: FitResult,
    synthetic_dataset: SurvivalDataset,
    small_model_config: ModelConfig,
    fast_train_config: TrainConfig,
    tmp_path: str,
) -> None:
    path = save_checkpoint(
        os.path.join(tmp_path, "run", "checkpoint.json"),
        fit_result,
        small_model_config,
        fast_train_config,
    )

    checkpoint = load_checkpoint(path)

    assert checkpoint.model_config == small_model_config
    assert checkpoint.train_config == fast_train_config
    assert checkpoint.history == fit_result.state.history
    assert checkpoint.best_epoch == fit_result.state.best_epoch
    assert checkpoint.splits is not None
    assert torch.equal(checkpoint.splits.val, fit_result.splits.val)

    with torch.no_grad():
        assert_close(
            model_log_likelihood(checkpoint.model, synthetic_dataset),
            model_log_likelihood(fit_result.model, synthetic_dataset),
        )


def test_checkpoint_optimizer_state_restores(
    fit_result: FitResult,
    small_model_config: ModelConfig,
    fast_train_config: TrainConfig,
    tmp_path: str,
) -> None:
    path = save_checkpoint(
        os.path.join(tmp_path, "checkpoint.json"),
        fit_result,
        small_model_config,
        fast_train_config,
    )
    checkpoint = load_checkpoint(path)
    assert checkpoint.optimizer_state is not None

    optimizer = create_optimizer(checkpoint.model, fast_train_config)
    optimizer.load_state_dict(checkpoint.optimizer_state)

    restored_steps = [state["step"] for state in optimizer.state.values()]
    original_steps = [
        state["step"] for state in fit_result.optimizer.state.values()
    ]
    assert restored_steps == original_steps


def test_model_bundle_has_no_training_fields(
    fit_result: FitResult, tmp_path: str
) -> None:
    path = save_model_bundle(
        os.path.join(tmp_path, "ground_truth.json"), fit_result.model
    )

    checkpoint = load_checkpoint(path)

    assert checkpoint.model_config is None
    assert checkpoint.train_config is None
    assert checkpoint.splits is None
    assert checkpoint.optimizer_state is None
    assert checkpoint.history == []
    assert checkpoint.model.copula.family == "clayton"


def test_ground_truth_bundle_stays_frozen(tmp_path: str) -> None:
    spec = builtin_specs(n=50, seed=0, copula="frank", tau=0.4)[
        LINEAR_RISK_SPEC
    ]
    _, truth = generate_synthetic(spec)
    path = save_model_bundle(
        os.path.join(tmp_path, "ground_truth.json"), truth.as_model()
    )

    model = load_checkpoint(path).model

    assert model.copula.kendall_tau() == pytest.approx(0.4)
    assert not any(p.requires_grad for p in model.copula.parameters())
    for marginal in (model.event_marginal, model.censor_marginal):
        assert not any(
            p.requires_grad for p in marginal.parameters(recurse=False)
        )


def test_load_invalid_checkpoint(tmp_path: str) -> None:
    path = os.path.join(tmp_path, "not_a_checkpoint.json")
    with open(path, "w") as f:
        json.dump({"history": []}, f)

    with pytest.raises(ValueError, match="not a model checkpoint"):
        load_checkpoint(path)

    with pytest.raises(OSError):
        load_checkpoint(os.path.join(tmp_path, "missing.json"))
