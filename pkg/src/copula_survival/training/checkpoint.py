"""
JSON checkpoints of trained survival copula models.

A checkpoint bundles the model (copula generator and both marginals), the
optimizer state, the model and training configurations, the per-epoch
history and the split indices. Floats are written with full round-trip
precision.
"""

import json
import os
from dataclasses import dataclass
from typing import Any

import torch

from copula_survival.likelihood.survival_model import SurvivalCopulaModel

from .adamw import AdamW
from .train_config import EpochRecord, ModelConfig, TrainConfig
from .trainer import DataSplits, FitResult


@dataclass
class Checkpoint:
    model: SurvivalCopulaModel
    model_config: ModelConfig | None
    train_config: TrainConfig | None
    history: list[EpochRecord]
    splits: DataSplits | None
    optimizer_state: dict[str, Any] | None
    best_epoch: int | None = None


def serialize_optimizer_state(optimizer: AdamW) -> dict[str, Any]:
    state_dict = optimizer.state_dict()

    return {
        "state": {
            str(key): {
                "step": int(value["step"]),
                "exp_avg": value["exp_avg"].tolist(),
                "exp_avg_sq": value["exp_avg_sq"].tolist(),
            }
            for key, value in state_dict["state"].items()
        },
        "param_groups": state_dict["param_groups"],
    }


def deserialize_optimizer_state(data: dict[str, Any]) -> dict[str, Any]:
    return {
        "state": {
            int(key): {
                "step": value["step"],
                "exp_avg": torch.tensor(value["exp_avg"], dtype=torch.float64),
                "exp_avg_sq": torch.tensor(
                    value["exp_avg_sq"], dtype=torch.float64
                ),
            }
            for key, value in data["state"].items()
        },
        "param_groups": [
            {**group, "betas": tuple(group["betas"])}
            for group in data["param_groups"]
        ],
    }


def checkpoint_to_dict(
    fit_result: FitResult,
    model_config: ModelConfig,
    train_config: TrainConfig,
) -> dict[str, Any]:
    return {
        "model": fit_result.model.to_dict(),
        "optimizer": serialize_optimizer_state(fit_result.optimizer),
        "config": {
            "model": model_config._asdict(),
            "training": train_config._asdict(),
        },
        "history": [record._asdict() for record in fit_result.state.history],
        "best_epoch": fit_result.state.best_epoch,
        "splits": {
            name: indices.tolist()
            for name, indices in fit_result.splits._asdict().items()
        },
    }


def save_checkpoint(
    path: str,
    fit_result: FitResult,
    model_config: ModelConfig,
    train_config: TrainConfig,
) -> str:
    """
    Write a training checkpoint to a JSON file.

    Returns:
        str: The path to the written file.
    """
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w") as f:
        json.dump(
            checkpoint_to_dict(fit_result, model_config, train_config),
            f,
            indent=2,
        )

    return path


def save_model_bundle(path: str, model: SurvivalCopulaModel) -> str:
    # A model-only bundle (e.g., ground truth) in the checkpoint format
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w") as f:
        json.dump({"model": model.to_dict()}, f, indent=2)

    return path


def load_checkpoint(path: str) -> Checkpoint:
    """
    Load a checkpoint (or model-only bundle) written by `save_checkpoint`.

    Raises:
        OSError: If the file cannot be read.
        ValueError: If the file is not a valid checkpoint.
    """
    with open(path, "r") as f:
        data = json.load(f)

    if "model" not in data:
        raise ValueError(f"`{path}` is not a model checkpoint.")

    config = data.get("config", {})
    splits = data.get("splits")

    return Checkpoint(
        model=SurvivalCopulaModel.from_dict(data["model"]),
        model_config=(
            ModelConfig(**config["model"]) if "model" in config else None
        ),
        train_config=(
            TrainConfig(**config["training"])
            if "training" in config
            else None
        ),
        history=[EpochRecord(**record) for record in data.get("history", [])],
        splits=(
            DataSplits(
                **{
                    name: torch.tensor(indices, dtype=torch.long)
                    for name, indices in splits.items()
                }
            )
            if splits is not None
            else None
        ),
        optimizer_state=(
            deserialize_optimizer_state(data["optimizer"])
            if "optimizer" in data
            else None
        ),
        best_epoch=data.get("best_epoch"),
    )
