"""
Command configurations for the command-line driver.

Each command reads an optional YAML or JSON configuration file whose keys
are the fields of the command's `NamedTuple` record; command-line flags
override file values. Unknown keys are rejected.
"""

import os
from collections.abc import Mapping
from typing import Any, NamedTuple, TypeVar

import yaml

from copula_survival.copulas.closed_form_generators import (
    CopulaFamily,
    parse_family,
    validate_tau,
    validate_theta,
)
from copula_survival.datagen.synthetic import (
    DEFAULT_NUM_SAMPLES,
    LINEAR_RISK_SPEC,
    NONLINEAR_RISK_SPEC,
)
from copula_survival.exceptions import ConfigError
from copula_survival.metrics.eval_report import DEFAULT_TAU_SAMPLES
from copula_survival.metrics.survival_metrics import (
    DEFAULT_GRID_SIZE,
    DEFAULT_NUM_BINS,
)
from copula_survival.sweep.sweep_config import (
    SweepConfig,
    validate_sweep_config,
)
from copula_survival.training.train_config import (
    ModelConfig,
    TrainConfig,
    validate_model_config,
    validate_train_config,
)
from copula_survival.utilities.config_utils import (
    build_config,
    load_yaml_config,
)

OUTPUT_DIR_ENV_VAR = "COPULA_SURVIVAL_OUTPUT_DIR"
DEFAULT_OUTPUT_ROOT = "logs"
EVALUATION_SPLITS = ("test", "all")

ConfigT = TypeVar("ConfigT")


class GenerateConfig(NamedTuple):
    spec: str = LINEAR_RISK_SPEC
    n: int = DEFAULT_NUM_SAMPLES
    copula: str = CopulaFamily.INDEPENDENCE.value
    tau: float | None = None
    theta: float | None = None
    seed: int = 0
    source_csv: str | None = None
    output_dir: str | None = None


class TrainCommandConfig(NamedTuple):
    dataset: str | None = None
    model: ModelConfig = ModelConfig()
    training: TrainConfig = TrainConfig()
    output_dir: str | None = None


class EvaluateConfig(NamedTuple):
    checkpoint: str | None = None
    dataset: str | None = None
    ground_truth: str | None = None
    split: str = "test"
    bins: int = DEFAULT_NUM_BINS
    grid_size: int = DEFAULT_GRID_SIZE
    tau_samples: int = DEFAULT_TAU_SAMPLES
    seed: int = 0
    output_dir: str | None = None


class SweepCommandConfig(NamedTuple):
    sweep: SweepConfig = SweepConfig()
    model: ModelConfig = ModelConfig()
    training: TrainConfig = TrainConfig()
    output_dir: str | None = None


class ExportConfig(NamedTuple):
    checkpoint: str | None = None
    ground_truth: str | None = None
    resolution: int = 50
    samples: int = 1000
    seed: int = 0
    output_dir: str | None = None


def load_raw_config(path: str | None) -> dict[str, Any]:
    """
    Load a command configuration file.

    Raises:
        OSError: If the file cannot be read.
        ConfigError: If the file is not a mapping.
    """
    if path is None:
        return {}

    try:
        raw = load_yaml_config(path)
    except yaml.YAMLError as e:
        raise ConfigError(f"`{path}` is not valid YAML or JSON: {e}") from e

    if raw is None:
        return {}

    if not isinstance(raw, Mapping):
        raise ConfigError(f"`{path}` must contain a mapping of settings.")

    return dict(raw)


def _section(
    config_cls: type[ConfigT],
    raw: Mapping[str, Any],
    name: str,
    overrides: Mapping[str, Any] | None = None,
) -> ConfigT:
    return build_config(config_cls, raw.get(name), overrides, section=name)


def _split_sections(
    raw: Mapping[str, Any],
    sections: tuple[str, ...],
    allowed: tuple[str, ...],
) -> dict[str, Any]:
    unknown = sorted(set(raw) - set(sections) - set(allowed))
    if unknown:
        raise ConfigError(
            f"Unknown key(s) in `config`: {', '.join(unknown)}. Allowed "
            f"keys: {', '.join(sections + allowed)}."
        )

    return {key: raw[key] for key in allowed if key in raw}


def require(value: str | None, name: str) -> str:
    if value is None:
        raise ConfigError(f"`{name}` is required.")

    return value


def build_generate_config(
    raw: Mapping[str, Any], overrides: Mapping[str, Any]
) -> GenerateConfig:
    """
    Build and validate a `generate` configuration.

    Raises:
        ConfigError: If any field is invalid.
    """
    config = build_config(GenerateConfig, raw, overrides)

    if config.source_csv is None and config.spec not in (
        LINEAR_RISK_SPEC,
        NONLINEAR_RISK_SPEC,
    ):
        raise ConfigError(
            f"Unknown dataset spec `{config.spec}`. Valid specs: "
            f"{LINEAR_RISK_SPEC}, {NONLINEAR_RISK_SPEC} (or set "
            "`source_csv` for semi-synthetic data)."
        )

    if config.n < 1:
        raise ConfigError(f"The sample count must be >= 1, got {config.n}.")

    try:
        family = parse_family(config.copula)
        if family == CopulaFamily.NETWORK:
            raise ValueError("Datasets require a closed-form copula.")

        if config.tau is not None and config.tau != 0:
            validate_tau(family, config.tau)
        elif config.tau is None and family != CopulaFamily.INDEPENDENCE:
            if config.theta is None:
                raise ValueError(
                    f"The `{family.value}` copula requires `tau` or `theta`."
                )
            validate_theta(family, config.theta)
    except ValueError as e:
        raise ConfigError(str(e)) from e

    return config


def build_train_config(
    raw: Mapping[str, Any],
    overrides: Mapping[str, Any],
    model_overrides: Mapping[str, Any],
    training_overrides: Mapping[str, Any],
) -> TrainCommandConfig:
    top = _split_sections(
        raw, ("model", "training"), ("dataset", "output_dir")
    )
    config = TrainCommandConfig(
        dataset=overrides.get("dataset") or top.get("dataset"),
        model=_section(ModelConfig, raw, "model", model_overrides),
        training=_section(TrainConfig, raw, "training", training_overrides),
        output_dir=overrides.get("output_dir") or top.get("output_dir"),
    )
    require(config.dataset, "dataset")
    validate_model_config(config.model)
    validate_train_config(config.training)

    return config


def build_evaluate_config(
    raw: Mapping[str, Any], overrides: Mapping[str, Any]
) -> EvaluateConfig:
    config = build_config(EvaluateConfig, raw, overrides)
    require(config.checkpoint, "checkpoint")
    require(config.dataset, "dataset")

    if config.split not in EVALUATION_SPLITS:
        raise ConfigError(
            f"Unknown split `{config.split}`. Valid splits: "
            f"{', '.join(EVALUATION_SPLITS)}."
        )

    if min(config.bins, config.grid_size - 1, config.tau_samples - 1) < 1:
        raise ConfigError(
            "`bins` must be >= 1, `grid_size` and `tau_samples` >= 2."
        )

    return config


def build_sweep_config(
    raw: Mapping[str, Any],
    overrides: Mapping[str, Any],
    sweep_overrides: Mapping[str, Any],
    training_overrides: Mapping[str, Any],
) -> SweepCommandConfig:
    top = _split_sections(
        raw, ("sweep", "model", "training"), ("output_dir",)
    )
    config = SweepCommandConfig(
        sweep=_section(SweepConfig, raw, "sweep", sweep_overrides),
        model=_section(ModelConfig, raw, "model"),
        training=_section(TrainConfig, raw, "training", training_overrides),
        output_dir=overrides.get("output_dir") or top.get("output_dir"),
    )
    validate_sweep_config(config.sweep)
    validate_model_config(config.model)
    validate_train_config(config.training)

    return config


def build_export_config(
    raw: Mapping[str, Any], overrides: Mapping[str, Any]
) -> ExportConfig:
    config = build_config(ExportConfig, raw, overrides)
    require(config.checkpoint, "checkpoint")

    if config.resolution < 2 or config.samples < 1:
        raise ConfigError("`resolution` must be >= 2 and `samples` >= 1.")

    return config


def resolve_output_dir(output_dir: str | None, command: str) -> str:
    """
    Resolve a command's output directory: an explicit directory is used as
    is, otherwise `<root>/<command>` with the root taken from the
    `COPULA_SURVIVAL_OUTPUT_DIR` environment variable (default `logs`).
    """
    if output_dir is not None:
        return output_dir

    root = os.environ.get(OUTPUT_DIR_ENV_VAR, DEFAULT_OUTPUT_ROOT)

    return os.path.join(root, command)


def config_to_dict(config: NamedTuple) -> dict[str, Any]:
    return {
        key: config_to_dict(value) if hasattr(value, "_asdict") else value
        for key, value in config._asdict().items()
    }
