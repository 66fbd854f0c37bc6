from collections.abc import Mapping
from typing import Any, TypeVar

import yaml

from copula_survival.exceptions import ConfigError

ConfigT = TypeVar("ConfigT")


def load_yaml_config(path: str) -> Any:
    # JSON documents are valid YAML, so both formats load here
    with open(path, "r") as file:
        return yaml.safe_load(file)


def build_config(
    config_cls: type[ConfigT],
    raw: Mapping[str, Any] | None,
    overrides: Mapping[str, Any] | None = None,
    section: str = "config",
) -> ConfigT:
    """
    Build a `NamedTuple` configuration record from a raw mapping and a set of
    overrides.

    Keys that are not fields of `config_cls` are rejected. Override values
    that are `None` (e.g., unset command-line flags) are ignored; any other
    override replaces the value from `raw`.

    Args:
        config_cls (type[ConfigT]): The `NamedTuple` class to instantiate.
        raw (Mapping[str, Any] | None): The raw values, typically loaded from
            a configuration file.
        overrides (Mapping[str, Any] | None): Values that take precedence
            over `raw`.
        section (str): The configuration section name, used in error
            messages.

    Returns:
        ConfigT: The populated configuration record.

    Raises:
        ConfigError: If `raw` contains unknown keys, or if a required field
            is missing.
    """
    # NamedTuple classes expose their fields only at runtime
    record: Any = config_cls
    fields: tuple[str, ...] = record._fields
    defaults: dict[str, Any] = record._field_defaults

    if raw is not None and not isinstance(raw, Mapping):
        raise ConfigError(f"Section `{section}` must be a mapping.")

    raw = dict(raw or {})

    unknown = sorted(set(raw) - set(fields))
    if unknown:
        raise ConfigError(
            f"Unknown key(s) in `{section}`: {', '.join(unknown)}. "
            f"Allowed keys: {', '.join(fields)}."
        )

    values = {**defaults, **raw}
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value

    missing = [field for field in fields if field not in values]
    if missing:
        raise ConfigError(
            f"Missing required key(s) in `{section}`: {', '.join(missing)}."
        )

    config: ConfigT = record(**{field: values[field] for field in fields})

    return config
