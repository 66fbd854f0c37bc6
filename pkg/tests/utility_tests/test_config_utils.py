from pathlib import Path
from typing import NamedTuple

import pytest

from copula_survival.exceptions import ConfigError
from copula_survival.utilities.config_utils import (
    build_config,
    load_yaml_config,
)


class DummyConfig(NamedTuple):
    name: str
    rate: float = 0.5
    widths: list[int] = [4]


def test_build_config_defaults_and_raw_values() -> None:
    config = build_config(DummyConfig, {"name": "a", "rate": 0.1})

    assert config == DummyConfig(name="a", rate=0.1, widths=[4])


def test_build_config_overrides() -> None:
    config = build_config(
        DummyConfig,
        {"name": "a", "rate": 0.1},
        overrides={"rate": 0.9, "widths": None},
    )

    # `None` overrides keep the raw value
    assert config.rate == 0.9
    assert config.widths == [4]


def test_build_config_without_raw_section() -> None:
    config = build_config(DummyConfig, None, overrides={"name": "b"})

    assert config.name == "b"


@pytest.mark.parametrize(
    "raw, match",
    [
        ({"name": "a", "momentum": 0.9}, "Unknown key\\(s\\) in `dummy`"),
        ({"rate": 0.2}, "Missing required key\\(s\\) in `dummy`: name"),
        (["name"], "Section `dummy` must be a mapping"),
    ],
)
def test_build_config_errors(raw: object, match: str) -> None:
    with pytest.raises(ConfigError, match=match):
        build_config(DummyConfig, raw, section="dummy")  # type: ignore


def test_load_yaml_and_json_configs(tmp_path: Path) -> None:
    yaml_path = tmp_path / "config.yaml"
    yaml_path.write_text("name: a\nwidths: [2, 3]\n")
    json_path = tmp_path / "config.json"
    json_path.write_text('{"name": "a", "widths": [2, 3]}')

    assert load_yaml_config(str(yaml_path)) == {"name": "a", "widths": [2, 3]}
    assert load_yaml_config(str(json_path)) == load_yaml_config(
        str(yaml_path)
    )


def test_load_missing_config(tmp_path: Path) -> None:
    with pytest.raises(OSError):
        load_yaml_config(str(tmp_path / "missing.yaml"))
