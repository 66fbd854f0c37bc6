import pytest

from copula_survival.exceptions import ConfigError
from copula_survival.sweep.sweep_config import (
    SweepConfig,
    build_sweep_cells,
    validate_sweep_config,
)


def test_default_sweep_config_is_valid() -> None:
    validate_sweep_config(SweepConfig())


def test_build_sweep_cells(test_sweep_config: SweepConfig) -> None:
    cells = build_sweep_cells(test_sweep_config)

    # 2 families x 2 taus x 2 repeats
    assert len(cells) == 8
    assert [c.cell_index for c in cells] == list(range(8))
    assert [(c.family, c.tau, c.repeat) for c in cells[:4]] == [
        ("clayton", 0.0, 0),
        ("clayton", 0.0, 1),
        ("clayton", 0.5, 0),
        ("clayton", 0.5, 1),
    ]
    assert all(c.family == "frank" for c in cells[4:])
    assert len({c.seed for c in cells}) == 8


def test_sweep_cell_seeds_are_reproducible(
    test_sweep_config: SweepConfig,
) -> None:
    first = build_sweep_cells(test_sweep_config)
    second = build_sweep_cells(test_sweep_config)
    other = build_sweep_cells(test_sweep_config._replace(seed=4))

    assert first == second
    assert [c.seed for c in first] != [c.seed for c in other]


def test_zero_tau_is_valid_for_every_family() -> None:
    validate_sweep_config(
        SweepConfig(families=["clayton", "gumbel"], taus=[0.0])
    )


@pytest.mark.parametrize(
    "overrides, match",
    [
        ({"spec": "weibull"}, "Unknown dataset"),
        ({"families": []}, "families and a tau grid"),
        ({"taus": []}, "families and a tau grid"),
        ({"families": ["network"]}, "cannot be swept"),
        ({"families": ["independence"]}, "cannot be swept"),
        ({"families": ["student"]}, "Valid families"),
        ({"taus": [-0.2]}, "outside the valid range"),
        ({"repeats": 0}, ">= 1"),
        ({"num_processes": 0}, ">= 1"),
    ],
)
def test_invalid_sweep_config(
    overrides: dict[str, object], match: str
) -> None:
    config = SweepConfig(families=["clayton"], taus=[0.3])._replace(
        **overrides
    )

    with pytest.raises(ConfigError, match=match):
        validate_sweep_config(config)
