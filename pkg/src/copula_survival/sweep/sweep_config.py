from enum import Enum
from typing import NamedTuple

import numpy as np

from copula_survival.copulas.closed_form_generators import (
    CopulaFamily,
    parse_family,
    validate_tau,
)
from copula_survival.datagen.synthetic import (
    DEFAULT_NUM_SAMPLES,
    LINEAR_RISK_SPEC,
    NONLINEAR_RISK_SPEC,
)
from copula_survival.exceptions import ConfigError
from copula_survival.metrics.survival_metrics import DEFAULT_GRID_SIZE


class RunStatus(Enum):
    SUCCESS = 0
    FAILURE = 1


class SweepConfig(NamedTuple):
    """
    Parameters of a censoring dependency sweep: every copula family is
    evaluated at every Kendall's tau grid point, `repeats` times.
    """

    spec: str = LINEAR_RISK_SPEC
    families: list[str] = ["clayton", "frank", "gumbel"]
    taus: list[float] = [0.0, 0.2, 0.4, 0.6, 0.8]
    repeats: int = 3
    n: int = DEFAULT_NUM_SAMPLES
    seed: int = 0
    num_processes: int = 1
    grid_size: int = DEFAULT_GRID_SIZE


class SweepCell(NamedTuple):
    """A single (family, tau, repeat) point of a dependency sweep."""

    cell_index: int
    family: str
    tau: float
    repeat: int
    seed: int


def validate_sweep_config(config: SweepConfig) -> None:
    """
    Validate a dependency sweep configuration.

    Raises:
        ConfigError: If the dataset, families, tau grid or counts are
            invalid.
    """
    if config.spec not in (LINEAR_RISK_SPEC, NONLINEAR_RISK_SPEC):
        raise ConfigError(
            f"Unknown dataset `{config.spec}`. Valid datasets: "
            f"{LINEAR_RISK_SPEC}, {NONLINEAR_RISK_SPEC}."
        )

    if not config.families or not config.taus:
        raise ConfigError("The sweep requires families and a tau grid.")

    for family_name in config.families:
        try:
            family = parse_family(family_name)
            if family in (CopulaFamily.NETWORK, CopulaFamily.INDEPENDENCE):
                raise ValueError(
                    f"The `{family.value}` family cannot be swept over tau."
                )

            for tau in config.taus:
                if tau != 0:
                    validate_tau(family, tau)
        except ValueError as e:
            raise ConfigError(str(e)) from e

    if min(config.repeats, config.n, config.num_processes) < 1:
        raise ConfigError(
            "`repeats`, `n` and `num_processes` must be >= 1."
        )


def build_sweep_cells(config: SweepConfig) -> list[SweepCell]:
    """
    Enumerate the sweep cells in declaration order (family, then tau, then
    repeat), each with an independent seed spawned from the sweep seed.

    Returns:
        list[SweepCell]: The sweep cells.
    """
    grid = [
        (family, float(tau), repeat)
        for family in config.families
        for tau in config.taus
        for repeat in range(config.repeats)
    ]
    children = np.random.SeedSequence(config.seed).spawn(len(grid))

    return [
        SweepCell(
            cell_index=index,
            family=family,
            tau=tau,
            repeat=repeat,
            seed=int(child.generate_state(1)[0]),
        )
        for index, ((family, tau, repeat), child) in enumerate(
            zip(grid, children, strict=True)
        )
    ]
