import pytest

from copula_survival.datagen.synthetic import (
    LINEAR_RISK_SPEC,
    builtin_specs,
    generate_synthetic,
)
from copula_survival.likelihood.survival_dataset import SurvivalDataset


@pytest.fixture
def synthetic_dataset() -> SurvivalDataset:
    spec = builtin_specs(n=200, seed=0, copula="clayton", tau=0.3)[
        LINEAR_RISK_SPEC
    ]
    dataset, _ = generate_synthetic(spec)

    return dataset
