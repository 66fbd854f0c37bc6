import math

import pytest
import torch
from torch.testing import assert_close

from copula_survival.marginals.risk_functions import (
    LinearRisk,
    MLPRisk,
    RiskFunction,
    SineRisk,
    create_risk_function,
    risk_from_dict,
)


def test_linear_risk() -> None:
    risk = LinearRisk(2, [0.3, -0.2])
    x = torch.tensor([[1.0, 2.0], [0.0, 0.0]], dtype=torch.float64)

    assert_close(risk(x), torch.tensor([-0.1, 0.0], dtype=torch.float64))
    assert risk.beta.requires_grad
    assert not LinearRisk(2, trainable=False).beta.requires_grad


def test_linear_risk_defaults_to_zero() -> None:
    risk = LinearRisk(3)

    assert torch.equal(risk.beta, torch.zeros(3, dtype=torch.float64))


def test_sine_risk() -> None:
    risk = SineRisk()
    x = torch.tensor([[0.5], [0.0], [1.5]], dtype=torch.float64)

    assert_close(risk(x), torch.tensor([2.0, 0.0, -2.0], dtype=torch.float64))
    assert list(risk.parameters()) == []


def test_sine_risk_uses_first_covariate() -> None:
    risk = SineRisk(input_dim=3, amplitude=1.0, phase=0.5)
    x = torch.tensor([[0.25, 9.0, -4.0]], dtype=torch.float64)

    assert risk(x).item() == pytest.approx(math.sin(math.pi / 4 + 0.5))


def test_mlp_risk_output_shape() -> None:
    torch.manual_seed(0)
    risk = MLPRisk(4, hidden=(8, 8))
    x = torch.randn(5, 4, dtype=torch.float64)

    output = risk(x)

    assert output.shape == (5,)
    assert output.dtype == torch.float64
    assert len(list(risk.parameters())) == 6


def test_covariate_dimension_mismatch() -> None:
    with pytest.raises(ValueError, match="Covariate dimension mismatch"):
        LinearRisk(2)(torch.ones(3, 3, dtype=torch.float64))

    with pytest.raises(ValueError, match="Covariate dimension mismatch"):
        SineRisk()(torch.ones(3, 2, dtype=torch.float64))


def test_invalid_risk_arguments() -> None:
    with pytest.raises(ValueError, match="shape"):
        LinearRisk(2, [1.0, 2.0, 3.0])

    with pytest.raises(ValueError, match="nonnegative"):
        LinearRisk(-1)

    with pytest.raises(ValueError, match="Valid kinds"):
        create_risk_function("sine", 1)


def test_create_risk_function() -> None:
    assert isinstance(create_risk_function("linear", 3), LinearRisk)

    risk = create_risk_function("mlp", 3, hidden=[4])
    assert isinstance(risk, MLPRisk)
    assert risk.hidden == [4]


@pytest.mark.parametrize(
    "risk",
    [
        LinearRisk(2, [0.5, -1.5]),
        SineRisk(2, amplitude=1.5, frequency=2.0, phase=0.1),
        MLPRisk(2, hidden=(3,)),
    ],
    ids=["linear", "sine", "mlp"],
)
def test_risk_serialization_round_trip(risk: RiskFunction) -> None:
    restored = risk_from_dict(risk.to_dict())
    x = torch.tensor([[0.1, 0.2], [-1.0, 3.0]], dtype=torch.float64)

    with torch.no_grad():
        assert_close(restored(x), risk(x), rtol=0.0, atol=0.0)
