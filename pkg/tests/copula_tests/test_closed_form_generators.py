import math
from collections.abc import Callable

import pytest
import torch

from copula_survival.copulas.closed_form_generators import (
    ClaytonGenerator,
    ClosedFormGenerator,
    CopulaFamily,
    FrankGenerator,
    GumbelGenerator,
    IndependenceGenerator,
    create_closed_form_generator,
    debye_1,
    kendall_tau,
    parse_family,
    theta_from_tau,
    validate_tau,
)
from copula_survival.copulas.generator_base import ArchimedeanGenerator

GeneratorFactory = Callable[[], ArchimedeanGenerator]

FD_STEP = 1e-6

GENERATOR_CASES = [
    pytest.param(lambda: ClaytonGenerator(2.0), id="clayton"),
    pytest.param(lambda: FrankGenerator(3.0), id="frank"),
    pytest.param(lambda: FrankGenerator(-3.0), id="frank-negative"),
    pytest.param(lambda: GumbelGenerator(2.0), id="gumbel"),
    pytest.param(IndependenceGenerator, id="independence"),
]


def test_closed_form_kendall_tau_values() -> None:
    assert kendall_tau("clayton", 2.0) == pytest.approx(0.5)
    assert kendall_tau("gumbel", 1.0) == 0.0
    assert kendall_tau("gumbel", 2.0) == pytest.approx(0.5)
    assert kendall_tau("independence", None) == 0.0


def test_frank_kendall_tau_small_theta() -> None:
    # tau ~ theta / 9 near independence
    assert kendall_tau("frank", 1e-4) == pytest.approx(1e-4 / 9, rel=1e-2)


def test_frank_kendall_tau_is_odd() -> None:
    assert kendall_tau("frank", -4.0) == pytest.approx(
        -kendall_tau("frank", 4.0)
    )


def test_debye_function() -> None:
    assert debye_1(1.0) == pytest.approx(0.7775046341, abs=1e-6)
    assert debye_1(1e-6) == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize(
    "family", [CopulaFamily.CLAYTON, CopulaFamily.FRANK, CopulaFamily.GUMBEL]
)
@pytest.mark.parametrize("tau", [0.25, 0.5, 0.75])
def test_theta_from_tau_inverts_kendall_tau(
    family: CopulaFamily, tau: float
) -> None:
    theta = theta_from_tau(family, tau)

    assert theta is not None
    assert kendall_tau(family, theta) == pytest.approx(tau, abs=1e-10)


def test_theta_from_tau_known_values() -> None:
    assert theta_from_tau("clayton", 0.5) == pytest.approx(2.0)
    assert theta_from_tau("gumbel", 0.5) == pytest.approx(2.0)
    assert theta_from_tau("frank", 0.5) == pytest.approx(5.736, abs=1e-2)
    assert theta_from_tau("frank", -0.5) == pytest.approx(-5.736, abs=1e-2)
    assert theta_from_tau("independence", 0.0) is None


def test_validate_tau_names_valid_range() -> None:
    with pytest.raises(ValueError, match=r"\(0\.0, 1\.0\)"):
        validate_tau("clayton", 1.5)

    with pytest.raises(ValueError, match=r"\[0\.0, 1\.0\)"):
        validate_tau("gumbel", -0.1)

    with pytest.raises(ValueError, match="outside the valid range"):
        validate_tau("frank", 1.0)

    validate_tau("frank", -0.3)
    validate_tau("gumbel", 0.0)


def test_frank_cannot_represent_independence() -> None:
    with pytest.raises(ValueError, match="Independence"):
        theta_from_tau("frank", 0.0)


def test_parse_family() -> None:
    assert parse_family("Clayton") == CopulaFamily.CLAYTON
    assert parse_family(CopulaFamily.FRANK) == CopulaFamily.FRANK

    with pytest.raises(ValueError, match="Valid families"):
        parse_family("student")


def test_invalid_theta() -> None:
    with pytest.raises(ValueError, match="theta > 0"):
        ClaytonGenerator(-1.0)

    with pytest.raises(ValueError, match="theta >= 1"):
        GumbelGenerator(0.5)

    with pytest.raises(ValueError, match="theta != 0"):
        FrankGenerator(0.0)


def test_raw_theta_reparameterization() -> None:
    clayton = ClaytonGenerator(2.0)
    gumbel = GumbelGenerator(3.0)

    assert clayton.raw_theta.item() == pytest.approx(math.log(2.0))
    assert clayton.theta.item() == pytest.approx(2.0)
    assert gumbel.raw_theta.item() == pytest.approx(math.log(2.0))
    assert gumbel.theta.item() == pytest.approx(3.0)
    assert FrankGenerator(-2.0).raw_theta.item() == -2.0


def test_gumbel_independence_limit() -> None:
    generator = GumbelGenerator(1.0)
    t = torch.tensor([0.0, 0.5, 2.0], dtype=torch.float64)

    with torch.no_grad():
        assert torch.allclose(generator(t), torch.exp(-t))
        assert torch.allclose(generator.derivative(t), -torch.exp(-t))

    assert generator.kendall_tau() == 0.0


@pytest.mark.parametrize("make_generator", GENERATOR_CASES)
def test_generator_boundary_values(
    make_generator: GeneratorFactory,
) -> None:
    generator = make_generator()

    with torch.no_grad():
        assert generator(0.0).item() == 1.0
        assert generator(math.inf).item() == 0.0
        assert generator.inverse(1.0).item() == 0.0


@pytest.mark.parametrize("make_generator", GENERATOR_CASES)
@pytest.mark.parametrize("t", [0.3, 2.0])
def test_generator_derivatives_match_finite_differences(
    make_generator: GeneratorFactory,
    t: float,
) -> None:
    generator = make_generator()

    with torch.no_grad():
        first = generator.derivative(t, order=1).item()
        fd_first = (
            generator(t + FD_STEP).item() - generator(t - FD_STEP).item()
        ) / (2 * FD_STEP)
        second = generator.derivative(t, order=2).item()
        fd_second = (
            generator.derivative(t + FD_STEP, order=1).item()
            - generator.derivative(t - FD_STEP, order=1).item()
        ) / (2 * FD_STEP)

    assert first < 0
    assert second > 0
    assert first == pytest.approx(fd_first, rel=1e-6)
    assert second == pytest.approx(fd_second, rel=1e-6)


@pytest.mark.parametrize("make_generator", GENERATOR_CASES)
@pytest.mark.parametrize("u", [1e-6, 0.2, 0.7, 1 - 1e-9])
def test_closed_form_inverse_round_trip(
    make_generator: GeneratorFactory,
    u: float,
) -> None:
    generator = make_generator()

    with torch.no_grad():
        recovered = generator(generator.inverse(u)).item()

    assert recovered == pytest.approx(u, rel=1e-10)


def test_closed_form_parameter_is_trainable() -> None:
    generator = ClaytonGenerator(2.0)
    grads = generator.param_grads(torch.tensor([0.5], dtype=torch.float64))

    assert list(grads) == ["raw_theta"]
    assert grads["raw_theta"].item() != 0.0
    assert IndependenceGenerator().param_grads(1.0) == {}


def test_frozen_closed_form_generator() -> None:
    generator = create_closed_form_generator("frank", 2.0, trainable=False)

    assert isinstance(generator, ClosedFormGenerator)
    assert not generator.raw_theta.requires_grad
    assert generator.param_grads(1.0) == {}
    assert generator.to_dict() == {
        "theta": pytest.approx(2.0),
        "trainable": False,
    }
