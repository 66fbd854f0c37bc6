"""
Closed-form Archimedean generators: Independence, Clayton, Frank and Gumbel.

All generators follow the outer-generator convention `phi: [0, inf] -> [0, 1]`:

    Independence  phi(t) = exp(-t)
    Clayton       phi(t) = (1 + theta t)^(-1/theta),          theta > 0
    Gumbel        phi(t) = exp(-t^(1/theta)),                 theta >= 1
    Frank         phi(t) = -log(1 + exp(-t) (exp(-theta) - 1)) / theta,
                                                              theta != 0

The dependence parameter is stored as a raw trainable parameter (Clayton:
`theta = exp(r)`, Gumbel: `theta = 1 + exp(r)`, Frank: `theta = r`) so that
closed-form copulas can also be fitted by gradient descent.
"""

import math
from enum import Enum
from typing import Any

import torch
import torch.nn as nn
from scipy.integrate import quad
from scipy.optimize import brentq

from copula_survival.utilities.math_utils import as_float64_tensor

from .generator_base import ArchimedeanGenerator, validate_unit_interval


class CopulaFamily(Enum):
    INDEPENDENCE = "independence"
    CLAYTON = "clayton"
    FRANK = "frank"
    GUMBEL = "gumbel"
    NETWORK = "network"


# Achievable Kendall's tau ranges as (lower, upper, lower_closed, upper_closed)
TAU_RANGES: dict[CopulaFamily, tuple[float, float, bool, bool]] = {
    CopulaFamily.INDEPENDENCE: (0.0, 0.0, True, True),
    CopulaFamily.CLAYTON: (0.0, 1.0, False, False),
    CopulaFamily.FRANK: (-1.0, 1.0, False, False),
    CopulaFamily.GUMBEL: (0.0, 1.0, True, False),
}

THETA_DOMAINS: dict[CopulaFamily, str] = {
    CopulaFamily.CLAYTON: "theta > 0",
    CopulaFamily.FRANK: "theta != 0",
    CopulaFamily.GUMBEL: "theta >= 1",
}


def parse_family(family: str | CopulaFamily) -> CopulaFamily:
    if isinstance(family, CopulaFamily):
        return family

    try:
        return CopulaFamily(family.lower())
    except ValueError as e:
        valid = ", ".join(member.value for member in CopulaFamily)
        raise ValueError(
            f"Unknown copula family `{family}`. Valid families: {valid}."
        ) from e


def format_tau_range(family: CopulaFamily) -> str:
    lower, upper, lower_closed, upper_closed = TAU_RANGES[family]
    if lower == upper:
        return f"{{{lower}}}"

    return (
        f"{'[' if lower_closed else '('}{lower}, {upper}"
        f"{']' if upper_closed else ')'}"
    )


def validate_tau(family: str | CopulaFamily, tau: float) -> None:
    """
    Check that `tau` is achievable by a closed-form family.

    Raises:
        ValueError: If `tau` lies outside the family's range. The message
            names the valid range.
    """
    family = parse_family(family)
    if family not in TAU_RANGES:
        raise ValueError(
            f"Kendall's tau cannot be set for the `{family.value}` family."
        )

    lower, upper, lower_closed, upper_closed = TAU_RANGES[family]
    above = tau >= lower if lower_closed else tau > lower
    below = tau <= upper if upper_closed else tau < upper
    if not (math.isfinite(tau) and above and below):
        raise ValueError(
            f"Kendall's tau {tau} is outside the valid range "
            f"{format_tau_range(family)} of the `{family.value}` copula."
        )


def validate_theta(family: CopulaFamily, theta: float) -> None:
    valid = math.isfinite(theta) and (
        (family == CopulaFamily.CLAYTON and theta > 0)
        or (family == CopulaFamily.FRANK and theta != 0)
        or (family == CopulaFamily.GUMBEL and theta >= 1)
    )
    if not valid:
        raise ValueError(
            f"Invalid `{family.value}` parameter theta={theta}. Valid domain: "
            f"{THETA_DOMAINS[family]}."
        )


def debye_1(theta: float) -> float:
    """
    Evaluate the first Debye function
    `D_1(theta) = (1 / theta) * int_0^theta t / (exp(t) - 1) dt` by adaptive
    quadrature.
    """
    return 1.0 + _debye_1_minus_one(theta)


def _debye_1_minus_one(theta: float) -> float:
    # Integrating `t / expm1(t) - 1` avoids cancellation for small theta
    integral, _ = quad(lambda t: t / math.expm1(t) - 1.0, 0.0, theta)

    return integral / theta


def kendall_tau(family: str | CopulaFamily, theta: float | None) -> float:
    """
    Compute the analytic Kendall's tau of a closed-form Archimedean copula.

    Args:
        family (str | CopulaFamily): The copula family.
        theta (float | None): The dependence parameter (ignored for the
            Independence family).

    Returns:
        float: Kendall's tau.

    Raises:
        ValueError: If `theta` lies outside the family's domain.
    """
    family = parse_family(family)
    if family == CopulaFamily.INDEPENDENCE:
        return 0.0

    if family == CopulaFamily.NETWORK or theta is None:
        raise ValueError(
            f"A dependence parameter is required for the `{family.value}` "
            "closed-form family."
        )

    validate_theta(family, theta)
    if family == CopulaFamily.CLAYTON:
        return theta / (theta + 2)
    elif family == CopulaFamily.GUMBEL:
        return (theta - 1) / theta
    else:
        return 1.0 + 4.0 * _debye_1_minus_one(theta) / theta


def theta_from_tau(family: str | CopulaFamily, tau: float) -> float | None:
    """
    Compute the dependence parameter that yields a given Kendall's tau.

    Clayton and Gumbel are inverted in closed form; Frank is inverted by
    bracketed root finding on its Debye-function expression.

    Args:
        family (str | CopulaFamily): The copula family.
        tau (float): The target Kendall's tau.

    Returns:
        float | None: The dependence parameter (`None` for Independence).

    Raises:
        ValueError: If `tau` is outside the family's achievable range.
    """
    family = parse_family(family)
    validate_tau(family, tau)

    if family == CopulaFamily.INDEPENDENCE:
        return None
    elif family == CopulaFamily.CLAYTON:
        return 2 * tau / (1 - tau)
    elif family == CopulaFamily.GUMBEL:
        return 1 / (1 - tau)

    if tau == 0:
        raise ValueError(
            "Frank copulas cannot represent tau = 0 (theta != 0); use the "
            "Independence copula."
        )

    # Frank's tau is odd in theta
    target = abs(tau)
    upper = 1.0
    while kendall_tau(family, upper) < target:
        upper *= 2

    theta = brentq(
        lambda th: kendall_tau(family, th) - target,
        1e-12,
        upper,
        xtol=1e-14,
        rtol=1e-14,
    )

    return math.copysign(theta, tau)


class ClosedFormGenerator(ArchimedeanGenerator):
    """
    A closed-form generator with a single trainable dependence parameter.

    Attributes:
        raw_theta (nn.Parameter): The unconstrained dependence parameter.
    """

    family_type: CopulaFamily

    def __init__(self, theta: float, trainable: bool = True):
        super().__init__()

        validate_theta(self.family_type, theta)
        self.raw_theta = nn.Parameter(
            torch.tensor(self._theta_to_raw(theta), dtype=torch.float64),
            requires_grad=trainable,
        )

    @property
    def family(self) -> str:  # type: ignore[override]
        return self.family_type.value

    @property
    def theta(self) -> torch.Tensor:
        return self._raw_to_theta(self.raw_theta)

    def _theta_to_raw(self, theta: float) -> float:
        return theta

    def _raw_to_theta(self, raw: torch.Tensor) -> torch.Tensor:
        return raw

    def kendall_tau(self) -> float:
        return kendall_tau(self.family_type, float(self.theta.item()))

    def to_dict(self) -> dict[str, Any]:
        return {
            "theta": float(self.theta.item()),
            "trainable": self.raw_theta.requires_grad,
        }


class IndependenceGenerator(ArchimedeanGenerator):
    family = CopulaFamily.INDEPENDENCE.value

    def _log_abs_derivative(
        self, t: torch.Tensor, order: int
    ) -> torch.Tensor:
        return -t

    def inverse(self, u: torch.Tensor | float) -> torch.Tensor:
        u = as_float64_tensor(u)
        validate_unit_interval(u, "u", closed_lower=False, closed_upper=True)

        return -torch.log(u)

    def closed_form_conditional_quantile(
        self, u: torch.Tensor, w: torch.Tensor
    ) -> torch.Tensor:
        return torch.broadcast_tensors(u, w)[1].clone()

    def kendall_tau(self) -> float:
        return 0.0

    def to_dict(self) -> dict[str, Any]:
        return {}


class ClaytonGenerator(ClosedFormGenerator):
    family_type = CopulaFamily.CLAYTON

    def _theta_to_raw(self, theta: float) -> float:
        return math.log(theta)

    def _raw_to_theta(self, raw: torch.Tensor) -> torch.Tensor:
        return torch.exp(raw)

    def _log_abs_derivative(
        self, t: torch.Tensor, order: int
    ) -> torch.Tensor:
        theta = self.theta
        log_base = torch.log1p(theta * t)
        if order == 0:
            return -log_base / theta
        elif order == 1:
            return -(1 / theta + 1) * log_base
        else:
            return torch.log1p(theta) - (1 / theta + 2) * log_base

    def inverse(self, u: torch.Tensor | float) -> torch.Tensor:
        u = as_float64_tensor(u)
        validate_unit_interval(u, "u", closed_lower=False, closed_upper=True)

        theta = self.theta
        return torch.expm1(-theta * torch.log(u)) / theta

    def closed_form_log_partials(
        self, u: torch.Tensor, v: torch.Tensor
    ) -> tuple[torch.Tensor, torch.Tensor]:
        # log(u^-theta + v^-theta - 1) through its larger exponent stays
        # finite where the generator inverse overflows
        theta = self.theta
        p = -theta * torch.log(u)
        q = -theta * torch.log(v)
        hi = torch.maximum(p, q)
        lo = torch.minimum(p, q)
        log_sum = hi + torch.log1p(-torch.exp(lo - hi) * torch.expm1(-lo))
        log_numerator = -(1 / theta + 1) * log_sum

        return (
            log_numerator - (1 + theta) * torch.log(u),
            log_numerator - (1 + theta) * torch.log(v),
        )

    def closed_form_conditional_quantile(
        self, u: torch.Tensor, w: torch.Tensor
    ) -> torch.Tensor:
        # v = ((w^(-theta / (1 + theta)) - 1) * u^(-theta) + 1)^(-1 / theta)
        theta = self.theta
        scaled = torch.expm1(-theta / (1 + theta) * torch.log(w)) * torch.exp(
            -theta * torch.log(u)
        )

        return torch.exp(-torch.log1p(scaled) / theta)


class GumbelGenerator(ClosedFormGenerator):
    family_type = CopulaFamily.GUMBEL

    def _theta_to_raw(self, theta: float) -> float:
        return math.log(theta - 1) if theta > 1 else -math.inf

    def _raw_to_theta(self, raw: torch.Tensor) -> torch.Tensor:
        return 1 + torch.exp(raw)

    def _log_abs_derivative(
        self, t: torch.Tensor, order: int
    ) -> torch.Tensor:
        theta = self.theta
        if theta.item() == 1.0:
            # Independence limit
            return -t + 0 * theta

        a = 1 / theta
        t_pow = t**a
        if order == 0:
            return -t_pow
        elif order == 1:
            return torch.log(a) + torch.xlogy(a - 1, t) - t_pow
        else:
            return (
                torch.log(a)
                + torch.xlogy(a - 2, t)
                - t_pow
                + torch.log(1 - a + a * t_pow)
            )

    def inverse(self, u: torch.Tensor | float) -> torch.Tensor:
        u = as_float64_tensor(u)
        validate_unit_interval(u, "u", closed_lower=False, closed_upper=True)

        interior = u < 1
        neg_log_u = torch.where(interior, -torch.log(u), torch.ones_like(u))

        return torch.where(
            interior, neg_log_u**self.theta, torch.zeros_like(u)
        )


class FrankGenerator(ClosedFormGenerator):
    family_type = CopulaFamily.FRANK

    def _log_abs_derivative(
        self, t: torch.Tensor, order: int
    ) -> torch.Tensor:
        theta = self.theta
        c = torch.expm1(-theta)
        log_g = torch.log1p(c * torch.exp(-t))
        if order == 0:
            return torch.log(torch.abs(log_g)) - torch.log(torch.abs(theta))

        log_ratio = torch.log(torch.abs(c / theta))
        if order == 1:
            return log_ratio - t - log_g
        else:
            return log_ratio - t - 2 * log_g

    def inverse(self, u: torch.Tensor | float) -> torch.Tensor:
        u = as_float64_tensor(u)
        validate_unit_interval(u, "u", closed_lower=False, closed_upper=True)

        theta = self.theta
        return -torch.log(torch.expm1(-theta * u) / torch.expm1(-theta))

    def closed_form_conditional_quantile(
        self, u: torch.Tensor, w: torch.Tensor
    ) -> torch.Tensor:
        theta = self.theta
        ratio = (
            w * torch.expm1(-theta) / (w + (1 - w) * torch.exp(-theta * u))
        )

        return -torch.log1p(ratio) / theta


CLOSED_FORM_GENERATORS: dict[CopulaFamily, type[ClosedFormGenerator]] = {
    CopulaFamily.CLAYTON: ClaytonGenerator,
    CopulaFamily.FRANK: FrankGenerator,
    CopulaFamily.GUMBEL: GumbelGenerator,
}


def create_closed_form_generator(
    family: str | CopulaFamily,
    theta: float | None = None,
    trainable: bool = True,
) -> ArchimedeanGenerator:
    """
    Create a closed-form generator of a given family.

    Args:
        family (str | CopulaFamily): The copula family.
        theta (float | None): The dependence parameter. Ignored (and may be
            `None`) for the Independence family.
        trainable (bool): Whether the dependence parameter is trainable.

    Returns:
        ArchimedeanGenerator: The generator.

    Raises:
        ValueError: If the family is unknown or `theta` is invalid.
    """
    family = parse_family(family)
    if family == CopulaFamily.INDEPENDENCE:
        return IndependenceGenerator()

    if family not in CLOSED_FORM_GENERATORS:
        raise ValueError(
            f"`{family.value}` is not a closed-form copula family."
        )

    if theta is None:
        raise ValueError(
            f"A dependence parameter is required for the `{family.value}` "
            f"copula ({THETA_DOMAINS[family]})."
        )

    return CLOSED_FORM_GENERATORS[family](theta=theta, trainable=trainable)
