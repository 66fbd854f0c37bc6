"""
Bivariate Archimedean copulas built from a generator.

For a generator `phi` with inverse `phi^-1`, the copula is

    C(u, v) = phi(phi^-1(u) + phi^-1(v)),

its first partial derivatives are `phi'(a + b) / phi'(a)` (in `u`) and
`phi'(a + b) / phi'(b)` (in `v`), and its density is
`phi''(a + b) / (phi'(a) phi'(b))`, with `a = phi^-1(u)` and `b = phi^-1(v)`.

Partial derivatives and densities are computed in log space from the
generator's log-magnitude derivatives.
"""

import logging
import math
from typing import Any

import numpy as np
import torch
import torch.nn as nn

from copula_survival.utilities.math_utils import as_float64_tensor
from copula_survival.utilities.root_finding import solve_decreasing

from .closed_form_generators import (
    CopulaFamily,
    create_closed_form_generator,
    parse_family,
    theta_from_tau,
    validate_tau,
)
from .generator_base import (
    INVERSION_MAX_ITER,
    INVERSION_TOL,
    ArchimedeanGenerator,
    validate_unit_interval,
)
from .generator_network import GeneratorNetwork

logger = logging.getLogger(__name__)

# Inputs within this distance of 0 or 1 are treated as boundary values
BOUNDARY_EPS = 1e-15

# Uniform draws are kept strictly inside (0, 1)
UNIFORM_EPS = float(np.finfo(np.float64).eps)


class ArchimedeanCopula(nn.Module):
    """
    A bivariate Archimedean copula.

    The copula owns no parameters of its own; trainable parameters (if any)
    belong to its generator.

    Attributes:
        generator (ArchimedeanGenerator): The copula generator.
    """

    def __init__(self, generator: ArchimedeanGenerator):
        super().__init__()
        self.generator = generator

    @property
    def family(self) -> str:
        return self.generator.family

    def cdf(
        self, u: torch.Tensor | float, v: torch.Tensor | float
    ) -> torch.Tensor:
        """
        Evaluate the copula CDF `C(u, v)`.

        Boundary inputs (within 1e-15 of 0 or 1) return the axiom values
        `C(u, 0) = C(0, v) = 0`, `C(u, 1) = u` and `C(1, v) = v` without
        inverting the generator.

        Args:
            u (torch.Tensor | float): Values in `[0, 1]`.
            v (torch.Tensor | float): Values in `[0, 1]`.

        Returns:
            torch.Tensor: The copula CDF values.

        Raises:
            ValueError: If `u` or `v` lies outside `[0, 1]`.
        """
        u, v = torch.broadcast_tensors(
            as_float64_tensor(u), as_float64_tensor(v)
        )
        validate_unit_interval(u, "u", closed_lower=True, closed_upper=True)
        validate_unit_interval(v, "v", closed_lower=True, closed_upper=True)

        u = _snap_to_boundary(u)
        v = _snap_to_boundary(v)

        zero = (u == 0) | (v == 0)
        boundary = zero | (u == 1) | (v == 1)
        u_safe = torch.where(boundary, torch.full_like(u, 0.5), u)
        v_safe = torch.where(boundary, torch.full_like(v, 0.5), v)

        interior = self.generator(
            self.generator.inverse(u_safe) + self.generator.inverse(v_safe)
        )
        boundary_value = torch.where(
            zero, torch.zeros_like(u), torch.where(u == 1, v, u)
        )

        return torch.where(boundary, boundary_value, interior)

    def log_partial(
        self, u: torch.Tensor | float, v: torch.Tensor | float, which: int = 1
    ) -> torch.Tensor:
        """
        Compute the log of the partial derivative `dC/du` (`which=1`) or
        `dC/dv` (`which=2`).

        Args:
            u (torch.Tensor | float): Values in `(0, 1]`.
            v (torch.Tensor | float): Values in `(0, 1]`.
            which (int): The differentiation argument (1 or 2).

        Returns:
            torch.Tensor: The log partial derivatives (at most 0).

        Raises:
            ValueError: If `u` or `v` lies outside `(0, 1]`, or if `which` is
                not 1 or 2.
        """
        if which not in (1, 2):
            raise ValueError(
                f"Invalid partial derivative argument {which}. Valid "
                "values: 1, 2."
            )

        return self.log_partials(u, v)[which - 1]

    def log_partials(
        self, u: torch.Tensor | float, v: torch.Tensor | float
    ) -> tuple[torch.Tensor, torch.Tensor]:
        """
        Compute both log partial derivatives `log dC/du` and `log dC/dv`,
        inverting the generator once per argument unless the family has a
        closed form.

        Raises:
            ValueError: If `u` or `v` lies outside `(0, 1]`.
        """
        u, v = torch.broadcast_tensors(
            as_float64_tensor(u), as_float64_tensor(v)
        )
        validate_unit_interval(u, "u", closed_lower=False, closed_upper=True)
        validate_unit_interval(v, "v", closed_lower=False, closed_upper=True)

        closed_form = self.generator.closed_form_log_partials(u, v)
        if closed_form is not None:
            return closed_form

        a = self.generator.inverse(u)
        b = self.generator.inverse(v)
        log_numerator = self.generator.log_abs_derivative(a + b, 1)

        log_slope_a = self.generator.log_abs_derivative(a, 1)
        log_slope_b = self.generator.log_abs_derivative(b, 1)

        return (
            _log_ratio(log_numerator, log_slope_a),
            _log_ratio(log_numerator, log_slope_b),
        )

    def partial(
        self, u: torch.Tensor | float, v: torch.Tensor | float, which: int = 1
    ) -> torch.Tensor:
        return torch.exp(self.log_partial(u, v, which))

    def log_density(
        self, u: torch.Tensor | float, v: torch.Tensor | float
    ) -> torch.Tensor:
        """
        Compute the log copula density `log c(u, v)`.

        Raises:
            ValueError: If `u` or `v` lies outside `(0, 1)`.
        """
        u, v = torch.broadcast_tensors(
            as_float64_tensor(u), as_float64_tensor(v)
        )
        validate_unit_interval(u, "u", closed_lower=False, closed_upper=False)
        validate_unit_interval(v, "v", closed_lower=False, closed_upper=False)

        a = self.generator.inverse(u)
        b = self.generator.inverse(v)

        return (
            self.generator.log_abs_derivative(a + b, 2)
            - self.generator.log_abs_derivative(a, 1)
            - self.generator.log_abs_derivative(b, 1)
        )

    def density(
        self, u: torch.Tensor | float, v: torch.Tensor | float
    ) -> torch.Tensor:
        return torch.exp(self.log_density(u, v))

    def kendall_tau(self) -> float:
        return self.generator.kendall_tau()

    def conditional_sample(
        self,
        u: torch.Tensor | float,
        w: torch.Tensor | float,
        closed_form: bool = True,
    ) -> torch.Tensor:
        """
        Solve `dC/du(u, v) = w` for `v` (conditional-distribution method).

        Families with a closed-form conditional inverse (Independence,
        Clayton, Frank) use it when `closed_form` is `True`. Otherwise, with
        `a = phi^-1(u)`, the equation `|phi'(z)| = w |phi'(a)|` is solved for
        `z >= a` by bracketed Newton iteration on `log |phi'|`, and
        `v = phi(z - a)`.

        Args:
            u (torch.Tensor | float): Conditioning values in `(0, 1)`.
            w (torch.Tensor | float): Conditional probabilities in `(0, 1)`.
            closed_form (bool): Whether to use the closed-form inverse when
                available. Defaults to `True`.

        Returns:
            torch.Tensor: The conditional quantiles `v`.

        Raises:
            ValueError: If `u` or `w` lies outside `(0, 1)`.
            InversionError: If the root search does not converge.
        """
        u, w = torch.broadcast_tensors(
            as_float64_tensor(u), as_float64_tensor(w)
        )
        validate_unit_interval(u, "u", closed_lower=False, closed_upper=False)
        validate_unit_interval(w, "w", closed_lower=False, closed_upper=False)

        with torch.no_grad():
            if closed_form:
                v = self.generator.closed_form_conditional_quantile(u, w)
                if v is not None:
                    return v

            a = self.generator.inverse(u)
            target = torch.log(w) + self.generator.log_abs_derivative(a, 1)
            z = solve_decreasing(
                func=lambda z: self.generator.log_abs_derivative(z, 1),
                dfunc=self._log_abs_slope_derivative,
                target=target,
                lower=a,
                tol=INVERSION_TOL,
                max_iter=INVERSION_MAX_ITER,
            )

            return self.generator(torch.clamp(z - a, min=0.0))

    def _log_abs_slope_derivative(self, z: torch.Tensor) -> torch.Tensor:
        # d/dz log|phi'(z)| = phi''(z) / phi'(z)
        return -torch.exp(
            self.generator.log_abs_derivative(z, 2)
            - self.generator.log_abs_derivative(z, 1)
        )

    def sample(
        self, n: int, rng: np.random.Generator | int | None = None
    ) -> torch.Tensor:
        """
        Draw `n` pairs `(u, v)` from the copula with the conditional
        distribution method.

        Args:
            n (int): The number of pairs.
            rng (np.random.Generator | int | None): A random generator or a
                seed.

        Returns:
            torch.Tensor: The samples, with shape `(n, 2)`.

        Raises:
            ValueError: If `n < 1`.
        """
        if n < 1:
            raise ValueError(f"The sample count must be >= 1, got {n}.")

        rng = np.random.default_rng(rng)
        draws = np.clip(rng.random((2, n)), UNIFORM_EPS, 1 - UNIFORM_EPS)
        u = torch.from_numpy(draws[0])
        w = torch.from_numpy(draws[1])

        v = torch.clamp(
            self.conditional_sample(u, w), UNIFORM_EPS, 1 - UNIFORM_EPS
        )

        return torch.stack([u, v], dim=1)

    def to_dict(self) -> dict[str, Any]:
        return {"family": self.family, **self.generator.to_dict()}


def _log_ratio(
    log_numerator: torch.Tensor, log_denominator: torch.Tensor
) -> torch.Tensor:
    # An infinite slope at the conditioning point (e.g., Gumbel at 0) sends
    # the conditional probability to 0
    return torch.where(
        torch.isinf(log_denominator),
        torch.full_like(log_numerator, -math.inf),
        log_numerator - log_denominator,
    )


def _snap_to_boundary(x: torch.Tensor) -> torch.Tensor:
    x = torch.where(x < BOUNDARY_EPS, torch.zeros_like(x), x)
    return torch.where(x > 1 - BOUNDARY_EPS, torch.ones_like(x), x)


def copula_from_tau(
    family: str | CopulaFamily, tau: float, trainable: bool = False
) -> ArchimedeanCopula:
    """
    Create a closed-form copula with a given Kendall's tau.

    A tau of 0 yields the Independence copula for every family.

    Raises:
        ValueError: If `tau` is outside the family's achievable range.
    """
    family = parse_family(family)
    if tau == 0 and family != CopulaFamily.NETWORK:
        return ArchimedeanCopula(
            create_closed_form_generator(CopulaFamily.INDEPENDENCE)
        )

    validate_tau(family, tau)
    theta = theta_from_tau(family, tau)

    return ArchimedeanCopula(
        create_closed_form_generator(family, theta, trainable=trainable)
    )


def create_copula(
    family: str | CopulaFamily,
    theta: float | None = None,
    widths: list[int] | None = None,
    torch_generator: torch.Generator | None = None,
    trainable: bool = True,
) -> ArchimedeanCopula:
    """
    Create a copula from a family name.

    Args:
        family (str | CopulaFamily): The copula family. `network` creates a
            learnable generator network.
        theta (float | None): The closed-form dependence parameter.
        widths (list[int] | None): The hidden layer widths of a generator
            network. Defaults to two layers of 10 units.
        torch_generator (torch.Generator | None): The random generator used
            for generator network initialization.
        trainable (bool): Whether closed-form parameters are trainable.

    Returns:
        ArchimedeanCopula: The copula.
    """
    family = parse_family(family)
    if family == CopulaFamily.NETWORK:
        network = (
            GeneratorNetwork(widths=widths, generator=torch_generator)
            if widths is not None
            else GeneratorNetwork(generator=torch_generator)
        )
        return ArchimedeanCopula(network)

    return ArchimedeanCopula(
        create_closed_form_generator(family, theta, trainable=trainable)
    )


def copula_from_dict(data: dict[str, Any]) -> ArchimedeanCopula:
    """Rebuild a copula serialized with `ArchimedeanCopula.to_dict`."""
    data = dict(data)
    family = parse_family(data.pop("family"))
    if family == CopulaFamily.NETWORK:
        return ArchimedeanCopula(GeneratorNetwork.from_dict(data))

    return ArchimedeanCopula(
        create_closed_form_generator(
            family, data.get("theta"), trainable=data.get("trainable", True)
        )
    )
