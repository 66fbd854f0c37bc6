"""
Completely monotone generator network.

The network builds a generator as nested convex combinations of negative
exponentials. Layer 0 outputs the constant 1; hidden unit `i` of layer `l`
outputs

    h_{l,i}(t) = exp(-B_{l,i} t) * sum_j A_{l,i,j} h_{l-1,j}(t),

and the generator is the convex combination of the last hidden layer outputs
with output weights `w`. The mixing matrices `A_l` and output weights are
row-wise softmax maps of raw parameters, and the rates `B_l` are exponentials
of raw parameters. Multiplying out the recursion gives a finite mixture
`sum_k a_k exp(-b_k t)` with `a_k > 0`, `sum_k a_k = 1` and `b_k > 0`, which
is completely monotone with `phi(0) = 1` and `phi(inf) = 0`.

The recursion (and its first two derivatives in `t`) is evaluated entirely in
log space so that copula terms stay finite for arguments where the
exponentials underflow.
"""

import logging
import math
from typing import Any, Sequence

import torch
import torch.nn as nn

from copula_survival.exceptions import NumericalError
from copula_survival.utilities.math_utils import rand_uniform

from .generator_base import ArchimedeanGenerator

logger = logging.getLogger(__name__)

DEFAULT_WIDTHS = (10, 10)

# Raw parameter initialization ranges
PHI_A_INIT_RANGE = (0.0, 1.0)
PHI_B_INIT_RANGE = (0.0, 2.0)

ROW_SUM_TOL = 1e-12
LOG_2 = math.log(2.0)


class GeneratorNetwork(ArchimedeanGenerator):
    """
    A learnable completely monotone generator.

    Attributes:
        depth (int): The number of hidden layers `L`.
        widths (list[int]): The number of units per hidden layer.
        phi_A (nn.ParameterList): Raw mixing parameters per layer, with
            shapes `(H_l, H_{l-1})` and `H_0 = 1`.
        phi_B (nn.ParameterList): Raw rate parameters per layer, with shapes
            `(H_l,)`.
        output_phi_A (nn.Parameter): Raw output weights, with shape `(H_L,)`.
    """

    family = "network"

    def __init__(
        self,
        widths: Sequence[int] = DEFAULT_WIDTHS,
        generator: torch.Generator | None = None,
    ):
        """
        Initialize a generator network with raw mixing parameters drawn from
        `Uniform[0, 1]` and raw rate parameters drawn from `Uniform(0, 2)`.

        Args:
            widths (Sequence[int]): The number of units per hidden layer.
                Defaults to two layers of 10 units.
            generator (torch.Generator | None): The random generator used for
                parameter initialization.

        Raises:
            ValueError: If `widths` is empty or contains nonpositive values.
        """
        super().__init__()

        widths = [int(width) for width in widths]
        if not widths or any(width < 1 for width in widths):
            raise ValueError(
                "Generator network widths must be a nonempty list of "
                f"positive integers, got {widths}."
            )

        self.depth = len(widths)
        self.widths = widths

        self.phi_A = nn.ParameterList()
        self.phi_B = nn.ParameterList()
        fan_in = 1
        for width in widths:
            self.phi_A.append(
                nn.Parameter(
                    rand_uniform(
                        *PHI_A_INIT_RANGE, (width, fan_in), generator
                    )
                )
            )
            self.phi_B.append(
                nn.Parameter(
                    rand_uniform(*PHI_B_INIT_RANGE, (width,), generator)
                )
            )
            fan_in = width

        self.output_phi_A = nn.Parameter(
            rand_uniform(*PHI_A_INIT_RANGE, (fan_in,), generator)
        )

    def mixing_matrices(self) -> list[torch.Tensor]:
        return [torch.softmax(phi_A, dim=1) for phi_A in self.phi_A]

    def rates(self) -> list[torch.Tensor]:
        return [torch.exp(phi_B) for phi_B in self.phi_B]

    def output_weights(self) -> torch.Tensor:
        return torch.softmax(self.output_phi_A, dim=0)

    def _log_abs_derivative(
        self, t: torch.Tensor, order: int
    ) -> torch.Tensor:
        log_h, log_dh, log_d2h = self._log_hidden_outputs(t, order)
        log_x = (log_h, log_dh, log_d2h)[order]
        assert log_x is not None

        log_w = torch.log_softmax(self.output_phi_A, dim=0)

        return torch.logsumexp(log_x + log_w, dim=-1)

    def _log_hidden_outputs(
        self, t: torch.Tensor, order: int
    ) -> tuple[torch.Tensor, torch.Tensor | None, torch.Tensor | None]:
        """
        Run the log-space recursion up to the last hidden layer.

        For each hidden unit, the recursion tracks `log h`, `log(-h')` and
        `log h''` (all three magnitudes are nonnegative for every unit). The
        derivative terms are only tracked up to the requested `order`.

        Args:
            t (torch.Tensor): Finite, nonnegative arguments.
            order (int): The highest derivative order required.

        Returns:
            tuple: `(log_h, log_dh, log_d2h)` with shape `t.shape + (H_L,)`.
                Untracked orders are `None`.
        """
        t = t.unsqueeze(-1)

        # First layer: the input is the constant 1, so s = 1, s' = s'' = 0
        log_B = self.phi_B[0]
        exponent = -torch.exp(log_B) * t
        log_h = exponent + torch.zeros_like(log_B)
        log_dh = exponent + log_B if order >= 1 else None
        log_d2h = exponent + 2 * log_B if order >= 2 else None

        for phi_A, log_B in zip(
            list(self.phi_A)[1:], list(self.phi_B)[1:], strict=True
        ):
            log_A = torch.log_softmax(phi_A, dim=1)
            exponent = -torch.exp(log_B) * t

            log_s = _log_mix(log_A, log_h)
            log_h = exponent + log_s

            if log_dh is not None:
                log_ds = _log_mix(log_A, log_dh)

                # -h' = e * (B s - s')
                log_dh_next = exponent + torch.logaddexp(log_B + log_s, log_ds)

                if log_d2h is not None:
                    # h'' = e * (s'' - 2 B s' + B^2 s)
                    log_d2s = _log_mix(log_A, log_d2h)
                    log_d2h = exponent + torch.logsumexp(
                        torch.stack(
                            [
                                log_d2s,
                                LOG_2 + log_B + log_ds,
                                2 * log_B + log_s,
                            ]
                        ),
                        dim=0,
                    )

                log_dh = log_dh_next

        return log_h, log_dh, log_d2h

    def flat_mixture(self) -> tuple[torch.Tensor, torch.Tensor]:
        """
        Expand the network into its flat exponential mixture
        `phi(t) = sum_k a_k exp(-b_k t)`.

        The number of mixture terms is the product of all hidden layer
        widths.

        Returns:
            tuple[torch.Tensor, torch.Tensor]: The mixture weights `a` (which
                sum to 1) and rates `b`.
        """
        weights = torch.ones((1, 1), dtype=torch.float64)
        exponents = torch.zeros((1, 1), dtype=torch.float64)
        for A, B in zip(self.mixing_matrices(), self.rates(), strict=True):
            width = A.shape[0]
            weights = (A[:, :, None] * weights[None]).reshape(width, -1)
            exponents = (B[:, None, None] + exponents[None]).reshape(
                width, -1
            )

        a = (self.output_weights()[:, None] * weights).reshape(-1)
        b = exponents.reshape(-1)

        return a, b

    def kendall_tau(self) -> float:
        # tau = 1 - 4 * int_0^inf t phi'(t)^2 dt, in closed form through the
        # flat mixture
        with torch.no_grad():
            a, b = self.flat_mixture()
            rate_sums = b[:, None] + b[None, :]
            integral = (
                (a[:, None] * a[None, :]) * (b[:, None] * b[None, :])
                / rate_sums**2
            ).sum()

        return float(1.0 - 4.0 * integral)

    def validate_parameters(self) -> None:
        """
        Check that every effective mixing matrix is row-stochastic and every
        effective rate is finite and strictly positive.

        Raises:
            NumericalError: If any check fails.
        """
        with torch.no_grad():
            for layer, (A, B) in enumerate(
                zip(self.mixing_matrices(), self.rates(), strict=True)
            ):
                row_error = (A.sum(dim=1) - 1).abs().max().item()
                if not torch.isfinite(A).all() or row_error > ROW_SUM_TOL:
                    raise NumericalError(
                        f"Mixing matrix of layer {layer + 1} is not "
                        f"row-stochastic (max row-sum error: {row_error:.3e})."
                    )

                if not torch.isfinite(B).all() or not (B > 0).all():
                    raise NumericalError(
                        f"Rates of layer {layer + 1} are not finite and "
                        "strictly positive."
                    )

    def to_dict(self) -> dict[str, Any]:
        return {
            "depth": self.depth,
            "widths": list(self.widths),
            "phi_A": [phi_A.detach().tolist() for phi_A in self.phi_A],
            "phi_B": [phi_B.detach().tolist() for phi_B in self.phi_B],
            "output_phi_A": self.output_phi_A.detach().tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "GeneratorNetwork":
        """
        Rebuild a generator network from its serialized raw parameters.

        Raises:
            ValueError: If the parameter shapes do not match `widths`.
        """
        widths = list(data["widths"])
        if int(data.get("depth", len(widths))) != len(widths):
            raise ValueError(
                f"Generator depth {data['depth']} does not match widths "
                f"{widths}."
            )

        if len(data["phi_A"]) != len(widths) or len(data["phi_B"]) != len(
            widths
        ):
            raise ValueError(
                f"Expected {len(widths)} raw parameter tensors per layer "
                "group."
            )

        network = cls(widths=widths)
        params = [*network.phi_A, *network.phi_B, network.output_phi_A]
        with torch.no_grad():
            for param, values in zip(
                params,
                [*data["phi_A"], *data["phi_B"], data["output_phi_A"]],
                strict=True,
            ):
                loaded = torch.tensor(values, dtype=torch.float64)
                if loaded.shape != param.shape:
                    raise ValueError(
                        f"Raw generator parameter has shape "
                        f"{tuple(loaded.shape)}, expected "
                        f"{tuple(param.shape)}."
                    )
                param.copy_(loaded)

        return network


def _log_mix(log_A: torch.Tensor, log_values: torch.Tensor) -> torch.Tensor:
    # log(sum_j A_ij * x_j) for x = exp(log_values)
    return torch.logsumexp(log_values.unsqueeze(-2) + log_A, dim=-1)
