"""
Bracketed Newton root finding for monotone decreasing functions.

This module provides a vectorized safeguarded Newton solver used for
inverting Archimedean generators and their first derivatives. Callers pass
log-space functions (e.g., `log phi`), which are convex for completely
monotone generators, so Newton iterates started at the lower bracket point
approach the root from the left without overshooting. Every element
of the input keeps its own bracket `[lo, hi]` with `f(lo) >= y >= f(hi)`;
Newton iterates that leave the bracket, or that are not finite, are replaced
by a bisection step. This guarantees convergence for any continuous,
strictly decreasing function.
"""

import logging
from typing import Callable

import torch

from copula_survival.exceptions import InversionError

logger = logging.getLogger(__name__)

TensorFn = Callable[[torch.Tensor], torch.Tensor]

FLOAT64_EPS = torch.finfo(torch.float64).eps
MAX_BRACKET_DOUBLINGS = 1100


def find_upper_bracket(
    func: TensorFn,
    target: torch.Tensor,
    lower: torch.Tensor,
    initial_width: float = 1.0,
) -> torch.Tensor:
    """
    Find upper bracket points `hi > lower` with `func(hi) < target` by
    repeatedly doubling the bracket width.

    Args:
        func (TensorFn): A strictly decreasing function.
        target (torch.Tensor): The target values.
        lower (torch.Tensor): The lower bracket points.
        initial_width (float): The initial bracket width. Defaults to 1.

    Returns:
        torch.Tensor: The upper bracket points.

    Raises:
        InversionError: If no upper bracket is found.
    """
    width = torch.full_like(lower, initial_width)
    hi = lower + width
    for _ in range(MAX_BRACKET_DOUBLINGS):
        needs_growth = func(hi) >= target
        if not needs_growth.any():
            return hi

        width = torch.where(needs_growth, 2 * width, width)
        hi = lower + width

    raise InversionError(
        "Failed to bracket the root: the function does not fall below the "
        "target value."
    )


def solve_decreasing(
    func: TensorFn,
    dfunc: TensorFn,
    target: torch.Tensor,
    lower: torch.Tensor,
    tol: float,
    scale: torch.Tensor | None = None,
    max_iter: int = 200,
) -> torch.Tensor:
    """
    Solve `func(z) = target` element-wise for a strictly decreasing function
    with a bracketed Newton iteration.

    The iteration starts at `lower`, where `func(lower) >= target` must hold.
    An element is converged when `|func(z) - target| <= tol * scale` or when
    its bracket has shrunk to floating-point resolution.

    Args:
        func (TensorFn): The strictly decreasing function.
        dfunc (TensorFn): The derivative of `func`.
        target (torch.Tensor): The target values.
        lower (torch.Tensor): The lower bracket points.
        tol (float): The convergence tolerance on the residual.
        scale (torch.Tensor | None): Per-element residual scale. Defaults to
            ones (absolute tolerance).
        max_iter (int): The maximum number of iterations. Defaults to 200.

    Returns:
        torch.Tensor: The roots, with the same shape as `target`.

    Raises:
        InversionError: If any element does not converge within `max_iter`
            iterations.
    """
    with torch.no_grad():
        target = target.detach()
        lo = lower.detach().clone()
        hi = find_upper_bracket(func, target, lo)
        if scale is None:
            scale = torch.ones_like(target)

        z = lo.clone()
        stalled = torch.zeros_like(target, dtype=torch.bool)
        for iteration in range(max_iter):
            residual = func(z) - target

            resolution = 4 * FLOAT64_EPS * torch.clamp(z.abs(), min=1.0)
            converged = (
                (residual.abs() <= tol * scale)
                | (hi - lo <= resolution)
                | stalled
            )
            if converged.all():
                logger.debug(
                    f"Root search converged after {iteration} iterations"
                )
                return z

            # Shrink brackets around the root
            lo = torch.where(residual > 0, z, lo)
            hi = torch.where(residual < 0, z, hi)

            newton_step = z - residual / dfunc(z)
            outside = (
                ~torch.isfinite(newton_step)
                | (newton_step <= lo)
                | (newton_step >= hi)
            )
            candidate = torch.where(outside, 0.5 * (lo + hi), newton_step)

            # A Newton step that no longer moves the iterate has reached
            # floating-point resolution
            stalled = ~outside & (candidate == z)
            z = torch.where(converged, z, candidate)

    max_residual = (func(z) - target).abs().max().item()
    raise InversionError(
        f"Root search did not converge after {max_iter} iterations "
        f"(max residual: {max_residual:.3e})."
    )
