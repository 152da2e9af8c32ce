"""Bound-constrained smooth minimization.

The solver is projected gradient descent with Armijo backtracking along the
projection arc. It is deliberately simple: deterministic, dependency-free,
monotone in the objective, and exact on the bounds (iterates satisfy
``w >= lower_bounds`` componentwise, bitwise).
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

ARMIJO_SLOPE = 1e-4
MAX_BACKTRACKS = 50
DEFAULT_MAX_ITERS = 500
DEFAULT_STEP_TOL = 1e-12


@dataclass
class BoundedProblem:
    """Smooth objective with componentwise lower bounds (default all zero)."""

    dimension: int
    objective: Callable
    gradient: Callable
    lower_bounds: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.lower_bounds is None:
            self.lower_bounds = np.zeros(self.dimension)
        else:
            self.lower_bounds = np.asarray(self.lower_bounds, dtype=float)
            if self.lower_bounds.shape != (self.dimension,):
                raise ValueError(
                    f"lower_bounds must have shape ({self.dimension},), "
                    f"got {self.lower_bounds.shape}"
                )


@dataclass
class SolveReport:
    """Outcome of a bounded minimization."""

    minimizer: np.ndarray
    objective_value: float
    iterations: int
    converged: bool
    grad_norm_proj: float
    line_search_failed: bool = False


def projected_gradient_norm(gradient, w, lower_bounds):
    """Norm of the gradient with bound-blocked components zeroed.

    At a coordinate sitting on its lower bound only a negative gradient
    component opens a feasible descent direction, so positive components
    there do not count.
    """
    pg = np.array(gradient, dtype=float, copy=True)
    at_bound = w <= lower_bounds
    pg[at_bound] = np.minimum(pg[at_bound], 0.0)
    return float(np.linalg.norm(pg))


def minimize_bounded(
    problem,
    w0,
    max_iters=DEFAULT_MAX_ITERS,
    grad_tol=None,
    step_tol=DEFAULT_STEP_TOL,
):
    """Minimize a :class:`BoundedProblem` starting from ``w0``.

    ``w0`` is clipped onto the bounds if infeasible. ``grad_tol`` defaults to
    ``1e-8 * (1 + |f(w0)|)``. The report's ``converged`` flag means the
    projected-gradient norm fell to ``grad_tol`` or an accepted step was
    shorter than ``step_tol``; an exhausted backtracking line search sets
    ``line_search_failed`` instead of raising. Accepted iterates decrease the
    objective strictly, so ``objective_value <= objective(w0)`` always.
    """
    lb = problem.lower_bounds
    w = np.maximum(np.asarray(w0, dtype=float), lb)
    if w.shape != (problem.dimension,):
        raise ValueError(f"w0 must have shape ({problem.dimension},), got {w.shape}")
    f = float(problem.objective(w))
    if grad_tol is None:
        grad_tol = 1e-8 * (1.0 + abs(f))
    g = np.asarray(problem.gradient(w), dtype=float)
    gnorm = projected_gradient_norm(g, w, lb)
    converged = gnorm <= grad_tol
    failed = False
    iterations = 0
    step = 1.0
    while not converged and iterations < max_iters:
        alpha = 2.0 * step
        accepted = False
        for _ in range(MAX_BACKTRACKS + 1):
            trial = np.maximum(w - alpha * g, lb)
            delta = trial - w
            if not np.any(delta):
                # projection fixed point: no feasible move along -g remains
                converged = True
                break
            f_trial = float(problem.objective(trial))
            if f_trial <= f + ARMIJO_SLOPE * float(g @ delta):
                accepted = True
                break
            alpha *= 0.5
        if converged:
            break
        if not accepted:
            failed = True
            break
        iterations += 1
        step = alpha
        step_len = float(np.linalg.norm(delta))
        w, f = trial, f_trial
        g = np.asarray(problem.gradient(w), dtype=float)
        gnorm = projected_gradient_norm(g, w, lb)
        if gnorm <= grad_tol or step_len <= step_tol:
            converged = True
    return SolveReport(
        minimizer=w,
        objective_value=f,
        iterations=iterations,
        converged=converged,
        grad_norm_proj=gnorm,
        line_search_failed=failed,
    )


def finite_difference_gradient(fun, w, relative_step=1e-6):
    """Central differences with per-coordinate step ``1e-6 * (1 + |w_i|)``."""
    w = np.asarray(w, dtype=float)
    grad = np.zeros_like(w)
    for i in range(w.size):
        h = relative_step * (1.0 + abs(w[i]))
        forward = w.copy()
        forward[i] += h
        backward = w.copy()
        backward[i] -= h
        grad[i] = (fun(forward) - fun(backward)) / (2.0 * h)
    return grad


def check_gradient(problem, w):
    """Max relative disagreement between the analytic and numeric gradient.

    Returns ``max_i |analytic_i - numeric_i| / (1 + |numeric_i|)`` using the
    central-difference gradient as reference.
    """
    w = np.asarray(w, dtype=float)
    analytic = np.asarray(problem.gradient(w), dtype=float)
    numeric = finite_difference_gradient(problem.objective, w)
    return float(np.max(np.abs(analytic - numeric) / (1.0 + np.abs(numeric))))
