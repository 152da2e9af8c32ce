"""Backward mapping: recover an input-space point from reduced coordinates.

The pre-image of a reduced point z is sought as a nonnegative weighted
combination of the training samples. Heuristic distance-decay weights give
the starting point; the final weights minimize a discrepancy functional
between z and the forward image of the candidate point, so the result never
depends on which decay heuristic was picked.
"""

from dataclasses import dataclass

import numpy as np

from .kernels import cross_gram
from .optimize import (
    BoundedProblem,
    SolveReport,
    finite_difference_gradient,
    minimize_bounded,
)
from .validation import as_float_vector

OBJECTIVES = ("residual", "gaussian_log")
INIT_SCHEMES = ("inv_dist", "inv_dist_sq", "exp_neg_dist")

#: Reduced-space distances at or below this are exact hits: the heuristic
#: collapses to a one-hot weight on the nearest training sample.
EXACT_HIT_DISTANCE = 1e-14

#: Arguments of logarithms are clamped below at this value.
LOG_CLAMP = 1e-300
_LOG_CLAMP_LOG = float(np.log(LOG_CLAMP))

DEFAULT_NEIGHBORS = 10


@dataclass
class PreimageResult:
    """Outcome of a pre-image solve.

    ``weights`` has zeros outside the active neighbor set and ``x_star`` is
    exactly ``training @ weights``. ``nonpositive_target`` flags a truncation
    artifact of the log objective: entries of ``V* z`` were nonpositive and
    were clamped before taking logarithms.
    """

    weights: np.ndarray
    x_star: np.ndarray
    objective_value: float
    report: SolveReport
    nonpositive_target: bool = False


def _reduced_point(model, z_star):
    return as_float_vector(z_star, "z_star", length=model.k_)


def reduced_distances(model, z_star):
    """Distances from z_star to every training image in the reduced space."""
    z = _reduced_point(model, z_star)
    diff = model.Z_train_ - z[:, None]
    return np.sqrt(np.sum(diff * diff, axis=0))


def heuristic_weights(model, z_star, scheme="inv_dist_sq", neighbors=None):
    """Distance-decay weights over the nearest training images.

    Distances are taken in the reduced space. The ``neighbors`` nearest
    samples receive weights ``1/d``, ``1/d**2`` or ``exp(-d)`` per
    ``scheme``, normalized to sum to one; all other samples get zero. If any
    distance is an exact hit (below 1e-14) the result is one-hot on the
    nearest sample.
    """
    if scheme not in INIT_SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; pick one of {INIT_SCHEMES}")
    dists = reduced_distances(model, z_star)
    n = dists.shape[0]
    m = n if neighbors is None else int(neighbors)
    if m < 1:
        raise ValueError(f"neighbors must be >= 1, got {neighbors}")
    m = min(m, n)
    weights = np.zeros(n)
    nearest = int(np.argmin(dists))
    if dists[nearest] <= EXACT_HIT_DISTANCE:
        weights[nearest] = 1.0
        return weights
    active = np.argsort(dists, kind="stable")[:m]
    d = dists[active]
    if scheme == "inv_dist":
        decayed = 1.0 / d
    elif scheme == "inv_dist_sq":
        decayed = 1.0 / (d * d)
    else:
        decayed = np.exp(-d)
    weights[active] = decayed / decayed.sum()
    return weights


def _require_log_form(model):
    if model.kernel_.family != "gaussian":
        raise ValueError("the log-form objective needs a gaussian kernel")
    if model.aggregates_ is not None:
        raise ValueError(
            "the log-form objective needs an uncentered model: centered "
            "kernel values can be negative and have no logarithm"
        )


def _log_target(model, z_star):
    """Clamped log of the kernel vector reconstructed from z.

    With unit-norm eigenvector columns the reconstruction is exactly
    ``V* z``; feature-scaled columns (v_i = u_i / sqrt(lambda_i)) need the
    dual coefficients ``z_i * lambda_i`` to mean the same thing. Nonpositive
    entries (a truncation artifact) are flagged and clamped.
    """
    z = _reduced_point(model, z_star)
    if getattr(model, "normalization", "unit") == "feature":
        z = z * model.eigenvalues_[: model.k_]
    target = model.eigenvectors_ @ z
    nonpositive = bool(np.any(target <= 0.0))
    return np.log(np.maximum(target, LOG_CLAMP)), nonpositive


def _linear_gram(model):
    """Cached training inner products; the log objective touches only these."""
    cache = getattr(model, "_linear_gram_cache", None)
    if cache is None:
        gram = model.training_.T @ model.training_
        gram = 0.5 * (gram + gram.T)
        cache = (gram, np.diag(gram).copy())
        model._linear_gram_cache = cache
    return cache


def objective_residual(model, z_star, w):
    """Squared reduced-space distance between z_star and the image of X @ w.

    Works for any kernel. The candidate kernel vector is centered iff the
    model was fit centered.
    """
    z = _reduced_point(model, z_star)
    w = as_float_vector(w, "w", length=model.Z_train_.shape[1])
    x = model.training_ @ w
    g = cross_gram(model.kernel_, model.training_, x[:, None])
    g = model._center_kernel_columns(g)[:, 0]
    r = z - model.eigenvectors_.T @ g
    return float(r @ r)


def objective_gaussian_log(model, z_star, w):
    """Log-form discrepancy for gaussian kernels on uncentered models.

    Compares ``log(V* z)`` against the log kernel values of the candidate
    point, which are ``-beta * ||x^i - X w||^2`` in closed form. The squared
    distances expand as ``G_ii - 2 (G w)_i + w.G.w`` with the linear Gram G
    of the training samples, so no d-dimensional vector is ever formed.
    Logarithm arguments are clamped below at 1e-300.
    """
    _require_log_form(model)
    w = as_float_vector(w, "w", length=model.Z_train_.shape[1])
    log_target, _ = _log_target(model, z_star)
    gram, diag = _linear_gram(model)
    gw = gram @ w
    sq_dists = np.maximum(diag - 2.0 * gw + float(w @ gw), 0.0)
    log_g = np.maximum(-model.kernel_.beta * sq_dists, _LOG_CLAMP_LOG)
    r = log_target - log_g
    return float(r @ r)


def gradient_gaussian_log(model, z_star, w):
    """Analytic gradient of :func:`objective_gaussian_log`.

    Equals ``4*beta * sum_i r_i * (G w - g^i)`` with residuals
    ``r_i = log(t_i) + beta*||x^i - X w||^2`` and g^i the i-th column of the
    linear Gram; terms whose kernel value sits on the log clamp contribute
    zero, so this is exactly the derivative of the implemented objective.
    """
    _require_log_form(model)
    w = as_float_vector(w, "w", length=model.Z_train_.shape[1])
    log_target, _ = _log_target(model, z_star)
    gram, diag = _linear_gram(model)
    beta = model.kernel_.beta
    gw = gram @ w
    sq_dists = np.maximum(diag - 2.0 * gw + float(w @ gw), 0.0)
    raw_log_g = -beta * sq_dists
    r = np.where(raw_log_g > _LOG_CLAMP_LOG, log_target - raw_log_g, 0.0)
    return 4.0 * beta * (np.sum(r) * gw - gram @ r)


def solve_preimage(
    model,
    z_star,
    objective=None,
    scheme="inv_dist_sq",
    neighbors=None,
    max_iters=None,
    grad_tol=None,
    step_tol=None,
):
    """Minimize the discrepancy functional over nonnegative weights.

    Parameters
    ----------
    model : fitted KernelPCA
    z_star : (k,) reduced-space target point.
    objective : {"residual", "gaussian_log"}, optional
        None picks "gaussian_log" for gaussian uncentered models and
        "residual" otherwise. "gaussian_log" on a centered or non-gaussian
        model is a hard error.
    scheme : heuristic used for the starting weights.
    neighbors : int, optional
        Size of the active set: only the ``neighbors`` training samples
        nearest to z_star in the reduced space get nonzero weights
        (default ``min(10, n)``).
    max_iters, grad_tol, step_tol : optimizer settings, see
        :func:`kpcalib.optimize.minimize_bounded`.

    Returns
    -------
    PreimageResult
        The final objective value never exceeds the heuristic start's.
    """
    z = _reduced_point(model, z_star)
    n = model.Z_train_.shape[1]
    if objective is None:
        objective = (
            "gaussian_log"
            if model.kernel_.family == "gaussian" and model.aggregates_ is None
            else "residual"
        )
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}; pick one of {OBJECTIVES}")
    if objective == "gaussian_log":
        _require_log_form(model)
    m = DEFAULT_NEIGHBORS if neighbors is None else int(neighbors)
    m = min(max(m, 1), n)
    dists = reduced_distances(model, z)
    active = np.sort(np.argsort(dists, kind="stable")[:m])
    w0 = heuristic_weights(model, z, scheme=scheme, neighbors=m)[active]

    nonpositive = False
    if objective == "gaussian_log":
        log_target, nonpositive = _log_target(model, z)
        gram, diag = _linear_gram(model)
        beta = model.kernel_.beta
        gram_active = gram[:, active]
        gram_aa = gram_active[active, :]

        def fun(wa):
            gw = gram_active @ wa
            sq = np.maximum(diag - 2.0 * gw + float(wa @ (gram_aa @ wa)), 0.0)
            log_g = np.maximum(-beta * sq, _LOG_CLAMP_LOG)
            r = log_target - log_g
            return float(r @ r)

        def jac(wa):
            gw = gram_active @ wa
            sq = np.maximum(diag - 2.0 * gw + float(wa @ (gram_aa @ wa)), 0.0)
            raw = -beta * sq
            r = np.where(raw > _LOG_CLAMP_LOG, log_target - raw, 0.0)
            return 4.0 * beta * (np.sum(r) * gw[active] - gram_active.T @ r)

    else:

        def fun(wa):
            w_full = np.zeros(n)
            w_full[active] = wa
            return objective_residual(model, z, w_full)

        def jac(wa):
            # kernel-generic analytic form is messy; central differences over
            # the active coordinates are cheap at m <= 10
            return finite_difference_gradient(fun, wa)

    problem = BoundedProblem(dimension=m, objective=fun, gradient=jac)
    opts = {}
    if max_iters is not None:
        opts["max_iters"] = max_iters
    if grad_tol is not None:
        opts["grad_tol"] = grad_tol
    if step_tol is not None:
        opts["step_tol"] = step_tol
    report = minimize_bounded(problem, w0, **opts)

    weights = np.zeros(n)
    weights[active] = report.minimizer
    return PreimageResult(
        weights=weights,
        x_star=model.training_ @ weights,
        objective_value=report.objective_value,
        report=report,
        nonpositive_target=nonpositive,
    )
