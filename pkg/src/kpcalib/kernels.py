"""Kernel functions, Gram-matrix assembly, and the centering algebra."""

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .exceptions import (
    DimensionMismatchError,
    NotPositiveSemidefiniteError,
    NumericalError,
)
from .validation import as_float_matrix, as_float_vector

FAMILIES = ("gaussian", "linear", "polynomial")

#: A Gram matrix may round off slightly negative; eigenvalues below
#: ``-PSD_RTOL * lambda_max`` mean the kernel is not a valid inner product.
PSD_RTOL = 1e-8


@dataclass(frozen=True)
class Kernel:
    """Kernel family plus its parameters.

    ``beta=None`` on a gaussian kernel means "resolve from the data at fit
    time" (see :func:`median_heuristic_beta`); evaluating the kernel requires
    a concrete width.
    """

    family: str = "gaussian"
    beta: Optional[float] = None
    degree: int = 2
    offset: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}")
        if self.family == "gaussian" and self.beta is not None and not self.beta > 0:
            raise ValueError(f"gaussian kernel needs beta > 0, got {self.beta}")
        if self.family == "polynomial":
            if int(self.degree) != self.degree or self.degree < 1:
                raise ValueError(f"polynomial degree must be an integer >= 1, got {self.degree}")
            if self.offset < 0:
                raise ValueError(f"polynomial offset must be >= 0, got {self.offset}")

    def require_beta(self):
        if self.family == "gaussian" and self.beta is None:
            raise ValueError("gaussian kernel width is unset; pass beta or fit with beta=None")


class CenteringAggregates(NamedTuple):
    """Training-Gram statistics needed to center out-of-sample kernel vectors."""

    col_means: np.ndarray
    total_mean: float


def pairwise_sq_dists(a, b):
    """Squared Euclidean distances between two column sets.

    ``a`` is (d, m) and ``b`` is (d, n); the result is (m, n). Uses the
    expansion ``|x|^2 - 2 x.y + |y|^2`` with round-off negatives clamped
    to zero.
    """
    a = as_float_matrix(a, "a")
    b = as_float_matrix(b, "b")
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatchError(
            f"column sets live in different spaces: {a.shape[0]} vs {b.shape[0]}"
        )
    sq = np.sum(a * a, axis=0)[:, None] - 2.0 * (a.T @ b) + np.sum(b * b, axis=0)[None, :]
    return np.maximum(sq, 0.0)


def cross_gram(kernel, samples, queries):
    """Kernel evaluations between training and query columns.

    Entry (i, j) is ``kernel(samples[:, i], queries[:, j])``.
    """
    S = as_float_matrix(samples, "samples")
    Q = as_float_matrix(queries, "queries")
    if S.shape[0] != Q.shape[0]:
        raise DimensionMismatchError(
            f"samples have {S.shape[0]} features, queries have {Q.shape[0]}"
        )
    if kernel.family == "gaussian":
        kernel.require_beta()
        return np.exp(-kernel.beta * pairwise_sq_dists(S, Q))
    inner = S.T @ Q
    if kernel.family == "linear":
        return inner
    return (inner + kernel.offset) ** kernel.degree


def kernel_eval(kernel, x, y):
    """Evaluate the kernel on two points; symmetric in its arguments."""
    x = as_float_vector(x, "x")
    y = as_float_vector(y, "y", length=x.shape[0])
    return float(cross_gram(kernel, x[:, None], y[:, None])[0, 0])


def assert_positive_semidefinite(matrix, rtol=PSD_RTOL):
    """Raise unless every eigenvalue clears ``-rtol`` times the spectral scale."""
    eigs = np.linalg.eigvalsh(matrix)
    scale = max(float(np.max(np.abs(eigs))), np.finfo(float).tiny)
    if eigs[0] < -rtol * scale:
        raise NotPositiveSemidefiniteError(
            f"matrix has eigenvalue {eigs[0]:.6e} against scale {scale:.6e}; "
            "the kernel choice does not define a valid inner product on this data"
        )


def gram_matrix(kernel, samples, check_psd=True):
    """Symmetric kernel Gram matrix of a column-per-sample training set.

    The gaussian diagonal is pinned to exactly 1. With ``check_psd`` the
    matrix is verified positive semidefinite up to round-off and
    ``NotPositiveSemidefiniteError`` is raised otherwise.
    """
    S = as_float_matrix(samples, "samples")
    G = cross_gram(kernel, S, S)
    G = 0.5 * (G + G.T)
    if kernel.family == "gaussian":
        np.fill_diagonal(G, 1.0)
    if check_psd:
        assert_positive_semidefinite(G)
    return G


def median_heuristic_beta(samples):
    """Kernel width from the data scale: 1 / (2 * median pairwise squared distance)."""
    S = as_float_matrix(samples, "samples")
    n = S.shape[1]
    if n < 2:
        raise NumericalError("need at least two samples to set a kernel width")
    sq = pairwise_sq_dists(S, S)
    median = float(np.median(sq[np.triu_indices(n, k=1)]))
    if median <= 0.0:
        raise NumericalError("median pairwise distance is zero; set beta explicitly")
    return 1.0 / (2.0 * median)


def center_gram(gram):
    """Remove the implicit feature-space mean from a kernel Gram matrix.

    Returns the centered matrix together with the aggregates needed to apply
    the same correction to out-of-sample kernel vectors later. Row and column
    sums of the result vanish up to round-off.
    """
    G = as_float_matrix(gram, "gram")
    if G.shape[0] != G.shape[1]:
        raise DimensionMismatchError(f"gram matrix must be square, got {G.shape}")
    col_means = G.mean(axis=0)
    total_mean = float(col_means.mean())
    centered = G - col_means[None, :] - col_means[:, None] + total_mean
    return centered, CenteringAggregates(col_means=col_means, total_mean=total_mean)


def center_gram_vector(g, aggregates):
    """Center a kernel vector against the training Gram it was evaluated on.

    Consistent with :func:`center_gram`: feeding column j of the training
    Gram returns column j of the centered Gram.
    """
    col_means = np.asarray(aggregates.col_means, dtype=float)
    v = as_float_vector(g, "g", length=col_means.shape[0])
    return v - col_means - v.mean() + aggregates.total_mean
