"""Linear principal component analysis.

Fits either through the (d, d) covariance matrix or through its (n, n)
Gram dual, which give the same model; the Gram route also exposes the
sample-side eigenvectors that make the two constructions interchangeable.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import linalg
from .exceptions import AllZeroVarianceError, DimensionMismatchError, NumericalError
from .validation import as_float_matrix, as_float_vector

#: Captured-variance tolerance used when neither epsilon nor k is given.
DEFAULT_EPSILON = 1e-4


def center_samples(samples):
    """Subtract the per-feature mean of a column-per-sample matrix.

    Returns the centered matrix and the mean vector that restores the input
    when added back.
    """
    S = as_float_matrix(samples, "samples")
    mean = S.mean(axis=1)
    return S - mean[:, None], mean


def select_dimension(eigenvalues, epsilon):
    """Smallest k whose leading eigenvalues capture a ``1 - epsilon`` share.

    ``eigenvalues`` must be sorted descending and nonnegative (round-off
    negatives within 1e-12 of the spectral scale are tolerated and treated
    as zero). Ties at exact equality resolve to the smaller k.
    """
    lam = as_float_vector(eigenvalues, "eigenvalues")
    if not 0.0 <= epsilon < 1.0:
        raise ValueError(f"epsilon must lie in [0, 1), got {epsilon}")
    if lam.size == 0:
        raise DimensionMismatchError("eigenvalues must be non-empty")
    scale = max(float(lam[0]), 1e-300)
    if np.any(np.diff(lam) > 1e-12 * scale):
        raise ValueError("eigenvalues must be sorted in descending order")
    if np.any(lam < -1e-12 * scale):
        raise ValueError("eigenvalues must be nonnegative")
    cumulative = np.cumsum(np.maximum(lam, 0.0))
    total = float(cumulative[-1])
    if total <= 0.0:
        raise AllZeroVarianceError("eigenvalue spectrum sums to zero")
    k = int(np.searchsorted(cumulative, (1.0 - epsilon) * total, side="left")) + 1
    return min(k, lam.size)


def duality_coefficients(samples, basis, eigenvalues, zero_rtol=1e-12):
    """Sample-side expansion coefficients of the covariance eigenvectors.

    Column j holds ``samples[:, l] . basis[:, j] / eigenvalues[j]`` over the
    training columns l, for every eigenvalue above ``zero_rtol`` times the
    largest. These columns reproduce the Gram-matrix eigenvectors up to
    normalization, which is what makes the covariance and Gram fits
    interchangeable.
    """
    S = as_float_matrix(samples, "samples")
    lam = as_float_vector(eigenvalues, "eigenvalues")
    U = as_float_matrix(basis, "basis")
    keep = lam > zero_rtol * max(float(lam[0]), 0.0)
    return (S.T @ U[:, keep]) / lam[keep][None, :]


def basis_from_gram(samples, gram_basis):
    """Input-space basis recovered from Gram eigenvectors.

    Each column of ``samples @ gram_basis`` is normalized to unit length.
    Raises ``NumericalError`` if a column is numerically zero (the
    eigenvector belongs to the Gram null space).
    """
    S = as_float_matrix(samples, "samples")
    V = as_float_matrix(gram_basis, "gram_basis")
    U = S @ V
    norms = np.linalg.norm(U, axis=0)
    if np.any(norms <= 0.0):
        raise NumericalError(
            "a Gram eigenvector maps to the zero vector; it belongs to the "
            "null space and carries no input-space direction"
        )
    return U / norms[None, :]


class PCA(BaseEstimator, TransformerMixin):
    """Sample-covariance PCA with variance-based dimension selection.

    Follows the scikit-learn estimator protocol: ``fit`` takes an
    ``(n_samples, n_features)`` array, ``transform`` projects to the reduced
    space, ``inverse_transform`` maps back.

    Parameters
    ----------
    epsilon : float, default 1e-4
        Keep the smallest k whose eigenvalues capture at least
        ``1 - epsilon`` of the total variance.
    k : int, optional
        Explicit number of components; overrides ``epsilon``.
    center : bool, default True
        Subtract the sample mean before fitting.
    method : {"covariance", "gram"}
        Diagonalize the (d, d) covariance matrix or the (n, n) Gram matrix.
        Both yield the same reduced basis up to round-off; "gram" is the
        cheaper route when there are fewer samples than features.

    Attributes
    ----------
    mean_ : (n_features,) ndarray
    components_ : (k, n_features) ndarray with orthonormal rows.
    eigenvalues_ : full descending spectrum of the fitted matrix.
    k_ : selected reduced dimension.
    total_variance_ : float, sum of the spectrum.
    sample_basis_ : (n_samples, k) ndarray or None
        Gram-side eigenvectors, populated only for ``method="gram"``.
    """

    def __init__(self, epsilon=DEFAULT_EPSILON, k=None, center=True, method="covariance"):
        self.epsilon = epsilon
        self.k = k
        self.center = center
        self.method = method

    def fit(self, X, y=None):
        X = as_float_matrix(X, "X")
        n_samples, n_features = X.shape
        if n_samples < 2:
            raise ValueError("PCA needs at least two samples")
        if self.method not in ("covariance", "gram"):
            raise ValueError(f"unknown method {self.method!r}")
        samples = X.T
        if self.center:
            centered, mean = center_samples(samples)
        else:
            centered, mean = samples, np.zeros(n_features)

        if self.method == "covariance":
            decomp = linalg.eig_sym(linalg.outer_accumulate(centered), clamp_small=True)
        else:
            gram = centered.T @ centered
            decomp = linalg.eig_sym(0.5 * (gram + gram.T), clamp_small=True)
        k = self._resolve_k(decomp.eigenvalues, min(n_samples, n_features))

        if self.method == "covariance":
            basis = decomp.basis[:, :k]
            sample_basis = None
        else:
            sample_basis = decomp.basis[:, :k]
            basis = linalg.fix_signs(basis_from_gram(centered, sample_basis))

        self.mean_ = mean
        self.components_ = np.ascontiguousarray(basis.T)
        self.eigenvalues_ = decomp.eigenvalues
        self.k_ = k
        self.total_variance_ = float(np.sum(decomp.eigenvalues))
        self.sample_basis_ = sample_basis
        self.n_features_in_ = n_features
        return self

    def _resolve_k(self, eigenvalues, k_max):
        if self.k is None:
            return min(select_dimension(eigenvalues, self.epsilon), k_max)
        k = int(self.k)
        if not 1 <= k <= k_max:
            raise ValueError(f"k must lie in [1, {k_max}], got {k}")
        return k

    def transform(self, X):
        """Project rows of X onto the reduced basis: ``(X - mean) @ U*``."""
        check_is_fitted(self, "components_")
        X = as_float_matrix(X, "X")
        if X.shape[1] != self.n_features_in_:
            raise DimensionMismatchError(
                f"X has {X.shape[1]} features, the model was fit with {self.n_features_in_}"
            )
        return (X - self.mean_) @ self.components_.T

    def inverse_transform(self, Z):
        """Map reduced rows back to input space: ``mean + Z @ U*.T``."""
        check_is_fitted(self, "components_")
        Z = as_float_matrix(Z, "Z")
        if Z.shape[1] != self.k_:
            raise DimensionMismatchError(
                f"Z has {Z.shape[1]} columns, the model keeps k={self.k_}"
            )
        return Z @ self.components_ + self.mean_
