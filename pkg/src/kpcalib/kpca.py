"""Kernel PCA: spectral reduction of the kernel Gram matrix.

The forward map sends a point to ``V*.T @ g``, where g is its (optionally
centered) kernel vector against the training set. The backward map is the
pre-image solver in :mod:`kpcalib.preimage`, reachable here through
``inverse_transform``.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import linalg
from .exceptions import AllZeroVarianceError, DimensionMismatchError
from .kernels import (
    Kernel,
    center_gram,
    cross_gram,
    gram_matrix,
    median_heuristic_beta,
)
from .pca import DEFAULT_EPSILON, select_dimension
from .validation import as_float_matrix

NORMALIZATIONS = ("unit", "feature")


class KernelPCA(BaseEstimator, TransformerMixin):
    """Nonlinear dimensionality reduction through a kernel Gram matrix.

    Parameters
    ----------
    kernel : {"gaussian", "linear", "polynomial"} or Kernel
        Kernel family, or a ready-made :class:`~kpcalib.kernels.Kernel`.
    beta : float, optional
        Gaussian width; None means the median heuristic at fit time.
    degree : int, default 2
    offset : float, default 0.0
        Polynomial kernel parameters.
    epsilon : float, default 1e-4
        Captured-variance tolerance for dimension selection.
    k : int, optional
        Explicit reduced dimension; overrides ``epsilon``. Values beyond the
        number of positive eigenvalues are clipped to it.
    center : bool, default True
        Center the Gram matrix. Recommended, but must be False to use the
        log-form pre-image objective.
    normalization : {"unit", "feature"}
        Eigenvector scaling: "unit" keeps the Gram eigenvectors unit-norm,
        "feature" rescales column i by ``1/sqrt(lambda_i)`` (the classical
        feature-space convention). The pre-image solver reuses whichever
        convention the model was fit with, so round-trips are consistent
        under both.

    Attributes
    ----------
    training_ : (d, n) ndarray
        The training samples, one per column (retained; the pre-image
        reconstruction needs them).
    kernel_ : Kernel with a concrete beta.
    eigenvalues_ : (n,) descending spectrum of the fitted Gram matrix.
    eigenvectors_ : (n, k) reduced eigenbasis, scaled per ``normalization``.
    k_ : int
    aggregates_ : CenteringAggregates or None (None when uncentered).
    Z_train_ : (k, n) reduced images of the training samples, one per column.
    """

    def __init__(
        self,
        kernel="gaussian",
        beta=None,
        degree=2,
        offset=0.0,
        epsilon=DEFAULT_EPSILON,
        k=None,
        center=True,
        normalization="unit",
    ):
        self.kernel = kernel
        self.beta = beta
        self.degree = degree
        self.offset = offset
        self.epsilon = epsilon
        self.k = k
        self.center = center
        self.normalization = normalization

    def fit(self, X, y=None):
        X = as_float_matrix(X, "X")
        n_samples, n_features = X.shape
        if n_samples < 2:
            raise ValueError("kernel PCA needs at least two samples")
        if self.normalization not in NORMALIZATIONS:
            raise ValueError(f"unknown normalization {self.normalization!r}")
        samples = np.array(X.T, copy=True)
        kern = self._resolve_kernel(samples)
        gram = gram_matrix(kern, samples, check_psd=True)
        if self.center:
            gram_work, aggregates = center_gram(gram)
        else:
            gram_work, aggregates = gram, None
        decomp = linalg.eig_sym(gram_work, clamp_small=True)
        positive = int(np.count_nonzero(decomp.eigenvalues > 0.0))
        if positive == 0:
            raise AllZeroVarianceError("the kernel Gram matrix has no variance to reduce")
        if self.k is None:
            k = select_dimension(decomp.eigenvalues, self.epsilon)
        else:
            k = int(self.k)
            if k < 1:
                raise ValueError(f"k must be >= 1, got {k}")
            k = min(k, positive)
        vectors = decomp.basis[:, :k]
        if self.normalization == "feature":
            vectors = vectors / np.sqrt(decomp.eigenvalues[:k])[None, :]

        # contiguous copies so persistence round-trips reproduce the exact
        # BLAS summation order (layout changes shift results by ulps)
        self.training_ = np.ascontiguousarray(samples)
        self.kernel_ = kern
        self.eigenvalues_ = decomp.eigenvalues
        self.eigenvectors_ = np.ascontiguousarray(vectors)
        self.k_ = k
        self.aggregates_ = aggregates
        self.Z_train_ = self.eigenvectors_.T @ gram_work
        self.n_features_in_ = n_features
        self._linear_gram_cache = None
        return self

    def _resolve_kernel(self, samples):
        if isinstance(self.kernel, Kernel):
            kern = self.kernel
        else:
            kern = Kernel(
                family=self.kernel,
                beta=self.beta,
                degree=self.degree,
                offset=self.offset,
            )
        if kern.family == "gaussian" and kern.beta is None:
            kern = Kernel(family="gaussian", beta=median_heuristic_beta(samples))
        return kern

    def _center_kernel_columns(self, K):
        """Apply the training centering correction to kernel-vector columns."""
        if self.aggregates_ is None:
            return K
        return (
            K
            - self.aggregates_.col_means[:, None]
            - K.mean(axis=0)[None, :]
            + self.aggregates_.total_mean
        )

    def transform(self, X):
        """Map rows of X into the reduced space.

        Each row x yields the kernel vector ``g_i = kernel(x^i, x)`` against
        the training columns, centered iff the model was fit centered, then
        projected through the reduced eigenbasis.
        """
        check_is_fitted(self, "eigenvectors_")
        X = as_float_matrix(X, "X")
        if X.shape[1] != self.n_features_in_:
            raise DimensionMismatchError(
                f"X has {X.shape[1]} features, the model was fit with {self.n_features_in_}"
            )
        K = cross_gram(self.kernel_, self.training_, X.T)
        K = self._center_kernel_columns(K)
        return (self.eigenvectors_.T @ K).T

    def inverse_transform(self, Z, **options):
        """Reconstruct a pre-image for each row of Z.

        Accepts the keyword options of
        :func:`kpcalib.preimage.solve_preimage` (objective, scheme,
        neighbors, optimizer settings) and returns the stacked pre-images,
        one per row.
        """
        from .preimage import solve_preimage

        check_is_fitted(self, "eigenvectors_")
        Z = as_float_matrix(Z, "Z")
        if Z.shape[1] != self.k_:
            raise DimensionMismatchError(
                f"Z has {Z.shape[1]} columns, the model keeps k={self.k_}"
            )
        return np.array([solve_preimage(self, z, **options).x_star for z in Z])

    def solve_preimage(self, z, **options):
        """Full pre-image solve for a single reduced point; see
        :func:`kpcalib.preimage.solve_preimage`."""
        from .preimage import solve_preimage

        check_is_fitted(self, "eigenvectors_")
        return solve_preimage(self, z, **options)
