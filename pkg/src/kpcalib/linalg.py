"""Dense spectral primitives shared by the estimators.

Matrices are float64 ndarrays throughout. Sample matrices follow the
column-per-sample convention: a ``(d, n)`` array holds ``n`` samples from
``R^d``, one per column. CSV files on disk use the opposite, row-per-sample
layout; :mod:`kpcalib.io` converts between the two.
"""

from typing import NamedTuple

import numpy as np

from .exceptions import NonSymmetricError
from .validation import as_float_matrix

#: Eigenvalues below this fraction of the largest one count as zero variance
#: (null-space directions) when a PSD spectrum is requested.
ZERO_EIGENVALUE_RTOL = 1e-12

# Entries at or below this magnitude are skipped when fixing eigenvector signs.
_SIGN_TOL = 1e-12


class SpectralDecomp(NamedTuple):
    """Symmetric eigendecomposition with eigenvalues sorted descending."""

    eigenvalues: np.ndarray
    basis: np.ndarray


class SvdFactors(NamedTuple):
    """Full SVD: ``X = left @ Sigma @ right.T`` with descending singulars."""

    left: np.ndarray
    singulars: np.ndarray
    right: np.ndarray


def fix_signs(vectors, tol=_SIGN_TOL):
    """Flip columns so the first entry above ``tol`` in magnitude is positive.

    LAPACK leaves the sign of each eigenvector arbitrary; this convention
    makes decompositions reproducible enough for golden tests.
    """
    out = np.array(vectors, dtype=float, copy=True)
    for j in range(out.shape[1]):
        col = out[:, j]
        significant = np.flatnonzero(np.abs(col) > tol)
        if significant.size and col[significant[0]] < 0.0:
            out[:, j] = -col
    return out


def eig_sym(matrix, clamp_small=False, symmetry_rtol=1e-12):
    """Eigendecomposition of a symmetric matrix.

    Parameters
    ----------
    matrix : (n, n) array_like
        Symmetric within ``symmetry_rtol`` relative to its largest entry.
    clamp_small : bool
        Zero out eigenvalues below ``ZERO_EIGENVALUE_RTOL`` times the largest
        eigenvalue. Use this for PSD inputs (covariance or Gram matrices),
        where such values are null-space round-off; leave it off for general
        symmetric input so ``basis @ diag(eigenvalues) @ basis.T``
        reconstructs the input.
    symmetry_rtol : float
        Relative tolerance of the symmetry check.

    Returns
    -------
    SpectralDecomp
        Eigenvalues descending; basis columns orthonormal, each with its
        first significant entry positive.

    Raises
    ------
    NonSymmetricError
        If the input is not square or not symmetric within tolerance.
    NonFiniteError
        If the input has NaN or infinite entries.
    """
    M = as_float_matrix(matrix, "matrix")
    if M.shape[0] != M.shape[1]:
        raise NonSymmetricError(f"matrix must be square, got shape {M.shape}")
    scale = float(np.max(np.abs(M)))
    if scale > 0.0 and float(np.max(np.abs(M - M.T))) > symmetry_rtol * scale:
        raise NonSymmetricError(
            f"matrix is not symmetric within relative tolerance {symmetry_rtol:g}"
        )
    values, vectors = np.linalg.eigh(M)  # ascending from LAPACK
    values = values[::-1].copy()
    vectors = fix_signs(vectors[:, ::-1])
    if clamp_small:
        top = max(float(values[0]), 0.0)
        values[values < ZERO_EIGENVALUE_RTOL * top] = 0.0
    return SpectralDecomp(eigenvalues=values, basis=vectors)


def svd(matrix):
    """Full singular value decomposition with deterministic signs.

    Returns
    -------
    SvdFactors
        ``left`` is (d, d) orthonormal, ``right`` is (n, n) orthonormal,
        ``singulars`` holds the min(d, n) singular values, descending and
        nonnegative. Left columns carry the first-significant-entry-positive
        convention; paired right columns are flipped along with them so the
        product is unchanged.
    """
    X = as_float_matrix(matrix, "matrix")
    left, singulars, right_t = np.linalg.svd(X, full_matrices=True)
    right = right_t.T
    rank_bound = singulars.shape[0]
    for j in range(left.shape[1]):
        col = left[:, j]
        significant = np.flatnonzero(np.abs(col) > _SIGN_TOL)
        if significant.size and col[significant[0]] < 0.0:
            left[:, j] = -col
            if j < rank_bound and j < right.shape[1]:
                right[:, j] = -right[:, j]
    # null-space columns of the right factor are unpaired; give them the
    # same convention so the whole factorization is reproducible
    if right.shape[1] > rank_bound:
        right[:, rank_bound:] = fix_signs(right[:, rank_bound:])
    return SvdFactors(left=left, singulars=singulars, right=right)


def outer_accumulate(samples):
    """Sum of outer products over the sample columns: ``S @ S.T``."""
    S = as_float_matrix(samples, "samples")
    M = S @ S.T
    # BLAS can leave ulp-level asymmetry between (i, j) and (j, i)
    return 0.5 * (M + M.T)
