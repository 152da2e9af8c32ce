import numpy as np
import pytest

from kpcalib import eig_sym, outer_accumulate, svd
from kpcalib.exceptions import NonFiniteError, NonSymmetricError


def test_eig_sym_diagonal_matrix():
    decomp = eig_sym(np.diag([3.0, 1.0]))
    np.testing.assert_allclose(decomp.eigenvalues, [3.0, 1.0])
    np.testing.assert_allclose(decomp.basis, np.eye(2))


def test_eig_sym_analytic_2x2():
    decomp = eig_sym(np.array([[2.0, 1.0], [1.0, 2.0]]))
    np.testing.assert_allclose(decomp.eigenvalues, [3.0, 1.0], atol=1e-12)
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    np.testing.assert_allclose(decomp.basis[:, 0], [inv_sqrt2, inv_sqrt2], atol=1e-12)
    np.testing.assert_allclose(decomp.basis[:, 1], [inv_sqrt2, -inv_sqrt2], atol=1e-12)


def test_eig_sym_reconstructs_random_symmetric():
    rng = np.random.default_rng(11)
    A = rng.standard_normal((6, 6))
    M = A + A.T
    decomp = eig_sym(M)
    rebuilt = decomp.basis @ np.diag(decomp.eigenvalues) @ decomp.basis.T
    residual = np.linalg.norm(rebuilt - M) / np.linalg.norm(M)
    assert residual <= 1e-8
    # orthonormal basis
    gram = decomp.basis.T @ decomp.basis
    assert np.max(np.abs(gram - np.eye(6))) <= 1e-10


def test_eig_sym_sign_convention():
    rng = np.random.default_rng(3)
    A = rng.standard_normal((5, 5))
    decomp = eig_sym(A @ A.T, clamp_small=True)
    for j in range(5):
        col = decomp.basis[:, j]
        first = col[np.abs(col) > 1e-12][0]
        assert first > 0


def test_eig_sym_idempotent_eigenvalues():
    rng = np.random.default_rng(8)
    A = rng.standard_normal((5, 5))
    M = A + A.T
    first = eig_sym(M)
    rebuilt = first.basis @ np.diag(first.eigenvalues) @ first.basis.T
    second = eig_sym(0.5 * (rebuilt + rebuilt.T))
    np.testing.assert_allclose(second.eigenvalues, first.eigenvalues,
                               rtol=0, atol=1e-8 * np.max(np.abs(first.eigenvalues)))


def test_eig_sym_rejects_nonsymmetric_and_nonfinite():
    with pytest.raises(NonSymmetricError):
        eig_sym(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(NonSymmetricError):
        eig_sym(np.ones((2, 3)))
    with pytest.raises(NonFiniteError):
        eig_sym(np.array([[np.nan, 0.0], [0.0, 1.0]]))


def test_eig_sym_clamp_zeroes_null_space():
    x = np.array([[1.0], [2.0]])
    decomp = eig_sym(x @ x.T, clamp_small=True)
    assert decomp.eigenvalues[1] == 0.0
    np.testing.assert_allclose(decomp.eigenvalues[0], 5.0)


def test_svd_identity():
    factors = svd(np.eye(3))
    np.testing.assert_allclose(factors.singulars, [1.0, 1.0, 1.0])


def test_svd_rank_one():
    a = np.array([2.0, 0.0, 0.0])
    b = np.array([0.0, 3.0])
    factors = svd(np.outer(a, b))
    np.testing.assert_allclose(factors.singulars, [6.0, 0.0], atol=1e-12)


def test_svd_reconstructs_and_matches_eig():
    rng = np.random.default_rng(21)
    X = rng.standard_normal((4, 10))
    factors = svd(X)
    sigma = np.zeros((4, 10))
    np.fill_diagonal(sigma, factors.singulars)
    rebuilt = factors.left @ sigma @ factors.right.T
    assert np.linalg.norm(rebuilt - X) / np.linalg.norm(X) <= 1e-8
    assert np.all(np.diff(factors.singulars) <= 1e-12)
    assert np.all(factors.singulars >= 0)
    # squared singular values against the covariance spectrum (independent route)
    lam = eig_sym(outer_accumulate(X), clamp_small=True).eigenvalues
    np.testing.assert_allclose(factors.singulars**2, lam,
                               rtol=0, atol=1e-8 * lam[0])


def test_svd_factors_orthonormal():
    rng = np.random.default_rng(4)
    X = rng.standard_normal((3, 7))
    factors = svd(X)
    assert np.max(np.abs(factors.left.T @ factors.left - np.eye(3))) <= 1e-10
    assert np.max(np.abs(factors.right.T @ factors.right - np.eye(7))) <= 1e-10


def test_outer_accumulate_single_column():
    np.testing.assert_allclose(outer_accumulate(np.array([[1.0], [0.0]])),
                               [[1.0, 0.0], [0.0, 0.0]])


def test_outer_accumulate_identity():
    np.testing.assert_allclose(outer_accumulate(np.eye(2)), np.eye(2))


def test_outer_accumulate_matches_naive_loop():
    rng = np.random.default_rng(17)
    X = rng.standard_normal((3, 5))
    naive = np.zeros((3, 3))
    for j in range(5):
        for a in range(3):
            for b in range(3):
                naive[a, b] += X[a, j] * X[b, j]
    result = outer_accumulate(X)
    assert np.max(np.abs(result - naive)) <= 1e-12
    assert np.array_equal(result, result.T)


def test_three_vector_product_rule():
    rng = np.random.default_rng(29)
    for _ in range(20):
        d = rng.integers(1, 9)
        a, b, c = rng.standard_normal((3, d))
        left = np.outer(a, b) @ c
        right = a * float(b @ c)
        assert np.max(np.abs(left - right)) <= 1e-12
