from types import SimpleNamespace

import numpy as np
import pytest

from kpcalib import (
    BoundedProblem,
    KernelPCA,
    center_gram_vector,
    check_gradient,
    gradient_gaussian_log,
    heuristic_weights,
    kernel_eval,
    objective_gaussian_log,
    objective_residual,
    solve_preimage,
)
from conftest import relative_errors


def reduced_stub(Z):
    """Bare object carrying just the reduced training images."""
    Z = np.asarray(Z, dtype=float)
    return SimpleNamespace(Z_train_=Z, k_=Z.shape[0])


class TestHeuristicWeights:
    def test_exact_hit_is_one_hot(self):
        Z = np.array([[0.0, 1.0, 2.0], [0.0, 0.0, 0.0]])
        w = heuristic_weights(reduced_stub(Z), np.array([1.0, 0.0]))
        np.testing.assert_allclose(w, [0.0, 1.0, 0.0])

    def test_equidistant_pair_splits_evenly(self):
        Z = np.array([[-1.0, 1.0, 5.0]])
        w = heuristic_weights(reduced_stub(Z), np.array([0.0]),
                              scheme="inv_dist", neighbors=2)
        np.testing.assert_allclose(w, [0.5, 0.5, 0.0])

    def test_matches_naive_recomputation(self):
        rng = np.random.default_rng(0)
        Z = rng.standard_normal((3, 12))
        z = rng.standard_normal(3)
        w = heuristic_weights(reduced_stub(Z), z, scheme="inv_dist_sq", neighbors=5)
        dists = np.array([np.linalg.norm(z - Z[:, i]) for i in range(12)])
        order = np.argsort(dists)[:5]
        raw = np.zeros(12)
        raw[order] = 1.0 / dists[order] ** 2
        np.testing.assert_allclose(w, raw / raw.sum(), atol=1e-13)

    def test_weights_sum_to_one_and_vanish_outside(self):
        rng = np.random.default_rng(1)
        Z = rng.standard_normal((2, 20))
        z = rng.standard_normal(2)
        for scheme in ("inv_dist", "inv_dist_sq", "exp_neg_dist"):
            w = heuristic_weights(reduced_stub(Z), z, scheme=scheme, neighbors=6)
            assert np.isclose(w.sum(), 1.0)
            assert np.count_nonzero(w) == 6
            assert np.all(w >= 0.0)

    def test_unknown_scheme(self):
        with pytest.raises(ValueError):
            heuristic_weights(reduced_stub(np.zeros((1, 3))), np.zeros(1),
                              scheme="softmax")


class TestResidualObjective:
    def test_one_hot_on_training_image_is_zero(self, circle_model_centered):
        model = circle_model_centered
        n = model.Z_train_.shape[1]
        for j in (0, 17, 42):
            w = np.zeros(n)
            w[j] = 1.0
            assert objective_residual(model, model.Z_train_[:, j], w) <= 1e-12

    def test_nonnegative(self, circle_model_centered):
        rng = np.random.default_rng(2)
        model = circle_model_centered
        for _ in range(5):
            w = rng.random(60) / 60.0
            z = rng.standard_normal(model.k_)
            assert objective_residual(model, z, w) >= 0.0

    def test_matches_independent_composition(self, circle_model_centered,
                                              circle_data):
        # oracle: rebuild the functional from scratch out of the public pieces
        rng = np.random.default_rng(3)
        model = circle_model_centered
        w = rng.random(60) / 30.0
        z = rng.standard_normal(model.k_)
        x_star = circle_data.samples @ w
        g = np.array([kernel_eval(model.kernel_, circle_data.samples[:, i], x_star)
                      for i in range(60)])
        g_bar = center_gram_vector(g, model.aggregates_)
        residual = z - model.eigenvectors_.T @ g_bar
        expected = float(residual @ residual)
        np.testing.assert_allclose(objective_residual(model, z, w), expected,
                                   rtol=1e-10)


class TestGaussianLogObjective:
    def test_complete_basis_one_hot_is_zero(self):
        rng = np.random.default_rng(4)
        X = rng.standard_normal((8, 3))
        model = KernelPCA(kernel="gaussian", beta=0.8, k=8, center=False).fit(X)
        assert model.k_ == 8
        w = np.zeros(8)
        w[3] = 1.0
        assert objective_gaussian_log(model, model.Z_train_[:, 3], w) <= 1e-10

    def test_tiny_beta_limit(self):
        # with beta ~ 0 every kernel value is ~1 and only the target term stays
        rng = np.random.default_rng(5)
        X = rng.standard_normal((8, 3))
        model = KernelPCA(kernel="gaussian", beta=1e-12, k=4, center=False).fit(X)
        w = rng.random(8) / 8.0
        z = rng.standard_normal(model.k_)  # k gets clipped to the tiny-beta rank
        target = model.eigenvectors_ @ z
        expected = float(np.sum(np.log(np.maximum(target, 1e-300)) ** 2))
        np.testing.assert_allclose(objective_gaussian_log(model, z, w), expected,
                                   rtol=1e-6)

    def test_matches_naive_distance_evaluation(self, circle_model_uncentered,
                                               circle_data):
        # oracle: explicit distances in R^d instead of the Gram-only expansion
        rng = np.random.default_rng(6)
        model = circle_model_uncentered
        w = rng.random(60) / 30.0
        z = model.Z_train_[:, 9]
        x_star = circle_data.samples @ w
        target = model.eigenvectors_ @ z
        log_t = np.log(np.maximum(target, 1e-300))
        expected = 0.0
        for i in range(60):
            sq = float(np.sum((circle_data.samples[:, i] - x_star) ** 2))
            expected += (log_t[i] - (-model.kernel_.beta * sq)) ** 2
        np.testing.assert_allclose(objective_gaussian_log(model, z, w), expected,
                                   rtol=1e-10)

    def test_requires_gaussian_uncentered(self, circle_model_centered):
        w = np.full(60, 1.0 / 60.0)
        z = np.zeros(circle_model_centered.k_)
        with pytest.raises(ValueError):
            objective_gaussian_log(circle_model_centered, z, w)


class TestGaussianLogGradient:
    def test_zero_residual_gives_zero_gradient(self):
        rng = np.random.default_rng(7)
        X = rng.standard_normal((8, 3))
        model = KernelPCA(kernel="gaussian", beta=0.8, k=8, center=False).fit(X)
        w = np.zeros(8)
        w[5] = 1.0
        grad = gradient_gaussian_log(model, model.Z_train_[:, 5], w)
        assert np.max(np.abs(grad)) <= 1e-8

    def test_stationary_at_duplicated_point_solution(self):
        X = np.tile(np.array([0.7, -0.2, 1.5]), (5, 1))
        model = KernelPCA(kernel="gaussian", beta=1.0, k=1, center=False).fit(X)
        result = solve_preimage(model, model.Z_train_[:, 0])
        grad = gradient_gaussian_log(model, model.Z_train_[:, 0], result.weights)
        assert np.max(np.abs(grad)) <= 1e-8

    def test_matches_finite_differences(self, circle_model_uncentered):
        rng = np.random.default_rng(8)
        model = circle_model_uncentered
        for _ in range(10):
            j = int(rng.integers(0, 60))
            z = model.Z_train_[:, j]
            w = rng.random(60) * 0.2 + 1e-3
            problem = BoundedProblem(
                60,
                lambda v, z=z: objective_gaussian_log(model, z, v),
                lambda v, z=z: gradient_gaussian_log(model, z, v),
            )
            assert check_gradient(problem, w) <= 1e-5


class TestSolvePreimage:
    def test_training_sample_round_trip_residual(self, circle_model_centered,
                                                  circle_data):
        model = circle_model_centered
        for j in (0, 15, 33, 51):
            result = solve_preimage(model, model.Z_train_[:, j],
                                    objective="residual", neighbors=10)
            truth = circle_data.samples[:, j]
            error = np.linalg.norm(result.x_star - truth) / np.linalg.norm(truth)
            assert error <= 0.05

    def test_duplicated_training_point_is_returned_exactly(self):
        point = np.array([0.7, -0.2, 1.5])
        X = np.tile(point, (5, 1))
        model = KernelPCA(kernel="gaussian", beta=1.0, k=1, center=False).fit(X)
        for z in (model.Z_train_[:, 0], model.Z_train_[:, 0] * 0.5):
            result = solve_preimage(model, z)
            np.testing.assert_allclose(result.x_star, point, atol=1e-12)

    def test_heldout_improves_on_every_heuristic(self, circle_model_uncentered,
                                                  circle_data):
        model = circle_model_uncentered
        z = model.transform(circle_data.heldout[None, :])[0]
        for scheme in ("inv_dist", "inv_dist_sq", "exp_neg_dist"):
            w0 = heuristic_weights(model, z, scheme=scheme, neighbors=10)
            start = objective_gaussian_log(model, z, w0)
            result = solve_preimage(model, z, scheme=scheme, neighbors=10)
            assert result.objective_value <= start + 1e-12

    def test_round_trip_rate_both_objectives(self, circle_data,
                                             circle_model_centered,
                                             circle_model_uncentered):
        residual_errors = relative_errors(circle_model_centered, circle_data,
                                          objective="residual", neighbors=10)
        log_errors = relative_errors(circle_model_uncentered, circle_data,
                                     objective="gaussian_log", neighbors=10)
        assert np.mean(residual_errors <= 0.05) >= 0.95
        assert np.mean(log_errors <= 0.05) >= 0.95

    def test_active_set_reduction_soundness(self, circle_model_uncentered,
                                            circle_data):
        model = circle_model_uncentered
        samples = circle_data.samples
        for j in (4, 21, 40):
            midpoint = 0.5 * (samples[:, j] + samples[:, j + 1])
            z = model.transform(midpoint[None, :])[0]
            small = solve_preimage(model, z, neighbors=10).objective_value
            full = solve_preimage(model, z, neighbors=60).objective_value
            assert abs(small - full) <= 0.10 * max(full, 1e-30)

    def test_weights_define_x_star_exactly(self, circle_model_uncentered):
        rng = np.random.default_rng(9)
        model = circle_model_uncentered
        z = model.Z_train_[:, 7] + 0.01 * rng.standard_normal(model.k_)
        result = solve_preimage(model, z, neighbors=10)
        assert np.array_equal(result.x_star, model.training_ @ result.weights)
        assert np.all(result.weights >= 0.0)
        assert np.count_nonzero(result.weights) <= 10

    def test_round_trip_consistent_under_feature_normalization(self, circle_data):
        # the solver reuses the model's own eigenvector scaling, so either
        # normalization round-trips
        model = KernelPCA(kernel="gaussian", k=3, center=False,
                          normalization="feature").fit(circle_data.samples.T)
        for j in (3, 27, 50):
            result = solve_preimage(model, model.Z_train_[:, j], neighbors=10)
            truth = circle_data.samples[:, j]
            assert np.linalg.norm(result.x_star - truth) / np.linalg.norm(truth) <= 0.05

    def test_gaussian_log_rejected_on_centered_model(self, circle_model_centered):
        z = np.zeros(circle_model_centered.k_)
        with pytest.raises(ValueError):
            solve_preimage(circle_model_centered, z, objective="gaussian_log")

    def test_default_objective_follows_model(self, circle_model_centered,
                                             circle_model_uncentered):
        # uncentered gaussian models default to the log form: its solution
        # reports the nonpositive-target diagnostic computed from V* z
        z_u = circle_model_uncentered.Z_train_[:, 0]
        result = solve_preimage(circle_model_uncentered, z_u)
        target = circle_model_uncentered.eigenvectors_ @ z_u
        assert result.nonpositive_target == bool(np.any(target <= 0.0))
        # centered models fall back to the residual form and never flag it
        z_c = circle_model_centered.Z_train_[:, 0]
        assert not solve_preimage(circle_model_centered, z_c).nonpositive_target

    def test_inverse_transform_stacks_preimages(self, circle_model_uncentered,
                                                circle_data):
        model = circle_model_uncentered
        Z = model.Z_train_[:, :3].T
        X_star = model.inverse_transform(Z, neighbors=10)
        assert X_star.shape == (3, 10)
        for i in range(3):
            truth = circle_data.samples[:, i]
            assert np.linalg.norm(X_star[i] - truth) / np.linalg.norm(truth) <= 0.05
