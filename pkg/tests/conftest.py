import numpy as np
import pytest

from kpcalib import DatasetSpec, KernelPCA, generate


@pytest.fixture(scope="session")
def circle_data():
    """Noisy unit circle in a random 2-plane of R^10 (fixed seed)."""
    return generate(DatasetSpec(family="circle", ambient_dim=10, n_samples=60,
                                noise_sigma=0.01, seed=7))


@pytest.fixture(scope="session")
def circle_model_centered(circle_data):
    return KernelPCA(kernel="gaussian", k=2, center=True).fit(circle_data.samples.T)


@pytest.fixture(scope="session")
def circle_model_uncentered(circle_data):
    # the uncentered Gram spends its leading eigenvector on the kernel-mean
    # direction, so embedding the closed loop takes one extra coordinate
    return KernelPCA(kernel="gaussian", k=3, center=False).fit(circle_data.samples.T)


def relative_errors(model, data, **solve_options):
    """Round-trip every training sample and return the relative errors."""
    from kpcalib import solve_preimage

    errors = []
    for j in range(data.samples.shape[1]):
        result = solve_preimage(model, model.Z_train_[:, j], **solve_options)
        truth = data.samples[:, j]
        errors.append(np.linalg.norm(result.x_star - truth) / np.linalg.norm(truth))
    return np.array(errors)
