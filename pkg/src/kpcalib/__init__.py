"""PCA and kernel PCA with an optimization-based pre-image solver.

The estimators (:class:`PCA`, :class:`KernelPCA`) follow the scikit-learn
protocol: ``fit`` / ``transform`` / ``inverse_transform`` on
``(n_samples, n_features)`` arrays. The numeric core underneath works on
column-per-sample matrices; see :mod:`kpcalib.linalg` for the convention.
"""

from . import exceptions, io
from .datasets import Dataset, DatasetSpec, closing_curve_embedding, generate
from .kernels import (
    CenteringAggregates,
    Kernel,
    center_gram,
    center_gram_vector,
    cross_gram,
    gram_matrix,
    kernel_eval,
    median_heuristic_beta,
    pairwise_sq_dists,
)
from .kpca import KernelPCA
from .linalg import (
    SpectralDecomp,
    SvdFactors,
    eig_sym,
    fix_signs,
    outer_accumulate,
    svd,
)
from .optimize import (
    BoundedProblem,
    SolveReport,
    check_gradient,
    finite_difference_gradient,
    minimize_bounded,
)
from .pca import (
    PCA,
    basis_from_gram,
    center_samples,
    duality_coefficients,
    select_dimension,
)
from .preimage import (
    PreimageResult,
    gradient_gaussian_log,
    heuristic_weights,
    objective_gaussian_log,
    objective_residual,
    reduced_distances,
    solve_preimage,
)

__version__ = "0.1.0"

__all__ = [
    "PCA",
    "KernelPCA",
    "Kernel",
    "CenteringAggregates",
    "Dataset",
    "DatasetSpec",
    "SpectralDecomp",
    "SvdFactors",
    "BoundedProblem",
    "SolveReport",
    "PreimageResult",
    "basis_from_gram",
    "center_gram",
    "center_gram_vector",
    "center_samples",
    "check_gradient",
    "closing_curve_embedding",
    "cross_gram",
    "duality_coefficients",
    "eig_sym",
    "exceptions",
    "finite_difference_gradient",
    "fix_signs",
    "generate",
    "gradient_gaussian_log",
    "gram_matrix",
    "heuristic_weights",
    "io",
    "kernel_eval",
    "median_heuristic_beta",
    "minimize_bounded",
    "objective_gaussian_log",
    "objective_residual",
    "outer_accumulate",
    "pairwise_sq_dists",
    "reduced_distances",
    "select_dimension",
    "solve_preimage",
    "svd",
]
