"""Seeded synthetic manifolds: one-parameter families embedded in R^d.

These generators stand in for real high-dimensional sequences (video
frames, simulation snapshots) while staying reproducible: all randomness
comes from numpy's PCG64 generator (``np.random.default_rng(seed)``, a
documented counter-based scheme whose streams are stable across platforms
for a fixed seed), and the closing-curve embedding is a fixed vector of
sinusoids, so two machines produce identical datasets for the same spec.

Draw order is fixed per family: first the orthonormal frame (circle,
helix), then the training noise matrix, then the held-out noise vector.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .exceptions import BadSpecError

FAMILIES = ("circle", "helix", "closing_curve")

_INTRINSIC_DIM = {"circle": 2, "helix": 3, "closing_curve": 1}

_GOLDEN_FRAC = (np.sqrt(5.0) - 1.0) / 2.0
_SQRT2 = np.sqrt(2.0)

#: The helix winds this many full turns while rising from height 0 to
#: HELIX_TURNS (height is t / 2*pi with t in [0, 2*pi*HELIX_TURNS]).
HELIX_TURNS = 2.0


@dataclass(frozen=True)
class DatasetSpec:
    """What to generate: family, ambient dimension, size, noise, seed."""

    family: str
    ambient_dim: int
    n_samples: int
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise BadSpecError(f"unknown family {self.family!r}; pick one of {FAMILIES}")
        if self.n_samples < 3:
            raise BadSpecError(f"n_samples must be >= 3, got {self.n_samples}")
        if self.noise_sigma < 0:
            raise BadSpecError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        required = _INTRINSIC_DIM[self.family]
        if self.ambient_dim < required:
            raise BadSpecError(
                f"{self.family} needs ambient_dim >= {required}, got {self.ambient_dim}"
            )


class Dataset(NamedTuple):
    """Generated data plus one held-out sample for round-trip checks.

    ``samples`` is column-per-sample, ``params`` holds the manifold
    parameter of each column. The held-out parameter sits midway between
    the two central training parameters, so it is outside the training
    grid; ``heldout`` carries the same noise model as the training data and
    ``heldout_clean`` is its noise-free manifold point.
    """

    samples: np.ndarray
    params: np.ndarray
    heldout: np.ndarray
    heldout_param: float
    heldout_clean: np.ndarray


def _orthonormal_frame(rng, dim, width):
    """Seeded random orthonormal (dim, width) frame via QR with fixed orientation."""
    raw = rng.standard_normal((dim, width))
    q, r = np.linalg.qr(raw)
    return q * np.where(np.diag(r) < 0.0, -1.0, 1.0)[None, :]


def closing_curve_embedding(t, dim):
    """Fixed smooth curve from the unit interval into R^dim.

    Component i (0-based) is ``a_i * sin(2*pi*f_i*t + phi_i)`` with

    * amplitude  ``a_i   = (i + 1) ** -0.5``,
    * frequency  ``f_i   = 0.5 + 1.75 * frac((i + 1) * (sqrt(5) - 1) / 2)``,
    * phase      ``phi_i = 2 * pi * frac((i + 1) * sqrt(2))``.

    The irrational multipliers keep the component frequencies and phases
    incommensurate, so the curve is genuinely nonlinear in every coordinate
    subspace, while the frequency band [0.5, 2.25] stays low enough that a
    few dozen samples resolve it.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    index = np.arange(dim)
    amplitude = 1.0 / np.sqrt(index + 1.0)
    frequency = 0.5 + 1.75 * (((index + 1) * _GOLDEN_FRAC) % 1.0)
    phase = 2.0 * np.pi * (((index + 1) * _SQRT2) % 1.0)
    angles = 2.0 * np.pi * frequency[:, None] * t[None, :] + phase[:, None]
    return amplitude[:, None] * np.sin(angles)


def _circle_points(theta, frame):
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    return frame @ np.vstack([np.cos(theta), np.sin(theta)])


def _helix_points(t, frame):
    t = np.atleast_1d(np.asarray(t, dtype=float))
    return frame @ np.vstack([np.cos(t), np.sin(t), t / (2.0 * np.pi)])


def generate(spec):
    """Build training samples, their parameters, and one held-out sample.

    circle
        Unit circle in a seeded random 2-plane of R^d, sampled at n equally
        spaced angles; parameter is the angle.
    helix
        Unit-radius helix over ``HELIX_TURNS`` turns in a seeded random
        3-frame; parameter is the winding angle.
    closing_curve
        The fixed embedding of :func:`closing_curve_embedding` traversed
        forward and then backward (tent map of running time, emulating a
        motion that closes and opens once); parameter is the tent value
        t in [0, 1], so it repeats on the way back.

    Gaussian noise with deviation ``noise_sigma`` is added per coordinate.
    """
    if not isinstance(spec, DatasetSpec):
        raise BadSpecError(f"expected a DatasetSpec, got {type(spec).__name__}")
    rng = np.random.default_rng(spec.seed)
    n, dim = spec.n_samples, spec.ambient_dim

    if spec.family == "circle":
        theta = 2.0 * np.pi * np.arange(n) / n
        theta_held = 2.0 * np.pi * (n // 2 + 0.5) / n
        frame = _orthonormal_frame(rng, dim, 2)
        clean = _circle_points(theta, frame)
        clean_held = _circle_points(theta_held, frame)[:, 0]
        params, param_held = theta, theta_held
    elif spec.family == "helix":
        t = np.linspace(0.0, 2.0 * np.pi * HELIX_TURNS, n)
        mid = (n - 1) // 2
        t_held = 0.5 * (t[mid] + t[mid + 1])
        frame = _orthonormal_frame(rng, dim, 3)
        clean = _helix_points(t, frame)
        clean_held = _helix_points(t_held, frame)[:, 0]
        params, param_held = t, t_held
    else:
        s = np.linspace(0.0, 1.0, n)
        mid = (n - 1) // 2
        s_held = 0.5 * (s[mid] + s[mid + 1])
        t = 1.0 - np.abs(1.0 - 2.0 * s)
        t_held = 1.0 - abs(1.0 - 2.0 * s_held)
        clean = closing_curve_embedding(t, dim)
        clean_held = closing_curve_embedding(t_held, dim)[:, 0]
        params, param_held = t, t_held

    samples = clean + spec.noise_sigma * rng.standard_normal((dim, n))
    heldout = clean_held + spec.noise_sigma * rng.standard_normal(dim)
    return Dataset(
        samples=samples,
        params=params,
        heldout=heldout,
        heldout_param=float(param_held),
        heldout_clean=clean_held,
    )
