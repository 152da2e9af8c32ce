"""Input validation helpers shared by the estimators and the numeric core."""

import numpy as np

from .exceptions import DimensionMismatchError, NonFiniteError


def as_float_array(values, name="array"):
    """Coerce to a float64 ndarray and reject NaN/Inf entries."""
    arr = np.asarray(values, dtype=float)
    if arr.size and not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"{name} contains non-finite entries")
    return arr


def as_float_matrix(values, name="matrix"):
    """Coerce to a non-empty 2-D float64 ndarray."""
    arr = as_float_array(values, name)
    if arr.ndim != 2:
        raise DimensionMismatchError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionMismatchError(f"{name} must be non-empty, got shape {arr.shape}")
    return arr


def as_float_vector(values, name="vector", length=None):
    """Coerce to a 1-D float64 ndarray, optionally of a fixed length."""
    arr = as_float_array(values, name)
    if arr.ndim != 1:
        raise DimensionMismatchError(f"{name} must be 1-D, got shape {arr.shape}")
    if length is not None and arr.shape[0] != length:
        raise DimensionMismatchError(
            f"{name} has length {arr.shape[0]}, expected {length}"
        )
    return arr
