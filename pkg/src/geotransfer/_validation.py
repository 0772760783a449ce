"""Input validation helpers shared by the functional API and the estimators."""

import numpy as np
from sklearn.utils.validation import assert_all_finite, check_array

from .exceptions import DimensionMismatch, NotSymmetric

SYMMETRY_RTOL = 1e-10


def as_vector(x, name="vector", length=None):
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise DimensionMismatch(f"{name} must be one-dimensional, got shape {arr.shape}")
    assert_all_finite(arr, input_name=name)
    if length is not None and arr.shape[0] != length:
        raise DimensionMismatch(f"{name} has length {arr.shape[0]}, expected {length}")
    return arr


def as_matrix(a, name="matrix", n_cols=None):
    arr = check_array(a, dtype=float, ensure_2d=True)
    if n_cols is not None and arr.shape[1] != n_cols:
        raise DimensionMismatch(f"{name} has {arr.shape[1]} columns, expected {n_cols}")
    return arr


def as_symmetric(a, name="matrix", rtol=SYMMETRY_RTOL):
    arr = as_matrix(a, name)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {arr.shape}")
    scale = max(1.0, float(np.max(np.abs(arr))))
    if np.max(np.abs(arr - arr.T)) > rtol * scale:
        raise NotSymmetric(f"{name} is not symmetric to relative tolerance {rtol:g}")
    return 0.5 * (arr + arr.T)


def frozen(arr):
    arr = np.array(arr, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr
