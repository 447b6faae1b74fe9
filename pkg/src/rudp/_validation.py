"""Input validation helpers."""

import numbers

import numpy as np


def as_finite_matrix(M, name="X", min_rows=1, min_cols=1):
    """Return ``M`` as a 2-D float array, rejecting NaN/inf and empty shapes."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got {M.ndim}-D")
    if M.shape[0] < min_rows or M.shape[1] < min_cols:
        raise ValueError(f"{name} has shape {M.shape}, need at least ({min_rows}, {min_cols})")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} contains NaN or infinite entries")
    return M


def as_label_vector(labels, name="labels"):
    """Return labels as a 1-D integer array of class indices."""
    arr = np.asarray(labels)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {arr.shape}")
    if arr.dtype.kind not in "iu":
        if arr.dtype.kind == "f" and np.all(arr == np.round(arr)):
            arr = arr.astype(np.int64)
        else:
            _, arr = np.unique(arr, return_inverse=True)
    return arr.astype(np.int64)


def check_same_length(a, b):
    if len(a) != len(b):
        raise ValueError(f"label sequences differ in length: {len(a)} != {len(b)}")


def check_positive(value, name, allow_zero=False):
    if not isinstance(value, numbers.Real) or not np.isfinite(value):
        raise ValueError(f"{name} must be a finite real number, got {value!r}")
    if value < 0 or (value == 0 and not allow_zero):
        bound = ">= 0" if allow_zero else "> 0"
        raise ValueError(f"{name} must be {bound}, got {value!r}")
    return float(value)


def check_count(value, name, low=1, high=None):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < low or (high is not None and value > high):
        hi = "" if high is None else f" and <= {high}"
        raise ValueError(f"{name} must be >= {low}{hi}, got {value}")
    return value
