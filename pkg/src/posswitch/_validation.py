"""Input validation helpers shared by the library and the estimators."""

import numpy as np

from .exceptions import (
    ModeViolation,
    NonFinite,
    NonPositiveVector,
    NotSquare,
    DimMismatch,
)

POSITIVE = "positive"
NONNEGATIVE = "nonnegative"

_MODE_ALIASES = {
    "positive": POSITIVE,
    "pos": POSITIVE,
    "nonnegative": NONNEGATIVE,
    "non-negative": NONNEGATIVE,
    "non_negative": NONNEGATIVE,
    "nonneg": NONNEGATIVE,
}


def check_mode(mode):
    try:
        return _MODE_ALIASES[str(mode).lower()]
    except KeyError:
        raise ValueError(f"unknown mode {mode!r}; expected 'positive' or 'nonnegative'")


def combine_modes(*modes):
    """Positive only if every operand is positive."""
    return POSITIVE if all(m == POSITIVE for m in modes) else NONNEGATIVE


def as_float_array(a, ndim, what="matrix"):
    arr = np.array(a, dtype=float)
    if arr.ndim != ndim:
        raise DimMismatch(f"{what} must be {ndim}-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise DimMismatch(f"{what} must be non-empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFinite(f"{what} contains NaN or Inf")
    return arr


def first_mode_violation(arr, mode):
    """Index of the first entry violating ``mode`` (C order), or None."""
    bad = arr <= 0 if mode == POSITIVE else arr < 0
    if not bad.any():
        return None
    return tuple(int(i) for i in np.unravel_index(int(np.argmax(bad)), arr.shape))


def check_entries(arr, mode, what="matrix", index_prefix=()):
    idx = first_mode_violation(arr, mode)
    if idx is not None:
        full = tuple(index_prefix) + idx
        rel = "> 0" if mode == POSITIVE else ">= 0"
        raise ModeViolation(
            f"{what}: entry at {full} is {arr[idx]!r}, must be {rel} in {mode} mode",
            index=full,
        )


def check_square(a):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSquare(f"expected a square matrix, got shape {a.shape}")
    return a


def check_positive_vector(x, size=None, name="x"):
    """Return ``x`` as a float vector after checking it is finite and > 0."""
    x = np.array(x, dtype=float).reshape(-1)
    if x.size == 0:
        raise DimMismatch(f"{name} must be non-empty")
    if not np.all(np.isfinite(x)):
        raise NonFinite(f"{name} contains NaN or Inf")
    if size is not None and x.size != size:
        raise DimMismatch(f"{name} has length {x.size}, expected {size}")
    if np.any(x <= 0):
        raise NonPositiveVector(f"{name} must be strictly positive, got {x.tolist()}")
    return x
