"""Input checks shared by the estimator front end."""

from __future__ import annotations

import numbers

import numpy as np

from .errors import UsageError
from .linalg import HilbertGrid


def check_lambda(lam) -> complex:
    if not isinstance(lam, numbers.Number):
        raise UsageError(f"lambda must be a number, got {type(lam).__name__}")
    lam = complex(lam)
    if lam == 0 or not np.isfinite(lam.real) or not np.isfinite(lam.imag):
        raise UsageError("lambda must be finite and nonzero")
    return lam


def check_rows(X, name: str = "X", dim: int | None = None) -> np.ndarray:
    """2-d complex array of row vectors, finite, with ``dim`` columns if given."""
    A = np.asarray(X)
    if A.ndim == 1:
        A = A[None, :]
    if A.ndim != 2:
        raise UsageError(f"{name} must be 2-d (n_members, dim), got {A.ndim}-d")
    if A.shape[0] == 0 or A.shape[1] == 0:
        raise UsageError(f"{name} is empty")
    A = A.astype(complex)
    if not np.all(np.isfinite(A)):
        raise UsageError(f"{name} contains NaN or infinity")
    if dim is not None and A.shape[1] != dim:
        raise UsageError(f"{name} has {A.shape[1]} features, expected {dim}")
    return A


def check_pair(phi, psi) -> tuple[np.ndarray, np.ndarray]:
    A = check_rows(phi, "phi")
    B = check_rows(psi, "psi", A.shape[1])
    if A.shape[0] != B.shape[0]:
        raise UsageError(f"phi has {A.shape[0]} members, psi has {B.shape[0]}")
    return A, B


def check_space(weights, dim: int) -> HilbertGrid:
    if weights is None:
        return HilbertGrid.unit(dim)
    if isinstance(weights, HilbertGrid):
        space = weights
    else:
        space = HilbertGrid(np.asarray(weights, dtype=float))
    if space.dim != dim:
        raise UsageError(f"weights have length {space.dim}, data has dimension {dim}")
    return space

