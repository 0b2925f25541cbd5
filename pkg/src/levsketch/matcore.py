"""Dense matrix core: thin SVD, pseudoinverse, and the exact leverage oracle.

Leverage scores are the diagonal entries of the hat matrix A A^+, i.e. the
squared row norms of any orthonormal basis for the column space of A. The
routines here form that basis deterministically and serve as ground truth
for every sketched estimator in the library.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import errors
from ._kernels import row_sq_norms

DEFAULT_RANK_TOL = 1e-12
DEFAULT_GRAM_CAP = 4096


def validate_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-D float64 array, rejecting empty or non-finite input."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise errors.ShapeError(f"{name} must be 2-D, got ndim={arr.ndim}")
    if arr.size == 0:
        raise errors.EmptyMatrix(f"{name} is empty ({arr.shape})")
    if not np.all(np.isfinite(arr)):
        raise errors.NonFiniteEntry(f"{name} contains NaN or Inf entries")
    return np.ascontiguousarray(arr)


@dataclass(frozen=True)
class ThinSVD:
    """Compact SVD A = U diag(s) V^T truncated at ``rank_tolerance``."""

    U: np.ndarray
    singular_values: np.ndarray
    V: np.ndarray
    rank_tolerance: float

    @property
    def rank(self) -> int:
        return int(self.singular_values.size)

    def reconstruct(self) -> np.ndarray:
        return (self.U * self.singular_values) @ self.V.T


@dataclass
class LeverageReport:
    """Per-row leverage scores plus coherence and normalized weights."""

    scores: np.ndarray
    coherence: float
    normalized: np.ndarray
    method: str  # "exact" | "sketched" | "mi_estimator"
    params: Optional[object] = None
    seed: Optional[int] = None
    extras: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return int(self.scores.size)


def thin_svd(a, rank_tolerance: float = DEFAULT_RANK_TOL) -> ThinSVD:
    """Thin SVD with singular values below ``rank_tolerance * s[0]`` dropped."""
    A = validate_matrix(a)
    if not (0.0 <= rank_tolerance < 1.0):
        raise errors.InvalidParameter(
            f"rank_tolerance must be in [0, 1), got {rank_tolerance}")
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        # all-zero matrix: rank 0 factors
        return ThinSVD(U[:, :0], s[:0], Vt.T[:, :0], rank_tolerance)
    rho = int(np.sum(s > rank_tolerance * s[0]))
    rho = max(rho, 1) if s[0] > 0 else 0
    return ThinSVD(np.ascontiguousarray(U[:, :rho]), s[:rho].copy(),
                   np.ascontiguousarray(Vt[:rho].T), rank_tolerance)


def pseudoinverse(a, rank_tolerance: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse via the thin SVD."""
    f = thin_svd(a, rank_tolerance)
    if f.rank == 0:
        return np.zeros((f.V.shape[0], f.U.shape[0]))
    return (f.V / f.singular_values) @ f.U.T


def exact_leverage(a, rank_tolerance: float = DEFAULT_RANK_TOL) -> LeverageReport:
    """Exact leverage scores: squared row norms of the thin-SVD basis U."""
    f = thin_svd(a, rank_tolerance)
    scores = row_sq_norms(f.U)
    total = float(scores.sum())
    normalized = scores / total if total > 0 else np.zeros_like(scores)
    return LeverageReport(
        scores=scores,
        coherence=float(scores.max()),
        normalized=normalized,
        method="exact",
        extras={"rank": f.rank},
    )


def exact_cross_leverage(a, max_rows: int = DEFAULT_GRAM_CAP,
                         rank_tolerance: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Full n x n projector U U^T whose entries are the cross-leverage scores."""
    A = validate_matrix(a)
    if A.shape[0] > max_rows:
        raise errors.MatrixTooLargeForDenseGram(
            f"n={A.shape[0]} exceeds the dense Gram cap {max_rows}")
    f = thin_svd(A, rank_tolerance)
    return f.U @ f.U.T
