"""Seeded sketch operators and dimension planning.

Implements the normalized fast Walsh-Hadamard transform, the subsampled
randomized Hadamard transform (SRHT), the sparse {-1, 0, +1} JL transform,
and Gaussian sketches, together with the closed-form target-dimension
formulas for the JLT and FJLT guarantees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import errors
from ._kernels import fwht_inplace
from .matcore import validate_matrix
from .rng import rademacher, substream

DEFAULT_DELTA = 0.1
DEFAULT_C1 = 20.0
DEFAULT_C2 = 12.0


def next_pow2(n: int) -> int:
    p = 1
    while p < n:
        p *= 2
    return p


def jlt_dim(n_points: int, epsilon: float, delta: float) -> int:
    """Sparse-JLT target dimension: smallest r with r >= (12 ln n + 6 ln(1/delta)) / eps^2."""
    if n_points < 1:
        raise errors.InvalidParameter(f"n_points must be >= 1, got {n_points}")
    if not (0.0 < epsilon <= 0.5):
        raise errors.InvalidParameter(f"epsilon must be in (0, 0.5], got {epsilon}")
    if not (0.0 < delta < 1.0):
        raise errors.InvalidParameter(f"delta must be in (0, 1), got {delta}")
    bound = (12.0 * math.log(n_points) + 6.0 * math.log(1.0 / delta)) / epsilon**2
    return max(1, math.ceil(bound))


def fjlt_dim(n: int, d: int, epsilon: float) -> int:
    """SRHT target dimension for an eps-FJLT, capped at n.

    Smallest r with r >= (14^2 d ln(40 n d) / eps^2) * ln(30^2 d ln(40 n d) / eps^2);
    sampling more rows than exist degenerates to the full transform.
    """
    if not (n >= d >= 1):
        raise errors.InvalidParameter(f"need n >= d >= 1, got n={n}, d={d}")
    if not (0.0 < epsilon <= 0.5):
        raise errors.InvalidParameter(f"epsilon must be in (0, 0.5], got {epsilon}")
    inner = d * math.log(40.0 * n * d) / epsilon**2
    bound = 14.0**2 * inner * math.log(30.0**2 * inner)
    return min(n, max(1, math.ceil(bound)))


@dataclass(frozen=True)
class SketchPlan:
    """Resolved sketch dimensions for the two-stage leverage sketch.

    ``r1`` is the SRHT row budget (stage 1), ``r2`` the JLT target dimension
    (stage 2). Theory mode evaluates the proof-grade formulas; practical mode uses
    r1 = ceil(c1 d ln n), r2 = ceil(c2 ln n / eps^2). The degenerate kinds
    ``fullrht``/``identity`` turn either stage into an exact map.
    """

    epsilon: float
    delta: float
    r1: int
    r2: int
    mode: str  # "theory" | "practical"
    c1: float = DEFAULT_C1
    c2: float = DEFAULT_C2
    pi1_kind: str = "srht"      # "srht" | "fullrht"
    pi2_kind: str = "sparse"    # "sparse" | "identity"

    def with_kinds(self, pi1_kind: Optional[str] = None,
                   pi2_kind: Optional[str] = None) -> "SketchPlan":
        return replace(self, pi1_kind=pi1_kind or self.pi1_kind,
                       pi2_kind=pi2_kind or self.pi2_kind)


def make_plan(n: int, d: int, epsilon: float, delta: float = DEFAULT_DELTA,
              mode: str = "practical", c1: float = DEFAULT_C1,
              c2: float = DEFAULT_C2, r1: Optional[int] = None,
              r2: Optional[int] = None, pi1_kind: str = "srht",
              pi2_kind: str = "sparse") -> SketchPlan:
    """Resolve r1/r2 for an n x d input, honoring explicit overrides."""
    if not (0.0 < epsilon <= 0.5):
        raise errors.InvalidParameter(f"epsilon must be in (0, 0.5], got {epsilon}")
    if not (0.0 < delta < 1.0):
        raise errors.InvalidParameter(f"delta must be in (0, 1), got {delta}")
    if mode not in ("theory", "practical"):
        raise errors.InvalidParameter(f"unknown mode {mode!r}")
    if r1 is None:
        if mode == "theory":
            r1 = fjlt_dim(n, d, epsilon)
        else:
            r1 = min(n, max(d, math.ceil(c1 * d * math.log(max(n, 2)))))
    if r2 is None:
        if mode == "theory":
            # Pi2 must be a JLT for the n rows and their n^2 - n pairwise sums.
            r2 = jlt_dim(max(n * n, 2), epsilon, delta)
        else:
            r2 = max(1, math.ceil(c2 * math.log(max(n, 2)) / epsilon**2))
    r1 = max(d, min(int(r1), n))
    return SketchPlan(epsilon=epsilon, delta=delta, r1=int(r1), r2=int(r2),
                      mode=mode, c1=c1, c2=c2, pi1_kind=pi1_kind,
                      pi2_kind=pi2_kind)


@dataclass(frozen=True)
class SketchOperator:
    """Immutable description of a seeded random transform."""

    kind: str  # "SRHT" | "FullRHT" | "SparseJLT" | "Gaussian" | "Identity"
    seed: int
    in_dim: int
    out_dim: int


def fwht(x) -> np.ndarray:
    """Normalized Walsh-Hadamard transform H_n x down the leading axis.

    ``n`` must be a power of two. O(n log n); orthogonal and involutive.
    """
    a = np.array(x, dtype=np.float64, copy=True, order="C")
    vec = a.ndim == 1
    if vec:
        a = a.reshape(-1, 1)
    n = a.shape[0]
    if n < 1 or (n & (n - 1)) != 0:
        raise errors.NotPowerOfTwo(f"length {n} is not a power of 2")
    fwht_inplace(a)
    a *= 1.0 / math.sqrt(n)
    return a[:, 0] if vec else a


def hadamard_matrix(n: int) -> np.ndarray:
    """Dense normalized Hadamard matrix H_n (test and fixture helper)."""
    return fwht(np.eye(n))


def _srht_selection(op: SketchOperator, n_pad: int) -> np.ndarray:
    g = substream(op.seed, 1)
    idx = g.choice(n_pad, size=op.out_dim, replace=False)
    idx.sort()
    return idx


def apply_srht(op: SketchOperator, a) -> np.ndarray:
    """Apply sqrt(n_pad/r) S^T H D to the rows of ``a``.

    Rows are zero-padded to the next power of two before the transform; D is
    a seeded +/-1 diagonal and S^T selects r distinct rows uniformly at
    random (all rows, unscaled, for the FullRHT kind).
    """
    if op.kind not in ("SRHT", "FullRHT"):
        raise errors.InvalidParameter(f"not an SRHT operator: {op.kind}")
    A = validate_matrix(a)
    n, d = A.shape
    if op.in_dim != n:
        raise errors.DimensionMismatch(
            f"operator expects {op.in_dim} rows, matrix has {n}")
    n_pad = next_pow2(n)
    signs = rademacher(op.seed, n, 0)
    buf = np.zeros((n_pad, d), dtype=np.float64)
    buf[:n] = A * signs[:, None]
    fwht_inplace(buf)
    buf *= 1.0 / math.sqrt(n_pad)
    if op.kind == "FullRHT":
        if op.out_dim != n_pad:
            raise errors.DimensionMismatch(
                f"FullRHT out_dim must equal padded n={n_pad}, got {op.out_dim}")
        return buf
    r = op.out_dim
    if not (1 <= r <= n_pad):
        raise errors.DimensionMismatch(f"out_dim {r} not in [1, {n_pad}]")
    idx = _srht_selection(op, n_pad)
    return buf[idx] * math.sqrt(n_pad / r)


def srht_matrix(op: SketchOperator) -> np.ndarray:
    """Materialize the r x n SRHT operator (columns restricted to real rows)."""
    return apply_srht(op, np.eye(op.in_dim))


def _sparse_jlt_matrix(op: SketchOperator) -> np.ndarray:
    """i.i.d. entries: +/- sqrt(3/r) with probability 1/6 each, else 0."""
    g = substream(op.seed, 2)
    u = g.random((op.in_dim, op.out_dim))
    s = math.sqrt(3.0 / op.out_dim)
    return np.where(u < 1.0 / 6.0, s, np.where(u > 5.0 / 6.0, -s, 0.0))


def apply_sparse_jlt(op: SketchOperator, x, side: str = "right") -> np.ndarray:
    """Multiply by the sparse JLT: rows of ``x`` are mapped to R^out_dim.

    ``side='right'`` computes X P with P of shape (in_dim, out_dim);
    ``side='left'`` computes P^T X.
    """
    if op.kind != "SparseJLT":
        raise errors.InvalidParameter(f"not a SparseJLT operator: {op.kind}")
    X = validate_matrix(x)
    P = _sparse_jlt_matrix(op)
    if side == "right":
        if X.shape[1] != op.in_dim:
            raise errors.DimensionMismatch(
                f"need {op.in_dim} columns, got {X.shape[1]}")
        return X @ P
    if side == "left":
        if X.shape[0] != op.in_dim:
            raise errors.DimensionMismatch(
                f"need {op.in_dim} rows, got {X.shape[0]}")
        return P.T @ X
    raise errors.InvalidParameter(f"side must be 'left' or 'right', got {side!r}")


def apply_gaussian(op: SketchOperator, a, side: str = "right") -> np.ndarray:
    """Multiply by a seeded standard-normal matrix of shape (in_dim, out_dim)."""
    if op.kind != "Gaussian":
        raise errors.InvalidParameter(f"not a Gaussian operator: {op.kind}")
    A = validate_matrix(a)
    G = gaussian_matrix(op)
    if side == "right":
        if A.shape[1] != op.in_dim:
            raise errors.DimensionMismatch(
                f"need {op.in_dim} columns, got {A.shape[1]}")
        return A @ G
    if side == "left":
        if A.shape[0] != op.in_dim:
            raise errors.DimensionMismatch(
                f"need {op.in_dim} rows, got {A.shape[0]}")
        return G.T @ A
    raise errors.InvalidParameter(f"side must be 'left' or 'right', got {side!r}")


def gaussian_matrix(op: SketchOperator) -> np.ndarray:
    """Seeded N(0,1) matrix of shape (in_dim, out_dim)."""
    g = substream(op.seed, 3)
    return g.standard_normal((op.in_dim, op.out_dim))
