"""Fast relative-error leverage-score approximation.

The two-stage sketch: an SRHT compresses the rows of A so that a cheap
d x d orthogonalizer R^{-1} of the compressed matrix makes A R^{-1}
approximately orthonormal; a sparse JLT then compresses the columns so
per-row squared norms (the leverage estimates) can be read off quickly.
Also includes the simpler single-projection inner-product estimator that
we use as a comparison baseline.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import errors
from ._kernels import row_sq_norms
from .matcore import DEFAULT_RANK_TOL, LeverageReport, validate_matrix
from .sketch import (SketchOperator, SketchPlan, apply_sparse_jlt, apply_srht,
                     next_pow2, srht_matrix)


@dataclass(frozen=True)
class Orthogonalizer:
    """d x rho map making the sketched matrix orthonormal: Q = PA . Rinv."""

    Rinv: np.ndarray
    source: str  # "svd" | "qr"

    @property
    def rank(self) -> int:
        return int(self.Rinv.shape[1])


@dataclass
class SketchedBasis:
    """The n x r2 sketch Omega = A R^{-1} Pi2, reusable for cross-leverage."""

    omega: np.ndarray
    plan: SketchPlan
    seed1: int
    seed2: int


def build_orthogonalizer(pa, source: str = "svd",
                         rank_tolerance: float = DEFAULT_RANK_TOL,
                         allow_rank_deficient: bool = False) -> Orthogonalizer:
    """Compute R^{-1} from the sketched matrix Pi1 A.

    The SVD route uses V Sigma^{-1}; the QR route inverts the triangular
    factor. Both make ``pa @ Rinv`` orthonormal and yield identical row
    norms for A R^{-1} downstream.
    """
    PA = validate_matrix(pa)
    d = PA.shape[1]
    if source == "svd":
        U, s, Vt = np.linalg.svd(PA, full_matrices=False)
        keep = s > rank_tolerance * s[0] if s[0] > 0 else np.zeros_like(s, bool)
        rho = int(keep.sum())
        if rho < d and not allow_rank_deficient:
            raise errors.RankDeficient(
                f"sketched matrix has rank {rho} < {d}; resample with a new seed")
        if rho == 0:
            raise errors.RankDeficient("sketched matrix is numerically zero")
        return Orthogonalizer(Rinv=Vt[:rho].T / s[:rho], source="svd")
    if source == "qr":
        R = np.linalg.qr(PA, mode="r")
        diag = np.abs(np.diag(R))
        if diag.min() <= rank_tolerance * max(diag.max(), 1e-300):
            raise errors.RankDeficient(
                "triangular factor is singular at tolerance; resample or use svd")
        return Orthogonalizer(
            Rinv=np.linalg.solve(R, np.eye(d)), source="qr")
    raise errors.InvalidParameter(f"unknown orthogonalizer source {source!r}")


def _stage1_operator(plan: SketchPlan, n: int, seed: int) -> SketchOperator:
    if plan.pi1_kind == "fullrht":
        return SketchOperator("FullRHT", seed, n, next_pow2(n))
    return SketchOperator("SRHT", seed, n, min(plan.r1, next_pow2(n)))


def approx_leverage(a, plan: SketchPlan, seed: int,
                    rank_tolerance: float = DEFAULT_RANK_TOL,
                    source: str = "svd",
                    allow_rank_deficient: bool = False,
                    timings: Optional[dict] = None):
    """Sketched leverage scores of a tall matrix.

    Returns ``(LeverageReport, SketchedBasis)``; the basis carries the
    n x r2 sketch for reuse by the heavy-pair search. If ``timings`` is a
    dict it receives per-phase wall-clock milliseconds.
    """
    A = validate_matrix(a)
    n, d = A.shape
    if n <= d:
        raise errors.ShapeError(f"need n > d, got shape {A.shape}")
    t0 = time.perf_counter()
    op1 = _stage1_operator(plan, n, seed)
    PA = apply_srht(op1, A)
    t1 = time.perf_counter()
    orth = build_orthogonalizer(PA, source=source, rank_tolerance=rank_tolerance,
                                allow_rank_deficient=allow_rank_deficient)
    t2 = time.perf_counter()
    AR = A @ orth.Rinv
    if plan.pi2_kind == "identity":
        omega = AR
    elif plan.pi2_kind == "sparse":
        op2 = SketchOperator("SparseJLT", seed, orth.rank, plan.r2)
        omega = apply_sparse_jlt(op2, AR, side="right")
    else:
        raise errors.InvalidParameter(f"unknown pi2_kind {plan.pi2_kind!r}")
    t3 = time.perf_counter()
    scores = row_sq_norms(omega)
    t4 = time.perf_counter()
    if timings is not None:
        timings.update(sketch_apply_ms=(t1 - t0) * 1e3,
                       factorization_ms=(t2 - t1) * 1e3,
                       product_ms=(t3 - t2) * 1e3,
                       norms_ms=(t4 - t3) * 1e3)
    # structural zero rows stay exactly zero
    scores[~np.any(A, axis=1)] = 0.0
    total = float(scores.sum())
    report = LeverageReport(
        scores=scores,
        coherence=float(scores.max()),
        normalized=scores / total if total > 0 else np.zeros_like(scores),
        method="sketched",
        params=plan,
        seed=int(seed),
        extras={"rank": orth.rank, "r1": op1.out_dim, "r2": omega.shape[1]},
    )
    return report, SketchedBasis(omega=omega, plan=plan, seed1=int(seed),
                                 seed2=int(seed))


def mi_estimate(a, seed: int,
                rank_tolerance: float = DEFAULT_RANK_TOL) -> LeverageReport:
    """Single-projection inner-product estimator (comparison baseline).

    Estimates the i-th score as A_(i) . ((Pi A)^+ Pi)_(:,i) with a single
    SRHT of O(n ln d / ln^2 n) rows, then truncates each estimate below at
    d ln^2 n / (4 n) and renormalizes. Only an O(ln^2 n)-factor guarantee.
    """
    A = validate_matrix(a)
    n, d = A.shape
    if n <= d:
        raise errors.ShapeError(f"need n > d, got shape {A.shape}")
    ln_n = math.log(n)
    r = math.ceil(n * math.log(max(d, 2)) / ln_n**2)
    r = min(n, max(d, r))
    op = SketchOperator("SRHT", seed, n, r)
    PA = apply_srht(op, A)
    U, s, Vt = np.linalg.svd(PA, full_matrices=False)
    keep = s > rank_tolerance * s[0] if s[0] > 0 else np.zeros_like(s, bool)
    if not keep.any():
        raise errors.RankDeficient("sketched matrix is numerically zero")
    M = (Vt[keep].T / s[keep]) @ U[:, keep].T          # (Pi A)^+, d x r
    Pi = srht_matrix(op)                               # r x n
    w_raw = np.einsum("ts,st->t", A @ M, Pi)
    floor = d * ln_n**2 / (4.0 * n)
    w = np.maximum(w_raw, floor)
    return LeverageReport(
        scores=w,
        coherence=float(w.max()),
        normalized=w / float(w.sum()),
        method="mi_estimator",
        seed=int(seed),
        extras={"r": r, "floor": floor},
    )


def coherence(report: LeverageReport) -> float:
    """Maximum leverage score in a report."""
    if report.scores.size == 0:
        raise errors.EmptyMatrix("empty report")
    return float(np.max(report.scores))
