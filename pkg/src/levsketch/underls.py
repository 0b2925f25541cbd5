"""Leverage-based column sampling for under-constrained least squares.

For n < d the minimal-norm solution is x_opt = A^+ b. Sampling r columns
with probabilities proportional to the leverage scores of A^T (rescaled to
keep the sampled Gram unbiased) gives x ~ A^T (AS)^{+T} (AS)^+ b with
||x - x_opt|| <= 2 eps ||x_opt|| at high probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import errors
from .levscore import approx_leverage
from .matcore import (DEFAULT_RANK_TOL, exact_leverage, pseudoinverse,
                      validate_matrix)
from .rng import substream
from .sketch import SketchPlan


@dataclass
class SamplingProbabilities:
    """Column-sampling distribution with its leverage quality factor beta."""

    p: np.ndarray
    beta: float = 1.0

    def __post_init__(self):
        self.p = np.asarray(self.p, dtype=np.float64)
        if np.any(self.p < 0) or not np.isfinite(self.p).all():
            raise errors.InvalidParameter("probabilities must be finite and >= 0")
        s = float(self.p.sum())
        if abs(s - 1.0) > 1e-9:
            raise errors.InvalidParameter(f"probabilities sum to {s}, not 1")
        if not (0.0 < self.beta <= 1.0):
            raise errors.InvalidParameter(f"beta must be in (0, 1], got {self.beta}")


@dataclass
class SamplingMatrix:
    """Sparse d x r selector: column t has single nonzero 1/sqrt(r p_{i_t})."""

    d: int
    r: int
    selected: np.ndarray   # r column indices
    weights: np.ndarray    # r rescaling factors

    def apply_right(self, a: np.ndarray) -> np.ndarray:
        """A S: gather and rescale the sampled columns of A."""
        return a[:, self.selected] * self.weights

    def dense(self) -> np.ndarray:
        S = np.zeros((self.d, self.r))
        S[self.selected, np.arange(self.r)] = self.weights
        return S


def sample_size(n: int, beta: float, epsilon: float, delta: float) -> int:
    """r = ceil((96 n / (beta eps^2)) ln(96 n / (beta eps^2 sqrt(delta))))."""
    if n < 1:
        raise errors.InvalidParameter(f"n must be >= 1, got {n}")
    if not (0.0 < beta <= 1.0):
        raise errors.InvalidParameter(f"beta must be in (0, 1], got {beta}")
    if not (0.0 < epsilon <= 0.5):
        raise errors.InvalidParameter(f"epsilon must be in (0, 0.5], got {epsilon}")
    if not (0.0 < delta < 1.0):
        raise errors.InvalidParameter(f"delta must be in (0, 1), got {delta}")
    base = 96.0 * n / (beta * epsilon**2)
    return math.ceil(base * math.log(base / math.sqrt(delta)))


def draw_sampling_matrix(p: SamplingProbabilities, r: int,
                         seed: int) -> SamplingMatrix:
    """r i.i.d. column draws with replacement from p, seeded."""
    if r < 1:
        raise errors.InvalidParameter(f"r must be >= 1, got {r}")
    g = substream(seed, 4)
    d = p.p.size
    selected = g.choice(d, size=r, replace=True, p=p.p)
    weights = 1.0 / np.sqrt(r * p.p[selected])
    return SamplingMatrix(d=d, r=r, selected=selected, weights=weights)


def leverage_probs_for_columns(a, method: str = "exact",
                               plan: Optional[SketchPlan] = None,
                               seed: Optional[int] = None
                               ) -> SamplingProbabilities:
    """Column-sampling probabilities = normalized leverage scores of A^T."""
    A = validate_matrix(a)
    n, d = A.shape
    if n >= d:
        raise errors.ShapeError(f"need n < d, got shape {A.shape}")
    if method == "exact":
        report = exact_leverage(A.T)
        return SamplingProbabilities(p=report.normalized, beta=1.0)
    if method == "sketched":
        if plan is None or seed is None:
            raise errors.InvalidParameter("sketched method needs plan and seed")
        report, _ = approx_leverage(A.T, plan, seed)
        eps = plan.epsilon
        return SamplingProbabilities(p=report.normalized,
                                     beta=(1.0 - eps) / (1.0 + eps))
    raise errors.InvalidParameter(f"unknown method {method!r}")


def underls_solve(a, b, p: SamplingProbabilities, epsilon: float,
                  delta: float, seed: int,
                  rank_tolerance: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Approximate minimal-norm solution of min ||A x - b|| for n < d.

    Samples r = sample_size(n, beta, eps, delta) columns and returns
    A^T (AS)^{+T} (AS)^+ b.
    """
    A = validate_matrix(a)
    n, d = A.shape
    if n >= d:
        raise errors.ShapeError(f"need n < d, got shape {A.shape}")
    bvec = np.asarray(b, dtype=np.float64).reshape(-1)
    if bvec.size != n:
        raise errors.DimensionMismatch(f"b has length {bvec.size}, expected {n}")
    if p.p.size != d:
        raise errors.DimensionMismatch(
            f"probabilities cover {p.p.size} columns, matrix has {d}")
    r = sample_size(n, p.beta, epsilon, delta)
    S = draw_sampling_matrix(p, r, seed)
    AS = S.apply_right(A)
    sv = np.linalg.svd(AS, compute_uv=False)
    if sv.size == 0 or sv[0] == 0 or sv[-1] <= rank_tolerance * sv[0] \
            or int(np.sum(sv > rank_tolerance * sv[0])) < n:
        raise errors.RankDeficient(
            "sampled matrix AS lost rank; retry with a new seed")
    AS_pinv = pseudoinverse(AS, rank_tolerance)
    y = AS_pinv @ bvec
    return A.T @ (AS_pinv.T @ y)
