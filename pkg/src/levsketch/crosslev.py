"""Heavy-pair search and large cross-leverage score approximation.

The two-pointer search enumerates exactly the pairs of rows of X whose
squared inner product clears ||X^T X||_F^2 / kappa, examining only
norm-heavy candidates (a Cauchy-Schwarz superset of bounded size). The
sketched variant runs it on the leverage sketch Omega with kappa rescaled
by ||Omega^T Omega||_F^2 / d, giving an effective cutoff of d / kappa.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from . import errors
from ._kernels import row_sq_norms
from .levscore import approx_leverage
from .matcore import validate_matrix
from .sketch import SketchPlan


@dataclass
class HeavyPairSet:
    """Unordered pairs (i <= j) with squared inner products above threshold."""

    pairs: List[Tuple[int, int, float]] = field(default_factory=list)
    threshold: float = 0.0
    kappa: float = 0.0
    gram_fro_sq: float = 0.0

    def __len__(self) -> int:
        return len(self.pairs)

    def indices(self) -> set:
        return {(i, j) for i, j, _ in self.pairs}

    def off_diagonal(self) -> "HeavyPairSet":
        return HeavyPairSet(
            pairs=[p for p in self.pairs if p[0] != p[1]],
            threshold=self.threshold, kappa=self.kappa,
            gram_fro_sq=self.gram_fro_sq)


def heavy_pairs(x, kappa: float) -> HeavyPairSet:
    """All pairs (i, j), i <= j, with <x_i, x_j>^2 >= ||X^T X||_F^2 / kappa.

    Exact and deterministic: rows are sorted by norm (ties by index), a
    two-pointer scan emits the norm-heavy candidates, and each candidate is
    verified by an explicit inner product. O(nr + kappa r^2 + n ln n).
    """
    X = validate_matrix(x)
    if not (kappa > 1.0):
        raise errors.InvalidKappa(f"kappa must exceed 1, got {kappa}")
    n, r = X.shape
    gram = X.T @ X
    gram_fro_sq = float(np.sum(gram * gram))
    if gram_fro_sq <= 0.0:
        raise errors.ZeroMatrix("||X^T X||_F is zero; threshold degenerate")
    threshold = gram_fro_sq / kappa

    norms = row_sq_norms(X)
    order = np.lexsort((np.arange(n), norms))  # ascending norm, ties by index
    Xs = X[order]
    ns = norms[order]

    found: List[Tuple[int, int, float]] = []
    z1 = n - 1
    z2 = 0
    while z2 <= z1:
        while ns[z1] * ns[z2] < threshold:
            z2 += 1
            if z2 > z1:
                return _finish(found, threshold, kappa, gram_fro_sq, r)
        # all (z1, j) for j in [z2, z1] are norm-heavy candidates
        dots = Xs[z2 : z1 + 1] @ Xs[z1]
        for off, c in enumerate(dots):
            c_sq = float(c) * float(c)
            if c_sq >= threshold:
                a, b = int(order[z1]), int(order[z2 + off])
                if a > b:
                    a, b = b, a
                found.append((a, b, c_sq))
        z1 -= 1
    return _finish(found, threshold, kappa, gram_fro_sq, r)


def _finish(found, threshold, kappa, gram_fro_sq, r) -> HeavyPairSet:
    found.sort()
    bound = math.ceil(kappa * r)
    if len(found) > bound:
        raise AssertionError(
            f"heavy-pair count {len(found)} exceeds the kappa*r bound {bound}")
    return HeavyPairSet(pairs=found, threshold=threshold, kappa=kappa,
                        gram_fro_sq=gram_fro_sq)


def heavy_pairs_brute(x, kappa: float) -> HeavyPairSet:
    """O(n^2 r) reference implementation of the same set (test oracle)."""
    X = validate_matrix(x)
    if not (kappa > 1.0):
        raise errors.InvalidKappa(f"kappa must exceed 1, got {kappa}")
    gram = X.T @ X
    gram_fro_sq = float(np.sum(gram * gram))
    if gram_fro_sq <= 0.0:
        raise errors.ZeroMatrix("||X^T X||_F is zero; threshold degenerate")
    threshold = gram_fro_sq / kappa
    n = X.shape[0]
    G = X @ X.T
    found = []
    for i in range(n):
        for j in range(i, n):
            c_sq = float(G[i, j]) ** 2
            if c_sq >= threshold:
                found.append((i, j, c_sq))
    return HeavyPairSet(pairs=found, threshold=threshold, kappa=kappa,
                        gram_fro_sq=gram_fro_sq)


def approx_cross_leverage(a, plan: SketchPlan, kappa: float, seed: int,
                          off_diagonal_only: bool = False) -> HeavyPairSet:
    """Large cross-leverage scores via the leverage sketch.

    Builds Omega with ``approx_leverage`` and searches it for heavy pairs at
    the rescaled threshold kappa' = kappa ||Omega^T Omega||_F^2 / d, so that
    the effective cutoff on sketched inner products is exactly d / kappa.
    Since ||Omega^T Omega||_F^2 <= d (1 + 30 d eps) whenever the sketch
    preserves pairwise inner products, kappa' <= kappa (1 + 30 d eps).
    """
    A = validate_matrix(a)
    if not (kappa > 1.0):
        raise errors.InvalidKappa(f"kappa must exceed 1, got {kappa}")
    d = A.shape[1]
    _, basis = approx_leverage(A, plan, seed)
    gram = basis.omega.T @ basis.omega
    kappa_prime = kappa * float(np.sum(gram * gram)) / d
    result = heavy_pairs(basis.omega, kappa_prime)
    result.kappa = kappa
    if off_diagonal_only:
        result = result.off_diagonal()
    return result
