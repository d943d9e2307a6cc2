"""Segment schemes and the centering operators behind the corrected eigenproblem.

Change-point mode uses a global centering operator ``L`` and a within-segment
operator ``U`` built over consecutive blocks of length ``alpha``. Cluster mode
uses ``R`` (same as ``L``) and a within-category operator ``S``. For any
feature matrix ``Y`` (rows = observations), ``Y.T @ L @ Y`` is the global
scatter divided by ``n`` and ``Y.T @ U @ Y`` is the pooled within-block
covariance, so ``Y.T @ (L - U) @ Y`` is the between-block correction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import CategoryTooSmall, InvalidAlpha, SegmentTooSmall


@dataclass(frozen=True)
class SegmentScheme:
    """Non-overlapping blocks ``[start, stop)`` covering ``0..n-1``.

    The first ``r - 1`` blocks have length ``alpha``; the last one absorbs the
    remainder and has length ``n - (r - 1) * alpha``.
    """

    n: int
    alpha: int
    bounds: tuple[tuple[int, int], ...]

    @property
    def r(self) -> int:
        return len(self.bounds)

    @property
    def sizes(self) -> np.ndarray:
        return np.array([stop - start for start, stop in self.bounds])

    def labels(self) -> np.ndarray:
        """Block index of every observation."""
        return np.repeat(np.arange(self.r), self.sizes)


@dataclass(frozen=True)
class CenteringPair:
    """Global and within-group centering operators (both ``n x n``)."""

    global_: np.ndarray
    within: np.ndarray
    mode: str

    @property
    def n(self) -> int:
        return self.global_.shape[0]

    @property
    def corrected(self) -> np.ndarray:
        """``global - within``, the operator whose product with ``K`` is diagonalised."""
        return self.global_ - self.within


def make_segments(n: int, alpha: int | None = None) -> SegmentScheme:
    """Split ``n`` ordered observations into blocks of length ``alpha``.

    ``alpha`` defaults to ``floor(sqrt(n))``.
    """
    n = int(n)
    if n < 4:
        raise InvalidAlpha(f"need n >= 4 observations, got {n}")
    if alpha is None:
        alpha = math.isqrt(n)
    alpha = int(alpha)
    if alpha < 2 or 2 * alpha > n:
        raise InvalidAlpha(f"alpha must satisfy 2 <= alpha <= n/2, got alpha={alpha}, n={n}")
    r = n // alpha
    bounds = [(m * alpha, (m + 1) * alpha) for m in range(r - 1)]
    bounds.append(((r - 1) * alpha, n))
    return SegmentScheme(n=n, alpha=alpha, bounds=tuple(bounds))


def global_centering(n: int) -> np.ndarray:
    """``(1/n) (I - J/n)``; the centering projector is idempotent so its square is itself."""
    C = np.full((n, n), -1.0 / n)
    C[np.diag_indices(n)] += 1.0
    return C / n


def _block_centering(size: int) -> np.ndarray:
    P = np.full((size, size), -1.0 / size)
    P[np.diag_indices(size)] += 1.0
    return P


def changepoint_operators(scheme: SegmentScheme) -> CenteringPair:
    """Build ``(L, U)`` for a segment scheme.

    Each block ``m`` contributes its own centering projector, weighted by
    ``1 / (r * (n_m - 1))`` with ``n_m`` the block's actual size, so that
    ``y.T @ U @ y`` is the average of the unbiased within-block variances.
    """
    sizes = scheme.sizes
    if sizes.min() < 2:
        raise SegmentTooSmall(f"every segment needs at least 2 points, got sizes {sizes.tolist()}")
    n, r = scheme.n, scheme.r
    U = np.zeros((n, n))
    for start, stop in scheme.bounds:
        size = stop - start
        U[start:stop, start:stop] = _block_centering(size) / (r * (size - 1))
    return CenteringPair(global_=global_centering(n), within=U, mode="changepoint")


def cluster_operators(labels) -> CenteringPair:
    """Build ``(R, S)`` for a partition given as an integer label vector.

    ``S`` weights every category's centering projector by ``1 / (n - d)``,
    which pools the within-category covariances with weights
    ``(n_i - 1) / (n - d)``.
    """
    labels = np.asarray(labels)
    n = labels.shape[0]
    cats, inverse, counts = np.unique(labels, return_inverse=True, return_counts=True)
    d = len(cats)
    if counts.min() < 2:
        raise CategoryTooSmall(f"every category needs at least 2 points, got sizes {counts.tolist()}")
    if n <= d:
        raise CategoryTooSmall(f"need more points than categories (n={n}, d={d})")
    S = np.zeros((n, n))
    for k in range(d):
        idx = np.flatnonzero(inverse == k)
        S[np.ix_(idx, idx)] = _block_centering(len(idx)) / (n - d)
    return CenteringPair(global_=global_centering(n), within=S, mode="cluster")
