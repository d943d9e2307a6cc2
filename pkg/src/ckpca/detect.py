"""Energy-statistic divisive segmentation and the end-to-end detection pipeline.

A change point ``z`` means the distribution differs between the first ``z``
observations and the rest, so ``z`` is also the 0-based index of the first
row of the new segment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist, pdist, squareform

from .dimsel import TrrConfig
from .exceptions import InvalidConfig, TooFewPoints, TooShort
from .kernels import KernelSpec
from .reduction import ReducedData, kpca_reduce, reduce

PIPELINE_MODES = ("ckpca", "cpca", "raw", "kpca")


@dataclass(frozen=True)
class DetectorConfig:
    min_size: int = 30
    n_permutations: int = 199
    significance: float = 0.05
    max_changes: int | None = None
    seed: int | None = 0

    def __post_init__(self):
        if self.min_size < 2:
            raise InvalidConfig(f"min_size must be >= 2, got {self.min_size}")
        if self.n_permutations < 19:
            raise InvalidConfig(f"need at least 19 permutations, got {self.n_permutations}")
        if not 0 < self.significance < 1:
            raise InvalidConfig(f"significance must lie in (0, 1), got {self.significance}")
        if self.max_changes is not None and self.max_changes < 0:
            raise InvalidConfig("max_changes must be non-negative")


@dataclass(frozen=True)
class SplitTest:
    start: int
    stop: int
    split: int
    statistic: float
    p_value: float
    accepted: bool


@dataclass
class ChangePointResult:
    change_points: list[int]
    n: int
    tests: list[SplitTest] = field(default_factory=list)
    reduction: ReducedData | None = None

    @property
    def s_hat(self) -> int:
        return len(self.change_points)

    @property
    def p_values(self) -> list[float]:
        """p-values of the accepted splits, in change-point order."""
        by_split = {t.split: t.p_value for t in self.tests if t.accepted}
        return [by_split[z] for z in self.change_points]


def energy_statistic(A, B) -> float:
    """Scaled two-sample energy statistic with Euclidean distance.

    ``Q = m k / (m + k) * [2 mean|a - b| - mean_{i<i'}|a_i - a_i'| - mean_{j<j'}|b_j - b_j'|]``

    Sums are exactly rounded, so ``Q(A, B) == Q(B, A)`` and the value does not
    depend on row order within either sample.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    if B.ndim == 1:
        B = B[:, None]
    m, k = A.shape[0], B.shape[0]
    if m < 2 or k < 2:
        raise TooFewPoints(f"each sample needs at least 2 points, got {m} and {k}")
    between = math.fsum(cdist(A, B).ravel()) * 2.0 / (m * k)
    within_a = math.fsum(pdist(A)) / math.comb(m, 2)
    within_b = math.fsum(pdist(B)) / math.comb(k, 2)
    return (m * k / (m + k)) * (between - (within_a + within_b))


def _scan(col: np.ndarray, row: np.ndarray, min_size: int) -> np.ndarray:
    """Split statistics from per-position distance sums.

    ``col[j]`` is the summed distance from position ``j`` to all earlier
    positions and ``row[i]`` the summed distance to all later positions.
    """
    N = col.shape[0]
    total = col.sum()
    k = np.arange(min_size, N - min_size + 1)
    within_left = np.concatenate([[0.0], np.cumsum(col)])[k]
    within_right = np.concatenate([np.cumsum(row[::-1])[::-1], [0.0]])[k]
    cross = total - within_left - within_right
    m, l = k.astype(float), (N - k).astype(float)
    bracket = 2.0 * cross / (m * l) - within_left / (m * (m - 1) / 2) - within_right / (l * (l - 1) / 2)
    return m * l / (m + l) * bracket


def split_statistics(D: np.ndarray, min_size: int) -> np.ndarray:
    """Energy statistic for every admissible split of one segment.

    Parameters
    ----------
    D : ndarray, shape (N, N)
        Pairwise distances of the segment, zero diagonal.
    min_size : int
        Smallest allowed sub-segment.

    Returns
    -------
    ndarray
        ``stats[j]`` is the statistic for a left part of size ``min_size + j``.
    """
    col = np.tril(D, -1).sum(axis=1)
    row = D.sum(axis=1) - col
    return _scan(col, row, min_size)


def _permuted_statistics(D: np.ndarray, totals: np.ndarray, perm: np.ndarray, min_size: int) -> np.ndarray:
    """Split statistics of the segment with its rows reordered by ``perm``.

    Avoids materialising the permuted distance matrix: a point's distance
    sum to earlier positions only depends on which points precede it.
    """
    rank = np.empty_like(perm)
    rank[perm] = np.arange(perm.shape[0])
    earlier = rank[:, None] < rank[None, :]
    col = np.where(earlier, D, 0.0).sum(axis=0)[perm]
    return _scan(col, totals[perm] - col, min_size)


def _best_split(stats: np.ndarray, min_size: int) -> tuple[int, float]:
    j = int(np.argmax(stats))  # first maximiser wins ties
    return min_size + j, float(stats[j])


def divisive_segment(Z, config: DetectorConfig | None = None) -> ChangePointResult:
    """Hierarchical energy-statistic segmentation with permutation tests.

    Each stage proposes the best split over all current segments. Its
    p-value is ``(1 + #{perm >= observed}) / (1 + B)``, where every
    permutation shuffles the rows within each current segment and takes the
    largest best-split statistic over all of them. A significant proposal
    becomes a change point and the search continues; the first
    non-significant stage, or ``max_changes``, ends it.
    """
    config = config or DetectorConfig()
    Z = np.asarray(Z, dtype=float)
    if Z.ndim == 1:
        Z = Z[:, None]
    n = Z.shape[0]
    if n < 2 * config.min_size:
        raise TooShort(f"n={n} is shorter than 2 * min_size={2 * config.min_size}")

    D = squareform(pdist(Z))
    rng = np.random.default_rng(config.seed)
    B, min_size = config.n_permutations, config.min_size
    cps: list[int] = []
    tests: list[SplitTest] = []
    cache: dict[tuple[int, int], tuple] = {}

    def candidate(start, stop):
        if (start, stop) not in cache:
            Dseg = D[start:stop, start:stop]
            split, stat = _best_split(split_statistics(Dseg, min_size), min_size)
            cache[start, stop] = (Dseg, Dseg.sum(axis=1), start + split, stat)
        return cache[start, stop]

    while config.max_changes is None or len(cps) < config.max_changes:
        edges = [0] + cps + [n]
        segments = [(a, b) for a, b in zip(edges[:-1], edges[1:]) if b - a >= 2 * min_size]
        if not segments:
            break
        best = None
        for seg in segments:  # strict ">" keeps the earliest segment on ties
            if best is None or candidate(*seg)[3] > candidate(*best)[3]:
                best = seg
        _, _, split, stat = candidate(*best)
        exceed = 0
        for _ in range(B):
            peak = -np.inf
            for seg in segments:
                Dseg, totals, _, _ = candidate(*seg)
                perm = rng.permutation(seg[1] - seg[0])
                peak = max(peak, _permuted_statistics(Dseg, totals, perm, min_size).max())
            exceed += peak >= stat
        p_value = (1 + exceed) / (1 + B)
        accepted = p_value <= config.significance
        tests.append(SplitTest(best[0], best[1], split, stat, p_value, accepted))
        if not accepted:
            break
        cps = sorted(cps + [split])
    return ChangePointResult(change_points=cps, n=n, tests=tests)


def detect_pipeline(
    X,
    mode: str = "ckpca",
    kernel: KernelSpec | None = None,
    alpha: int | None = None,
    trr: TrrConfig | None = None,
    detector: DetectorConfig | None = None,
    variance_ratio: float = 0.95,
) -> ChangePointResult:
    """Reduce ``X`` (unless ``mode="raw"``) and segment the result.

    ``mode`` is ``"ckpca"`` (corrected kernel PCA), ``"cpca"`` (corrected
    linear PCA), ``"kpca"`` (plain kernel PCA with the cumulative-variance
    dimension rule) or ``"raw"``.
    """
    if mode not in PIPELINE_MODES:
        raise InvalidConfig(f"unknown pipeline mode {mode!r}; expected one of {PIPELINE_MODES}")
    detector = detector or DetectorConfig()
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] < 2 * detector.min_size:
        raise TooShort(f"n={X.shape[0]} is shorter than 2 * min_size={2 * detector.min_size}")

    red = None
    if mode == "ckpca":
        red = reduce(X, "ckpca", kernel=kernel, alpha=alpha, trr=trr)
    elif mode == "cpca":
        red = reduce(X, "cpca", alpha=alpha, trr=trr)
    elif mode == "kpca":
        red = kpca_reduce(X, kernel=kernel, variance_ratio=variance_ratio)
    Z = X if red is None else red.reduced
    result = divisive_segment(Z, detector)
    result.reduction = red
    return result

