"""K-means, Rand index and iterative subspace clustering with corrected kernel PCA."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.cluster import KMeans
from sklearn.metrics import rand_score

from .dimsel import TrrConfig, trr_select
from .exceptions import CategoryTooSmall, InvalidConfig, LengthMismatch, TooFewPoints
from .kernels import KernelSpec, gram
from .operators import cluster_operators, global_centering
from .reduction import corrected_kernel_spectrum, kernel_spectrum


@dataclass(frozen=True)
class Partition:
    """Category labels ``0..d-1`` with per-category sizes."""

    labels: np.ndarray

    @classmethod
    def from_labels(cls, labels) -> "Partition":
        """Relabel arbitrary ids to ``0..d-1`` in order of first appearance."""
        labels = np.asarray(labels)
        _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
        rank = np.empty(len(first), dtype=int)
        rank[np.argsort(first)] = np.arange(len(first))
        return cls(rank[inverse.ravel()])

    @property
    def n(self) -> int:
        return self.labels.shape[0]

    @property
    def d(self) -> int:
        return int(self.labels.max()) + 1 if self.n else 0

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.d)


def kmeans(Z, d: int, restarts: int = 10, max_iter: int = 100, seed: int | None = 0) -> Partition:
    """Lloyd's algorithm with k-means++ seeding, best of ``restarts`` runs."""
    Z = np.asarray(Z, dtype=float)
    if Z.ndim == 1:
        Z = Z[:, None]
    if Z.shape[0] < d:
        raise TooFewPoints(f"cannot form {d} clusters from {Z.shape[0]} points")
    km = KMeans(n_clusters=d, init="k-means++", n_init=restarts, max_iter=max_iter,
                algorithm="lloyd", random_state=seed)
    return Partition.from_labels(km.fit_predict(Z))


def _labels(p) -> np.ndarray:
    return p.labels if isinstance(p, Partition) else np.asarray(p)


def rand_index(p1, p2) -> float:
    """Fraction of point pairs on which two partitions agree."""
    a, b = _labels(p1), _labels(p2)
    if a.shape != b.shape:
        raise LengthMismatch(f"partitions have lengths {a.shape[0]} and {b.shape[0]}")
    return float(rand_score(a, b))


def segment_labels(change_points, n: int) -> np.ndarray:
    """Segment index of every observation for a set of change points."""
    cps = np.sort(np.asarray(list(change_points), dtype=int))
    if cps.size and (cps[0] < 1 or cps[-1] > n - 1):
        raise InvalidConfig(f"change points must lie in 1..{n - 1}")
    return np.searchsorted(cps, np.arange(n), side="right")


def segmentation_rand_index(true_cps, est_cps, n: int) -> float:
    return rand_index(segment_labels(true_cps, n), segment_labels(est_cps, n))


@dataclass(frozen=True)
class IterClusterConfig:
    d: int = 3
    max_outer_iterations: int = 20
    ri_stop: float = 0.999
    restarts: int = 10
    max_iter: int = 100
    trr: TrrConfig = field(default_factory=TrrConfig)
    seed: int | None = 0

    def __post_init__(self):
        if self.d < 2:
            raise InvalidConfig(f"need at least 2 categories, got d={self.d}")
        if not 0 < self.ri_stop <= 1:
            raise InvalidConfig(f"ri_stop must lie in (0, 1], got {self.ri_stop}")
        if self.max_outer_iterations < 1:
            raise InvalidConfig("max_outer_iterations must be >= 1")


@dataclass
class ClusterResult:
    partition: Partition
    q_hats: list[int]
    ri_trace: list[float]
    converged: bool
    bandwidth: float | None = None

    @property
    def outer_iterations(self) -> int:
        return len(self.ri_trace)


def merge_small_categories(labels, Z, min_size: int = 2) -> np.ndarray:
    """Fold categories smaller than ``min_size`` into the nearest remaining centroid."""
    labels = np.asarray(labels).copy()
    Z = np.asarray(Z, dtype=float)
    if Z.ndim == 1:
        Z = Z[:, None]
    while True:
        cats, counts = np.unique(labels, return_counts=True)
        small = cats[counts < min_size]
        if small.size == 0:
            break
        big = cats[counts >= min_size]
        if big.size < 2:
            raise CategoryTooSmall(f"fewer than 2 categories of size >= {min_size} remain")
        centroids = np.array([Z[labels == c].mean(axis=0) for c in big])
        victim = small[0]
        centre = Z[labels == victim].mean(axis=0)
        labels[labels == victim] = big[np.argmin(((centroids - centre) ** 2).sum(axis=1))]
    return Partition.from_labels(labels).labels


def iterative_subspace_cluster(
    X, config: IterClusterConfig | None = None, kernel: KernelSpec | None = None, K=None
) -> ClusterResult:
    """Alternate corrected kernel PCA with K-means until partitions stabilise.

    The first partition comes from K-means on the top ``d - 1`` plain kernel PCA
    coordinates. Each following round builds the category operators from the
    current partition, selects the dimension by TRR, reduces and re-clusters;
    the loop stops once consecutive partitions have Rand index above
    ``ri_stop`` or after ``max_outer_iterations`` rounds.
    """
    config = config or IterClusterConfig()
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n, p = X.shape
    d = config.d
    if n < 2 * d:
        raise TooFewPoints(f"need n >= 2d observations, got n={n}, d={d}")
    kernel = (kernel or KernelSpec()).resolve(X)
    if K is None:
        K = gram(X, kernel)
    seeds = np.random.default_rng(config.seed)

    def cluster(Z):
        return kmeans(Z, d, config.restarts, config.max_iter, int(seeds.integers(2**31 - 1)))

    init = kernel_spectrum(K, global_centering(n))
    Z = K @ init.coefficients[:, : d - 1]
    current = cluster(Z).labels
    c_n = config.trr.ridge(n, p, "kernel")

    q_hats, ri_trace = [], []
    converged = False
    for _ in range(config.max_outer_iterations):
        current = merge_small_categories(current, Z)
        spectrum = corrected_kernel_spectrum(K, cluster_operators(current))
        q = trr_select(spectrum.eigenvalues, config.trr.tau, c_n).q_hat
        Z = K @ spectrum.coefficients[:, :q]
        new = cluster(Z).labels
        ri = rand_index(current, new)
        q_hats.append(q)
        ri_trace.append(ri)
        current = new
        if ri > config.ri_stop or ri == 1.0:
            converged = True
            break
    return ClusterResult(
        partition=Partition.from_labels(current), q_hats=q_hats, ri_trace=ri_trace,
        converged=converged, bandwidth=kernel.bandwidth,
    )
