"""Kernel functions, Gram matrices and the variance-based bandwidth rule."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .exceptions import AllConstantData, DimensionMismatch, InvalidKernel

FAMILIES = ("gaussian", "laplace", "exponential", "linear")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family with its bandwidth.

    Parameters
    ----------
    family : str
        One of ``"gaussian"``, ``"laplace"``, ``"exponential"``, ``"linear"``.
    bandwidth : float or None
        Kernel bandwidth ``h``. ``None`` means "derive from the data" with
        :func:`select_bandwidth` at Gram-construction time. Ignored for the
        linear kernel.
    m : float
        Bandwidth multiplier used when ``bandwidth`` is derived from data.
    """

    family: str = "gaussian"
    bandwidth: float | None = None
    m: float = 0.8

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidKernel(f"unknown kernel family {self.family!r}; expected one of {FAMILIES}")
        if not self.m > 0:
            raise InvalidKernel(f"bandwidth multiplier m must be positive, got {self.m}")
        if self.bandwidth is not None and self.family != "linear" and not self.bandwidth > 0:
            raise InvalidKernel(f"bandwidth must be positive, got {self.bandwidth}")

    @property
    def is_linear(self) -> bool:
        return self.family == "linear"

    def resolve(self, X) -> "KernelSpec":
        """Return a copy with the bandwidth fixed, selecting it from ``X`` if unset."""
        if self.is_linear or self.bandwidth is not None:
            return self
        return replace(self, bandwidth=select_bandwidth(X, self.m))


def select_bandwidth(X, m: float = 0.8) -> float:
    """Bandwidth from the average per-coordinate variance.

    ``h = sqrt(m * p * mean_j Var[X_j])`` where the variances use the unbiased
    ``n - 1`` denominator.

    Raises
    ------
    AllConstantData
        If every column of ``X`` is constant.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n, p = X.shape
    if n < 2:
        raise DimensionMismatch("bandwidth selection needs at least two observations")
    if not m > 0:
        raise InvalidKernel(f"bandwidth multiplier m must be positive, got {m}")
    mean_var = X.var(axis=0, ddof=1).mean()
    if not mean_var > 0:
        raise AllConstantData("all columns have zero variance; bandwidth would be 0")
    return float(np.sqrt(m * p * mean_var))


def _require_bandwidth(spec: KernelSpec) -> float:
    if spec.bandwidth is None:
        raise InvalidKernel(f"{spec.family} kernel needs a bandwidth; call spec.resolve(X) first")
    return spec.bandwidth


def kernel_eval(spec: KernelSpec, x, y) -> float:
    """Evaluate the kernel on a single pair of vectors."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.shape != y.shape:
        raise DimensionMismatch(f"vectors have shapes {x.shape} and {y.shape}")
    if spec.is_linear:
        return float(np.dot(x, y))
    h = _require_bandwidth(spec)
    diff = x - y
    if spec.family == "gaussian":
        return float(np.exp(-np.dot(diff, diff) / (2.0 * h * h)))
    if spec.family == "laplace":
        return float(np.exp(-np.abs(diff).sum() / h))
    return float(np.exp(-np.sqrt(np.dot(diff, diff)) / h))


def gram(X, spec: KernelSpec) -> np.ndarray:
    """Gram matrix ``K[i, j] = k(X[i], X[j])``.

    Pairwise distances are computed once per unordered pair, so the result is
    exactly symmetric. A spec without a bandwidth is resolved against ``X``.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[0] < 2:
        raise DimensionMismatch("gram needs an (n, p) matrix with n >= 2")

    if spec.is_linear:
        K = X @ X.T
        return (K + K.T) / 2.0

    h = _require_bandwidth(spec.resolve(X))
    if spec.family == "gaussian":
        d = pdist(X, "sqeuclidean")
        vals = np.exp(-d / (2.0 * h * h))
    elif spec.family == "laplace":
        vals = np.exp(-pdist(X, "cityblock") / h)
    else:
        vals = np.exp(-pdist(X, "euclidean") / h)
    K = squareform(vals)
    np.fill_diagonal(K, 1.0)
    return K
