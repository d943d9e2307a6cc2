"""Thresholding ridge ratio (TRR) estimate of the structural dimension."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidConfig, NTooSmall


@dataclass(frozen=True)
class TrrConfig:
    """TRR threshold ``tau`` and ridge ``c_n``.

    ``c_n=None`` means use :func:`default_ridge` for the data size at hand.
    """

    tau: float = 0.5
    c_n: float | None = None

    def __post_init__(self):
        if not 0 < self.tau < 1:
            raise InvalidConfig(f"tau must lie in (0, 1), got {self.tau}")
        if self.c_n is not None and not self.c_n > 0:
            raise InvalidConfig(f"ridge c_n must be positive, got {self.c_n}")

    def ridge(self, n: int, p: int, mode: str) -> float:
        return self.c_n if self.c_n is not None else default_ridge(n, p, mode)


def default_ridge(n: int, p: int = 1, mode: str = "kernel") -> float:
    """``0.2 * log(log n) * sqrt(1/n)`` for kernels, ``sqrt(p/n)`` scaling for CPCA."""
    if n < 16:
        raise NTooSmall(f"default ridge needs n >= 16, got n={n}")
    if mode == "kernel":
        scale = 1.0
    elif mode == "linear":
        scale = float(p)
    else:
        raise InvalidConfig(f"ridge mode must be 'kernel' or 'linear', got {mode!r}")
    return 0.2 * math.log(math.log(n)) * math.sqrt(scale / n)


@dataclass(frozen=True)
class TrrResult:
    q_hat: int
    significant: bool
    ratios: np.ndarray


def trr_select(eigenvalues, tau: float = 0.5, c_n: float = 0.01) -> TrrResult:
    """Largest ``k`` with ``(lam[k+1] + c) / (lam[k] + c) <= tau``.

    Negative eigenvalues are clamped to zero first. When no ratio falls below
    ``tau`` the result is ``q_hat=1`` with ``significant=False``.
    """
    lam = np.clip(np.asarray(eigenvalues, dtype=float), 0.0, None)
    if lam.ndim != 1 or lam.size < 2:
        raise InvalidConfig("TRR needs at least two eigenvalues")
    if np.any(np.diff(lam) > 0):
        raise InvalidConfig("eigenvalues must be sorted in descending order")
    ratios = (lam[1:] + c_n) / (lam[:-1] + c_n)
    hits = np.flatnonzero(ratios <= tau)
    if hits.size == 0:
        return TrrResult(q_hat=1, significant=False, ratios=ratios)
    return TrrResult(q_hat=int(hits[-1]) + 1, significant=True, ratios=ratios)
