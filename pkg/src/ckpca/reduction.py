"""Corrected kernel PCA (CKPCA) and corrected PCA (CPCA).

The kernel eigenproblem ``(C @ K) a = lam a`` with ``C = L - U`` (or
``R - S``) is not symmetric. It shares its nonzero spectrum with the
symmetric matrix ``K^{1/2} C K^{1/2}``, which is what we diagonalise. The
square root is taken on the numerical range of ``K`` only, so the work is
done in an ``r x r`` basis where ``r = rank(K)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .dimsel import TrrConfig, trr_select
from .exceptions import DegenerateGram, DimensionMismatch, InvalidConfig, SegmentTooSmall
from .kernels import KernelSpec, gram
from .operators import (
    CenteringPair,
    SegmentScheme,
    changepoint_operators,
    cluster_operators,
    global_centering,
    make_segments,
)

GRAM_RANK_TOL = 1e-10
MODES = ("ckpca", "ckpca-cluster", "cpca")


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues in descending order with matching coefficient columns.

    For kernel problems column ``i`` of ``coefficients`` is the expansion
    vector ``a_i`` of the eigenfunction ``sum_j a_ij k(X_j, .)``, scaled to
    unit RKHS norm (``a_i @ K @ a_i == 1``). Directions in the null space of
    ``K`` have eigenvalue 0 and a zero coefficient column. For CPCA the
    columns are unit eigenvectors in the original coordinates.
    """

    eigenvalues: np.ndarray
    coefficients: np.ndarray
    rank: int

    def __len__(self):
        return self.eigenvalues.shape[0]


@dataclass(frozen=True)
class ReducedData:
    q_hat: int
    basis: np.ndarray
    reduced: np.ndarray
    spectrum: Spectrum
    mode: str
    significant: bool = True
    c_n: float | None = None
    tau: float | None = None
    bandwidth: float | None = None
    meta: dict = field(default_factory=dict)

    @property
    def flags(self) -> list[str]:
        return [] if self.significant else ["NoSignificantDirection"]


def _fix_signs(coef: np.ndarray) -> np.ndarray:
    """Flip each column so that its largest-magnitude entry is positive."""
    if coef.size == 0:
        return coef
    idx = np.argmax(np.abs(coef), axis=0)
    signs = np.sign(coef[idx, np.arange(coef.shape[1])])
    signs[signs == 0] = 1.0
    return coef * signs


def kernel_spectrum(K, C) -> Spectrum:
    """Real spectrum of ``C @ K`` for symmetric ``C`` and PSD ``K``.

    Parameters
    ----------
    K : ndarray, shape (n, n)
        Gram matrix.
    C : ndarray, shape (n, n)
        Symmetric centering operator, e.g. ``L - U``, ``R - S`` or ``R``.

    Returns
    -------
    Spectrum
        ``n`` eigenvalues in descending order.
    """
    K = np.asarray(K, dtype=float)
    C = np.asarray(C, dtype=float)
    n = K.shape[0]
    if K.shape != (n, n) or C.shape != (n, n):
        raise DimensionMismatch(f"K has shape {K.shape} but operator has shape {C.shape}")

    lam, Q = linalg.eigh(K)
    lam_max = lam[-1]
    if not lam_max > 0:
        raise DegenerateGram("Gram matrix has rank 0")
    keep = lam > GRAM_RANK_TOL * lam_max
    sqrt_lam = np.sqrt(lam[keep])
    half = Q[:, keep] * sqrt_lam  # K^{1/2} restricted to range(K)
    W = half.T @ C @ half
    W = (W + W.T) / 2.0
    mu, V = linalg.eigh(W)
    # reversed views have negative strides, which matmul cannot hand to BLAS
    mu, V = mu[::-1].copy(), np.ascontiguousarray(V[:, ::-1])

    coef = (Q[:, keep] / sqrt_lam) @ V
    # K @ coef == half @ V; rescale to a @ K @ a == 1
    norms = np.sqrt(np.einsum("ij,ij->j", coef, half @ V))
    coef = _fix_signs(coef / norms)

    rank = int(keep.sum())
    values = np.concatenate([mu, np.zeros(n - rank)])
    coefs = np.hstack([coef, np.zeros((n, n - rank))])
    order = np.argsort(-values, kind="stable")
    return Spectrum(eigenvalues=values[order], coefficients=coefs[:, order], rank=rank)


def corrected_kernel_spectrum(K, pair: CenteringPair) -> Spectrum:
    """Spectrum of ``(global - within) @ K`` for a centering pair."""
    if pair.n != np.shape(K)[0]:
        raise DimensionMismatch(f"Gram matrix is {np.shape(K)} but operators are for n={pair.n}")
    return kernel_spectrum(K, pair.corrected)


def cpca_delta(X, scheme: SegmentScheme | None = None) -> np.ndarray:
    """Between-segment correction ``X.T @ (L - U) @ X`` in the original space.

    Computed blockwise as the global scatter over ``n`` minus the average of
    the unbiased within-segment covariances.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    if scheme is None:
        scheme = make_segments(n)
    if scheme.n != n:
        raise DimensionMismatch(f"scheme covers n={scheme.n} rows but X has {n}")
    if scheme.sizes.min() < 2:
        raise SegmentTooSmall(f"every segment needs at least 2 points, got sizes {scheme.sizes.tolist()}")

    X = X - X[0]  # shift invariant; makes constant columns exactly zero
    Xc = X - X.mean(axis=0)
    total = Xc.T @ Xc / n
    pooled = np.zeros_like(total)
    for start, stop in scheme.bounds:
        block = X[start:stop]
        bc = block - block.mean(axis=0)
        pooled += bc.T @ bc / (stop - start - 1)
    delta = total - pooled / scheme.r
    return (delta + delta.T) / 2.0


def cpca_spectrum(delta) -> Spectrum:
    delta = np.asarray(delta, dtype=float)
    lam, V = linalg.eigh(delta)
    lam, V = lam[::-1].copy(), np.ascontiguousarray(V[:, ::-1])
    return Spectrum(eigenvalues=lam, coefficients=_fix_signs(V), rank=delta.shape[0])


def cumulative_variance_dim(eigenvalues, ratio: float = 0.95) -> int:
    """Smallest ``q`` whose leading positive eigenvalues explain ``ratio`` of the total."""
    lam = np.clip(np.asarray(eigenvalues, dtype=float), 0.0, None)
    total = lam.sum()
    if not total > 0:
        return 1
    frac = np.cumsum(lam) / total
    return int(np.searchsorted(frac, ratio - 1e-12) + 1)


def _project(K_or_X, spectrum: Spectrum, q: int):
    basis = spectrum.coefficients[:, :q]
    return basis, K_or_X @ basis


def reduce(
    X,
    mode: str = "ckpca",
    kernel: KernelSpec | None = None,
    alpha: int | None = None,
    labels=None,
    trr: TrrConfig | None = None,
    K=None,
) -> ReducedData:
    """Reduce ``X`` to the estimated deviation subspace.

    Parameters
    ----------
    X : array_like, shape (n, p)
        Observations, ordered in time for the change-point modes.
    mode : {"ckpca", "ckpca-cluster", "cpca"}
        Corrected kernel PCA with segment operators, corrected kernel PCA
        with category operators (needs ``labels``), or linear corrected PCA.
    kernel : KernelSpec, optional
        Defaults to a Gaussian kernel with data-driven bandwidth.
    alpha : int, optional
        Segment length; defaults to ``floor(sqrt(n))``.
    labels : array_like, optional
        Category labels for ``mode="ckpca-cluster"``.
    trr : TrrConfig, optional
        TRR threshold and ridge. The ridge defaults to the kernel formula for
        the kernel modes and the ``sqrt(p/n)`` formula for CPCA.
    K : ndarray, optional
        Precomputed Gram matrix for ``X`` under ``kernel``.
    """
    if mode not in MODES:
        raise InvalidConfig(f"unknown reduction mode {mode!r}; expected one of {MODES}")
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n, p = X.shape
    trr = trr or TrrConfig()

    if mode == "cpca":
        scheme = make_segments(n, alpha)
        spectrum = cpca_spectrum(cpca_delta(X, scheme))
        c_n = trr.ridge(n, p, "linear")
        sel = trr_select(spectrum.eigenvalues, trr.tau, c_n) if p >= 2 else None
        q_hat = sel.q_hat if sel else 1
        significant = sel.significant if sel else bool(spectrum.eigenvalues[0] > c_n)
        basis, reduced = _project(X, spectrum, q_hat)
        return ReducedData(
            q_hat=q_hat, basis=basis, reduced=reduced, spectrum=spectrum, mode=mode,
            significant=significant, c_n=c_n, tau=trr.tau, meta={"alpha": scheme.alpha},
        )

    kernel = (kernel or KernelSpec()).resolve(X)
    if K is None:
        K = gram(X, kernel)
    if mode == "ckpca":
        scheme = make_segments(n, alpha)
        pair = changepoint_operators(scheme)
        meta = {"alpha": scheme.alpha}
    else:
        if labels is None:
            raise InvalidConfig("mode 'ckpca-cluster' needs category labels")
        pair = cluster_operators(labels)
        meta = {"d": int(len(np.unique(labels)))}
    spectrum = corrected_kernel_spectrum(K, pair)
    c_n = trr.ridge(n, p, "kernel")
    sel = trr_select(spectrum.eigenvalues, trr.tau, c_n)
    basis, reduced = _project(K, spectrum, sel.q_hat)
    return ReducedData(
        q_hat=sel.q_hat, basis=basis, reduced=reduced, spectrum=spectrum, mode=mode,
        significant=sel.significant, c_n=c_n, tau=trr.tau, bandwidth=kernel.bandwidth, meta=meta,
    )


def kpca_reduce(X, kernel: KernelSpec | None = None, q: int | None = None,
                variance_ratio: float = 0.95, K=None) -> ReducedData:
    """Uncorrected kernel PCA: spectrum of ``R @ K``.

    The dimension is ``q`` when given, otherwise the cumulative-variance rule.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    kernel = (kernel or KernelSpec()).resolve(X)
    if K is None:
        K = gram(X, kernel)
    spectrum = kernel_spectrum(K, global_centering(X.shape[0]))
    if q is None:
        q = cumulative_variance_dim(spectrum.eigenvalues, variance_ratio)
    basis, reduced = _project(K, spectrum, q)
    return ReducedData(
        q_hat=q, basis=basis, reduced=reduced, spectrum=spectrum, mode="kpca",
        bandwidth=kernel.bandwidth, meta={"variance_ratio": variance_ratio},
    )
