"""Seeded generators for the simulation scenarios and replication summaries.

Change-point scenarios split ``n`` rows (800 by default) into 8 segments at
either the balanced layout ``100, 200, ..., 700`` or the imbalanced layout
``30, 170, 350, 440, 520, 630, 710``; other ``n`` rescale the layout by
``n / 800``. Odd segments (1st, 3rd, ...) are Gaussian; even segments follow
the alternative distribution of the scenario.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .exceptions import BadDf, BadScenario, EmptyRecords, NotPSD

BALANCED_CPS = (100, 200, 300, 400, 500, 600, 700)
IMBALANCED_CPS = (30, 170, 350, 440, 520, 630, 710)
CHANGEPOINT_KINDS = ("ex1case1", "ex1case2", "ex2", "meanshift")
KINDS = CHANGEPOINT_KINDS + ("clustershells", "null")


def sample_mvnormal(mean, cov, count: int, rng: np.random.Generator) -> np.ndarray:
    """Rows i.i.d. ``N(mean, cov)``; Cholesky factor with an eigen fallback for singular ``cov``."""
    mean = np.atleast_1d(np.asarray(mean, dtype=float))
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    p = mean.shape[0]
    try:
        factor = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        lam, Q = np.linalg.eigh(cov)
        tol = 1e-10 * max(1.0, np.abs(lam).max())
        if lam.min() < -tol:
            raise NotPSD(f"covariance has negative eigenvalue {lam.min():.3g}") from None
        factor = Q * np.sqrt(np.clip(lam, 0.0, None))
    return mean + rng.standard_normal((count, p)) @ factor.T


def sample_mvt(df: float, scale, count: int, rng: np.random.Generator) -> np.ndarray:
    """Multivariate t rows ``z / sqrt(w / df)``, ``z ~ N(0, scale)``, ``w ~ chi2(df)``."""
    if not df > 0:
        raise BadDf(f"degrees of freedom must be positive, got {df}")
    scale = np.atleast_2d(np.asarray(scale, dtype=float))
    z = sample_mvnormal(np.zeros(scale.shape[0]), scale, count, rng)
    w = rng.chisquare(df, size=count)
    return z / np.sqrt(w / df)[:, None]


def equicorrelated_cov(p: int, b: float = 0.5) -> np.ndarray:
    """``1.5 I + sigma`` with ``sigma_ii = 1`` and ``sigma_ij = b``."""
    return 1.5 * np.eye(p) + (1.0 - b) * np.eye(p) + b * np.ones((p, p))


def ar_cov(p: int, rho: float = 0.5) -> np.ndarray:
    idx = np.arange(p)
    return rho ** np.abs(idx[:, None] - idx[None, :])


def unit_sphere(count: int, p: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((count, p))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


@dataclass(frozen=True)
class Scenario:
    """Parameters of one synthetic data set.

    ``kind`` is one of ``ex1case1``, ``ex1case2``, ``ex2``, ``meanshift``,
    ``clustershells`` or ``null`` (a single Gaussian segment, for checking
    false alarms). ``meanshift`` is a harness-defined scenario with
    alternating mean ``0`` / ``delta * e_1`` and identity covariance.
    """

    kind: str = "ex1case1"
    p: int = 100
    n: int = 800
    balance: str = "balanced"
    b: float = 0.5
    df: float = 4.0
    delta: float = 2.0
    outlier_fraction: float = 0.0
    t_unit_variance: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise BadScenario(f"unknown scenario {self.kind!r}; expected one of {KINDS}")
        if self.balance not in ("balanced", "imbalanced"):
            raise BadScenario(f"balance must be 'balanced' or 'imbalanced', got {self.balance!r}")
        if self.p < 1:
            raise BadScenario("p must be >= 1")
        if self.kind in CHANGEPOINT_KINDS and self.n < 80:
            raise BadScenario(f"change-point scenarios need n >= 80, got n={self.n}")
        if self.kind == "clustershells" and self.n < 6:
            raise BadScenario("clustershells needs n >= 6")
        if self.kind == "null" and self.n < 4:
            raise BadScenario("null scenario needs n >= 4")
        if self.kind == "ex2" and self.t_unit_variance and not self.df > 2:
            raise BadScenario("unit-variance t margins need df > 2")
        if not 0 <= self.outlier_fraction < 1:
            raise BadScenario("outlier_fraction must lie in [0, 1)")

    @property
    def change_points(self) -> tuple[int, ...]:
        if self.kind not in CHANGEPOINT_KINDS:
            return ()
        layout = BALANCED_CPS if self.balance == "balanced" else IMBALANCED_CPS
        if self.n == 800:
            return layout
        return tuple(int(round(z * self.n / 800)) for z in layout)

    def cluster_sizes(self) -> tuple[int, int, int]:
        if self.balance == "balanced":
            base = self.n // 3
            return (self.n - 2 * base, base, base)
        unit = self.n // 6
        return (self.n - 3 * unit, 2 * unit, unit)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SimData:
    X: np.ndarray
    change_points: tuple[int, ...] = ()
    labels: np.ndarray | None = None


def _segment_sampler(scenario: Scenario, rng):
    p = scenario.p
    kind = scenario.kind
    if kind in ("ex1case1", "ex1case2"):
        cov = equicorrelated_cov(p, scenario.b) if kind == "ex1case1" else 1.5 * np.eye(p) + ar_cov(p, scenario.b)
        gauss = lambda m: sample_mvnormal(np.zeros(p), cov, m, rng)
        other = lambda m: rng.uniform(-3.0, 3.0, size=(m, p))
    elif kind == "ex2":
        cov = ar_cov(p, 0.5)
        a = scenario.df
        shrink = math.sqrt((a - 2.0) / a) if scenario.t_unit_variance else 1.0
        gauss = lambda m: sample_mvnormal(np.zeros(p), cov, m, rng)
        other = lambda m: shrink * sample_mvt(a, cov, m, rng)
    else:
        shift = np.zeros(p)
        shift[0] = scenario.delta
        gauss = lambda m: rng.standard_normal((m, p))
        other = lambda m: shift + rng.standard_normal((m, p))
    return gauss, other


def generate(scenario: Scenario) -> SimData:
    """Draw the data set described by ``scenario`` from its own seed."""
    rng = np.random.default_rng(scenario.seed)
    if scenario.kind == "clustershells":
        blocks, labels = [], []
        for k, size in enumerate(scenario.cluster_sizes(), start=1):
            radius = rng.uniform(2 * k - 2, 2 * k - 1, size=size)
            blocks.append(radius[:, None] * unit_sphere(size, scenario.p, rng))
            labels.append(np.full(size, k - 1))
        return SimData(X=np.vstack(blocks), labels=np.concatenate(labels))
    if scenario.kind == "null":
        return SimData(X=rng.standard_normal((scenario.n, scenario.p)))

    gauss, other = _segment_sampler(scenario, rng)
    edges = (0,) + scenario.change_points + (scenario.n,)
    blocks = [(gauss if i % 2 == 0 else other)(stop - start)
              for i, (start, stop) in enumerate(zip(edges[:-1], edges[1:]))]
    X = np.vstack(blocks)
    if scenario.outlier_fraction > 0:
        X = inject_outliers(X, scenario.change_points, scenario.outlier_fraction, rng=rng)
    return SimData(X=X, change_points=scenario.change_points)


def inject_outliers(X, change_points, fraction: float = 0.05, magnitude: float = 5.0,
                    sparsity: float = 0.05, rng: np.random.Generator | None = None) -> np.ndarray:
    """Shift a random ``fraction`` of each segment's rows by a sparse constant vector.

    Every segment draws its own shift ``W`` with ``round(sparsity * p)``
    coordinates equal to ``magnitude`` and the rest zero.
    """
    if not 0 <= fraction < 1:
        raise BadScenario(f"outlier fraction must lie in [0, 1), got {fraction}")
    rng = rng if rng is not None else np.random.default_rng()
    X = np.array(X, dtype=float, copy=True)
    n, p = X.shape
    if fraction == 0:
        return X
    n_support = int(math.floor(sparsity * p + 0.5))
    edges = (0,) + tuple(change_points) + (n,)
    for start, stop in zip(edges[:-1], edges[1:]):
        count = int(math.floor(fraction * (stop - start) + 0.5))
        w = np.zeros(p)
        w[rng.choice(p, size=n_support, replace=False)] = magnitude
        rows = start + rng.choice(stop - start, size=count, replace=False)
        X[rows] += w
    return X


@dataclass
class RunReport:
    replications: int
    mean_s_hat: float
    rmse: float
    mean_ri: float
    sd_ri: float
    records: list[dict] = field(default_factory=list)

    def to_dict(self, with_records: bool = True) -> dict:
        out = asdict(self)
        if not with_records:
            out.pop("records")
        return out


def aggregate(records, s_true: int) -> RunReport:
    """Mean ``s_hat``, RMSE of ``s_hat`` against ``s_true`` and mean Rand index."""
    records = list(records)
    if not records:
        raise EmptyRecords("no replication records to aggregate")
    s = np.array([r["s_hat"] for r in records], dtype=float)
    ri = np.array([r["ri"] for r in records], dtype=float)
    return RunReport(
        replications=len(records),
        mean_s_hat=float(s.mean()),
        rmse=float(np.sqrt(np.mean((s - s_true) ** 2))),
        mean_ri=float(ri.mean()),
        sd_ri=float(ri.std(ddof=1)) if len(ri) > 1 else 0.0,
        records=records,
    )
