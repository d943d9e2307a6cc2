"""Monte-Carlo replication harness for the simulation scenarios.

Replication ``i`` draws its data seed and detector seed from child ``i`` of
``SeedSequence(seed)``, so reports are identical whether replications run
serially or in worker processes.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, replace
from functools import partial

import numpy as np

from .cluster import IterClusterConfig, iterative_subspace_cluster, kmeans, rand_index, segmentation_rand_index
from .detect import DetectorConfig, detect_pipeline
from .dimsel import TrrConfig
from .exceptions import BadScenario, EmptyRecords
from .kernels import KernelSpec, gram
from .reduction import kpca_reduce, reduce
from .simdata import Scenario, aggregate, generate

CHANGEPOINT_METHODS = ("ckpca", "cpca", "kpca", "raw")
CLUSTER_METHODS = ("ckpca", "kpca", "raw")


def replication_seeds(seed: int, reps: int) -> list[tuple[int, int]]:
    """``(data_seed, method_seed)`` for each replication."""
    children = np.random.SeedSequence(seed).spawn(reps)
    return [tuple(int(v) for v in child.generate_state(2)) for child in children]


def _map(fn, items, jobs: int):
    if jobs <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _changepoint_rep(item, scenario, methods, kernel, alpha, trr, detector):
    rep, (data_seed, det_seed) = item
    data = generate(replace(scenario, seed=data_seed))
    det = replace(detector, seed=det_seed)
    out = {}
    for method in methods:
        res = detect_pipeline(data.X, method, kernel=kernel, alpha=alpha, trr=trr, detector=det)
        record = {
            "rep": rep,
            "data_seed": data_seed,
            "s_hat": res.s_hat,
            "ri": segmentation_rand_index(data.change_points, res.change_points, scenario.n),
            "change_points": list(res.change_points),
        }
        if res.reduction is not None:
            record["q_hat"] = res.reduction.q_hat
            record["significant"] = res.reduction.significant
        out[method] = record
    return out


def run_changepoint_bench(
    scenario: Scenario,
    methods=("ckpca", "raw"),
    reps: int = 50,
    seed: int = 0,
    kernel: KernelSpec | None = None,
    alpha: int | None = None,
    trr: TrrConfig | None = None,
    detector: DetectorConfig | None = None,
    jobs: int = 1,
) -> dict:
    """Run every method on ``reps`` fresh draws of a change-point scenario.

    Returns
    -------
    dict
        ``{method: RunReport}``; all methods see the same data in a replication.
    """
    if scenario.kind not in ("ex1case1", "ex1case2", "ex2", "meanshift", "null"):
        raise BadScenario(f"{scenario.kind!r} is not a change-point scenario")
    unknown = set(methods) - set(CHANGEPOINT_METHODS)
    if unknown:
        raise BadScenario(f"unknown methods {sorted(unknown)}")
    if reps < 1:
        raise EmptyRecords("need at least one replication")
    fn = partial(_changepoint_rep, scenario=scenario, methods=tuple(methods), kernel=kernel,
                 alpha=alpha, trr=trr, detector=detector or DetectorConfig())
    rows = _map(fn, list(enumerate(replication_seeds(seed, reps))), jobs)
    s_true = len(scenario.change_points)
    return {m: aggregate([row[m] for row in rows], s_true) for m in methods}


def _cluster_rep(item, scenario, methods, kernel, config):
    rep, (data_seed, method_seed) = item
    data = generate(replace(scenario, seed=data_seed))
    spec = (kernel or KernelSpec()).resolve(data.X)
    K = gram(data.X, spec) if {"ckpca", "kpca"} & set(methods) else None
    out = {}
    for method in methods:
        extra = {}
        if method == "ckpca":
            res = iterative_subspace_cluster(data.X, replace(config, seed=method_seed), spec, K=K)
            labels = res.partition.labels
            extra = {"outer_iterations": res.outer_iterations, "converged": res.converged,
                     "q_hats": res.q_hats}
        elif method == "kpca":
            Z = kpca_reduce(data.X, spec, K=K).reduced
            labels = kmeans(Z, config.d, config.restarts, config.max_iter, method_seed).labels
        else:
            labels = kmeans(data.X, config.d, config.restarts, config.max_iter, method_seed).labels
        out[method] = {"rep": rep, "data_seed": data_seed, "ri": rand_index(data.labels, labels), **extra}
    return out


def run_cluster_bench(
    scenario: Scenario,
    methods=("ckpca", "raw"),
    reps: int = 50,
    seed: int = 0,
    kernel: KernelSpec | None = None,
    config: IterClusterConfig | None = None,
    jobs: int = 1,
) -> dict:
    """Rand index against the true categories for each clustering method."""
    if scenario.kind != "clustershells":
        raise BadScenario(f"{scenario.kind!r} is not a clustering scenario")
    unknown = set(methods) - set(CLUSTER_METHODS)
    if unknown:
        raise BadScenario(f"unknown methods {sorted(unknown)}")
    if reps < 1:
        raise EmptyRecords("need at least one replication")
    config = config or IterClusterConfig(d=3)
    fn = partial(_cluster_rep, scenario=scenario, methods=tuple(methods), kernel=kernel, config=config)
    rows = _map(fn, list(enumerate(replication_seeds(seed, reps))), jobs)
    out = {}
    for m in methods:
        ri = np.array([row[m]["ri"] for row in rows])
        out[m] = {
            "replications": reps,
            "mean_ri": float(ri.mean()),
            "sd_ri": float(ri.std(ddof=1)) if reps > 1 else 0.0,
            "records": [row[m] for row in rows],
        }
    return out


def trr_hit_rate(scenario: Scenario, reps: int, seed: int = 0, q_true: int = 1,
                 kernel: KernelSpec | None = None, trr: TrrConfig | None = None) -> float:
    """Fraction of replications where TRR on the CKPCA spectrum returns ``q_true``."""
    hits = 0
    for data_seed, _ in replication_seeds(seed, reps):
        data = generate(replace(scenario, seed=data_seed))
        hits += reduce(data.X, "ckpca", kernel=kernel, trr=trr).q_hat == q_true
    return hits / reps


def table_rows(reports: dict) -> list[dict]:
    """One row per method in the layout of the results tables."""
    rows = []
    for method, rep in reports.items():
        if isinstance(rep, dict):
            rows.append({"method": method, "mean_ri": rep["mean_ri"], "sd_ri": rep["sd_ri"]})
        else:
            rows.append({"method": method, "s_hat": rep.mean_s_hat, "rmse": rep.rmse, "ri": rep.mean_ri})
    return rows


def report_dict(reports: dict) -> dict:
    return {m: (r if isinstance(r, dict) else asdict(r)) for m, r in reports.items()}

