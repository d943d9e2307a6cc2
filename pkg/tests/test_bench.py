import json

import pytest

from ckpca.bench import (
    replication_seeds,
    report_dict,
    run_changepoint_bench,
    run_cluster_bench,
    table_rows,
    trr_hit_rate,
)
from ckpca.cluster import IterClusterConfig
from ckpca.detect import DetectorConfig
from ckpca.exceptions import BadScenario, EmptyRecords
from ckpca.simdata import Scenario

DET = DetectorConfig(min_size=20, n_permutations=19)
SMALL = Scenario("meanshift", p=4, n=160, delta=3.0)


def test_replication_seeds_stable():
    a = replication_seeds(7, 5)
    assert a == replication_seeds(7, 5)
    assert a[:3] == replication_seeds(7, 3)
    assert len({s for s, _ in a}) == 5


def test_changepoint_bench_serial_equals_parallel():
    serial = run_changepoint_bench(SMALL, ("cpca", "raw"), reps=4, seed=3, detector=DET)
    parallel = run_changepoint_bench(SMALL, ("cpca", "raw"), reps=4, seed=3, detector=DET, jobs=2)
    assert json.dumps(report_dict(serial), sort_keys=True) == json.dumps(report_dict(parallel), sort_keys=True)
    rep = serial["cpca"]
    assert rep.replications == 4 and 0 <= rep.mean_ri <= 1
    assert all(r["ri"] <= 1 for r in rep.records)
    rows = table_rows(serial)
    assert [r["method"] for r in rows] == ["cpca", "raw"]
    assert set(rows[0]) == {"method", "s_hat", "rmse", "ri"}


def test_bench_guards():
    with pytest.raises(BadScenario):
        run_changepoint_bench(Scenario("clustershells", n=60, p=3), reps=1)
    with pytest.raises(BadScenario):
        run_changepoint_bench(SMALL, ("lda",), reps=1)
    with pytest.raises(EmptyRecords):
        run_changepoint_bench(SMALL, reps=0)
    with pytest.raises(BadScenario):
        run_cluster_bench(SMALL, reps=1)


def test_cluster_bench():
    sc = Scenario("clustershells", p=10, n=90)
    out = run_cluster_bench(sc, ("ckpca", "kpca", "raw"), reps=2, seed=1, config=IterClusterConfig(d=3, restarts=3))
    assert set(out) == {"ckpca", "kpca", "raw"}
    assert out["ckpca"]["mean_ri"] >= 0.95
    assert {"method", "mean_ri", "sd_ri"} == set(table_rows(out)[0])


def test_trr_hit_rate():
    assert trr_hit_rate(Scenario("ex1case1", p=10, n=200), reps=3) == 1.0
