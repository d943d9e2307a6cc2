import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ckpca.cluster import (
    IterClusterConfig,
    Partition,
    iterative_subspace_cluster,
    kmeans,
    merge_small_categories,
    rand_index,
    segment_labels,
    segmentation_rand_index,
)
from ckpca.exceptions import CategoryTooSmall, InvalidConfig, LengthMismatch, TooFewPoints
from ckpca.kernels import KernelSpec
from ckpca.simdata import Scenario, generate


def brute_rand(a, b):
    pairs = list(itertools.combinations(range(len(a)), 2))
    agree = sum((a[i] == a[j]) == (b[i] == b[j]) for i, j in pairs)
    return agree / len(pairs)


def test_partition_relabels_by_first_appearance():
    p = Partition.from_labels(["b", "b", "a", "c", "a"])
    assert p.labels.tolist() == [0, 0, 1, 2, 1]
    assert (p.n, p.d, p.sizes.tolist()) == (5, 3, [2, 2, 1])


def test_rand_index_examples():
    assert rand_index([1, 1, 2, 2], [1, 1, 2, 2]) == 1.0
    assert rand_index([1, 1, 2, 2], [1, 2, 1, 2]) == pytest.approx(1 / 3)
    assert rand_index([0, 0, 0, 0], [0, 1, 2, 3]) == 0.0
    with pytest.raises(LengthMismatch):
        rand_index([0, 1], [0, 1, 1])


labelings = st.integers(2, 14).flatmap(
    lambda n: st.tuples(st.lists(st.integers(0, 3), min_size=n, max_size=n),
                        st.lists(st.integers(0, 3), min_size=n, max_size=n)))


@settings(max_examples=150, deadline=None)
@given(labelings, st.permutations(range(4)))
def test_rand_index_properties(pair, relabel):
    a, b = pair
    ri = rand_index(a, b)
    assert ri == pytest.approx(brute_rand(a, b), abs=1e-12)
    assert ri == rand_index(b, a)
    assert rand_index([relabel[v] for v in a], b) == pytest.approx(ri, abs=1e-12)
    same = Partition.from_labels(a).labels.tolist() == Partition.from_labels(b).labels.tolist()
    assert (ri == 1.0) == same


def test_segmentation_rand_index():
    cps = (100, 200, 300, 400, 500, 600, 700)
    assert segmentation_rand_index(cps, cps, 800) == 1.0
    floor = 8 * math.comb(100, 2) / math.comb(800, 2)
    assert segmentation_rand_index(cps, [], 800) == pytest.approx(floor, abs=1e-12)
    assert round(floor, 3) == 0.124
    # moving point 5 across the boundary breaks 5 + 4 of the 45 pairs
    oracle = brute_rand(segment_labels([5], 10), segment_labels([6], 10))
    assert oracle == pytest.approx(36 / 45)
    assert segmentation_rand_index([5], [6], 10) == pytest.approx(oracle, abs=1e-12)
    assert segment_labels([2, 4], 6).tolist() == [0, 0, 1, 1, 2, 2]
    with pytest.raises(InvalidConfig):
        segment_labels([0], 5)


def test_kmeans_examples(rng):
    Z = rng.standard_normal((12, 2))
    assert kmeans(Z, 1).d == 1
    assert sorted(kmeans(Z, 12).sizes.tolist()) == [1] * 12
    blobs = np.concatenate([rng.normal(0, 1, 6), rng.normal(100, 1, 6)])
    truth = [0] * 6 + [1] * 6
    assert rand_index(kmeans(blobs, 2), truth) == 1.0
    with pytest.raises(TooFewPoints):
        kmeans(Z[:2], 3)


def test_kmeans_is_seeded(rng):
    Z = rng.standard_normal((60, 3))
    assert np.array_equal(kmeans(Z, 4, seed=9).labels, kmeans(Z, 4, seed=9).labels)


def test_merge_small_categories():
    Z = np.array([[0.0], [0.1], [5.0], [5.1], [4.8]])
    out = merge_small_categories([0, 0, 1, 1, 2], Z)
    assert out.tolist() == [0, 0, 1, 1, 1]
    with pytest.raises(CategoryTooSmall):
        merge_small_categories([0, 0, 1], Z[:3])


def test_config_guards():
    with pytest.raises(InvalidConfig):
        IterClusterConfig(d=1)
    with pytest.raises(InvalidConfig):
        IterClusterConfig(ri_stop=0)
    with pytest.raises(InvalidConfig):
        IterClusterConfig(max_outer_iterations=0)


def test_point_masses_converge_at_once():
    X = np.repeat(np.array([[0.0, 0.0], [3.0, 0.0], [0.0, 3.0]]), 10, axis=0)
    res = iterative_subspace_cluster(X, IterClusterConfig(d=3), KernelSpec(bandwidth=1.0))
    assert res.outer_iterations == 1 and res.converged
    assert rand_index(res.partition, np.repeat([0, 1, 2], 10)) == 1.0


def test_shells_recovered_and_terminates():
    data = generate(Scenario("clustershells", p=20, n=150, seed=4))
    config = IterClusterConfig(d=3, max_outer_iterations=5)
    res = iterative_subspace_cluster(data.X, config)
    assert rand_index(res.partition, data.labels) >= 0.99
    assert 1 <= res.outer_iterations <= config.max_outer_iterations
    assert len(res.q_hats) == len(res.ri_trace) == res.outer_iterations
    assert res.converged == (res.ri_trace[-1] > config.ri_stop or res.ri_trace[-1] == 1.0)


def test_row_permutation_invariance(rng):
    data = generate(Scenario("clustershells", p=20, n=150, seed=8))
    perm = rng.permutation(150)
    a = iterative_subspace_cluster(data.X, IterClusterConfig(d=3, seed=1))
    b = iterative_subspace_cluster(data.X[perm], IterClusterConfig(d=3, seed=1))
    assert rand_index(a.partition.labels[perm], b.partition) == 1.0


def test_iteration_cap_reported():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((60, 4))  # no structure, partitions wander
    res = iterative_subspace_cluster(X, IterClusterConfig(d=3, max_outer_iterations=2, ri_stop=1.0))
    assert res.outer_iterations <= 2
    if not res.converged:
        assert res.outer_iterations == 2
