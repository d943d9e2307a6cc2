import numpy as np
import pytest

from ckpca.dimsel import TrrConfig
from ckpca.exceptions import DegenerateGram, DimensionMismatch, InvalidConfig
from ckpca.kernels import KernelSpec, gram
from ckpca.operators import changepoint_operators, cluster_operators, global_centering, make_segments
from ckpca.reduction import (
    corrected_kernel_spectrum,
    cpca_delta,
    cumulative_variance_dim,
    kernel_spectrum,
    kpca_reduce,
    reduce,
)
from ckpca.simdata import Scenario, generate


def two_segment_shift(n, p, delta, rng):
    X = rng.standard_normal((n, p))
    X[n // 2:, 0] += delta
    return X


def nonzero(values, scale, rel=1e-9):
    values = np.sort(np.real(values))[::-1]
    return values[np.abs(values) > rel * scale]


def test_linear_kernel_matches_cpca(rng):
    for _ in range(10):
        n, p = int(rng.integers(12, 60)), int(rng.integers(1, 8))
        X = two_segment_shift(n, p, 1.5, rng)
        scheme = make_segments(n)
        pair = changepoint_operators(scheme)
        spec = corrected_kernel_spectrum(gram(X, KernelSpec("linear")), pair)
        oracle = np.linalg.eigvalsh(X.T @ pair.corrected @ X)[::-1]
        scale = np.abs(oracle).max()
        got = nonzero(spec.eigenvalues, scale)
        want = nonzero(oracle, scale)
        np.testing.assert_allclose(got, want, rtol=1e-8, atol=1e-12 * scale)
        np.testing.assert_allclose(cpca_delta(X, scheme), X.T @ pair.corrected @ X, atol=1e-12 * scale)


def test_symmetric_route_matches_direct_eigensolve(rng):
    for family in ("gaussian", "laplace", "exponential"):
        X = rng.standard_normal((40, 3))
        K = gram(X, KernelSpec(family).resolve(X))
        for pair in (changepoint_operators(make_segments(40)), cluster_operators(np.repeat([0, 1, 2, 3], 10))):
            spec = corrected_kernel_spectrum(K, pair)
            direct = np.linalg.eigvals(pair.corrected @ K)
            assert np.abs(direct.imag).max() < 1e-10
            scale = np.abs(direct).max()
            np.testing.assert_allclose(nonzero(spec.eigenvalues, scale, 1e-7),
                                       nonzero(direct, scale, 1e-7), rtol=1e-6)


def test_coefficients_solve_eigen_equation(rng):
    X = rng.standard_normal((30, 2))
    K = gram(X, KernelSpec(bandwidth=1.0))
    pair = changepoint_operators(make_segments(30))
    spec = corrected_kernel_spectrum(K, pair)
    for i in range(3):
        a, lam = spec.coefficients[:, i], spec.eigenvalues[i]
        assert a @ K @ a == pytest.approx(1.0, rel=1e-8)
        Ka = K @ a
        np.testing.assert_allclose(K @ pair.corrected @ Ka, lam * Ka, atol=1e-8)
        assert a[np.argmax(np.abs(a))] > 0


def test_identical_rows_give_zero_spectrum():
    X = np.tile([1.0, -2.0, 0.5], (6, 1))
    K = gram(X, KernelSpec(bandwidth=1.0))
    spec = corrected_kernel_spectrum(K, changepoint_operators(make_segments(6)))
    assert spec.rank == 1
    np.testing.assert_allclose(spec.eigenvalues, 0.0, atol=1e-12)


def test_zero_gram_is_degenerate():
    with pytest.raises(DegenerateGram):
        kernel_spectrum(np.zeros((4, 4)), global_centering(4))
    with pytest.raises(DimensionMismatch):
        corrected_kernel_spectrum(np.eye(5), changepoint_operators(make_segments(4)))


def test_correction_shrinks_null_spectrum():
    below = 0
    for seed in range(100):
        X = np.random.default_rng(seed).standard_normal((200, 5))
        K = gram(X, KernelSpec().resolve(X))
        corrected = corrected_kernel_spectrum(K, changepoint_operators(make_segments(200)))
        plain = kernel_spectrum(K, global_centering(200))
        below += corrected.eigenvalues[0] < plain.eigenvalues[0]
    assert below >= 95


def test_cpca_delta_constant_and_symmetric(rng):
    assert np.array_equal(cpca_delta(np.full((20, 3), 4.2)), np.zeros((3, 3)))
    D = cpca_delta(rng.standard_normal((50, 6)))
    assert np.array_equal(D, D.T)


def test_cpca_delta_scalar(rng):
    y = rng.standard_normal(37)
    scheme = make_segments(37, 5)
    within = np.mean([np.var(y[a:b], ddof=1) for a, b in scheme.bounds])
    assert cpca_delta(y, scheme)[0, 0] == pytest.approx(np.var(y) - within, rel=1e-12)


def test_cpca_direction_mean_shift(rng):
    hits = 0
    for _ in range(20):
        X = two_segment_shift(400, 20, 2.0, rng)
        v = np.linalg.eigh(cpca_delta(X))[1][:, -1]
        hits += abs(v[0]) >= 0.95
    assert hits == 20


def test_delta_convergence_trend():
    """Median Frobenius error to the between-segment covariance shrinks with n."""
    p, delta = 5, 2.0
    target = np.zeros((p, p))
    target[0, 0] = 0.25 * delta ** 2  # c1 * c2 * delta^2 with c1 = c2 = 1/2
    medians = []
    for n in (200, 800, 3200):
        errs = []
        for seed in range(100):
            X = two_segment_shift(n, p, delta, np.random.default_rng(seed))
            errs.append(np.linalg.norm(cpca_delta(X) - target))
        medians.append(np.median(errs))
    assert medians[0] > medians[1] > medians[2]


def test_reduce_cpca_recovers_shift_direction(rng):
    X = two_segment_shift(400, 20, 2.0, rng)
    red = reduce(X, "cpca")
    rho = np.corrcoef(red.reduced[:, 0], X[:, 0])[0, 1]
    assert abs(rho) >= 0.95
    assert red.c_n == pytest.approx(0.2 * np.log(np.log(400)) * np.sqrt(20 / 400))


def test_reduce_identical_rows_falls_back():
    X = np.ones((4, 2))
    red = reduce(X, "ckpca", kernel=KernelSpec(bandwidth=1.0), alpha=2, trr=TrrConfig(c_n=0.01))
    assert red.q_hat == 1
    assert red.flags == ["NoSignificantDirection"]
    assert red.reduced.shape == (4, 1)


def test_reduce_linear_kernel_matches_cpca_coordinates(rng):
    X = two_segment_shift(60, 4, 3.0, rng)
    trr = TrrConfig(c_n=0.05)
    a = reduce(X, "ckpca", kernel=KernelSpec("linear"), trr=trr)
    b = reduce(X, "cpca", trr=trr)
    rho = np.corrcoef(a.reduced[:, 0], b.reduced[:, 0])[0, 1]
    assert abs(rho) >= 1 - 1e-6


def test_reduce_permutation_covariance(rng):
    X = rng.standard_normal((45, 3))
    labels = np.repeat([0, 1, 2], 15)
    X[labels == 1] += 2.0
    perm = rng.permutation(45)
    spec = KernelSpec(bandwidth=1.7)
    trr = TrrConfig(c_n=0.01)
    a = reduce(X, "ckpca-cluster", kernel=spec, labels=labels, trr=trr)
    b = reduce(X[perm], "ckpca-cluster", kernel=spec, labels=labels[perm], trr=trr)
    assert a.q_hat == b.q_hat
    np.testing.assert_allclose(b.reduced, a.reduced[perm], atol=1e-8)


def test_reduce_guards(rng):
    X = rng.standard_normal((20, 2))
    with pytest.raises(InvalidConfig):
        reduce(X, "pca")
    with pytest.raises(InvalidConfig):
        reduce(X, "ckpca-cluster")


def test_ex1case1_selects_one_direction():
    hits = 0
    for seed in range(10):
        red = reduce(generate(Scenario("ex1case1", p=100, seed=seed)).X, "ckpca")
        hits += red.q_hat == 1
    assert hits >= 9


def test_kpca_cumulative_variance(rng):
    assert cumulative_variance_dim([5.0, 3.0, 2.0, 0.0], 0.8) == 2
    assert cumulative_variance_dim([5.0, 3.0, 2.0, -1.0], 1.0) == 3
    assert cumulative_variance_dim([0.0, 0.0], 0.95) == 1
    red = kpca_reduce(rng.standard_normal((30, 3)), q=2)
    assert red.reduced.shape == (30, 2)
