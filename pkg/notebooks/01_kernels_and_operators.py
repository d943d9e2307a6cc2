"""
Gram matrices and centering operators
=====================================

The corrected spectrum compares two scatter estimates of the same data: the
global one and a pooled within-block one. Both are quadratic forms in an
``n x n`` centering matrix, which this script builds and checks by hand.
"""

import numpy as np

from ckpca.kernels import KernelSpec, gram, select_bandwidth
from ckpca.operators import changepoint_operators, cluster_operators, make_segments

rng = np.random.default_rng(0)
X = rng.standard_normal((12, 3))

# bandwidth rule: h = sqrt(m * p * mean column variance)
h = select_bandwidth(X, m=0.8)
print(f"bandwidth h = {h:.4f}")

K = gram(X, KernelSpec("gaussian", bandwidth=h))
print("Gram diagonal:", np.diag(K)[:4], "... min eigenvalue", np.linalg.eigvalsh(K).min().round(6))

###############################################################################
# Segments of length floor(sqrt(n)); the last one takes the remainder.

scheme = make_segments(12)
print("segments:", scheme.bounds)

pair = changepoint_operators(scheme)
y = rng.standard_normal(12)
within = np.mean([np.var(y[a:b], ddof=1) for a, b in scheme.bounds])
print(f"y'Ly = {y @ pair.global_ @ y:.6f}   total scatter / n = {np.var(y):.6f}")
print(f"y'Uy = {y @ pair.within @ y:.6f}   mean within-segment variance = {within:.6f}")

###############################################################################
# The clustering version swaps time segments for categories.

labels = np.array([0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2, 2])
S = cluster_operators(labels).within
print("S annihilates constants:", np.allclose(S @ np.ones(12), 0))
