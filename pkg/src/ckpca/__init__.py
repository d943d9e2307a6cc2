"""Corrected (kernel) principal component analysis for change points and clustering."""

__version__ = "0.1.0"

from .cluster import (
    IterClusterConfig,
    Partition,
    iterative_subspace_cluster,
    kmeans,
    rand_index,
    segmentation_rand_index,
)
from .detect import DetectorConfig, detect_pipeline, divisive_segment, energy_statistic
from .dimsel import TrrConfig, default_ridge, trr_select
from .kernels import KernelSpec, gram, kernel_eval, select_bandwidth
from .operators import changepoint_operators, cluster_operators, make_segments
from .reduction import corrected_kernel_spectrum, cpca_delta, kernel_spectrum, kpca_reduce, reduce
from .simdata import Scenario, aggregate, generate, inject_outliers
