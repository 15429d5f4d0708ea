"""Monte Carlo verification of Cauchy laws for weighted ratios of
structured random vectors, the inverse chi-squared pivot, and the induced
family of bivariate Cauchy copulas."""

from .core import (
    CauchyRatiosError,
    CovarianceMatrix,
    ExpNegHalf,
    ExpNegSqrt,
    InversePower,
    PairMatrix,
    PowerEven,
    ProductFormModel,
    RngStream,
    SampleBatch,
    WeightVector,
    assemble_pair_matrix,
    build_example_precision,
    validate_weights,
)
from .gof import GofReport, cauchy_cdf, cauchy_pdf, cauchy_quantile, ks_test
from .harness import ExperimentSpec, RunReport, run_all, run_experiment
from .transforms import (
    polar_decompose,
    angle_diff_map,
    weighted_tan,
    ratio_statistic,
    pivot_statistic,
)

__version__ = "0.1.0"
