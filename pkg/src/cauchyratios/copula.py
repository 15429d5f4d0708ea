"""The bivariate Cauchy copula family.

The joint law of (Z1, Z2) = (X1/Y1, X2/Y2), for X, Y independent bivariate
normals with unit variances and correlation rho, is a geometric mixture
(1-rho^2) sum_n rho^(2n) f_n(z1, z2) of copula components

    f_n(z1, z2) = (4^n / C(2n, n)) (1/pi^2)
                  (1 + z1 z2)^(2n) / ((1+z1^2)(1+z2^2))^(n+1),

each of which has standard Cauchy marginals.  The mixture also has the
closed form evaluated by `closed_form_pdf`; agreement between the two
routes is one of the library's acceptance checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .core import (
    CauchyRatiosError,
    CovarianceMatrix,
    PairMatrix,
    ProductFormModel,
    RngStream,
    SampleBatch,
    ExpNegHalf,
    PowerEven,
)
from .samplers import McmcConfig, sample_independent_pair_gaussian, sample_product_form
from .transforms import coordinate_ratios


class NoConvergenceError(CauchyRatiosError):
    pass


class DomainError(CauchyRatiosError):
    pass


@dataclass(frozen=True)
class CopulaParams:
    rho: float
    series_tol: float = 1e-12
    max_terms: int = 10_000

    def __post_init__(self):
        if not abs(self.rho) < 1:
            raise CauchyRatiosError("rho must lie in (-1, 1)")
        if self.series_tol <= 0:
            raise CauchyRatiosError("series_tol must be positive")


def log_component_pdf(n: int, z1: float, z2: float) -> float:
    """log f_n(z1, z2); -inf where the component vanishes."""
    if n < 0:
        raise CauchyRatiosError("component index must be nonnegative")
    log_coef = 2 * n * math.log(2.0) - (gammaln(2 * n + 1) - 2 * gammaln(n + 1))
    cross = 1.0 + z1 * z2
    if cross == 0.0 and n > 0:
        return -math.inf
    log_num = 2 * n * math.log(abs(cross)) if n > 0 else 0.0
    log_den = (n + 1) * (math.log1p(z1 * z1) + math.log1p(z2 * z2))
    return log_coef - 2.0 * math.log(math.pi) + log_num - log_den


def component_pdf(n: int, z1: float, z2: float) -> float:
    """Mixture component density f_n; computed in log space so large n
    neither overflows (4^n) nor underflows prematurely."""
    if math.isinf(z1) or math.isinf(z2):
        return 0.0
    return math.exp(log_component_pdf(n, z1, z2))


def component_pdf_array(n: int, z1, z2) -> np.ndarray:
    """Vectorized f_n over numpy arrays (log-space, broadcasting inputs)."""
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    log_coef = 2 * n * math.log(2.0) - (gammaln(2 * n + 1) - 2 * gammaln(n + 1))
    cross = 1.0 + z1 * z2
    with np.errstate(divide="ignore"):
        log_num = 2 * n * np.log(np.abs(cross)) if n > 0 else 0.0
    log_den = (n + 1) * (np.log1p(z1 * z1) + np.log1p(z2 * z2))
    out = np.exp(log_coef - 2.0 * math.log(math.pi) + log_num - log_den)
    return np.where(np.isinf(z1) | np.isinf(z2), 0.0, out)


def mixture_weight(rho: float, n: int) -> float:
    """Geometric mixture weight (1 - rho^2) rho^(2n)."""
    if not abs(rho) < 1:
        raise CauchyRatiosError("rho must lie in (-1, 1)")
    if n < 0:
        raise CauchyRatiosError("index must be nonnegative")
    return (1.0 - rho * rho) * rho ** (2 * n)


def series_pdf(params: CopulaParams, z1: float, z2: float) -> float:
    """Mixture density by truncated series with a rigorous tail bound.

    Consecutive terms satisfy t_{N+1} / t_N <= q_N = rho^2 * 2(N+1)/(2N+1)
    (monotone decreasing, limit rho^2 < 1), so once q_N < 1 the tail after
    t_N is at most t_N * q_N / (1 - q_N); truncate when that bound drops
    below series_tol.
    """
    rho2 = params.rho * params.rho
    total = 0.0
    for n in range(params.max_terms):
        term = mixture_weight(params.rho, n) * component_pdf(n, z1, z2)
        total += term
        q = rho2 * 2.0 * (n + 1) / (2.0 * n + 1)
        if q < 1.0 and term * q / (1.0 - q) < params.series_tol:
            return total
    raise NoConvergenceError(
        f"series did not converge within {params.max_terms} terms")


_ASIN_ULPS = 4 * np.spacing(1.0)


def closed_form_pdf(rho: float, z1: float, z2: float) -> float:
    """Closed-form mixture density.

    With D = (1+z1^2)(1+z2^2) - rho^2 (1+z1 z2)^2:
        (1-rho^2)/pi^2 * [ 1/D + rho (1+z1 z2)
                           asin(rho (1+z1 z2) / sqrt((1+z1^2)(1+z2^2)))
                           / D^(3/2) ].
    Cauchy-Schwarz makes D > 0 and the asin argument at most 1 in exact
    arithmetic; excursions beyond 4 ulps signal a caller bug and raise.
    """
    if not abs(rho) < 1:
        raise CauchyRatiosError("rho must lie in (-1, 1)")
    if math.isinf(z1) or math.isinf(z2):
        return 0.0
    p1 = 1.0 + z1 * z1
    p2 = 1.0 + z2 * z2
    cross = 1.0 + z1 * z2
    d = p1 * p2 - rho * rho * cross * cross
    if d <= 0:
        raise DomainError(f"nonpositive discriminant D = {d!r}")
    arg = rho * cross / math.sqrt(p1 * p2)
    if abs(arg) > 1.0:
        if abs(arg) - 1.0 <= _ASIN_ULPS:
            arg = math.copysign(1.0, arg)
        else:
            raise DomainError(f"asin argument {arg!r} outside [-1, 1]")
    coef = (1.0 - rho * rho) / (math.pi * math.pi)
    return coef * (1.0 / d + rho * cross * math.asin(arg) / d ** 1.5)


def radial_moment_integral(n: int, c: float, z: float) -> float:
    """Closed form of the integral of |v| v^n exp(-v^2 (1+z^2) / (2c)) over R.

    Equals 2^(n/2+1) c^(n/2+1) Gamma(n/2+1) / (1+z^2)^(n/2+1) for even n,
    and 0 for odd n (odd integrand).
    """
    if n < 0:
        raise CauchyRatiosError("moment order must be nonnegative")
    if c <= 0:
        raise CauchyRatiosError("scale c must be positive")
    if n % 2 == 1:
        return 0.0
    half = n / 2.0 + 1.0
    return 2.0 ** half * c ** half * math.gamma(half) / (1.0 + z * z) ** half


def sample_rho_copula(params: CopulaParams, count: int,
                      rng: RngStream) -> SampleBatch:
    """Exact draws of (Z1, Z2): ratios of independent bivariate normals
    whose two coordinates have unit variance and correlation rho."""
    cov = CovarianceMatrix(np.array([[1.0, params.rho], [params.rho, 1.0]]))
    pairs = sample_independent_pair_gaussian(cov, count, rng)
    z = coordinate_ratios(pairs)
    return SampleBatch(values=z, seed=rng.seed,
                       model_id=f"rho_copula_{params.rho}")


def component_model(n: int) -> ProductFormModel:
    """Product-form model whose coordinate ratios follow f_n.

    The 4-d density is (e1 e2 + f1 f2)^(2n) exp(-|.|^2 / 2); the quadratic
    form of the pair matrix with A = [[0,1],[1,0]] is 2(e1 e2 + f1 f2), and
    even powers absorb the factor of 2 into the normalizing constant.
    """
    identity = PairMatrix(np.eye(2), np.zeros((2, 2)))
    factors = [(identity, ExpNegHalf())]
    if n > 0:
        swap = PairMatrix(np.array([[0.0, 1.0], [1.0, 0.0]]), np.zeros((2, 2)))
        factors.append((swap, PowerEven(n)))
    return ProductFormModel(dim=2, factors=tuple(factors), integrable=True,
                            model_id=f"copula_component_{n}")


def sample_component(n: int, count: int, cfg: McmcConfig,
                     rng: RngStream) -> SampleBatch:
    """MCMC draws of (C1, C2) from the n-th copula component, via the
    ratios (E1/F1, E2/F2) of the product-form density."""
    batch, _diag = sample_product_form(component_model(n), count, cfg, rng)
    z = coordinate_ratios(batch)
    return SampleBatch(values=z, seed=rng.seed,
                       model_id=f"copula_component_ratio_{n}")


def density_grid(rho: float, grid: np.ndarray,
                 series_tol: float = 1e-12) -> np.ndarray:
    """(z1, z2, series_value, closed_form_value) rows over grid x grid."""
    params = CopulaParams(rho=rho, series_tol=series_tol)
    rows = []
    for z1 in grid:
        for z2 in grid:
            rows.append((z1, z2, series_pdf(params, z1, z2),
                         closed_form_pdf(rho, z1, z2)))
    return np.array(rows)
