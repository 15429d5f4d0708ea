"""Exact and MCMC samplers for every joint-density family in the library.

Exact samplers are pure functions of (parameters, rng) and bit-reproducible
for a fixed RngStream.  The product-form sampler is an adaptive random-walk
Metropolis chain: the isotropic proposal scale follows a Robbins-Monro
recursion toward a target acceptance rate during burn-in only, and is
frozen afterward so the post-burn-in chain preserves detailed balance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    CauchyRatiosError,
    CovarianceMatrix,
    DecompositionError,
    NotPositiveDefiniteError,
    PairMatrix,
    ProductFormModel,
    RngStream,
    SampleBatch,
)


class BadExponentError(CauchyRatiosError):
    pass


class NonFiniteLogDensityError(CauchyRatiosError):
    pass


class DegenerateChainError(CauchyRatiosError):
    pass


DEFAULT_BURN_IN = 10_000
DEFAULT_THIN = 10


@dataclass(frozen=True)
class McmcConfig:
    step_scale: float = 1.0
    burn_in: int = DEFAULT_BURN_IN
    thin: int = DEFAULT_THIN
    adapt_target: float = 0.3

    def __post_init__(self):
        if self.step_scale <= 0:
            raise CauchyRatiosError("step_scale must be positive")
        if self.burn_in < 1000:
            raise CauchyRatiosError("burn_in must be at least 1000")
        if self.thin < 1:
            raise CauchyRatiosError("thin must be at least 1")
        if not 0.1 <= self.adapt_target <= 0.6:
            raise CauchyRatiosError("adapt_target must lie in [0.1, 0.6]")


@dataclass(frozen=True)
class GaussianMixtureModel:
    """Mixture over covariances: draw N with P(N=n) = alpha_n, then an
    independent (X, Y) pair with both vectors N(0, Sigma_N)."""

    component_weights: np.ndarray
    component_covariances: tuple

    def __post_init__(self):
        a = np.asarray(self.component_weights, dtype=float)
        object.__setattr__(self, "component_weights", a)
        covs = tuple(self.component_covariances)
        object.__setattr__(self, "component_covariances", covs)
        if np.any(a < 0) or abs(a.sum() - 1.0) > 1e-12:
            raise CauchyRatiosError("mixture weights must be nonnegative and sum to 1")
        if len(covs) != a.size or not covs:
            raise CauchyRatiosError("need one covariance per mixture weight")
        m = covs[0].m
        for cov in covs:
            if not isinstance(cov, CovarianceMatrix) or cov.m != m:
                raise CauchyRatiosError("covariances must be CovarianceMatrix of equal size")
            if np.linalg.eigvalsh(cov.entries).min() <= 0:
                raise NotPositiveDefiniteError("mixture covariances must be strictly PD")

    @property
    def m(self) -> int:
        return self.component_covariances[0].m


def _sqrt_factor(cov: CovarianceMatrix) -> np.ndarray:
    """Symmetric square-root factor via eigendecomposition; negative
    eigenvalues from floating-point noise are clamped to zero."""
    try:
        eig, vec = np.linalg.eigh(cov.entries)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(str(exc)) from exc
    eig = np.clip(eig, 0.0, None)
    return vec * np.sqrt(eig)


def sample_mvn(cov: CovarianceMatrix, count: int, rng: RngStream) -> SampleBatch:
    """Centered multivariate normal draws; supports rank-deficient PSD."""
    factor = _sqrt_factor(cov)
    gen = rng.generator()
    z = gen.standard_normal((count, cov.m))
    return SampleBatch(values=z @ factor.T, seed=rng.seed, model_id="mvn")


def sample_independent_pair_gaussian(cov: CovarianceMatrix, count: int,
                                     rng: RngStream) -> SampleBatch:
    """Rows (X, Y) with X, Y independent, each N(0, cov)."""
    factor = _sqrt_factor(cov)
    gen = rng.generator()
    z = gen.standard_normal((count, 2 * cov.m))
    x = z[:, :cov.m] @ factor.T
    y = z[:, cov.m:] @ factor.T
    return SampleBatch(values=np.hstack([x, y]), seed=rng.seed,
                       model_id="independent_pair_gaussian")


def sample_precision_pair_gaussian(pm: PairMatrix, count: int,
                                   rng: RngStream) -> SampleBatch:
    """Centered Gaussian with precision matrix F (covariance F^-1)."""
    eig = np.linalg.eigvalsh(pm.assembled)
    if eig.min() <= 0:
        raise NotPositiveDefiniteError("precision matrix must be strictly PD")
    cov = CovarianceMatrix(np.linalg.inv(pm.assembled))
    batch = sample_mvn(cov, count, rng)
    return SampleBatch(values=batch.values, seed=rng.seed,
                       model_id="precision_pair_gaussian")


def _uniform_angle(gen: np.random.Generator, count: int) -> np.ndarray:
    # pi - U*2pi lands in (-pi, pi]
    return np.pi - gen.random(count) * 2.0 * np.pi


def sample_rotinv_poly(exponent: int, count: int, rng: RngStream) -> SampleBatch:
    """Exact draws from the density on R^2 proportional to (1+x^2+y^2)^-n.

    Polar construction: uniform angle; radius by the inverse CDF
    r(u) = sqrt((1-u)^(-1/(n-1)) - 1) of the radial law r (1+r^2)^-n.
    The density is only normalizable for n >= 2.
    """
    if exponent < 2:
        raise BadExponentError("rotinv_poly needs exponent >= 2 for normalizability")
    gen = rng.generator()
    theta = _uniform_angle(gen, count)
    u = gen.random(count)
    r = np.sqrt((1.0 - u) ** (-1.0 / (exponent - 1)) - 1.0)
    values = np.column_stack([r * np.sin(theta), r * np.cos(theta)])
    return SampleBatch(values=values, seed=rng.seed,
                       model_id=f"rotinv_poly_{exponent}")


def sample_rotinv_exp(count: int, rng: RngStream) -> SampleBatch:
    """Exact draws from the density proportional to (x^2+y^2) exp(-sqrt(x^2+y^2)).

    Radial density is r * r^2 e^-r = r^3 e^-r, i.e. Gamma(shape 4, rate 1).
    """
    gen = rng.generator()
    theta = _uniform_angle(gen, count)
    r = gen.gamma(4.0, 1.0, size=count)
    values = np.column_stack([r * np.sin(theta), r * np.cos(theta)])
    return SampleBatch(values=values, seed=rng.seed, model_id="rotinv_exp")


def sample_gaussian_mixture(model: GaussianMixtureModel, count: int,
                            rng: RngStream) -> SampleBatch:
    """Per draw: pick a component, then an independent (X, Y) pair from it."""
    gen = rng.generator()
    idx = gen.choice(len(model.component_weights), size=count,
                     p=model.component_weights)
    out = np.empty((count, 2 * model.m))
    for k, cov in enumerate(model.component_covariances):
        rows = np.flatnonzero(idx == k)
        if rows.size == 0:
            continue
        factor = _sqrt_factor(cov)
        z = gen.standard_normal((rows.size, 2 * model.m))
        out[rows, :model.m] = z[:, :model.m] @ factor.T
        out[rows, model.m:] = z[:, model.m:] @ factor.T
    return SampleBatch(values=out, seed=rng.seed, model_id="gaussian_mixture")


@dataclass(frozen=True)
class McmcDiagnostics:
    acceptance_rate: float
    final_step_scale: float
    chains: int


def sample_product_form(model: ProductFormModel, count: int, cfg: McmcConfig,
                        rng: RngStream, chains: int = 32):
    """Random-walk Metropolis targeting the model's unnormalized log density.

    Runs `chains` independent chains vectorized together (never parallel
    within a chain).  A single shared proposal scale adapts toward
    cfg.adapt_target during burn-in via Robbins-Monro, then freezes.
    Post-burn-in states are thinned by cfg.thin.

    Returns (SampleBatch, McmcDiagnostics).
    """
    dim = 2 * model.dim
    gen = rng.generator()
    state = 0.1 + 0.05 * gen.standard_normal((chains, dim))
    logp = model.log_density(state)
    if not np.all(np.isfinite(logp)):
        raise NonFiniteLogDensityError("log density not finite at start points")

    scale = cfg.step_scale

    def step(scale_now):
        nonlocal state, logp
        prop = state + scale_now * gen.standard_normal((chains, dim))
        lp = model.log_density(prop)
        with np.errstate(invalid="ignore"):
            accept = np.log(gen.random(chains)) < lp - logp
        state = np.where(accept[:, None], prop, state)
        logp = np.where(accept, lp, logp)
        return accept.mean()

    for t in range(cfg.burn_in):
        rate = step(scale)
        scale *= math.exp((rate - cfg.adapt_target) / (t + 1) ** 0.6)

    per_chain = -(-count // chains)
    kept = np.empty((per_chain, chains, dim))
    accepted = 0.0
    for t in range(per_chain * cfg.thin):
        accepted += step(scale)
        if (t + 1) % cfg.thin == 0:
            kept[(t + 1) // cfg.thin - 1] = state
    rate = accepted / (per_chain * cfg.thin)
    if rate < 0.01:
        raise DegenerateChainError(f"acceptance rate {rate:.4f} after adaptation")

    values = kept.reshape(per_chain * chains, dim)[:count]
    batch = SampleBatch(values=values, seed=rng.seed, model_id=model.model_id)
    return batch, McmcDiagnostics(acceptance_rate=float(rate),
                                  final_step_scale=float(scale), chains=chains)


def export_csv(batch: SampleBatch, path) -> None:
    """Write a batch as CSV with header x1..xm,y1..ym, 17 significant digits."""
    if batch.width % 2 != 0:
        raise CauchyRatiosError("batch width must be 2m for CSV export")
    m = batch.width // 2
    header = ",".join([f"x{j + 1}" for j in range(m)] +
                      [f"y{j + 1}" for j in range(m)])
    np.savetxt(path, batch.values, delimiter=",", header=header,
               comments="", fmt="%.17g")
