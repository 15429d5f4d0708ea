"""Reference distributions and goodness-of-fit instruments.

All distributional claims in the library are verified through these: the
standard Cauchy pdf/cdf/quantile, the inverse chi-squared (1 df) CDF, a
one-sample Kolmogorov-Smirnov test with asymptotic p-values, and a
quantile-binned chi-squared independence test.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict

import numpy as np
from scipy.special import erfc, gammaincc

from .core import CauchyRatiosError


class EmptySampleError(CauchyRatiosError):
    pass


class TooFewSamplesError(CauchyRatiosError):
    pass


class OutOfRangeError(CauchyRatiosError):
    pass


@dataclass(frozen=True)
class GofReport:
    """Outcome of one statistical test against a pre-registered threshold."""

    test_name: str
    statistic: float
    p_value: float
    sample_size: int
    threshold: float
    passed: bool

    def __post_init__(self):
        # coerce numpy scalars so reports serialize cleanly
        object.__setattr__(self, "statistic", float(self.statistic))
        object.__setattr__(self, "p_value", float(self.p_value))
        object.__setattr__(self, "sample_size", int(self.sample_size))
        object.__setattr__(self, "threshold", float(self.threshold))
        object.__setattr__(self, "passed", bool(self.passed))
        if self.passed != (self.p_value > self.threshold):
            raise CauchyRatiosError("passed flag inconsistent with p-value")

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def tolerance_report(name: str, deviation: float, tolerance: float,
                     sample_size: int = 0, threshold: float = 0.5) -> GofReport:
    """Wrap a deterministic tolerance check in the GofReport shape.

    p_value is 1.0 when |deviation| <= tolerance and 0.0 otherwise, so the
    passed <=> p > threshold invariant carries over.
    """
    ok = abs(deviation) <= tolerance
    return GofReport(test_name=name, statistic=float(deviation),
                     p_value=1.0 if ok else 0.0, sample_size=sample_size,
                     threshold=threshold, passed=ok)


def cauchy_pdf(z):
    """Standard Cauchy density (1/pi) / (1 + z^2)."""
    z = np.asarray(z, dtype=float)
    return (1.0 / np.pi) / (1.0 + z * z)


def cauchy_cdf(z):
    """Standard Cauchy CDF 1/2 + atan(z)/pi; handles +-inf inputs."""
    z = np.asarray(z, dtype=float)
    return 0.5 + np.arctan(z) / np.pi


def cauchy_quantile(p):
    """Inverse of cauchy_cdf on (0, 1): tan(pi (p - 1/2))."""
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0) or np.any(p >= 1):
        raise OutOfRangeError("quantile argument must lie in (0, 1)")
    return np.tan(np.pi * (p - 0.5))


def inv_chisq1_cdf(t):
    """CDF of 1/W for W ~ chi-squared(1): P(1/W <= t) = 2(1 - Phi(1/sqrt(t)))."""
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape)
    pos = t > 0
    with np.errstate(divide="ignore"):
        out[pos] = erfc(1.0 / np.sqrt(2.0 * t[pos]))
    return out if out.ndim else float(out)


def kolmogorov_sf(lam: float, term_tol: float = 1e-16) -> float:
    """Asymptotic Kolmogorov tail Q(lam) = 2 sum_k (-1)^(k-1) exp(-2 k^2 lam^2)."""
    if lam <= 0:
        return 1.0
    total = 0.0
    sign = 1.0
    for k in range(1, 1001):
        term = math.exp(-2.0 * k * k * lam * lam)
        total += sign * term
        if term < term_tol:
            break
        sign = -sign
    return min(1.0, max(0.0, 2.0 * total))


def ks_test(samples, cdf, test_name: str = "ks",
            threshold: float = 0.001) -> GofReport:
    """One-sample two-sided KS test with asymptotic p-value.

    NaN entries are excluded (their count reduces sample_size); +-inf is
    kept and evaluated through the reference CDF's limits.
    """
    s = np.asarray(samples, dtype=float).ravel()
    s = s[~np.isnan(s)]
    n = s.size
    if n == 0:
        raise EmptySampleError("no non-NaN samples")
    s = np.sort(s)
    f = np.asarray(cdf(s), dtype=float)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - f)
    d_minus = np.max(f - (i - 1) / n)
    d = max(d_plus, d_minus)
    p = kolmogorov_sf(math.sqrt(n) * d)
    return GofReport(test_name=test_name, statistic=float(d), p_value=p,
                     sample_size=n, threshold=threshold, passed=p > threshold)


def _quantile_bin(values: np.ndarray, bins: int) -> np.ndarray:
    edges = np.quantile(values, np.linspace(0, 1, bins + 1)[1:-1])
    return np.searchsorted(edges, values, side="left")


def chi2_independence_test(x, y, bins: int = 4, test_name: str = "chi2-indep",
                           threshold: float = 0.001) -> GofReport:
    """Pearson chi-squared independence test on quantile-binned margins.

    Each margin is cut at its own empirical quantiles into `bins` cells;
    the p-value uses (bins-1)^2 degrees of freedom via the regularized
    incomplete gamma function.
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.size != y.size:
        raise CauchyRatiosError("x and y must have equal length")
    n = x.size
    if n < 10 * bins * bins:
        raise TooFewSamplesError(f"need at least {10 * bins * bins} samples")
    bx = _quantile_bin(x, bins)
    by = _quantile_bin(y, bins)
    table = np.zeros((bins, bins))
    np.add.at(table, (bx, by), 1.0)
    row = table.sum(axis=1, keepdims=True)
    col = table.sum(axis=0, keepdims=True)
    expected = row * col / n
    with np.errstate(divide="ignore", invalid="ignore"):
        contrib = np.where(expected > 0, (table - expected) ** 2 / expected, 0.0)
    stat = float(contrib.sum())
    df = (bins - 1) ** 2
    p = float(gammaincc(df / 2.0, stat / 2.0))
    return GofReport(test_name=test_name, statistic=stat, p_value=p,
                     sample_size=n, threshold=threshold, passed=p > threshold)
