"""Polar decomposition, the wrapped angle-difference map, and the ratio and
pivot statistics.

The convention throughout: a pair (x, y) is written (r sin(theta),
r cos(theta)), i.e. the sine carries the numerator coordinate.  Angles live
in the half-open interval (-pi, pi].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CauchyRatiosError, SampleBatch, WeightVector


@dataclass(frozen=True)
class PolarBatch:
    """Per-coordinate radii and angles of a batch of (x, y) pairs."""

    radii: np.ndarray
    angles: np.ndarray

    def __post_init__(self):
        if np.any(self.radii < 0):
            raise CauchyRatiosError("radii must be nonnegative")
        if np.any(self.angles <= -np.pi) or np.any(self.angles > np.pi):
            raise CauchyRatiosError("angles must lie in (-pi, pi]")


def polar_decompose(batch: SampleBatch) -> PolarBatch:
    """Split an n x 2m batch into radii and angles, coordinate by coordinate.

    r_j = sqrt(x_j^2 + y_j^2); theta_j has sin(theta_j) = x_j / r_j and
    cos(theta_j) = y_j / r_j.  r_j = 0 maps to theta_j = 0 by convention.
    """
    if batch.width % 2 != 0:
        raise CauchyRatiosError("batch width must be 2m")
    m = batch.width // 2
    x = batch.values[:, :m]
    y = batch.values[:, m:]
    radii = np.hypot(x, y)
    angles = np.arctan2(x, y)  # (-pi, pi], zero at r = 0
    return PolarBatch(radii=radii, angles=angles)


def _wrap_angle(t: np.ndarray) -> np.ndarray:
    """Wrap to (-pi, pi]: values <= -pi shift up, values > pi shift down."""
    t = np.asarray(t, dtype=float)
    return t + 2 * np.pi * ((t <= -np.pi).astype(float) - (t > np.pi).astype(float))


def angle_diff_map(angles: np.ndarray):
    """Map (theta_1, ..., theta_m) to (theta_1, u) with u_1 = 0.

    u_j is theta_j - theta_1 wrapped back into (-pi, pi].  Accepts a single
    row of m angles or an n x m matrix; returns (theta_1, u) with matching
    leading shape.
    """
    th = np.asarray(angles, dtype=float)
    squeeze = th.ndim == 1
    th = np.atleast_2d(th)
    if np.any(th <= -np.pi) or np.any(th > np.pi):
        raise CauchyRatiosError("input angles must lie in (-pi, pi]")
    theta1 = th[:, 0]
    u = _wrap_angle(th - theta1[:, None])
    u[:, 0] = 0.0
    if squeeze:
        return theta1[0], u[0]
    return theta1, u


def angle_diff_inverse(theta1, u) -> np.ndarray:
    """Recover (theta_1, ..., theta_m) from (theta_1, u); exact inverse."""
    theta1 = np.asarray(theta1, dtype=float)
    u = np.asarray(u, dtype=float)
    return _wrap_angle(u + theta1[..., None])


def weighted_tan(theta1, u, w: WeightVector):
    """sum_j w_j tan(theta1 + u_j); exact poles propagate as +-infinity.

    An angle whose cosine is exactly zero in float (or which equals the
    float +-pi/2 exactly) contributes inf with the sign of its sine.
    """
    theta1 = np.asarray(theta1, dtype=float)
    u = np.asarray(u, dtype=float)
    if u.shape[-1] != w.m:
        raise CauchyRatiosError("offsets and weights must have equal length")
    a = theta1[..., None] + u
    t = np.tan(a)
    pole = (np.cos(a) == 0.0) | (np.abs(a) == np.pi / 2)
    if np.any(pole):
        t = np.where(pole, np.copysign(np.inf, np.sin(a)), t)
    with np.errstate(invalid="ignore"):
        return np.sum(np.asarray(w.weights) * t, axis=-1)


@dataclass(frozen=True)
class RatioResult:
    """Ratio-statistic values plus a mask flagging 0/0 rows."""

    values: np.ndarray
    nan_mask: np.ndarray

    @property
    def flagged_row_count(self) -> int:
        return int(self.nan_mask.sum())


def ratio_statistic(batch: SampleBatch, w: WeightVector) -> RatioResult:
    """Per row, sum_j w_j x_j / y_j (IEEE semantics: y=0 gives +-inf,
    0/0 gives NaN and flags the row)."""
    if batch.width != 2 * w.m:
        raise CauchyRatiosError(
            f"batch width {batch.width} != 2 * len(weights) = {2 * w.m}")
    m = w.m
    x = batch.values[:, :m]
    y = batch.values[:, m:]
    with np.errstate(divide="ignore", invalid="ignore"):
        z = (w.weights * (x / y)).sum(axis=1)
    return RatioResult(values=z, nan_mask=np.isnan(z))


def coordinate_ratios(batch: SampleBatch) -> np.ndarray:
    """Per-coordinate ratios x_j / y_j as an n x m matrix."""
    if batch.width % 2 != 0:
        raise CauchyRatiosError("batch width must be 2m")
    m = batch.width // 2
    with np.errstate(divide="ignore", invalid="ignore"):
        return batch.values[:, :m] / batch.values[:, m:]


def pivot_statistic(x_batch: SampleBatch, w: WeightVector, cov) -> np.ndarray:
    """Per row, v' Sigma v with v_j = w_j / x_j."""
    sigma = np.asarray(getattr(cov, "entries", cov), dtype=float)
    if x_batch.width != w.m or sigma.shape != (w.m, w.m):
        raise CauchyRatiosError("batch, weights and covariance widths must agree")
    with np.errstate(divide="ignore", invalid="ignore"):
        v = w.weights / x_batch.values
        return np.einsum("ni,ij,nj->n", v, sigma, v)
