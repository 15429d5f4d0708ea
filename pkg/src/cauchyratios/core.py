"""Domain types, validation, and the deterministic RNG-stream contract.

Everything here is immutable after construction and safe to share across
threads; RngStream is the only object that hands out mutable state (a numpy
Generator), and each unit of parallel work must own its own stream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SYM_TOL = 1e-12
PSD_REL_TOL = 1e-10


class CauchyRatiosError(Exception):
    """Base class for all library errors."""


class NegativeWeightError(CauchyRatiosError):
    pass


class BadSumError(CauchyRatiosError):
    pass


class NotSymmetricError(CauchyRatiosError):
    pass


class NotAntisymmetricError(CauchyRatiosError):
    pass


class NotPositiveDefiniteError(CauchyRatiosError):
    pass


class BadCovarianceError(CauchyRatiosError):
    pass


class IntegrabilityNotAssertedError(CauchyRatiosError):
    pass


class DecompositionError(CauchyRatiosError):
    pass


@dataclass(frozen=True)
class WeightVector:
    """Convex-combination weights: nonnegative, summing to one."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", w)
        if w.ndim != 1 or w.size < 1:
            raise CauchyRatiosError("weights must be a nonempty 1-D sequence")
        if np.any(w < 0):
            raise NegativeWeightError(f"negative weight in {w}")
        if abs(w.sum() - 1.0) > SYM_TOL:
            raise BadSumError(f"weights sum to {w.sum()!r}, not 1")

    @property
    def m(self) -> int:
        return self.weights.size


def validate_weights(raw) -> WeightVector:
    return WeightVector(np.asarray(raw, dtype=float))


@dataclass(frozen=True)
class PairMatrix:
    """Block matrix [[A, B], [-B, A]] with A symmetric and B antisymmetric.

    The assembled 2m x 2m matrix is symmetric; its quadratic form on a
    stacked pair (x, y) is x'Ax + y'Ay + 2 x'By.
    """

    a_block: np.ndarray
    b_block: np.ndarray
    assembled: np.ndarray = field(init=False)

    def __post_init__(self):
        a = np.asarray(self.a_block, dtype=float)
        b = np.asarray(self.b_block, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise CauchyRatiosError("a_block must be square")
        if b.shape != a.shape:
            raise CauchyRatiosError("b_block must match a_block's shape")
        if np.max(np.abs(a - a.T)) > SYM_TOL:
            raise NotSymmetricError("a_block is not symmetric")
        if np.max(np.abs(b + b.T)) > SYM_TOL:
            raise NotAntisymmetricError("b_block is not antisymmetric")
        object.__setattr__(self, "a_block", a)
        object.__setattr__(self, "b_block", b)
        assembled = np.block([[a, b], [-b, a]])
        if np.max(np.abs(assembled - assembled.T)) > SYM_TOL:
            raise NotSymmetricError("assembled matrix is not symmetric")
        object.__setattr__(self, "assembled", assembled)

    @property
    def m(self) -> int:
        return self.a_block.shape[0]

    def quadratic_form(self, points: np.ndarray) -> np.ndarray:
        """(x', y') F (x, y) for each row of `points` (shape (..., 2m))."""
        pts = np.asarray(points, dtype=float)
        return np.einsum("...i,ij,...j->...", pts, self.assembled, pts)

    def is_positive_definite(self) -> bool:
        return bool(np.linalg.eigvalsh(self.assembled).min() > 0)


def assemble_pair_matrix(a_block, b_block) -> PairMatrix:
    return PairMatrix(np.asarray(a_block, dtype=float),
                      np.asarray(b_block, dtype=float))


def build_example_precision(a: float, b: float, c: float, d: float,
                            require_positive_definite: bool = False):
    """4x4 precision matrix [[a,c,0,d],[c,b,-d,0],[0,-d,a,c],[d,0,c,b]].

    Returns (PairMatrix, dominance_holds, positive_definite).  Diagonal
    dominance min(a,b) > |c| + |d| is a sufficient condition for positive
    definiteness; definiteness itself is decided by the eigenvalue check.
    """
    pm = assemble_pair_matrix([[a, c], [c, b]], [[0.0, d], [-d, 0.0]])
    dominance = min(a, b) > abs(c) + abs(d)
    positive_definite = pm.is_positive_definite()
    if require_positive_definite and not positive_definite:
        raise NotPositiveDefiniteError(
            f"precision matrix with (a,b,c,d)=({a},{b},{c},{d}) "
            "is not positive definite")
    return pm, dominance, positive_definite


@dataclass(frozen=True)
class CovarianceMatrix:
    """Symmetric PSD matrix with strictly positive diagonal.

    Positive diagonal keeps the denominator coordinates away from being
    almost-surely zero, so ratios are a.s. finite.
    """

    entries: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.entries, dtype=float)
        object.__setattr__(self, "entries", s)
        if s.ndim != 2 or s.shape[0] != s.shape[1]:
            raise BadCovarianceError("covariance must be square")
        if np.max(np.abs(s - s.T)) > SYM_TOL:
            raise NotSymmetricError("covariance is not symmetric")
        eig = np.linalg.eigvalsh(s)
        if eig.min() < -PSD_REL_TOL * max(eig.max(), 1.0):
            raise NotPositiveDefiniteError(
                f"covariance has eigenvalue {eig.min()!r} < 0")
        if np.any(np.diag(s) <= 0):
            raise BadCovarianceError("covariance diagonal must be positive")

    @property
    def m(self) -> int:
        return self.entries.shape[0]


# --- scalar factor catalog -------------------------------------------------
#
# A closed catalog (rather than arbitrary callables) keeps model configs
# serializable and log-density evaluation numerically controlled.
# Known-integrable combinations, with every assembled matrix positive
# definite where noted:
#   * ExpNegHalf on a positive definite matrix, alone or multiplied by any
#     finite number of PowerEven / InversePower factors;
#   * ExpNegSqrt on a positive definite matrix (polynomial-times-
#     exponential radial decay);
#   * InversePower(p) on a positive definite 2m x 2m matrix with p > m.
# PowerEven alone grows polynomially and is never integrable.


@dataclass(frozen=True)
class ExpNegHalf:
    """t -> exp(-t/2)."""

    name = "exp_neg_half"

    def log_eval(self, t):
        return -0.5 * np.asarray(t, dtype=float)

    def params(self):
        return {}


@dataclass(frozen=True)
class PowerEven:
    """t -> t**(2q) for a positive integer q."""

    q: int
    name = "power_even"

    def __post_init__(self):
        if not (isinstance(self.q, (int, np.integer)) and self.q >= 1):
            raise CauchyRatiosError("PowerEven exponent q must be a positive integer")

    def log_eval(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            return 2.0 * self.q * np.log(np.abs(t))

    def params(self):
        return {"q": int(self.q)}


@dataclass(frozen=True)
class InversePower:
    """t -> (1+t)**(-p), p > 0; zero density where 1+t <= 0."""

    p: float
    name = "inverse_power"

    def __post_init__(self):
        if not self.p > 0:
            raise CauchyRatiosError("InversePower exponent p must be positive")

    def log_eval(self, t):
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, -np.inf)
        ok = 1.0 + t > 0
        out[ok] = -self.p * np.log1p(t[ok])
        return out

    def params(self):
        return {"p": float(self.p)}


@dataclass(frozen=True)
class ExpNegSqrt:
    """t -> t * exp(-sqrt(t)) for t >= 0 (t is the squared radius)."""

    name = "exp_neg_sqrt"

    def log_eval(self, t):
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, -np.inf)
        ok = t > 0
        out[ok] = np.log(t[ok]) - np.sqrt(t[ok])
        return out

    def params(self):
        return {}


SCALAR_FACTORS = {
    "exp_neg_half": ExpNegHalf,
    "power_even": PowerEven,
    "inverse_power": InversePower,
    "exp_neg_sqrt": ExpNegSqrt,
}


@dataclass(frozen=True)
class ProductFormModel:
    """Unnormalized density K * prod_i h_i((x', y') F_i (x, y)).

    Integrability is user-asserted: the constructor refuses models without
    `integrable=True` because no general sufficient condition is available.
    """

    dim: int
    factors: tuple
    integrable: bool = False
    model_id: str = "product_form"

    def __post_init__(self):
        factors = tuple(self.factors)
        object.__setattr__(self, "factors", factors)
        if not factors:
            raise CauchyRatiosError("model needs at least one factor")
        for pm, _h in factors:
            if not isinstance(pm, PairMatrix):
                raise CauchyRatiosError("each factor needs a PairMatrix")
            if pm.m != self.dim:
                raise CauchyRatiosError(
                    f"factor block size {pm.m} != model dim {self.dim}")
        if not self.integrable:
            raise IntegrabilityNotAssertedError(
                "refusing to build a model whose integrability is not asserted")

    def log_density(self, points: np.ndarray) -> np.ndarray:
        """Unnormalized log density at each row of `points` (shape (..., 2m))."""
        pts = np.asarray(points, dtype=float)
        total = np.zeros(pts.shape[:-1])
        for pm, h in self.factors:
            total = total + h.log_eval(pm.quadratic_form(pts))
        return total


@dataclass(frozen=True)
class SampleBatch:
    """Monte Carlo draws with provenance.

    Raw draws must be finite; +-infinity is only ever produced downstream by
    ratio statistics, never stored here.
    """

    values: np.ndarray
    seed: int
    model_id: str

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.ndim != 2:
            raise CauchyRatiosError("values must be an n x k matrix")
        if not np.all(np.isfinite(v)):
            raise CauchyRatiosError("raw draws must be finite (no NaN/inf)")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


_SPLIT_MULT = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    """Deterministic, splittable random stream.

    Identical (seed, stream_index) pairs give bit-identical sequences;
    distinct indices give statistically independent PCG64 streams via
    SeedSequence spawn keys.
    """

    seed: int
    stream_index: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_index,))
        return np.random.Generator(np.random.PCG64(ss))

    def child(self, i: int) -> "RngStream":
        # splitmix-style index derivation keeps children of different
        # parents from colliding
        idx = ((self.stream_index + 1) * _SPLIT_MULT + i + 1) & _MASK64
        return RngStream(self.seed, idx)
