"""Generative model for sequential ratings under social influence.

An item's raters hold i.i.d. latent opinions r in [0, 1]. A rater who sees
the current average x submits lam*x + (1-lam)*r, where the influence weight
lam is drawn from a kernel that may depend on the rater's own opinion, on
the observed average, or on neither. This module defines the latent-opinion
families, the influence kernels, and the exact/numerical moments every
downstream analysis builds on.
"""

from __future__ import annotations

import abc
import math
from dataclasses import dataclass
from typing import Callable, ClassVar, Sequence, Union

import numpy as np

from .quadrature import beta_weighted_integral

# Below this distance from 0 or 1 the Beta(s, s/c - s) influence law has
# degenerated to a point mass; sampling returns the boundary exactly.
DEGENERATE_MEAN_EPS = 1e-12


class ModelError(ValueError):
    """Invalid model parameters or out-of-domain inputs."""


class XDependentKernelError(ModelError):
    """Raised by linear-system operations when the kernel depends on the
    observed average; callers must switch to the nonlinear curve path."""


def require_unit(value: float, name: str) -> float:
    """Validate a probability-like scalar, returning it as float."""
    v = float(value)
    if math.isnan(v) or v < 0.0 or v > 1.0:
        raise ModelError(f"{name} must lie in [0, 1], got {value!r}")
    return v


def _require_positive(value: float, name: str) -> float:
    v = float(value)
    if not math.isfinite(v) or v <= 0.0:
        raise ModelError(f"{name} must be a positive real, got {value!r}")
    return v


# ---------------------------------------------------------------------------
# latent-opinion distributions


@dataclass(frozen=True)
class BetaLatent:
    """Beta(alpha, beta) latent opinions; alpha < 1 or beta < 1 puts mass
    toward the endpoints (polarized populations)."""

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        _require_positive(self.alpha, "alpha")
        _require_positive(self.beta, "beta")

    @property
    def mean(self) -> float:
        return self.alpha / (self.alpha + self.beta)

    def moment(self, k: int) -> float:
        # E[r^k] = prod_{j<k} (alpha+j)/(alpha+beta+j)
        value = 1.0
        for j in range(k):
            value *= (self.alpha + j) / (self.alpha + self.beta + j)
        return value

    def expectation(
        self,
        h: Callable[[np.ndarray], np.ndarray],
        tol: float,
        breakpoints: Sequence[float] = (),
    ) -> tuple[float, float]:
        return beta_weighted_integral(h, self.alpha, self.beta, tol, breakpoints)

    def sample(self, rng: np.random.Generator, size: int | None = None):
        return rng.beta(self.alpha, self.beta, size)


@dataclass(frozen=True)
class PointMassLatent:
    """Every rater holds the same opinion."""

    value: float

    def __post_init__(self) -> None:
        require_unit(self.value, "point-mass value")

    @property
    def mean(self) -> float:
        return self.value

    def moment(self, k: int) -> float:
        return self.value**k

    def expectation(self, h, tol, breakpoints=()) -> tuple[float, float]:
        val = float(np.asarray(h(np.array([self.value])), dtype=float)[0])
        return val, 0.0

    def sample(self, rng: np.random.Generator, size: int | None = None):
        if size is None:
            return self.value
        return np.full(size, self.value)


@dataclass(frozen=True)
class DiscreteLatent:
    """Finitely many opinion values with strictly positive probabilities."""

    atoms: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if not self.atoms:
            raise ModelError("discrete latent needs at least one atom")
        total = 0.0
        for value, prob in self.atoms:
            require_unit(value, "atom value")
            if not (prob > 0.0):
                raise ModelError(f"atom probability must be > 0, got {prob!r}")
            total += prob
        if abs(total - 1.0) > 1e-12:
            raise ModelError(f"atom probabilities sum to {total!r}, not 1")

    @property
    def values(self) -> np.ndarray:
        return np.array([v for v, _ in self.atoms])

    @property
    def probs(self) -> np.ndarray:
        return np.array([p for _, p in self.atoms])

    @property
    def mean(self) -> float:
        return float(np.dot(self.probs, self.values))

    def moment(self, k: int) -> float:
        return float(np.dot(self.probs, self.values**k))

    def expectation(self, h, tol, breakpoints=()) -> tuple[float, float]:
        vals = np.asarray(h(self.values), dtype=float)
        return float(np.dot(self.probs, vals)), 0.0

    def sample(self, rng: np.random.Generator, size: int | None = None):
        return rng.choice(self.values, size=size, p=self.probs)


LatentDistribution = Union[BetaLatent, PointMassLatent, DiscreteLatent]


# ---------------------------------------------------------------------------
# influence kernels


class InfluenceKernel(abc.ABC):
    """Conditional law of the influence weight lam given (r, x)."""

    #: whether the law depends on the observed average x
    depends_on_x: ClassVar[bool] = False

    @abc.abstractmethod
    def mean(self, r, x: float):
        """E[lam | r, x]; accepts scalar or ndarray r, scalar x."""

    def sample(self, r, x: float, rng: np.random.Generator):
        """Draw lam given (r, x); deterministic kernels return the mean."""
        return self.mean(r, x)

    def mean_breakpoints(self, x: float) -> tuple[float, ...]:
        """Interior r-values where mean(., x) has a kink."""
        return ()


def _degenerate_beta_sample(
    c, shape: float, rng: np.random.Generator
):
    """Beta(shape, shape/c - shape) draw with mean exactly c.

    The law collapses to a point mass at both ends: the second parameter
    diverges as c -> 0 and vanishes as c -> 1, so boundary values are
    returned exactly rather than sampled.
    """
    if np.ndim(c) == 0:  # scalar fast path; the simulator calls this per step
        c = float(c)
        if c <= DEGENERATE_MEAN_EPS:
            return 0.0
        if c >= 1.0 - DEGENERATE_MEAN_EPS:
            return 1.0
        return float(rng.beta(shape, shape / c - shape))
    c_arr = np.asarray(c, dtype=float)
    out = np.empty_like(c_arr)
    low = c_arr <= DEGENERATE_MEAN_EPS
    high = c_arr >= 1.0 - DEGENERATE_MEAN_EPS
    mid = ~(low | high)
    out[low] = 0.0
    out[high] = 1.0
    if np.any(mid):
        cm = c_arr[mid]
        out[mid] = rng.beta(shape, shape / cm - shape)
    return out


@dataclass(frozen=True)
class ConstantKernel(InfluenceKernel):
    """Homogeneous population: lam is the same for everyone."""

    level: float

    def __post_init__(self) -> None:
        require_unit(self.level, "constant kernel level")

    def mean(self, r, x: float):
        return np.full_like(np.asarray(r, dtype=float), self.level) if np.ndim(r) else self.level

    def sample(self, r, x: float, rng: np.random.Generator):
        return self.mean(r, x)


@dataclass(frozen=True)
class IndependentBetaKernel(InfluenceKernel):
    """lam ~ Beta(a, b), independent of both r and x."""

    a: float
    b: float

    def __post_init__(self) -> None:
        _require_positive(self.a, "a")
        _require_positive(self.b, "b")

    def mean(self, r, x: float):
        m = self.a / (self.a + self.b)
        return np.full_like(np.asarray(r, dtype=float), m) if np.ndim(r) else m

    def sample(self, r, x: float, rng: np.random.Generator):
        size = np.shape(r) if np.ndim(r) else None
        return rng.beta(self.a, self.b, size)


@dataclass(frozen=True)
class AffineLatentKernel(InfluenceKernel):
    """Deterministic lam = clamp(intercept + slope * r); covers lam = r and
    lam = 1 - r, the hand-computable correlated cases."""

    intercept: float
    slope: float

    def mean(self, r, x: float):
        return np.clip(self.intercept + self.slope * np.asarray(r, dtype=float), 0.0, 1.0) if np.ndim(
            r
        ) else min(1.0, max(0.0, self.intercept + self.slope * r))

    def mean_breakpoints(self, x: float) -> tuple[float, ...]:
        if self.slope == 0.0:
            return ()
        kinks = ((0.0 - self.intercept) / self.slope, (1.0 - self.intercept) / self.slope)
        return tuple(k for k in kinks if 0.0 < k < 1.0)


@dataclass(frozen=True)
class LatentOnlyKernel(InfluenceKernel):
    """lam ~ Beta(shape, shape/c - shape) with c = |r - m| / max(m, 1 - m):
    influence grows with the distance of the opinion from the anchor m."""

    m: float
    shape: float

    def __post_init__(self) -> None:
        require_unit(self.m, "anchor m")
        _require_positive(self.shape, "shape")

    def _c(self, r):
        if np.ndim(r) == 0:
            return abs(float(r) - self.m) / max(self.m, 1.0 - self.m)
        return np.abs(np.asarray(r, dtype=float) - self.m) / max(self.m, 1.0 - self.m)

    def mean(self, r, x: float):
        return self._c(r)

    def sample(self, r, x: float, rng: np.random.Generator):
        return _degenerate_beta_sample(self._c(r), self.shape, rng)

    def mean_breakpoints(self, x: float) -> tuple[float, ...]:
        return (self.m,) if 0.0 < self.m < 1.0 else ()


@dataclass(frozen=True)
class DistanceKernel(InfluenceKernel):
    """lam ~ Beta(shape, shape/c - shape) with c = |r - x| / max(x, 1 - x):
    influence grows with the distance of the opinion from the observed
    average, which is what produces multiple equilibria."""

    shape: float

    depends_on_x: ClassVar[bool] = True

    def __post_init__(self) -> None:
        _require_positive(self.shape, "shape")

    def _c(self, r, x: float):
        if np.ndim(r) == 0:
            return abs(float(r) - x) / max(x, 1.0 - x)
        return np.abs(np.asarray(r, dtype=float) - x) / max(x, 1.0 - x)

    def mean(self, r, x: float):
        return self._c(r, x)

    def sample(self, r, x: float, rng: np.random.Generator):
        return _degenerate_beta_sample(self._c(r, x), self.shape, rng)

    def mean_breakpoints(self, x: float) -> tuple[float, ...]:
        return (x,) if 0.0 < x < 1.0 else ()


@dataclass(frozen=True)
class ProximityKernel(InfluenceKernel):
    """Deterministic lam = lambda_max * (1 - |x - r|): influence decays with
    distance from the observed average, which forces a unique equilibrium."""

    lambda_max: float

    depends_on_x: ClassVar[bool] = True

    def __post_init__(self) -> None:
        require_unit(self.lambda_max, "lambda_max")

    def mean(self, r, x: float):
        return self.lambda_max * (1.0 - np.abs(np.asarray(r, dtype=float) - x)) if np.ndim(
            r
        ) else self.lambda_max * (1.0 - abs(r - x))

    def mean_breakpoints(self, x: float) -> tuple[float, ...]:
        return (x,) if 0.0 < x < 1.0 else ()


@dataclass(frozen=True)
class RatingModel:
    """A latent-opinion distribution paired with an influence kernel."""

    latent: LatentDistribution
    kernel: InfluenceKernel


# ---------------------------------------------------------------------------
# deterministic random streams


@dataclass(frozen=True)
class RandomSource:
    """Seed plus stream index; the pair fully determines the draw sequence,
    so parallel tasks each derive their own stream and results never depend
    on scheduling."""

    seed: int
    stream_index: int = 0

    def __post_init__(self) -> None:
        if not (0 <= int(self.seed) < 2**64):
            raise ModelError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if int(self.stream_index) < 0:
            raise ModelError(f"stream_index must be non-negative, got {self.stream_index!r}")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_index,))
        return np.random.default_rng(ss)


def derive_seed(seed: int, *path: int) -> int:
    """Deterministically derive an independent child seed; used to give each
    replication its own population/permutation/lambda streams."""
    ss = np.random.SeedSequence(seed, spawn_key=tuple(path))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


# ---------------------------------------------------------------------------
# operations


def expressed_rating(lam: float, r: float, x: float) -> float:
    """Rating submitted by an agent with opinion r and influence weight lam
    who observes average x: the convex combination lam*x + (1-lam)*r."""
    lam = require_unit(lam, "lam")
    r = require_unit(r, "r")
    x = require_unit(x, "x")
    value = lam * x + (1.0 - lam) * r
    # convex in exact arithmetic; clamp the floating-point rounding
    return min(1.0, max(0.0, value))


def latent_moment(dist: LatentDistribution, k: int) -> float:
    """E[r^k], exact (closed form for beta, finite sums otherwise)."""
    if not isinstance(k, int) or k < 1:
        raise ModelError(f"moment order must be a positive integer, got {k!r}")
    return dist.moment(k)


def latent_expectation(
    dist: LatentDistribution,
    h: Callable[[np.ndarray], np.ndarray],
    tol: float = 1e-8,
    breakpoints: Sequence[float] = (),
) -> float:
    """E[h(r)] with estimated absolute error <= tol.

    Exact summation for point-mass/discrete families; beta families integrate
    against the beta weight so endpoint singularities cost no accuracy. Pass
    interior kink locations of h via `breakpoints`.
    """
    value, _ = dist.expectation(h, tol, breakpoints)
    return value


def sample_latent(dist: LatentDistribution, rng: RandomSource | np.random.Generator, size: int | None = None):
    """Draw one (or `size`) latent opinions."""
    gen = rng.generator() if isinstance(rng, RandomSource) else rng
    return dist.sample(gen, size)


def kernel_mean(kernel: InfluenceKernel, r, x) -> float:
    """E[lam | r, x]; r may be an ndarray (x stays scalar)."""
    if np.ndim(r) == 0:
        require_unit(r, "r")
    require_unit(x, "x")
    return kernel.mean(r, float(x))


def sample_lambda(kernel: InfluenceKernel, r, x, rng: RandomSource | np.random.Generator):
    """Draw lam from the kernel's conditional law at (r, x)."""
    if np.ndim(r) == 0:
        require_unit(r, "r")
    require_unit(x, "x")
    gen = rng.generator() if isinstance(rng, RandomSource) else rng
    return kernel.sample(r, float(x), gen)


def lambda_latent_moments(model: RatingModel, tol: float = 1e-8) -> tuple[float, float]:
    """(E[lam], Cov(lam, r)) for kernels that do not depend on the observed
    average; these two moments parameterize the whole linear system."""
    kernel = model.kernel
    if kernel.depends_on_x:
        raise XDependentKernelError(
            f"{type(kernel).__name__} depends on the observed average; "
            "the linear closed form does not apply"
        )
    bps = kernel.mean_breakpoints(0.0)
    mean_lam, _ = model.latent.expectation(lambda r: kernel.mean(r, 0.0), tol / 2.0, bps)
    mean_lam_r, _ = model.latent.expectation(
        lambda r: kernel.mean(r, 0.0) * np.asarray(r, dtype=float), tol / 2.0, bps
    )
    cov = mean_lam_r - mean_lam * model.latent.mean
    return mean_lam, cov
