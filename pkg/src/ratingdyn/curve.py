"""Influence-curve evaluation.

f(x) is the expected submitted rating of a random next agent given that the
observed average is x. Kernels independent of x make f affine and it is
evaluated in closed form from two moments; x-dependent kernels are integrated
over the latent distribution. Monte Carlo evaluation is kept as an
independent oracle, never as the primary path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import (
    RandomSource,
    RatingModel,
    lambda_latent_moments,
    require_unit,
)
from .quadrature import QuadratureError


@dataclass(frozen=True)
class CurvePoint:
    x: float
    f_x: float
    abs_err: float
    method: str  # "quadrature" | "closed_form" | "monte_carlo"


def _check_range(x: float, f_x: float, abs_err: float) -> None:
    # f is a conditional expectation of a [0,1] value; an out-of-range result
    # beyond tolerance means the integrator failed and must not be clamped.
    margin = max(10.0 * abs_err, 1e-9)
    if f_x < -margin or f_x > 1.0 + margin:
        raise QuadratureError(
            f"curve value {f_x!r} at x={x!r} falls outside [0, 1] beyond "
            f"tolerance {margin:.3e}; integrator failure"
        )


def curve_value(model: RatingModel, x: float, tol: float = 1e-8, method: str = "auto") -> CurvePoint:
    """Evaluate f(x) with absolute error <= tol.

    `method` is "auto" (closed form when the kernel ignores x, quadrature
    otherwise), or an explicit "closed_form" / "quadrature"; forcing
    quadrature on a linear model is how the two paths are cross-checked.
    """
    x = require_unit(x, "x")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if method == "auto":
        method = "quadrature" if model.kernel.depends_on_x else "closed_form"

    if method == "closed_form":
        mean_lam, cov = lambda_latent_moments(model, tol)
        mu = model.latent.mean
        f_x = mean_lam * x + mu * (1.0 - mean_lam) - cov
        point = CurvePoint(x=x, f_x=f_x, abs_err=tol, method="closed_form")
    elif method == "quadrature":
        kernel = model.kernel

        def h(r: np.ndarray) -> np.ndarray:
            return kernel.mean(r, x) * (x - r)

        bps = kernel.mean_breakpoints(x)
        drift, err = model.latent.expectation(h, tol, bps)
        f_x = drift + model.latent.mean
        point = CurvePoint(x=x, f_x=f_x, abs_err=max(err, 0.0), method="quadrature")
    else:
        raise ValueError(f"unknown curve method {method!r}")

    _check_range(x, point.f_x, max(point.abs_err, tol))
    return point


def curve_tabulate(
    model: RatingModel, grid: Sequence[float], tol: float = 1e-8, method: str = "auto"
) -> list[CurvePoint]:
    """Evaluate f on a strictly increasing grid inside [0, 1]."""
    grid = [require_unit(g, "grid node") for g in grid]
    if any(b - a <= 0.0 for a, b in zip(grid[:-1], grid[1:])):
        raise ValueError("grid must be strictly increasing")
    return [curve_value(model, g, tol, method) for g in grid]


def uniform_grid(count: int = 1001) -> np.ndarray:
    """Default tabulation grid: `count` uniform nodes spanning [0, 1]."""
    if count < 2:
        raise ValueError("grid needs at least 2 nodes")
    return np.linspace(0.0, 1.0, count)


def curve_value_mc(
    model: RatingModel, x: float, n: int, rng: RandomSource | np.random.Generator
) -> tuple[float, float]:
    """Monte Carlo estimate of f(x) from n independent (r, lam) draws.

    Returns (estimate, standard error). Unbiased by construction; used as the
    statistical oracle for the quadrature path.
    """
    x = require_unit(x, "x")
    if n < 2:
        raise ValueError("n must be at least 2")
    gen = rng.generator() if isinstance(rng, RandomSource) else rng
    r = np.asarray(model.latent.sample(gen, n), dtype=float)
    lam = np.asarray(model.kernel.sample(r, x, gen), dtype=float)
    ratings = lam * x + (1.0 - lam) * r
    estimate = float(np.mean(ratings))
    stderr = float(np.std(ratings, ddof=1) / np.sqrt(n))
    return estimate, stderr
