"""Fixed points of the influence curve and their stability.

Equilibria are the candidate limits of the running average: points where
f(x) = x. Stability is read off the crossing direction of g = f - id
(downcrossing = stable, upcrossing = unstable), never off a slope estimate,
because several kernels make f non-differentiable at opinion atoms. Root
finding always uses the deterministic quadrature curve; Monte Carlo noise
would break sign-based bracketing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .curve import curve_value, uniform_grid
from .model import ModelError, RatingModel, lambda_latent_moments

# Above this mean influence weight the linear system degenerates: the curve
# coincides with the diagonal and every observed average is a fixed point.
FULL_HERDING_EPS = 1e-9

STABLE = "stable"
UNSTABLE = "unstable"
DEGENERATE = "degenerate"


class FullHerdingError(ModelError):
    """Mean influence weight is 1: every point is an equilibrium."""


class NoEquilibriumFoundError(RuntimeError):
    """Grid scan found no crossing; indicates an inconsistent curve."""


@dataclass(frozen=True)
class Equilibrium:
    x_star: float
    stability: str  # "stable" | "unstable" | "degenerate"
    residual: float  # |f(x*) - x*|
    slope_estimate: float  # finite-difference f' at x*, diagnostic only


@dataclass(frozen=True)
class BifurcationRow:
    param: float
    equilibria: tuple[Equilibrium, ...]

    @property
    def stable_count(self) -> int:
        return sum(1 for e in self.equilibria if e.stability == STABLE)


@dataclass(frozen=True)
class BifurcationResult:
    rows: tuple[BifurcationRow, ...]
    # (param_lo, param_hi, stable_before, stable_after) for each change in
    # the stable-equilibrium count, bracketed to adjacent parameter samples
    transitions: tuple[tuple[float, float, int, int], ...]
    failures: tuple[tuple[float, str], ...]


@dataclass(frozen=True)
class ItemEquilibrium:
    label: str
    mu: float
    r_star: float | None
    path_dependent: bool = False
    error: str | None = None


@dataclass(frozen=True)
class RankReport:
    items: tuple[ItemEquilibrium, ...]
    # (higher-mu label, lower-mu label) pairs whose equilibria invert the order
    violations: tuple[tuple[str, str], ...]


def closed_form_equilibrium(model: RatingModel, tol: float = 1e-8) -> float:
    """Unique fixed point of the linear system: mu - Cov(lam, r)/(1 - E[lam]).

    Equals mu exactly when lam and r are uncorrelated (self-correction).
    Raises for x-dependent kernels and for the full-herding degeneracy.
    """
    mean_lam, cov = lambda_latent_moments(model, tol)
    if mean_lam >= 1.0 - FULL_HERDING_EPS:
        raise FullHerdingError(
            "mean influence weight is 1 within tolerance; the curve lies on "
            "the diagonal and every point is an equilibrium"
        )
    return model.latent.mean - cov / (1.0 - mean_lam)


def _refine_root(
    g: Callable[[float], float],
    a: float,
    b: float,
    ga: float,
    gb: float,
    root_tol: float,
) -> tuple[float, float]:
    """Bisection on a strict sign-change bracket.

    Runs until the bracket is narrower than root_tol AND the best endpoint
    residual is below root_tol (a few extra halvings; |g| shrinks with the
    bracket since f is Lipschitz on [0,1]).
    """
    for _ in range(200):
        if (b - a) <= root_tol and min(abs(ga), abs(gb)) <= root_tol:
            break
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:  # float resolution exhausted
            break
        gm = g(mid)
        if gm == 0.0:
            return mid, 0.0
        if (gm > 0.0) == (ga > 0.0):
            a, ga = mid, gm
        else:
            b, gb = mid, gm
    if abs(ga) <= abs(gb):
        return a, abs(ga)
    return b, abs(gb)


def _slope_estimate(model: RatingModel, x: float, curve_tol: float, h: float = 1e-6) -> float:
    lo = max(0.0, x - h)
    hi = min(1.0, x + h)
    f_lo = curve_value(model, lo, curve_tol).f_x
    f_hi = curve_value(model, hi, curve_tol).f_x
    return (f_hi - f_lo) / (hi - lo)


def find_equilibria(
    model: RatingModel,
    grid_size: int = 1001,
    root_tol: float = 1e-10,
    curve_tol: float | None = None,
) -> list[Equilibrium]:
    """All fixed points of f on [0, 1], ascending, with stability labels.

    Scans g = f - id on a uniform grid, refines every sign change by
    bisection, reports tangential near-roots (|g| < root_tol over a cell
    without a sign change) as degenerate, and merges roots closer than
    10 * root_tol.
    """
    if grid_size < 3:
        raise ValueError("grid_size must be at least 3")
    if root_tol <= 0.0:
        raise ValueError("root_tol must be positive")
    if curve_tol is None:
        curve_tol = max(root_tol / 10.0, 1e-13)

    def g(x: float) -> float:
        return curve_value(model, x, curve_tol).f_x - x

    xs = uniform_grid(grid_size)
    gv = np.array([g(x) for x in xs])

    candidates: list[tuple[float, str, float]] = []

    # strict sign changes -> bracketed roots
    for i in range(grid_size - 1):
        ga, gb = gv[i], gv[i + 1]
        if ga == 0.0 or gb == 0.0:
            continue
        if (ga > 0.0) != (gb > 0.0):
            x_star, residual = _refine_root(g, xs[i], xs[i + 1], ga, gb, root_tol)
            stability = STABLE if ga > 0.0 else UNSTABLE
            candidates.append((x_star, stability, residual))

    # exact zeros at grid nodes, classified by the surrounding signs
    for i in range(grid_size):
        if gv[i] != 0.0:
            continue
        s_prev = next((np.sign(gv[j]) for j in range(i - 1, -1, -1) if gv[j] != 0.0), 0.0)
        s_next = next((np.sign(gv[j]) for j in range(i + 1, grid_size) if gv[j] != 0.0), 0.0)
        if s_prev > 0.0 and s_next < 0.0:
            stability = STABLE
        elif s_prev < 0.0 and s_next > 0.0:
            stability = UNSTABLE
        else:
            stability = DEGENERATE
        candidates.append((float(xs[i]), stability, 0.0))

    # tangential near-roots: never dropped silently
    for i in range(grid_size - 1):
        ga, gb = gv[i], gv[i + 1]
        if ga == 0.0 or gb == 0.0:
            continue
        if (ga > 0.0) == (gb > 0.0) and max(abs(ga), abs(gb)) < root_tol:
            mid = 0.5 * (xs[i] + xs[i + 1])
            candidates.append((float(mid), DEGENERATE, max(abs(ga), abs(gb))))

    if not candidates:
        # g(0) >= 0 >= g(1) guarantees a crossing in exact arithmetic; reach
        # here only when rounding hides a boundary root, so report the
        # closest approach instead of silently returning nothing.
        i_min = int(np.argmin(np.abs(gv)))
        if abs(gv[i_min]) > 1e3 * curve_tol:
            raise NoEquilibriumFoundError(
                f"no crossing of the diagonal on a {grid_size}-point grid; "
                f"smallest |f(x) - x| was {abs(gv[i_min]):.3e}"
            )
        candidates.append((float(xs[i_min]), DEGENERATE, float(abs(gv[i_min]))))

    candidates.sort(key=lambda c: c[0])
    merged: list[tuple[float, str, float]] = []
    for cand in candidates:
        if merged and cand[0] - merged[-1][0] < 10.0 * root_tol:
            # same root seen twice; keep the classified one
            if merged[-1][1] == DEGENERATE and cand[1] != DEGENERATE:
                merged[-1] = cand
            continue
        merged.append(cand)

    return [
        Equilibrium(
            x_star=x_star,
            stability=stability,
            residual=residual,
            slope_estimate=_slope_estimate(model, x_star, curve_tol),
        )
        for x_star, stability, residual in merged
    ]


def bifurcation_sweep(
    family: Callable[[float], RatingModel],
    param_values: Sequence[float],
    grid_size: int = 1001,
    root_tol: float = 1e-10,
) -> BifurcationResult:
    """find_equilibria per parameter value, plus the parameter intervals
    where the stable-equilibrium count changes. Failed rows are recorded
    and skipped, not fatal."""
    rows: list[BifurcationRow] = []
    failures: list[tuple[float, str]] = []
    for param in param_values:
        try:
            model = family(float(param))
            eqs = find_equilibria(model, grid_size=grid_size, root_tol=root_tol)
        except Exception as exc:  # one bad row must not kill the sweep
            failures.append((float(param), f"{type(exc).__name__}: {exc}"))
            continue
        rows.append(BifurcationRow(param=float(param), equilibria=tuple(eqs)))

    transitions: list[tuple[float, float, int, int]] = []
    for prev, curr in zip(rows[:-1], rows[1:]):
        if prev.stable_count != curr.stable_count:
            transitions.append((prev.param, curr.param, prev.stable_count, curr.stable_count))

    return BifurcationResult(
        rows=tuple(rows), transitions=tuple(transitions), failures=tuple(failures)
    )


def rank_preservation(items: Sequence[tuple[str, RatingModel]]) -> RankReport:
    """Check whether influence distortion inverts the true-mean ranking.

    Each item gets its unique equilibrium (closed form when linear, root
    finding otherwise); items with multiple stable equilibria are flagged
    path-dependent and excluded from pairwise comparison.
    """
    if not items:
        raise ValueError("need at least one item")

    summaries: list[ItemEquilibrium] = []
    for label, model in items:
        mu = model.latent.mean
        try:
            if not model.kernel.depends_on_x:
                r_star = closed_form_equilibrium(model)
                summaries.append(ItemEquilibrium(label=label, mu=mu, r_star=r_star))
                continue
            stables = [e for e in find_equilibria(model) if e.stability == STABLE]
            if len(stables) == 1:
                summaries.append(ItemEquilibrium(label=label, mu=mu, r_star=stables[0].x_star))
            else:
                summaries.append(
                    ItemEquilibrium(label=label, mu=mu, r_star=None, path_dependent=True)
                )
        except Exception as exc:
            summaries.append(
                ItemEquilibrium(label=label, mu=mu, r_star=None, error=f"{type(exc).__name__}: {exc}")
            )

    comparable = [s for s in summaries if s.r_star is not None]
    violations: list[tuple[str, str]] = []
    for i, first in enumerate(comparable):
        for second in comparable[i + 1 :]:
            hi, lo = (first, second) if first.mu > second.mu else (second, first)
            if hi.mu > lo.mu and hi.r_star < lo.r_star:
                violations.append((hi.label, lo.label))

    return RankReport(items=tuple(summaries), violations=tuple(violations))


def uniqueness_check(
    model: RatingModel, grid_size: int = 1001, root_tol: float = 1e-10
) -> bool:
    """True when the curve crosses the diagonal exactly once (ignoring
    degenerate tangencies)."""
    eqs = find_equilibria(model, grid_size=grid_size, root_tol=root_tol)
    return sum(1 for e in eqs if e.stability != DEGENERATE) == 1
