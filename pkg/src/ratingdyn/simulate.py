"""Sequential rating simulator.

Agents arrive in order, observe the running average of everything submitted
so far, and emit their influenced rating. Supports a fixed population whose
arrival order is re-randomized per replication (the path-dependence
experiment) as well as fresh populations per replication. All randomness is
derived deterministically from a base seed, so results never depend on how
replications are scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .model import RandomSource, RatingModel, derive_seed

# stream tags under the base seed
_POPULATION_STREAM = 0
_PERMUTATION_STREAM = 1
_LAMBDA_STREAM = 2


@dataclass(frozen=True)
class Population:
    """Fixed latent opinions; regenerating with the same (model, n, seed)
    yields identical values."""

    latents: np.ndarray
    seed: int

    @property
    def size(self) -> int:
        return len(self.latents)


@dataclass(frozen=True)
class Trajectory:
    replication_id: int
    permutation_seed: int
    running_means: np.ndarray  # value of the average after each step
    final_mean: float
    ratings: np.ndarray | None = None  # emitted ratings, kept on request


@dataclass(frozen=True)
class RunSummary:
    replication_id: int
    final_mean: float
    nearest_equilibrium: float | None
    distance: float | None
    population_seed: int
    permutation_seed: int
    lambda_seed: int


def make_population(model: RatingModel, n: int, seed: int) -> Population:
    if n < 1:
        raise ValueError("population size must be at least 1")
    rng = RandomSource(seed, _POPULATION_STREAM).generator()
    latents = np.asarray(model.latent.sample(rng, n), dtype=float)
    return Population(latents=latents, seed=seed)


def run_sequence(
    model: RatingModel,
    population: Population,
    order: Sequence[int],
    lambda_seed: int,
    replication_id: int = 0,
    permutation_seed: int = 0,
    keep_ratings: bool = False,
) -> Trajectory:
    """One pass of the sequential process over `population` in `order`.

    The first rater sees no average and submits their latent opinion; every
    later rater draws a fresh influence weight against the current running
    mean. The mean is updated incrementally.
    """
    order = np.asarray(order)
    n = population.size
    if len(order) != n or not np.array_equal(np.sort(order), np.arange(n)):
        raise ValueError("order must be a permutation of the population indices")

    latents = population.latents[order]
    kernel = model.kernel
    sample = kernel.sample
    rng = RandomSource(lambda_seed, _LAMBDA_STREAM).generator()

    ratings = np.empty(n)
    means = np.empty(n)
    mean = float(latents[0])
    ratings[0] = mean
    means[0] = mean
    for i in range(1, n):
        r = latents[i]
        lam = sample(r, mean, rng)
        rating = lam * mean + (1.0 - lam) * r
        if rating < 0.0:
            rating = 0.0
        elif rating > 1.0:
            rating = 1.0
        mean += (rating - mean) / (i + 1)
        if mean < 0.0:
            mean = 0.0
        elif mean > 1.0:
            mean = 1.0
        ratings[i] = rating
        means[i] = mean

    # fsum is exactly rounded, so the reported final mean does not depend on
    # the order in which identical ratings were accumulated
    final_mean = math.fsum(ratings) / n
    return Trajectory(
        replication_id=replication_id,
        permutation_seed=permutation_seed,
        running_means=means,
        final_mean=final_mean,
        ratings=ratings if keep_ratings else None,
    )


def _classify(final_mean: float, equilibria: Sequence[float]) -> tuple[float | None, float | None]:
    if not equilibria:
        return None, None
    nearest = min(equilibria, key=lambda e: abs(final_mean - e))
    return float(nearest), abs(final_mean - float(nearest))


def iter_replications(
    model: RatingModel,
    n_agents: int,
    n_reps: int,
    base_seed: int,
    fixed_population: bool = True,
    equilibria: Sequence[float] = (),
    keep_ratings: bool = False,
) -> Iterator[tuple[RunSummary, Trajectory]]:
    """Replications with per-replication derived seeds, in replication order."""
    if n_reps < 1:
        raise ValueError("n_reps must be at least 1")
    population = None
    pop_seed = derive_seed(base_seed, _POPULATION_STREAM)
    if fixed_population:
        population = make_population(model, n_agents, pop_seed)
    for rep in range(n_reps):
        if not fixed_population:
            pop_seed = derive_seed(base_seed, _POPULATION_STREAM, rep)
            population = make_population(model, n_agents, pop_seed)
        perm_seed = derive_seed(base_seed, _PERMUTATION_STREAM, rep)
        lam_seed = derive_seed(base_seed, _LAMBDA_STREAM, rep)
        order = RandomSource(perm_seed, _PERMUTATION_STREAM).generator().permutation(n_agents)
        trajectory = run_sequence(
            model,
            population,
            order,
            lam_seed,
            replication_id=rep,
            permutation_seed=perm_seed,
            keep_ratings=keep_ratings,
        )
        nearest, distance = _classify(trajectory.final_mean, equilibria)
        summary = RunSummary(
            replication_id=rep,
            final_mean=trajectory.final_mean,
            nearest_equilibrium=nearest,
            distance=distance,
            population_seed=pop_seed,
            permutation_seed=perm_seed,
            lambda_seed=lam_seed,
        )
        yield summary, trajectory


def run_replications(
    model: RatingModel,
    n_agents: int,
    n_reps: int,
    base_seed: int,
    fixed_population: bool = True,
    equilibria: Sequence[float] = (),
) -> list[RunSummary]:
    """Summaries only; trajectories are discarded to keep large sweeps cheap."""
    return [
        summary
        for summary, _ in iter_replications(
            model, n_agents, n_reps, base_seed, fixed_population, equilibria
        )
    ]
