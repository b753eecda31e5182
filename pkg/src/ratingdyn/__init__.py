"""Sequential online-rating dynamics under social influence.

Build a RatingModel from a latent-opinion distribution and an influence
kernel, then evaluate its influence curve, locate and classify equilibria,
quantify distortion of the long-run rating, and simulate the sequential
process itself. The `ratingdyn` CLI wraps everything behind a JSON config
and deterministic CSV outputs.
"""

from .curve import CurvePoint, curve_tabulate, curve_value, curve_value_mc, uniform_grid
from .equilibrium import (
    BifurcationResult,
    BifurcationRow,
    Equilibrium,
    FullHerdingError,
    ItemEquilibrium,
    NoEquilibriumFoundError,
    RankReport,
    bifurcation_sweep,
    closed_form_equilibrium,
    find_equilibria,
    rank_preservation,
    uniqueness_check,
)
from .model import (
    AffineLatentKernel,
    BetaLatent,
    ConstantKernel,
    DiscreteLatent,
    DistanceKernel,
    IndependentBetaKernel,
    InfluenceKernel,
    LatentDistribution,
    LatentOnlyKernel,
    ModelError,
    PointMassLatent,
    ProximityKernel,
    RandomSource,
    RatingModel,
    XDependentKernelError,
    derive_seed,
    expressed_rating,
    kernel_mean,
    lambda_latent_moments,
    latent_expectation,
    latent_moment,
    sample_lambda,
    sample_latent,
)
from .quadrature import QuadratureError
from .simulate import (
    Population,
    RunSummary,
    Trajectory,
    iter_replications,
    make_population,
    run_replications,
    run_sequence,
)

__all__ = [
    "AffineLatentKernel",
    "BetaLatent",
    "BifurcationResult",
    "BifurcationRow",
    "ConstantKernel",
    "CurvePoint",
    "DiscreteLatent",
    "DistanceKernel",
    "Equilibrium",
    "FullHerdingError",
    "IndependentBetaKernel",
    "InfluenceKernel",
    "ItemEquilibrium",
    "LatentDistribution",
    "LatentOnlyKernel",
    "ModelError",
    "NoEquilibriumFoundError",
    "PointMassLatent",
    "Population",
    "ProximityKernel",
    "QuadratureError",
    "RandomSource",
    "RankReport",
    "RatingModel",
    "RunSummary",
    "Trajectory",
    "XDependentKernelError",
    "bifurcation_sweep",
    "closed_form_equilibrium",
    "curve_tabulate",
    "curve_value",
    "curve_value_mc",
    "derive_seed",
    "expressed_rating",
    "find_equilibria",
    "iter_replications",
    "kernel_mean",
    "lambda_latent_moments",
    "latent_expectation",
    "latent_moment",
    "make_population",
    "rank_preservation",
    "run_replications",
    "run_sequence",
    "sample_lambda",
    "sample_latent",
    "uniform_grid",
    "uniqueness_check",
]

__version__ = "0.1.0"
