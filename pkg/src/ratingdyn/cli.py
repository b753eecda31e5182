"""Command-line front end.

Reads a JSON model configuration, dispatches to the analysis modules, and
writes deterministic CSV datasets (byte-identical on rerun with the same
config and seeds). Every CSV starts with '#' metadata lines recording the
fully resolved config, so any output can be traced back to its inputs.

Exit codes: 0 success, 2 config error, 3 numerical failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .curve import curve_tabulate
from .equilibrium import (
    BifurcationResult,
    bifurcation_sweep,
    find_equilibria,
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
    derive_seed,
    sample_lambda,
)
from .simulate import iter_replications

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

DEFAULT_SEED = 12345

# seed-derivation tags for the figure datasets
_FIG1B_STREAM = 11
_FIG2RIGHT_STREAM = 12


class ConfigError(ValueError):
    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"config field '{field}': {message}")


# ---------------------------------------------------------------------------
# config parsing and validation


def _require_mapping(block, field: str) -> dict:
    if not isinstance(block, dict):
        raise ConfigError(field, f"expected an object, got {type(block).__name__}")
    return block


def _check_keys(block: dict, allowed: Sequence[str], field: str) -> None:
    unknown = sorted(set(block) - set(allowed))
    if unknown:
        raise ConfigError(f"{field}.{unknown[0]}", "unknown key")


def _get_number(block: dict, key: str, field: str, default=None) -> float:
    if key not in block:
        if default is None:
            raise ConfigError(f"{field}.{key}", "missing required value")
        return default
    value = block[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{field}.{key}", f"expected a number, got {value!r}")
    return float(value)


def _get_int(block: dict, key: str, field: str, default=None, minimum: int = 1) -> int:
    if key not in block:
        if default is None:
            raise ConfigError(f"{field}.{key}", "missing required value")
        return default
    value = block[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{field}.{key}", f"expected an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(f"{field}.{key}", f"must be >= {minimum}, got {value}")
    return value


def parse_latent(block, field: str = "latent") -> LatentDistribution:
    block = _require_mapping(block, field)
    family = block.get("family")
    try:
        if family == "beta":
            _check_keys(block, ("family", "alpha", "beta"), field)
            return BetaLatent(
                _get_number(block, "alpha", field), _get_number(block, "beta", field)
            )
        if family == "point_mass":
            _check_keys(block, ("family", "value"), field)
            return PointMassLatent(_get_number(block, "value", field))
        if family == "discrete":
            _check_keys(block, ("family", "atoms"), field)
            atoms = block.get("atoms")
            if not isinstance(atoms, list):
                raise ConfigError(f"{field}.atoms", "expected a list of [value, prob] pairs")
            pairs = []
            for i, atom in enumerate(atoms):
                if not isinstance(atom, list) or len(atom) != 2:
                    raise ConfigError(f"{field}.atoms[{i}]", "expected a [value, prob] pair")
                pairs.append((float(atom[0]), float(atom[1])))
            return DiscreteLatent(tuple(pairs))
    except ModelError as exc:
        raise ConfigError(field, str(exc)) from exc
    raise ConfigError(f"{field}.family", f"unknown latent family {family!r}")


def parse_kernel(block, field: str = "kernel") -> InfluenceKernel:
    block = _require_mapping(block, field)
    variant = block.get("variant")
    try:
        if variant == "constant":
            _check_keys(block, ("variant", "level"), field)
            return ConstantKernel(_get_number(block, "level", field))
        if variant == "independent_beta":
            _check_keys(block, ("variant", "a", "b"), field)
            return IndependentBetaKernel(
                _get_number(block, "a", field), _get_number(block, "b", field)
            )
        if variant == "affine_latent":
            _check_keys(block, ("variant", "intercept", "slope"), field)
            return AffineLatentKernel(
                _get_number(block, "intercept", field), _get_number(block, "slope", field)
            )
        if variant == "latent_only":
            _check_keys(block, ("variant", "m", "shape"), field)
            return LatentOnlyKernel(
                _get_number(block, "m", field), _get_number(block, "shape", field)
            )
        if variant == "distance":
            _check_keys(block, ("variant", "shape"), field)
            return DistanceKernel(_get_number(block, "shape", field))
        if variant == "proximity":
            _check_keys(block, ("variant", "lambda_max"), field)
            return ProximityKernel(_get_number(block, "lambda_max", field))
    except ModelError as exc:
        raise ConfigError(field, str(exc)) from exc
    raise ConfigError(f"{field}.variant", f"unknown kernel variant {variant!r}")


def _resolve_grid(block, field: str) -> dict:
    block = _require_mapping(block, field)
    if "points" in block:
        _check_keys(block, ("points",), field)
        points = block["points"]
        if not isinstance(points, list) or len(points) < 1:
            raise ConfigError(f"{field}.points", "expected a non-empty list")
        return {"points": [float(p) for p in points]}
    _check_keys(block, ("start", "stop", "count", "step"), field)
    start = _get_number(block, "start", field, 0.0)
    stop = _get_number(block, "stop", field, 1.0)
    if stop <= start:
        raise ConfigError(f"{field}.stop", "stop must exceed start")
    if "step" in block:
        if "count" in block:
            raise ConfigError(f"{field}.step", "give either step or count, not both")
        step = _get_number(block, "step", field)
        if step <= 0:
            raise ConfigError(f"{field}.step", "step must be positive")
        ratio = (stop - start) / step
        count = round(ratio) + 1
        if abs(ratio - round(ratio)) > 1e-9:
            raise ConfigError(f"{field}.step", "step must divide the span evenly")
    else:
        count = _get_int(block, "count", field, 1001, minimum=2)
    return {"start": start, "stop": stop, "count": count}


def _grid_points(resolved_grid: dict) -> np.ndarray:
    if "points" in resolved_grid:
        return np.asarray(resolved_grid["points"], dtype=float)
    return np.linspace(resolved_grid["start"], resolved_grid["stop"], resolved_grid["count"])


_TOP_KEYS = ("latent", "kernel", "seed", "out_dir", "curve", "equilibria", "bifurcate", "simulate", "figures")

_BIFURCATION_FAMILIES = ("latent_beta_fixed_mean", "latent_beta_symmetric", "kernel_constant_level")


def resolve_config(raw: dict, command: str) -> dict:
    """Validate `raw` for `command` and materialize every default.

    The result is itself a valid config: resolving it again returns an
    equal dict, which is what makes the CSV metadata reproducible.
    """
    raw = _require_mapping(raw, "config")
    _check_keys(raw, _TOP_KEYS, "config")

    seed = raw.get("seed", DEFAULT_SEED)
    if isinstance(seed, bool) or not isinstance(seed, int) or not (0 <= seed < 2**64):
        raise ConfigError("seed", f"expected a 64-bit unsigned integer, got {seed!r}")
    out_dir = raw.get("out_dir", "out")
    if not isinstance(out_dir, str) or not out_dir:
        raise ConfigError("out_dir", "expected a non-empty string")

    resolved: dict = {"seed": seed, "out_dir": out_dir}

    # validate the model blocks whenever they are present, whether or not
    # the command needs them; bad values must never reach computation
    if "latent" in raw:
        parse_latent(raw["latent"])
    if "kernel" in raw:
        parse_kernel(raw["kernel"])

    family = None
    if command == "bifurcate":
        block = _require_mapping(raw.get("bifurcate", {}), "bifurcate")
        family = block.get("family")
        if family not in _BIFURCATION_FAMILIES:
            raise ConfigError(
                "bifurcate.family",
                f"expected one of {list(_BIFURCATION_FAMILIES)}, got {family!r}",
            )

    # carry over exactly the blocks the command consumes
    needs_latent = command in ("curve", "equilibria", "simulate") or (
        command == "bifurcate" and family == "kernel_constant_level"
    )
    needs_kernel = command in ("curve", "equilibria", "simulate") or (
        command == "bifurcate" and family != "kernel_constant_level"
    )
    if needs_latent:
        if "latent" not in raw:
            raise ConfigError("latent", "missing required block")
        resolved["latent"] = dict(raw["latent"])
    if needs_kernel:
        if "kernel" not in raw:
            raise ConfigError("kernel", "missing required block")
        resolved["kernel"] = dict(raw["kernel"])

    if command == "curve":
        block = _require_mapping(raw.get("curve", {}), "curve")
        _check_keys(block, ("grid", "tol"), "curve")
        grid = _resolve_grid(block.get("grid", {}), "curve.grid")
        tol = _get_number(block, "tol", "curve", 1e-8)
        if tol <= 0:
            raise ConfigError("curve.tol", "must be positive")
        resolved["curve"] = {"grid": grid, "tol": tol}

    elif command == "equilibria":
        block = _require_mapping(raw.get("equilibria", {}), "equilibria")
        _check_keys(block, ("grid_size", "root_tol"), "equilibria")
        root_tol = _get_number(block, "root_tol", "equilibria", 1e-10)
        if root_tol <= 0:
            raise ConfigError("equilibria.root_tol", "must be positive")
        resolved["equilibria"] = {
            "grid_size": _get_int(block, "grid_size", "equilibria", 1001, minimum=3),
            "root_tol": root_tol,
        }

    elif command == "bifurcate":
        block = _require_mapping(raw.get("bifurcate", {}), "bifurcate")
        _check_keys(block, ("family", "mu", "params", "grid_size", "root_tol"), "bifurcate")
        params = _require_mapping(block.get("params", {}), "bifurcate.params")
        if "values" in params:
            _check_keys(params, ("values",), "bifurcate.params")
            values = params["values"]
            if not isinstance(values, list) or not values:
                raise ConfigError("bifurcate.params.values", "expected a non-empty list")
            resolved_params = {"values": [float(v) for v in values]}
        else:
            _check_keys(params, ("scale", "start", "stop", "count"), "bifurcate.params")
            scale = params.get("scale", "log")
            if scale not in ("log", "linear"):
                raise ConfigError("bifurcate.params.scale", f"expected 'log' or 'linear', got {scale!r}")
            start = _get_number(params, "start", "bifurcate.params", 0.1)
            stop = _get_number(params, "stop", "bifurcate.params", 3.0)
            if start <= 0 and scale == "log":
                raise ConfigError("bifurcate.params.start", "log scale needs start > 0")
            if stop <= start:
                raise ConfigError("bifurcate.params.stop", "stop must exceed start")
            resolved_params = {
                "scale": scale,
                "start": start,
                "stop": stop,
                "count": _get_int(params, "count", "bifurcate.params", 60, minimum=2),
            }
        root_tol = _get_number(block, "root_tol", "bifurcate", 1e-10)
        if root_tol <= 0:
            raise ConfigError("bifurcate.root_tol", "must be positive")
        resolved_bif = {
            "family": family,
            "params": resolved_params,
            "grid_size": _get_int(block, "grid_size", "bifurcate", 1001, minimum=3),
            "root_tol": root_tol,
        }
        if family == "latent_beta_fixed_mean":
            mu = _get_number(block, "mu", "bifurcate", 0.7)
            if not (0.0 < mu < 1.0):
                raise ConfigError("bifurcate.mu", "must lie strictly inside (0, 1)")
            resolved_bif["mu"] = mu
        elif "mu" in block:
            raise ConfigError("bifurcate.mu", f"not used by family {family!r}")
        resolved["bifurcate"] = resolved_bif

    elif command == "simulate":
        block = _require_mapping(raw.get("simulate", {}), "simulate")
        _check_keys(
            block,
            ("agents", "reps", "fixed_population", "trajectory_stride", "write_trajectories"),
            "simulate",
        )
        fixed = block.get("fixed_population", True)
        write_traj = block.get("write_trajectories", True)
        if not isinstance(fixed, bool):
            raise ConfigError("simulate.fixed_population", "expected true or false")
        if not isinstance(write_traj, bool):
            raise ConfigError("simulate.write_trajectories", "expected true or false")
        resolved["simulate"] = {
            "agents": _get_int(block, "agents", "simulate", 10000),
            "reps": _get_int(block, "reps", "simulate", 40),
            "fixed_population": fixed,
            "trajectory_stride": _get_int(block, "trajectory_stride", "simulate", 10),
            "write_trajectories": write_traj,
        }

    elif command == "figures":
        block = _require_mapping(raw.get("figures", {}), "figures")
        _check_keys(block, ("fig1a", "fig1b", "fig2left", "fig2right", "fig3"), "figures")
        f1a = _require_mapping(block.get("fig1a", {}), "figures.fig1a")
        _check_keys(f1a, ("lambda_count", "grid_count"), "figures.fig1a")
        f1b = _require_mapping(block.get("fig1b", {}), "figures.fig1b")
        _check_keys(f1b, ("lines", "agents", "grid_count"), "figures.fig1b")
        f2l = _require_mapping(block.get("fig2left", {}), "figures.fig2left")
        _check_keys(f2l, ("alphas", "grid_count", "tol"), "figures.fig2left")
        alphas = f2l.get("alphas", [0.1, 0.3, 3.0])
        if not isinstance(alphas, list) or not alphas:
            raise ConfigError("figures.fig2left.alphas", "expected a non-empty list")
        f2r = _require_mapping(block.get("fig2right", {}), "figures.fig2right")
        _check_keys(f2r, ("alpha", "agents", "reps", "stride"), "figures.fig2right")
        f3 = _require_mapping(block.get("fig3", {}), "figures.fig3")
        _check_keys(f3, ("start", "stop", "count", "mu", "grid_size", "root_tol"), "figures.fig3")
        tol = _get_number(f2l, "tol", "figures.fig2left", 1e-8)
        if tol <= 0:
            raise ConfigError("figures.fig2left.tol", "must be positive")
        root_tol = _get_number(f3, "root_tol", "figures.fig3", 1e-10)
        if root_tol <= 0:
            raise ConfigError("figures.fig3.root_tol", "must be positive")
        mu = _get_number(f3, "mu", "figures.fig3", 0.7)
        if not (0.0 < mu < 1.0):
            raise ConfigError("figures.fig3.mu", "must lie strictly inside (0, 1)")
        resolved["figures"] = {
            "fig1a": {
                "lambda_count": _get_int(f1a, "lambda_count", "figures.fig1a", 11, minimum=2),
                "grid_count": _get_int(f1a, "grid_count", "figures.fig1a", 101, minimum=2),
            },
            "fig1b": {
                "lines": _get_int(f1b, "lines", "figures.fig1b", 10),
                "agents": _get_int(f1b, "agents", "figures.fig1b", 10000, minimum=2),
                "grid_count": _get_int(f1b, "grid_count", "figures.fig1b", 101, minimum=2),
            },
            "fig2left": {
                "alphas": [float(a) for a in alphas],
                "grid_count": _get_int(f2l, "grid_count", "figures.fig2left", 1001, minimum=2),
                "tol": tol,
            },
            "fig2right": {
                "alpha": _get_number(f2r, "alpha", "figures.fig2right", 0.3),
                "agents": _get_int(f2r, "agents", "figures.fig2right", 10000),
                "reps": _get_int(f2r, "reps", "figures.fig2right", 40),
                "stride": _get_int(f2r, "stride", "figures.fig2right", 20),
            },
            "fig3": {
                "start": _get_number(f3, "start", "figures.fig3", 0.1),
                "stop": _get_number(f3, "stop", "figures.fig3", 3.0),
                "count": _get_int(f3, "count", "figures.fig3", 60, minimum=2),
                "mu": mu,
                "grid_size": _get_int(f3, "grid_size", "figures.fig3", 1001, minimum=3),
                "root_tol": root_tol,
            },
        }
    else:
        raise ConfigError("command", f"unknown command {command!r}")

    return resolved


def build_model(resolved: dict) -> RatingModel:
    return RatingModel(parse_latent(resolved["latent"]), parse_kernel(resolved["kernel"]))


# ---------------------------------------------------------------------------
# CSV output


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def write_csv(path: Path, command: str, resolved: dict, columns: Sequence[str], rows, extra_meta: Sequence[str] = ()) -> None:
    config_json = json.dumps(resolved, sort_keys=True, separators=(",", ":"))
    lines = [f"# ratingdyn {command}", f"# config: {config_json}"]
    lines.extend(f"# {m}" for m in extra_meta)
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


# ---------------------------------------------------------------------------
# commands


def cmd_curve(resolved: dict, out_dir: Path) -> list[Path]:
    model = build_model(resolved)
    grid = _grid_points(resolved["curve"]["grid"])
    points = curve_tabulate(model, grid, resolved["curve"]["tol"])
    rows = [(p.x, p.f_x, p.abs_err, p.method) for p in points]
    out = out_dir / "curve.csv"
    write_csv(out, "curve", resolved, ("x", "f_x", "abs_err", "method"), rows)
    return [out]


def cmd_equilibria(resolved: dict, out_dir: Path) -> list[Path]:
    model = build_model(resolved)
    block = resolved["equilibria"]
    eqs = find_equilibria(model, grid_size=block["grid_size"], root_tol=block["root_tol"])
    rows = [(e.x_star, e.stability, e.residual, e.slope_estimate) for e in eqs]
    out = out_dir / "equilibria.csv"
    write_csv(out, "equilibria", resolved, ("x_star", "stability", "residual", "slope_estimate"), rows)
    return [out]


def _bifurcation_family(resolved: dict) -> Callable[[float], RatingModel]:
    block = resolved["bifurcate"]
    kind = block["family"]
    if kind == "latent_beta_fixed_mean":
        kernel = parse_kernel(resolved["kernel"])
        mu = block["mu"]

        def family(alpha: float) -> RatingModel:
            return RatingModel(BetaLatent(alpha, alpha / mu - alpha), kernel)

    elif kind == "latent_beta_symmetric":
        kernel = parse_kernel(resolved["kernel"])

        def family(alpha: float) -> RatingModel:
            return RatingModel(BetaLatent(alpha, alpha), kernel)

    else:  # kernel_constant_level
        latent = parse_latent(resolved["latent"])

        def family(level: float) -> RatingModel:
            return RatingModel(latent, ConstantKernel(level))

    return family


def _bifurcation_params(block: dict) -> np.ndarray:
    params = block["params"]
    if "values" in params:
        return np.asarray(params["values"], dtype=float)
    if params["scale"] == "log":
        return np.geomspace(params["start"], params["stop"], params["count"])
    return np.linspace(params["start"], params["stop"], params["count"])


def _run_bifurcation(resolved: dict) -> BifurcationResult:
    block = resolved["bifurcate"]
    family = _bifurcation_family(resolved)
    values = _bifurcation_params(block)
    return bifurcation_sweep(
        family, values, grid_size=block["grid_size"], root_tol=block["root_tol"]
    )


def cmd_bifurcate(resolved: dict, out_dir: Path) -> list[Path]:
    result = _run_bifurcation(resolved)
    for param, message in result.failures:
        print(f"bifurcate: row at param={param!r} failed: {message}", file=sys.stderr)
    rows = [
        (row.param, e.x_star, e.stability)
        for row in result.rows
        for e in row.equilibria
    ]
    out = out_dir / "bifurcation.csv"
    write_csv(out, "bifurcate", resolved, ("param", "x_star", "stability"), rows)
    side = out_dir / "bifurcation_transitions.csv"
    write_csv(
        side,
        "bifurcate",
        resolved,
        ("param_low", "param_high", "stable_before", "stable_after"),
        result.transitions,
    )
    return [out, side]


def cmd_simulate(resolved: dict, out_dir: Path) -> list[Path]:
    model = build_model(resolved)
    block = resolved["simulate"]
    eqs = find_equilibria(model)
    stable = [e.x_star for e in eqs if e.stability == "stable"]
    meta = ["stable_equilibria: " + ",".join(_fmt(s) for s in stable)]

    summary_rows = []
    traj_rows = []
    stride = block["trajectory_stride"]
    n = block["agents"]
    for summary, traj in iter_replications(
        model,
        n_agents=n,
        n_reps=block["reps"],
        base_seed=resolved["seed"],
        fixed_population=block["fixed_population"],
        equilibria=stable,
    ):
        summary_rows.append(
            (
                summary.replication_id,
                summary.final_mean,
                summary.nearest_equilibrium,
                summary.distance,
                summary.population_seed,
                summary.permutation_seed,
                summary.lambda_seed,
            )
        )
        if block["write_trajectories"]:
            for step in range(1, n + 1):
                if step == 1 or step == n or step % stride == 0:
                    traj_rows.append((summary.replication_id, step, traj.running_means[step - 1]))

    outputs = []
    summary_path = out_dir / "summary.csv"
    write_csv(
        summary_path,
        "simulate",
        resolved,
        (
            "replication",
            "final_mean",
            "nearest_equilibrium",
            "distance",
            "population_seed",
            "permutation_seed",
            "lambda_seed",
        ),
        summary_rows,
        extra_meta=meta,
    )
    outputs.append(summary_path)
    if block["write_trajectories"]:
        traj_path = out_dir / "trajectory.csv"
        write_csv(
            traj_path,
            "simulate",
            resolved,
            ("replication", "step", "running_mean"),
            traj_rows,
            extra_meta=meta,
        )
        outputs.append(traj_path)
    return outputs


def _truncated_normal(rng: np.random.Generator, loc: float, scale: float) -> float:
    # rejection sampling; acceptance is ~93% for the fig-1b parameters
    for _ in range(10000):
        value = rng.normal(loc, scale)
        if 0.0 <= value <= 1.0:
            return value
    raise RuntimeError("truncated-normal rejection sampling failed to accept")


def cmd_figures(resolved: dict, out_dir: Path) -> list[Path]:
    block = resolved["figures"]
    outputs = []

    # fig1a: affine influence lines through (0.75, 0.75), one per mean weight
    f1a = block["fig1a"]
    latent = BetaLatent(3.0, 1.0)
    xs = np.linspace(0.0, 1.0, f1a["grid_count"])
    rows = []
    for i, lam in enumerate(np.linspace(0.0, 1.0, f1a["lambda_count"])):
        for x in xs:
            rows.append((i, lam, x, lam * x + (1.0 - lam) * latent.mean))
    path = out_dir / "fig1a.csv"
    write_csv(path, "figures", resolved, ("line", "lambda_mean", "x", "f_x"), rows)
    outputs.append(path)

    # fig1b: lines with estimated moments for anchors m ~ TruncNormal(0.7, 0.2)
    f1b = block["fig1b"]
    rng = RandomSource(resolved["seed"], _FIG1B_STREAM).generator()
    xs = np.linspace(0.0, 1.0, f1b["grid_count"])
    rows = []
    equilibria = []
    for i in range(f1b["lines"]):
        m = _truncated_normal(rng, 0.7, 0.2)
        kernel = LatentOnlyKernel(m=m, shape=3.0)
        r = np.asarray(latent.sample(rng, f1b["agents"]), dtype=float)
        lam = np.asarray(sample_lambda(kernel, r, 0.0, rng), dtype=float)
        lam_hat = float(np.mean(lam))
        intercept_hat = float(np.mean((1.0 - lam) * r))
        eq = intercept_hat / (1.0 - lam_hat)
        equilibria.append(eq)
        for x in xs:
            rows.append((i, m, lam_hat, eq, x, lam_hat * x + intercept_hat))
    meta = [
        "equilibrium_band: " + _fmt(min(equilibria)) + "," + _fmt(max(equilibria)),
    ]
    path = out_dir / "fig1b.csv"
    write_csv(
        path, "figures", resolved, ("line", "m", "lambda_mean", "equilibrium", "x", "f_x"), rows, meta
    )
    outputs.append(path)

    # fig2left: nonlinear curves for the distance kernel at several polarizations
    f2l = block["fig2left"]
    rows = []
    for i, alpha in enumerate(f2l["alphas"]):
        model = RatingModel(BetaLatent(alpha, alpha), DistanceKernel(shape=3.0))
        points = curve_tabulate(model, np.linspace(0.0, 1.0, f2l["grid_count"]), f2l["tol"])
        rows.extend((i, alpha, p.x, p.f_x) for p in points)
    path = out_dir / "fig2left.csv"
    write_csv(path, "figures", resolved, ("line", "alpha", "x", "f_x"), rows)
    outputs.append(path)

    # fig2right: randomized-order trajectories of one fixed polarized population
    f2r = block["fig2right"]
    model = RatingModel(BetaLatent(f2r["alpha"], f2r["alpha"]), DistanceKernel(shape=3.0))
    eqs = find_equilibria(model)
    stable = [e.x_star for e in eqs if e.stability == "stable"]
    meta = ["stable_equilibria: " + ",".join(_fmt(s) for s in stable)]
    rows = []
    n = f2r["agents"]
    stride = f2r["stride"]
    for summary, traj in iter_replications(
        model,
        n_agents=n,
        n_reps=f2r["reps"],
        base_seed=derive_seed(resolved["seed"], _FIG2RIGHT_STREAM),
        fixed_population=True,
        equilibria=stable,
    ):
        for step in range(1, n + 1):
            if step == 1 or step == n or step % stride == 0:
                rows.append((summary.replication_id, step, traj.running_means[step - 1]))
    path = out_dir / "fig2right.csv"
    write_csv(path, "figures", resolved, ("replication", "step", "running_mean"), rows, meta)
    outputs.append(path)

    # fig3: bifurcation of the fixed-mean polarization family
    f3 = block["fig3"]
    kernel = DistanceKernel(shape=3.0)
    mu = f3["mu"]

    def family(alpha: float) -> RatingModel:
        return RatingModel(BetaLatent(alpha, alpha / mu - alpha), kernel)

    result = bifurcation_sweep(
        family,
        np.geomspace(f3["start"], f3["stop"], f3["count"]),
        grid_size=f3["grid_size"],
        root_tol=f3["root_tol"],
    )
    for param, message in result.failures:
        print(f"figures: fig3 row at param={param!r} failed: {message}", file=sys.stderr)
    rows = [
        (row.param, e.x_star, e.stability)
        for row in result.rows
        for e in row.equilibria
    ]
    meta = [
        "transitions: "
        + ";".join(
            f"{_fmt(lo)},{_fmt(hi)},{before},{after}" for lo, hi, before, after in result.transitions
        )
    ]
    path = out_dir / "fig3.csv"
    write_csv(path, "figures", resolved, ("param", "x_star", "stability"), rows, meta)
    outputs.append(path)

    return outputs


_COMMANDS = {
    "curve": cmd_curve,
    "equilibria": cmd_equilibria,
    "bifurcate": cmd_bifurcate,
    "simulate": cmd_simulate,
    "figures": cmd_figures,
}


# ---------------------------------------------------------------------------
# entry point


def _parse_grid_flag(text: str) -> dict:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError("--grid", "expected start:stop:step")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError("--grid", f"non-numeric component in {text!r}") from exc
    return {"start": start, "stop": stop, "step": step}


def _apply_overrides(raw: dict, args: argparse.Namespace) -> dict:
    raw = dict(raw)
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.out_dir is not None:
        raw["out_dir"] = args.out_dir
    if args.grid is not None:
        block = dict(raw.get("curve", {}))
        block["grid"] = _parse_grid_flag(args.grid)
        raw["curve"] = block
    if args.reps is not None or args.agents is not None:
        block = dict(raw.get("simulate", {}))
        if args.reps is not None:
            block["reps"] = args.reps
        if args.agents is not None:
            block["agents"] = args.agents
        raw["simulate"] = block
    return raw


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="ratingdyn",
        description="Analyze sequential rating dynamics under social influence.",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True, help="JSON configuration file")
    parser.add_argument("--seed", type=int, default=None, help="override config seed")
    parser.add_argument("--out-dir", default=None, help="override output directory")
    parser.add_argument("--grid", default=None, help="curve grid as start:stop:step")
    parser.add_argument("--reps", type=int, default=None, help="override replication count")
    parser.add_argument("--agents", type=int, default=None, help="override agents per replication")
    args = parser.parse_args(argv)

    try:
        try:
            raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except OSError as exc:
            print(f"ratingdyn: cannot read config: {exc}", file=sys.stderr)
            return EXIT_IO
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"invalid JSON: {exc}") from exc
        raw = _apply_overrides(raw, args)
        resolved = resolve_config(raw, args.command)
    except ConfigError as exc:
        print(f"ratingdyn: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out_dir = Path(resolved["out_dir"])
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        outputs = _COMMANDS[args.command](resolved, out_dir)
    except OSError as exc:
        print(f"ratingdyn: I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    except (RuntimeError, ModelError, ArithmeticError, ValueError) as exc:
        # QuadratureError, root-finder failures, degenerate models
        print(f"ratingdyn: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    for path in outputs:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
