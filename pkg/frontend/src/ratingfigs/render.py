"""Panel rendering over ratingdyn CSV datasets.

Strictly read-only: every number drawn comes from the CSV (data columns or
'#' metadata); nothing is recomputed from the model. Diagonal crossings of
a tabulated curve are read off the plotted polyline by linear interpolation,
which is a property of the drawing, not of the model.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

PANELS = ("curve", "trajectory", "bifurcation")


class SchemaError(ValueError):
    """Dataset columns or metadata do not match the expected CLI schema."""


@dataclass(frozen=True)
class FigureSpec:
    dataset: Path
    panel: str  # "curve" | "trajectory" | "bifurcation"
    output: Path

    def __post_init__(self) -> None:
        if self.panel not in PANELS:
            raise SchemaError(f"unknown panel kind {self.panel!r}; expected one of {PANELS}")


@dataclass(frozen=True)
class Dataset:
    meta: dict[str, str]
    columns: list[str]
    rows: list[list[str]]

    def column(self, name: str) -> np.ndarray:
        idx = self.columns.index(name)
        return np.array([float(row[idx]) for row in self.rows])

    def text_column(self, name: str) -> list[str]:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]


def read_dataset(path: Path) -> Dataset:
    if not path.exists():
        raise FileNotFoundError(f"dataset not found: {path}")
    meta: dict[str, str] = {}
    columns: list[str] | None = None
    rows: list[list[str]] = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            body = line[1:].strip()
            if ":" in body:
                key, value = body.split(":", 1)
                meta[key.strip()] = value.strip()
            continue
        if columns is None:
            columns = line.split(",")
            continue
        if line:
            rows.append(line.split(","))
    if columns is None or not rows:
        raise SchemaError(f"{path} has no data rows")
    width = len(columns)
    if any(len(row) != width for row in rows):
        raise SchemaError(f"{path} has rows that do not match its {width}-column header")
    return Dataset(meta=meta, columns=columns, rows=rows)


def require_columns(data: Dataset, names: tuple[str, ...], path: Path) -> None:
    missing = [n for n in names if n not in data.columns]
    if missing:
        raise SchemaError(f"{path} is missing required column(s) {missing}; has {data.columns}")


def diagonal_crossings(x: np.ndarray, f: np.ndarray) -> list[tuple[float, bool]]:
    """(location, is_downcrossing) for each sign change of f - x along the
    polyline; downcrossings are the stable equilibria."""
    g = f - x
    out: list[tuple[float, bool]] = []
    for i in range(len(g) - 1):
        a, b = g[i], g[i + 1]
        if a == 0.0 or (a > 0) == (b > 0):
            continue
        t = a / (a - b)
        out.append((float(x[i] + t * (x[i + 1] - x[i])), a > 0))
    return out


def _line_groups(data: Dataset) -> list[tuple[str, np.ndarray, np.ndarray]]:
    """Split a curve dataset into (label, x, f) polylines."""
    if "line" not in data.columns:
        return [("f", data.column("x"), data.column("f_x"))]
    ids = data.text_column("line")
    x = data.column("x")
    f = data.column("f_x")
    label_col = next(
        (c for c in data.columns if c not in ("line", "x", "f_x", "equilibrium")), None
    )
    labels = data.text_column(label_col) if label_col else ids
    groups = []
    for line_id in dict.fromkeys(ids):  # preserve file order
        mask = np.array([i == line_id for i in ids])
        name = f"{label_col}={labels[int(np.argmax(mask))]}" if label_col else f"line {line_id}"
        groups.append((name, x[mask], f[mask]))
    return groups


def render_curve(data: Dataset, ax: plt.Axes, path: Path) -> None:
    require_columns(data, ("x", "f_x"), path)
    if "equilibrium" in data.columns:
        eq = data.column("equilibrium")
        lo, hi = float(eq.min()), float(eq.max())
        if "equilibrium_band" in data.meta:
            lo, hi = (float(v) for v in data.meta["equilibrium_band"].split(","))
        ax.axvspan(lo, hi, color="0.85", zorder=0, label="equilibrium range")
    ax.plot([0, 1], [0, 1], linestyle="--", color="0.4", linewidth=1, label="y = x")
    for name, x, f in _line_groups(data):
        (line,) = ax.plot(x, f, linewidth=1.4, label=name)
        for where, stable in diagonal_crossings(x, f):
            ax.plot(
                [where],
                [where],
                marker="o",
                markersize=6,
                markerfacecolor=line.get_color() if stable else "white",
                markeredgecolor=line.get_color(),
                zorder=5,
            )
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    ax.set_xlabel("observed average rating")
    ax.set_ylabel("expected next rating")
    if len(data.rows) and len(ax.get_legend_handles_labels()[0]) <= 13:
        ax.legend(fontsize=8, loc="upper left")


def render_trajectory(data: Dataset, ax: plt.Axes, path: Path) -> None:
    require_columns(data, ("replication", "step", "running_mean"), path)
    reps = data.text_column("replication")
    steps = data.column("step")
    means = data.column("running_mean")
    for rep in dict.fromkeys(reps):
        mask = np.array([r == rep for r in reps])
        ax.plot(steps[mask], means[mask], linewidth=0.8, alpha=0.75)
    for guide in data.meta.get("stable_equilibria", "").split(","):
        if guide:
            ax.axhline(float(guide), linestyle="--", color="0.2", linewidth=1.2)
    ax.set_xscale("log")
    ax.set_ylim(0, 1)
    ax.set_xlabel("raters")
    ax.set_ylabel("running average rating")


def render_bifurcation(data: Dataset, ax: plt.Axes, path: Path) -> None:
    require_columns(data, ("param", "x_star", "stability"), path)
    params = data.column("param")
    xs = data.column("x_star")
    stab = data.text_column("stability")

    # chain points of equal stability across consecutive parameter values
    by_param: dict[float, list[tuple[float, str]]] = {}
    for p, x, s in zip(params, xs, stab):
        by_param.setdefault(float(p), []).append((float(x), s))
    ordered = sorted(by_param)
    for prev, curr in zip(ordered[:-1], ordered[1:]):
        for x0, s0 in by_param[prev]:
            candidates = [x1 for x1, s1 in by_param[curr] if s1 == s0 and abs(x1 - x0) < 0.2]
            if candidates:
                x1 = min(candidates, key=lambda v: abs(v - x0))
                style = "-" if s0 == "stable" else "--"
                ax.plot([prev, curr], [x0, x1], style, color="C0", linewidth=1.3)

    for kind, face in (("stable", "C0"), ("unstable", "white"), ("degenerate", "0.6")):
        mask = np.array([s == kind for s in stab])
        if mask.any():
            ax.plot(
                params[mask],
                xs[mask],
                linestyle="none",
                marker="o",
                markersize=3.5,
                markerfacecolor=face,
                markeredgecolor="C0",
                label=kind,
            )
    if params.min() > 0 and params.max() / params.min() > 10:
        ax.set_xscale("log")
    ax.set_ylim(0, 1)
    ax.set_xlabel("bifurcation parameter")
    ax.set_ylabel("equilibrium rating")
    ax.legend(fontsize=8)


_RENDERERS = {
    "curve": render_curve,
    "trajectory": render_trajectory,
    "bifurcation": render_bifurcation,
}


def render(spec: FigureSpec) -> Path:
    """Render one panel; the output file is written only on success."""
    data = read_dataset(spec.dataset)
    fig, ax = plt.subplots(figsize=(5.2, 4.2), constrained_layout=True)
    try:
        _RENDERERS[spec.panel](data, ax, spec.dataset)
        spec.output.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(spec.output)
    finally:
        plt.close(fig)
    return spec.output
