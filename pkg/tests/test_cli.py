import json

import numpy as np
import pytest

from ratingdyn.cli import ConfigError, main, resolve_config


def write_config(tmp_path, payload, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


def read_csv(path):
    meta, header, rows = [], None, []
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            meta.append(line)
        elif header is None:
            header = line.split(",")
        else:
            rows.append(line.split(","))
    return meta, header, rows


def base_config(tmp_path, **extra):
    cfg = {
        "latent": {"family": "beta", "alpha": 3, "beta": 1},
        "kernel": {"variant": "constant", "level": 0.4},
        "seed": 7,
        "out_dir": str(tmp_path / "out"),
    }
    cfg.update(extra)
    return cfg


def test_cmd_curve_rows_and_metadata(tmp_path):
    cfg = write_config(tmp_path, base_config(tmp_path))
    assert main(["curve", "--config", str(cfg), "--grid", "0:1:0.5"]) == 0
    meta, header, rows = read_csv(tmp_path / "out" / "curve.csv")
    assert header == ["x", "f_x", "abs_err", "method"]
    assert any(line.startswith("# config:") for line in meta)
    assert [float(r[0]) for r in rows] == pytest.approx([0.0, 0.5, 1.0])
    assert [float(r[1]) for r in rows] == pytest.approx([0.45, 0.65, 0.85])


def test_cmd_curve_symmetric_distance_midpoint(tmp_path):
    cfg = write_config(
        tmp_path,
        base_config(
            tmp_path,
            latent={"family": "beta", "alpha": 3, "beta": 3},
            kernel={"variant": "distance", "shape": 3},
            curve={"grid": {"points": [0.5]}},
        ),
    )
    assert main(["curve", "--config", str(cfg)]) == 0
    _, _, rows = read_csv(tmp_path / "out" / "curve.csv")
    assert float(rows[0][1]) == pytest.approx(0.5, abs=1e-8)
    assert rows[0][3] == "quadrature"


def test_malformed_kernel_exits_2_without_output(tmp_path):
    cfg = write_config(
        tmp_path, base_config(tmp_path, kernel={"variant": "frobnicate"})
    )
    assert main(["curve", "--config", str(cfg)]) == 2
    assert not (tmp_path / "out").exists()


def test_unknown_keys_are_rejected(tmp_path):
    cfg = write_config(tmp_path, base_config(tmp_path, typo_key=1))
    assert main(["curve", "--config", str(cfg)]) == 2
    cfg = write_config(tmp_path, base_config(tmp_path, curve={"grd": {}}))
    assert main(["curve", "--config", str(cfg)]) == 2


def test_invalid_json_exits_2(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    assert main(["curve", "--config", str(path)]) == 2


def test_missing_config_file_exits_4(tmp_path):
    assert main(["curve", "--config", str(tmp_path / "nope.json")]) == 4


def test_out_dir_collision_exits_4(tmp_path):
    blocker = tmp_path / "blocked"
    blocker.write_text("a file, not a directory", encoding="utf-8")
    cfg = write_config(tmp_path, base_config(tmp_path, out_dir=str(blocker)))
    assert main(["curve", "--config", str(cfg), "--grid", "0:1:0.5"]) == 4


def test_cmd_equilibria_variants(tmp_path):
    cfg = write_config(
        tmp_path,
        base_config(
            tmp_path,
            latent={"family": "beta", "alpha": 0.3, "beta": 0.3},
            kernel={"variant": "distance", "shape": 3},
            equilibria={"grid_size": 501, "root_tol": 1e-9},
        ),
    )
    assert main(["equilibria", "--config", str(cfg)]) == 0
    _, header, rows = read_csv(tmp_path / "out" / "equilibria.csv")
    assert header == ["x_star", "stability", "residual", "slope_estimate"]
    assert len(rows) == 3
    assert rows[1][1] == "unstable"
    assert float(rows[1][0]) == pytest.approx(0.5, abs=1e-6)
    xs = [float(r[0]) for r in rows]
    assert xs == sorted(xs)

    for kernel in ({"variant": "constant", "level": 0.4}, {"variant": "independent_beta", "a": 5, "b": 5}):
        cfg = write_config(tmp_path, base_config(tmp_path, kernel=kernel))
        assert main(["equilibria", "--config", str(cfg)]) == 0
        _, _, rows = read_csv(tmp_path / "out" / "equilibria.csv")
        assert len(rows) == 1
        assert rows[0][1] == "stable"
        assert float(rows[0][0]) == pytest.approx(0.75, abs=1e-6)


def test_cmd_bifurcate_constant_family(tmp_path):
    cfg = write_config(
        tmp_path,
        base_config(
            tmp_path,
            bifurcate={
                "family": "kernel_constant_level",
                "params": {"scale": "linear", "start": 0.0, "stop": 0.9, "count": 5},
                "grid_size": 201,
                "root_tol": 1e-8,
            },
        ),
    )
    assert main(["bifurcate", "--config", str(cfg)]) == 0
    _, header, rows = read_csv(tmp_path / "out" / "bifurcation.csv")
    assert header == ["param", "x_star", "stability"]
    assert len(rows) == 5
    for row in rows:
        assert float(row[1]) == pytest.approx(0.75, abs=1e-6)
        assert row[2] == "stable"
    _, theader, trows = read_csv(tmp_path / "out" / "bifurcation_transitions.csv")
    assert theader == ["param_low", "param_high", "stable_before", "stable_after"]
    assert trows == []


def test_cmd_simulate_no_influence_and_determinism(tmp_path):
    cfg = write_config(
        tmp_path,
        base_config(
            tmp_path,
            kernel={"variant": "constant", "level": 0.0},
            simulate={"agents": 400, "reps": 3, "trajectory_stride": 50},
        ),
    )
    assert main(["simulate", "--config", str(cfg)]) == 0
    summary = tmp_path / "out" / "summary.csv"
    trajectory = tmp_path / "out" / "trajectory.csv"
    _, header, rows = read_csv(summary)
    assert header == [
        "replication",
        "final_mean",
        "nearest_equilibrium",
        "distance",
        "population_seed",
        "permutation_seed",
        "lambda_seed",
    ]
    finals = {r[1] for r in rows}
    assert len(finals) == 1  # no influence: the population mean, every order

    first = (summary.read_bytes(), trajectory.read_bytes())
    assert main(["simulate", "--config", str(cfg)]) == 0
    assert (summary.read_bytes(), trajectory.read_bytes()) == first


def test_flag_overrides_change_resolution(tmp_path):
    cfg_payload = base_config(tmp_path, simulate={"agents": 400, "reps": 3})
    cfg = write_config(tmp_path, cfg_payload)
    assert main(["simulate", "--config", str(cfg), "--reps", "2", "--agents", "100", "--seed", "9"]) == 0
    meta, _, rows = read_csv(tmp_path / "out" / "summary.csv")
    assert len(rows) == 2
    config_line = next(line for line in meta if line.startswith("# config:"))
    resolved = json.loads(config_line.split(": ", 1)[1])
    assert resolved["simulate"]["agents"] == 100
    assert resolved["seed"] == 9


def test_cmd_figures_datasets(tmp_path):
    out = tmp_path / "figs"
    cfg = write_config(
        tmp_path,
        {
            "seed": 11,
            "out_dir": str(out),
            "figures": {
                "fig1a": {"lambda_count": 5, "grid_count": 21},
                "fig1b": {"lines": 4, "agents": 3000, "grid_count": 21},
                "fig2left": {"alphas": [0.3, 3.0], "grid_count": 201},
                "fig2right": {"agents": 1500, "reps": 6, "stride": 50},
                "fig3": {"start": 0.2, "stop": 1.0, "count": 5, "grid_size": 301, "root_tol": 1e-9},
            },
        },
    )
    assert main(["figures", "--config", str(cfg)]) == 0
    names = ["fig1a.csv", "fig1b.csv", "fig2left.csv", "fig2right.csv", "fig3.csv"]
    assert all((out / n).exists() for n in names)

    # every independent-kernel line passes through (mu, mu)
    _, header, rows = read_csv(out / "fig1a.csv")
    assert header == ["line", "lambda_mean", "x", "f_x"]
    at_mu = [float(r[3]) for r in rows if float(r[2]) == 0.75]
    assert len(at_mu) == 5
    assert at_mu == pytest.approx([0.75] * 5, abs=1e-12)

    # per-line equilibria inside [0,1]; band spans exactly their min-max
    meta, header, rows = read_csv(out / "fig1b.csv")
    assert header == ["line", "m", "lambda_mean", "equilibrium", "x", "f_x"]
    eqs = sorted({float(r[3]) for r in rows})
    assert all(0.0 <= e <= 1.0 for e in eqs)
    band_line = next(line for line in meta if line.startswith("# equilibrium_band:"))
    lo, hi = (float(v) for v in band_line.split(":", 1)[1].split(","))
    assert lo == pytest.approx(min(eqs)) and hi == pytest.approx(max(eqs))

    # diagonal crossings: three for the polarized curve, one for the peaked one
    _, _, rows = read_csv(out / "fig2left.csv")
    for alpha, expected in ((0.3, 3), (3.0, 1)):
        pts = [(float(r[2]), float(r[3])) for r in rows if float(r[1]) == alpha]
        g = np.array([f - x for x, f in pts])
        crossings = int(np.sum(np.sign(g[:-1]) * np.sign(g[1:]) < 0))
        assert crossings == expected

    meta, header, rows = read_csv(out / "fig2right.csv")
    assert header == ["replication", "step", "running_mean"]
    guide = next(line for line in meta if line.startswith("# stable_equilibria:"))
    assert len(guide.split(":", 1)[1].split(",")) == 2

    _, header, rows = read_csv(out / "fig3.csv")
    assert header == ["param", "x_star", "stability"]
    assert {r[2] for r in rows} <= {"stable", "unstable", "degenerate"}

    # rerun is byte-identical
    before = [(out / n).read_bytes() for n in names]
    assert main(["figures", "--config", str(cfg)]) == 0
    assert [(out / n).read_bytes() for n in names] == before


def test_resolved_config_round_trip(tmp_path):
    raw = {
        "latent": {"family": "beta", "alpha": 0.3, "beta": 0.3},
        "kernel": {"variant": "distance", "shape": 3},
        "curve": {"grid": {"start": 0.0, "stop": 1.0, "step": 0.25}},
    }
    resolved = resolve_config(raw, "curve")
    assert resolve_config(resolved, "curve") == resolved
    assert resolved["curve"]["grid"] == {"start": 0.0, "stop": 1.0, "count": 5}
    assert resolved["seed"] == 12345  # defaults materialized


def test_resolve_config_field_errors_name_the_field():
    with pytest.raises(ConfigError) as err:
        resolve_config({"latent": {"family": "beta", "alpha": -1, "beta": 1}}, "curve")
    assert "latent" in str(err.value)
    with pytest.raises(ConfigError) as err:
        resolve_config({"seed": -5}, "figures")
    assert "seed" in str(err.value)
    with pytest.raises(ConfigError) as err:
        resolve_config(
            {
                "latent": {"family": "beta", "alpha": 1, "beta": 1},
                "kernel": {"variant": "constant", "level": 0.1},
                "curve": {"grid": {"start": 0, "stop": 1, "step": 0.3}},
            },
            "curve",
        )
    assert "step" in str(err.value)
