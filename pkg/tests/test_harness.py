"""Scenario runner, config parsing, artifact, and CLI tests."""

import hashlib
import json
import os

import numpy as np
import pytest

from chemlattice.errors import ConfigError
from chemlattice.harness import (
    BUILTIN_NAMES,
    AnalysisOptions,
    ScenarioConfig,
    builtin_config,
    config_from_dict,
    detect_lock_in,
    main,
    parse_config,
    relation_from_source,
    run_scenario,
    run_simulation,
    sub_run_seed,
)
from chemlattice.analysis import RunSeries
from chemlattice.sim_core import NoiseSchedule, SimParams


def tiny_single(**sim_overrides):
    sim = {"max_steps": 2000, "seed": 3,
           "noise_schedule": {"kind": "constant", "p0": 0.05}}
    sim.update(sim_overrides)
    return config_from_dict({"name": "tiny", "kind": "single", "sim": sim})


# ------------------------------------------------------------- configs


def test_minimal_config_gets_defaults():
    config = config_from_dict({"kind": "single"})
    assert config.name == "custom"
    assert config.record_every == 1
    assert config.sim == SimParams()
    assert config.analysis == AnalysisOptions()


def test_unknown_keys_are_rejected_with_their_path():
    with pytest.raises(ConfigError, match="unknown key: thetaC"):
        config_from_dict({"kind": "single", "thetaC": 0.4})
    with pytest.raises(ConfigError, match="unknown key: sim.thetaC"):
        config_from_dict({"kind": "single", "sim": {"thetaC": 0.4}})
    with pytest.raises(ConfigError, match="sim.noise_schedule.ramp_rate"):
        config_from_dict(
            {"kind": "single", "sim": {"noise_schedule": {"ramp_rate": 1e-6}}}
        )
    with pytest.raises(ConfigError, match="analysis.smoothing"):
        config_from_dict({"kind": "single", "analysis": {"smoothing": 3}})


def test_config_type_errors_name_the_field():
    with pytest.raises(ConfigError, match="sim.seed"):
        config_from_dict({"kind": "single", "sim": {"seed": 1.5}})
    with pytest.raises(ConfigError, match="record_every"):
        config_from_dict({"kind": "single", "record_every": "often"})


def test_kind_specific_field_rules():
    with pytest.raises(ConfigError, match="sweep_values"):
        config_from_dict({"kind": "sweep"})
    with pytest.raises(ConfigError, match="outside"):
        config_from_dict({"kind": "sweep", "sweep_values": [0.1, 3.0]})
    with pytest.raises(ConfigError, match="sweep_values is not valid"):
        config_from_dict({"kind": "single", "sweep_values": [0.1]})
    with pytest.raises(ConfigError, match="ramp"):
        config_from_dict({"kind": "ramp"})
    with pytest.raises(ConfigError, match="kind 'ramp'"):
        config_from_dict({"kind": "ramp", "ramp": {"kind": "constant", "p0": 0.1}})
    with pytest.raises(ConfigError, match="relation_source"):
        config_from_dict({"kind": "lattice"})
    with pytest.raises(ConfigError, match="not valid for lattice"):
        config_from_dict(
            {"kind": "lattice", "relation_source": "diag:3", "sim": {"seed": 1}}
        )
    with pytest.raises(ConfigError, match="relation_source is not valid"):
        config_from_dict({"kind": "single", "relation_source": "diag:3"})


def test_parse_config_file(tmp_path):
    path = tmp_path / "myrun.json"
    path.write_text(json.dumps({"kind": "single", "sim": {"seed": 5}}))
    config = parse_config(str(path))
    assert config.name == "myrun"  # stem is the default name
    assert config.sim.seed == 5
    bad = tmp_path / "broken.json"
    bad.write_text('{"kind": "single",}')
    with pytest.raises(ConfigError, match="line 1"):
        parse_config(str(bad))


def test_builtin_table():
    assert BUILTIN_NAMES == (
        "fig10", "fig11", "fig12", "fig4-lattice", "fig5-lattice",
        "fig9a", "fig9b", "fig9c",
    )
    fig9a = builtin_config("fig9a")
    assert fig9a.sim.noise_schedule.p0 == 0.0
    assert fig9a.sim.max_steps == 100_000
    assert not fig9a.sim.interplay_enabled
    fig11 = builtin_config("fig11")
    assert fig11.kind == "sweep"
    assert fig11.sweep_values == (0.0, 1e-6, 5e-4, 5e-3, 7.5e-3, 5e-2)
    assert fig11.seeds_per_value == 5
    fig12 = builtin_config("fig12")
    assert fig12.kind == "ramp" and fig12.ramp.kind == "ramp"
    assert fig12.ramp.onset_step == 10_000
    assert builtin_config("fig4-lattice").relation_source == "blocks:3,3,2:overlap=3"
    with pytest.raises(ConfigError, match="unknown builtin"):
        builtin_config("fig99")


def test_sub_run_seeds_are_stable_and_distinct():
    # pinned: grid cells must never move when the grid grows
    assert sub_run_seed(11, 0, 0) == 10520313552068553934
    assert sub_run_seed(11, 3, 2) == 15729585277663110808
    assert sub_run_seed(12, 0, 0) == 17827584815388034219
    seen = {sub_run_seed(11, vi, rep) for vi in range(8) for rep in range(8)}
    assert len(seen) == 64
    assert all(0 <= s < 2**64 for s in seen)


# ------------------------------------------------------------ run layer


def test_run_simulation_records_on_the_thinned_axis():
    params = SimParams(max_steps=100, seed=1)
    series, state = run_simulation(params, record_every=7)
    assert len(series.t) == 100 // 7 + 1
    assert series.t[0] == 0 and series.t[-1] == 98
    assert state.t == 100
    assert series.params_snapshot == params
    assert np.all(series.noise_trace == 0.0)


def test_run_simulation_noise_trace_follows_the_ramp():
    ramp = NoiseSchedule(kind="ramp", p0=0.0, rate=1e-4, onset_step=50)
    params = SimParams(noise_schedule=ramp, max_steps=100, seed=1)
    series, _ = run_simulation(params, record_every=25)
    assert list(series.t) == [0, 25, 50, 75, 100]
    assert series.noise_trace[1] == 0.0
    assert series.noise_trace[3] == pytest.approx(25e-4)


def _lock_series(cluster, active, n=200):
    m = len(cluster)
    return RunSeries(
        t=np.arange(m),
        cluster_count=np.asarray(cluster),
        active_count=np.asarray(active),
        params_snapshot=SimParams(n_molecules=n),
        noise_trace=np.zeros(m),
    )


def test_detect_lock_in():
    frozen = _lock_series(
        np.concatenate([[200, 100, 1], np.full(97, 199)]),
        np.concatenate([[0, 0, 200], np.full(97, 150)]),
    )
    assert detect_lock_in(frozen)
    never_activated = _lock_series(np.full(100, 199), np.full(100, 150))
    assert not detect_lock_in(never_activated)
    dips = _lock_series(
        np.concatenate([[1], np.full(98, 199), [100]]),
        np.full(100, 150),
    )
    assert not detect_lock_in(dips)
    inactive_tail = _lock_series(
        np.concatenate([[1], np.full(99, 199)]),
        np.concatenate([[200], np.full(99, 20)]),
    )
    assert not detect_lock_in(inactive_tail)


# ------------------------------------------------------------ artifacts


def test_run_scenario_writes_verified_artifacts(tmp_path):
    out = tmp_path / "tiny"
    manifest = run_scenario(tiny_single(), str(out))
    assert sorted(manifest["files"]) == ["series.csv", "summary.json"]
    for rel, meta in manifest["files"].items():
        payload = (out / rel).read_bytes()
        assert hashlib.sha256(payload).hexdigest() == meta["sha256"]
        assert len(payload) == meta["bytes"]
    summary = json.loads((out / "summary.json").read_text())
    assert summary["name"] == "tiny" and summary["kind"] == "single"
    assert summary["n_recorded"] == 2001
    assert {"events", "psd", "lock_in", "params"} <= set(summary)
    header = (out / "series.csv").read_text().splitlines()[0]
    assert header == "t,cluster_count,active_count,noise_p"
    stored = json.loads((out / "manifest.json").read_text())
    assert stored["files"] == manifest["files"]


def test_rerun_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run_scenario(tiny_single(), str(a))
    run_scenario(tiny_single(), str(b))
    for name in ("series.csv", "summary.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_lattice_scenario_artifacts(tmp_path):
    config = config_from_dict(
        {"name": "diag", "kind": "lattice", "relation_source": "diag:3"}
    )
    out = tmp_path / "lat"
    manifest = run_scenario(config, str(out))
    assert sorted(manifest["files"]) == ["lattice.dot", "laws.json", "summary.json"]
    laws = json.loads((out / "laws.json").read_text())
    assert sorted(laws) == ["blocks", "distributive", "orthomodular", "shared", "witness"]
    summary = json.loads((out / "summary.json").read_text())
    assert summary["n_elements"] == 8
    assert summary["n_hasse_edges"] == 12


def test_run_sweep_grid_aggregates_sub_runs(tmp_path):
    config = config_from_dict(
        {
            "name": "mini",
            "kind": "sweep",
            "sweep_values": [0.0, 0.05],
            "seeds_per_value": 2,
            "sim": {"max_steps": 1500, "seed": 9},
        }
    )
    out = tmp_path / "sweep"
    run_scenario(config, str(out))
    grid = json.loads((out / "grid.json").read_text())
    assert grid["master_seed"] == 9 and grid["seeds_per_value"] == 2
    assert [row["noise_p"] for row in grid["values"]] == [0.0, 0.05]
    for vi, row in enumerate(grid["values"]):
        assert row["n_runs"] == 2
        totals = {"spike_up": 0, "spike_down": 0, "sawtooth": 0}
        for rep, sub in enumerate(row["sub_runs"]):
            assert sub["path"] == f"value_{vi}/seed_{rep}"
            assert sub["seed"] == sub_run_seed(9, vi, rep)
            sub_summary = json.loads(
                (out / sub["path"] / "summary.json").read_text()
            )
            for kind in totals:
                totals[kind] += sub_summary["events"][kind]
        assert all(row[k] == totals[k] for k in totals)
        assert row["total_events"] == sum(totals.values())


def test_sweep_requires_sweep_kind():
    from chemlattice.harness import run_sweep

    with pytest.raises(ConfigError, match="needs a sweep scenario"):
        run_sweep(tiny_single())


# ------------------------------------------------------ relation source


def test_relation_from_source_specs(tmp_path):
    assert np.array_equal(
        relation_from_source("diag:3").cells, np.eye(3, dtype=bool)
    )
    rel = relation_from_source("blocks:4,4")
    assert rel.n_rows == 8 and rel.cells[0, 4]
    bare = relation_from_source("blocks:2,2:nofill")
    assert not bare.cells[0, 2]
    lap = relation_from_source("blocks:3,3,2:overlap=3")
    assert lap.n_rows == 7
    path = tmp_path / "rel.txt"
    path.write_text("10\n01\n")
    assert relation_from_source(str(path)).n_rows == 2


def test_relation_from_source_errors():
    with pytest.raises(ConfigError, match="integer size"):
        relation_from_source("diag:x")
    with pytest.raises(ConfigError, match="needs sizes"):
        relation_from_source("blocks:")
    with pytest.raises(ConfigError, match="unknown blocks option"):
        relation_from_source("blocks:2,2:mirror")
    with pytest.raises(FileNotFoundError):
        relation_from_source("no/such/relation.txt")


# ------------------------------------------------------------------ cli


def test_cli_run_with_overrides(tmp_path):
    out = tmp_path / "short"
    rc = main([
        "run", "fig9a", "--steps", "600", "--record-every", "2",
        "--out", str(out),
    ])
    assert rc == 0
    lines = (out / "series.csv").read_text().splitlines()
    assert len(lines) == 1 + 301  # header plus 600//2 + 1 records


def test_cli_seed_override_changes_the_trajectory(tmp_path):
    a, b, c = (tmp_path / x for x in "abc")
    args = ["run", "fig9b", "--steps", "800"]
    main(args + ["--seed", "1", "--out", str(a)])
    main(args + ["--seed", "2", "--out", str(b)])
    main(args + ["--seed", "1", "--out", str(c)])
    sa = (a / "series.csv").read_bytes()
    assert sa != (b / "series.csv").read_bytes()
    assert sa == (c / "series.csv").read_bytes()


def test_cli_unknown_scenario_is_a_config_error(tmp_path, capsys):
    assert main(["run", "fig99", "--out", str(tmp_path)]) == 2
    assert "config error" in capsys.readouterr().err


def test_cli_command_kind_mismatches(tmp_path):
    assert main(["run", "fig11", "--out", str(tmp_path / "x")]) == 2
    assert main(["sweep", "fig9a", "--out", str(tmp_path / "y")]) == 2
    assert main(["lattice", "fig9a", "--out", str(tmp_path / "z")]) == 2


def test_cli_unwritable_output_is_a_runtime_error():
    assert main(["run", "fig9a", "--steps", "300", "--out", "/proc/nope/x"]) == 3


def test_cli_failed_check_exits_four(tmp_path, capsys):
    # 1100 steps leave too few samples after burn-in for a spectrum
    rc = main([
        "run", "fig10", "--steps", "1100", "--check", "--out", str(tmp_path / "f"),
    ])
    assert rc == 4
    captured = capsys.readouterr()
    assert "FAIL" in captured.out
    assert "check failed" in captured.err


def test_cli_passing_check(tmp_path, capsys):
    rc = main([
        "run", "fig9a", "--steps", "2000", "--check", "--out", str(tmp_path / "ok"),
    ])
    assert rc == 0
    assert "check fig9a: ok" in capsys.readouterr().out


def test_cli_check_without_a_checker_is_fine(tmp_path, capsys):
    path = tmp_path / "custom.json"
    path.write_text(json.dumps({"kind": "single", "sim": {"max_steps": 400}}))
    rc = main(["run", str(path), "--check", "--out", str(tmp_path / "c")])
    assert rc == 0
    assert "no scenario-specific checks" in capsys.readouterr().out


def test_cli_adhoc_lattice_spec(tmp_path):
    out = tmp_path / "adhoc"
    assert main(["lattice", "blocks:2,2", "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["n_elements"] == 6  # two 2^2 blocks sharing the bounds
    assert summary["relation"]["source"] == "blocks:2,2"


def test_cli_lattice_from_relation_file(tmp_path):
    rel = tmp_path / "diag.txt"
    rel.write_text("100\n010\n001\n")
    out = tmp_path / "from-file"
    assert main(["lattice", str(rel), "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["n_elements"] == 8
