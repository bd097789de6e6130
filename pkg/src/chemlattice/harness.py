"""Scenario runner and command-line interface.

A scenario bundles simulation parameters, recording resolution, and
analysis settings; running one writes a fixed set of artifacts
(series.csv, summary.json, and for relation scenarios lattice.dot and
laws.json) plus a manifest with content digests.  Sweeps fan a scenario
out over noise values with sub-seeds derived from the master seed, so
the grid can grow without perturbing existing cells.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import os
import sys
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import analysis, lattice
from .errors import CheckFailure, ConfigError
from .sim_core import (
    NoiseSchedule,
    SimParams,
    SimState,
    audit_consistency,
    init_state,
    noise_at,
    step,
)

__all__ = [
    "AnalysisOptions",
    "ScenarioConfig",
    "parse_config",
    "builtin_config",
    "BUILTIN_NAMES",
    "run_simulation",
    "run_scenario",
    "run_sweep",
    "detect_lock_in",
    "main",
    "cli",
]

_M64 = (1 << 64) - 1

# Lock-in detection: the run must have reached a global activation, and
# over the final quarter the cluster count must stay near N while the
# population stays mostly active (the frozen high-activity regime).
LOCK_IN_TAIL_FRACTION = 0.25
LOCK_IN_CLUSTER_FLOOR = 0.9
LOCK_IN_ACTIVITY_FLOOR = 0.5


@dataclass(frozen=True)
class AnalysisOptions:
    """Post-run analysis settings.

    burn_in counts recorded samples dropped before spectral analysis;
    event detection always sees the full series.  min_amplitude of None
    means 0.8 * n_molecules.
    """

    burn_in: int = 0
    f_lo: float = 1e-3
    f_hi: float = 1e-1
    rise_window: int = 25
    fall_window: int = 25
    min_amplitude: Optional[float] = None
    psd_trace: str = "active"

    def __post_init__(self) -> None:
        if self.burn_in < 0:
            raise ConfigError(f"analysis.burn_in must be >= 0, got {self.burn_in}")
        if not 0 < self.f_lo < self.f_hi:
            raise ConfigError(
                f"analysis band needs 0 < f_lo < f_hi, got [{self.f_lo}, {self.f_hi}]"
            )
        if self.rise_window < 1 or self.fall_window < 1:
            raise ConfigError("analysis windows must be >= 1")
        if self.min_amplitude is not None and self.min_amplitude < 1:
            raise ConfigError(
                f"analysis.min_amplitude must be >= 1, got {self.min_amplitude}"
            )
        if self.psd_trace not in ("active", "cluster"):
            raise ConfigError(
                f"analysis.psd_trace must be 'active' or 'cluster', got {self.psd_trace!r}"
            )


_SIM_KINDS = ("single", "sweep", "ramp")
_KINDS = _SIM_KINDS + ("lattice",)


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    kind: str
    sim: Optional[SimParams] = None
    sweep_values: Optional[tuple] = None
    seeds_per_value: int = 1
    ramp: Optional[NoiseSchedule] = None
    relation_source: Optional[str] = None
    output_dir: Optional[str] = None
    record_every: int = 1
    analysis: AnalysisOptions = field(default_factory=AnalysisOptions)

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ConfigError(f"kind must be one of {_KINDS}, got {self.kind!r}")
        if self.record_every < 1:
            raise ConfigError(f"record_every must be >= 1, got {self.record_every}")
        if self.seeds_per_value < 1:
            raise ConfigError(
                f"seeds_per_value must be >= 1, got {self.seeds_per_value}"
            )
        if self.kind in _SIM_KINDS:
            if self.sim is None:
                object.__setattr__(self, "sim", SimParams())
            if self.relation_source is not None:
                raise ConfigError(f"relation_source is not valid for kind {self.kind!r}")
        else:
            if self.relation_source is None:
                raise ConfigError("lattice scenarios require relation_source")
            if self.sim is not None:
                raise ConfigError("sim parameters are not valid for lattice scenarios")
        if self.kind == "sweep":
            if not self.sweep_values:
                raise ConfigError("sweep scenarios require non-empty sweep_values")
            vals = tuple(float(v) for v in self.sweep_values)
            for v in vals:
                if not 0.0 <= v <= 1.0:
                    raise ConfigError(f"sweep value {v} outside [0, 1]")
            object.__setattr__(self, "sweep_values", vals)
        elif self.sweep_values is not None:
            raise ConfigError(f"sweep_values is not valid for kind {self.kind!r}")
        if self.kind == "ramp":
            if self.ramp is None:
                raise ConfigError("ramp scenarios require a ramp noise schedule")
            if self.ramp.kind != "ramp":
                raise ConfigError("the ramp block must have kind 'ramp'")
        elif self.ramp is not None:
            raise ConfigError(f"ramp is not valid for kind {self.kind!r}")


def _require_keys(obj: dict, allowed: dict, where: str) -> None:
    for key in obj:
        if key not in allowed:
            path = f"{where}.{key}" if where else key
            raise ConfigError(f"unknown key: {path}")
        want = allowed[key]
        if want is not None and not isinstance(obj[key], want):
            path = f"{where}.{key}" if where else key
            raise ConfigError(
                f"{path} must be {want.__name__ if isinstance(want, type) else want}, "
                f"got {type(obj[key]).__name__}"
            )


def _schedule_from_dict(obj: dict, where: str) -> NoiseSchedule:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where} must be an object")
    _require_keys(
        obj,
        {"kind": str, "p0": (int, float), "rate": (int, float), "onset_step": int},
        where,
    )
    return NoiseSchedule(**obj)


def _sim_from_dict(obj: dict, where: str = "sim") -> SimParams:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where} must be an object")
    allowed = {
        "n_molecules": int,
        "theta_c": (int, float),
        "theta_dec": (int, float),
        "noise_schedule": dict,
        "theta_a": (int, float),
        "p_coh": (int, float),
        "interplay_enabled": bool,
        "pooled_modal_ratio": bool,
        "max_steps": int,
        "seed": int,
    }
    _require_keys(obj, allowed, where)
    kwargs = dict(obj)
    if "noise_schedule" in kwargs:
        kwargs["noise_schedule"] = _schedule_from_dict(
            kwargs["noise_schedule"], f"{where}.noise_schedule"
        )
    try:
        return SimParams(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _analysis_from_dict(obj: dict, where: str = "analysis") -> AnalysisOptions:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where} must be an object")
    allowed = {
        "burn_in": int,
        "f_lo": (int, float),
        "f_hi": (int, float),
        "rise_window": int,
        "fall_window": int,
        "min_amplitude": (int, float),
        "psd_trace": str,
    }
    _require_keys(obj, allowed, where)
    return AnalysisOptions(**obj)


def config_from_dict(obj: dict, default_name: str = "custom") -> ScenarioConfig:
    """Strict ScenarioConfig construction from plain JSON data."""
    if not isinstance(obj, dict):
        raise ConfigError("config root must be a JSON object")
    allowed = {
        "name": str,
        "kind": str,
        "sim": dict,
        "sweep_values": list,
        "seeds_per_value": int,
        "ramp": dict,
        "relation_source": str,
        "output_dir": str,
        "record_every": int,
        "analysis": dict,
    }
    _require_keys(obj, allowed, "")
    if "kind" not in obj:
        raise ConfigError("config requires a kind")
    kwargs = dict(obj)
    kwargs.setdefault("name", default_name)
    if "sim" in kwargs:
        kwargs["sim"] = _sim_from_dict(kwargs["sim"])
    if "ramp" in kwargs:
        kwargs["ramp"] = _schedule_from_dict(kwargs["ramp"], "ramp")
    if "analysis" in kwargs:
        kwargs["analysis"] = _analysis_from_dict(kwargs["analysis"])
    if "sweep_values" in kwargs:
        for i, v in enumerate(kwargs["sweep_values"]):
            if not isinstance(v, (int, float)):
                raise ConfigError(f"sweep_values[{i}] must be a number")
        kwargs["sweep_values"] = tuple(kwargs["sweep_values"])
    return ScenarioConfig(**kwargs)


def parse_config(path: str) -> ScenarioConfig:
    """Load a scenario from a UTF-8 JSON file; unknown keys are rejected
    with their dotted path."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    stem = os.path.splitext(os.path.basename(path))[0]
    return config_from_dict(data, default_name=stem)


_SPIKE_REGIME = dict(
    theta_a=0.3,
    p_coh=0.95,
    interplay_enabled=True,
    pooled_modal_ratio=True,
)

_SWEEP_VALUES = (0.0, 1e-6, 5e-4, 5e-3, 7.5e-3, 5e-2)


def _builtin_table() -> dict:
    const = lambda p: NoiseSchedule(kind="constant", p0=p)
    return {
        "fig9a": ScenarioConfig(
            name="fig9a",
            kind="single",
            sim=SimParams(noise_schedule=const(0.0), max_steps=100_000, seed=11),
        ),
        "fig9b": ScenarioConfig(
            name="fig9b",
            kind="single",
            sim=SimParams(noise_schedule=const(0.05), max_steps=66_536, seed=11),
            analysis=AnalysisOptions(burn_in=1000),
        ),
        "fig9c": ScenarioConfig(
            name="fig9c",
            kind="single",
            sim=SimParams(
                noise_schedule=const(0.05), max_steps=100_000, seed=11, **_SPIKE_REGIME
            ),
        ),
        "fig10": ScenarioConfig(
            name="fig10",
            kind="single",
            sim=SimParams(noise_schedule=const(0.05), max_steps=66_536, seed=11),
            analysis=AnalysisOptions(burn_in=1000),
        ),
        "fig11": ScenarioConfig(
            name="fig11",
            kind="sweep",
            sim=SimParams(noise_schedule=const(0.0), max_steps=60_000, seed=11, **_SPIKE_REGIME),
            sweep_values=_SWEEP_VALUES,
            seeds_per_value=5,
        ),
        "fig12": ScenarioConfig(
            name="fig12",
            kind="ramp",
            sim=SimParams(noise_schedule=const(0.0), max_steps=40_000, seed=11, **_SPIKE_REGIME),
            ramp=NoiseSchedule(kind="ramp", p0=0.0, rate=2.5e-6, onset_step=10_000),
        ),
        "fig5-lattice": ScenarioConfig(
            name="fig5-lattice", kind="lattice", relation_source="blocks:4,4"
        ),
        "fig4-lattice": ScenarioConfig(
            name="fig4-lattice", kind="lattice", relation_source="blocks:3,3,2:overlap=3"
        ),
    }


BUILTIN_NAMES = tuple(sorted(_builtin_table()))


def builtin_config(name: str) -> ScenarioConfig:
    table = _builtin_table()
    if name not in table:
        raise ConfigError(
            f"unknown builtin scenario {name!r}; known: {', '.join(BUILTIN_NAMES)}"
        )
    return table[name]


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _M64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _M64
    return x ^ (x >> 31)


def sub_run_seed(master_seed: int, value_index: int, replicate: int = 0) -> int:
    """Stable per-cell seed: mixing is keyed by grid position, so adding
    values or replicates never changes existing sub-runs."""
    h = _splitmix64(master_seed ^ (value_index * 0xA24BAED4963EE407 & _M64))
    return _splitmix64(h ^ (replicate * 0x9FB21C651E98DF25 & _M64))


def run_simulation(params: SimParams, record_every: int = 1) -> tuple:
    """Run params.max_steps steps, recording every record_every-th state
    (plus the initial one).  Returns (RunSeries, final SimState); the
    final state must pass audit_consistency."""
    if record_every < 1:
        raise ConfigError(f"record_every must be >= 1, got {record_every}")
    steps = params.max_steps
    state = init_state(params)
    n_rec = steps // record_every + 1
    tt = np.empty(n_rec, dtype=np.int64)
    cc = np.empty(n_rec, dtype=np.int64)
    ac = np.empty(n_rec, dtype=np.int64)
    tt[0] = 0
    cc[0] = state.c_max
    ac[0] = state.active_total()
    k = 1
    for t in range(1, steps + 1):
        step(state, params)
        if t % record_every == 0:
            tt[k] = t
            cc[k] = state.c_max
            ac[k] = state.active_total()
            k += 1
    violations = audit_consistency(state)
    if violations:
        raise RuntimeError(
            "state audit failed after run: " + "; ".join(violations[:3])
        )
    noise = np.array([noise_at(params.noise_schedule, int(t)) for t in tt[:k]])
    series = analysis.RunSeries(
        t=tt[:k],
        cluster_count=cc[:k],
        active_count=ac[:k],
        params_snapshot=params,
        noise_trace=noise,
    )
    return series, state


def detect_lock_in(series: analysis.RunSeries) -> bool:
    """The frozen high-activity regime: a global activation happened, and
    through the final quarter the cluster count never leaves the top 10%
    of its range while the population stays mostly active."""
    n = len(series.t)
    if n < 8 or series.params_snapshot is None:
        return False
    n_mol = series.params_snapshot.n_molecules
    activated = bool(np.any(series.cluster_count == 1))
    tail = slice(int(n * (1 - LOCK_IN_TAIL_FRACTION)), n)
    cluster_high = bool(
        series.cluster_count[tail].min() >= LOCK_IN_CLUSTER_FLOOR * n_mol
    )
    active_high = bool(
        series.active_count[tail].mean() >= LOCK_IN_ACTIVITY_FLOOR * n_mol
    )
    return activated and cluster_high and active_high


def _series_csv(series: analysis.RunSeries) -> str:
    rows = ["t,cluster_count,active_count,noise_p"]
    for t, c, a, p in zip(
        series.t, series.cluster_count, series.active_count, series.noise_trace
    ):
        rows.append(f"{int(t)},{int(c)},{int(a)},{repr(float(p))}")
    return "\n".join(rows) + "\n"


def _json_text(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _analyze_run(series: analysis.RunSeries, opts: AnalysisOptions) -> tuple:
    """Events, optional spectrum, and the summary record for one run."""
    params = series.params_snapshot
    min_amp = opts.min_amplitude
    if min_amp is None:
        min_amp = 0.8 * params.n_molecules
    events = analysis.detect_events(
        series, opts.rise_window, opts.fall_window, min_amp
    )
    trace = series.active_count if opts.psd_trace == "active" else series.cluster_count
    trace = np.asarray(trace, dtype=np.float64)[opts.burn_in :]
    spectrum = None
    if len(trace) >= 256:
        spectrum = analysis.psd(trace)
        usable = (
            (spectrum.freq >= opts.f_lo)
            & (spectrum.freq <= opts.f_hi)
            & (spectrum.power > 0)
        )
        if usable.sum() < 8:  # too short for a slope fit in this band
            spectrum = None
    summary = analysis.summarize(series, events, spectrum, (opts.f_lo, opts.f_hi))
    summary["lock_in"] = detect_lock_in(series)
    summary["n_recorded"] = len(series.t)
    return events, spectrum, summary


def _write_artifacts(out_dir: str, files: dict) -> dict:
    os.makedirs(out_dir, exist_ok=True)
    manifest_files = {}
    for rel_path, text in sorted(files.items()):
        full = os.path.join(out_dir, rel_path)
        os.makedirs(os.path.dirname(full) or out_dir, exist_ok=True)
        payload = text.encode("utf-8")
        with open(full, "wb") as fh:
            fh.write(payload)
        manifest_files[rel_path] = {
            "sha256": hashlib.sha256(payload).hexdigest(),
            "bytes": len(payload),
        }
    return manifest_files


def _finish_manifest(config: ScenarioConfig, out_dir: str, manifest_files: dict) -> dict:
    manifest = {
        "scenario": config.name,
        "kind": config.kind,
        "output_dir": out_dir,
        "files": manifest_files,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        fh.write(_json_text(manifest))
    return manifest


def _effective_params(config: ScenarioConfig) -> SimParams:
    params = config.sim
    if config.kind == "ramp":
        params = replace(params, noise_schedule=config.ramp)
    return params


def run_scenario(config: ScenarioConfig, out_dir: Optional[str] = None) -> dict:
    """Execute one scenario and write its artifacts; returns the manifest."""
    if config.kind == "sweep":
        return run_sweep(config, out_dir)
    out_dir = out_dir or config.output_dir or os.path.join("runs", config.name)
    if config.kind == "lattice":
        return _run_lattice(config, out_dir)
    params = _effective_params(config)
    series, _ = run_simulation(params, config.record_every)
    _, _, summary = _analyze_run(series, config.analysis)
    summary["name"] = config.name
    summary["kind"] = config.kind
    summary["record_every"] = config.record_every
    files = {
        "series.csv": _series_csv(series),
        "summary.json": _json_text(summary),
    }
    manifest_files = _write_artifacts(out_dir, files)
    return _finish_manifest(config, out_dir, manifest_files)


def relation_from_source(source: str) -> lattice.Relation:
    """A relation from a generator spec (diag:N or
    blocks:s1,s2,...[:overlap=o1,...][:nofill]) or from a text file."""
    head = source.split(":", 1)[0]
    if head == "diag":
        body = source[len("diag:"):]
        try:
            n = int(body)
        except ValueError:
            raise ConfigError(f"diag spec needs an integer size, got {source!r}") from None
        if n < 1:
            raise ConfigError(f"diag size must be >= 1, got {n}")
        return lattice.Relation(cells=np.eye(n, dtype=bool))
    if head == "blocks":
        parts = source.split(":")[1:]
        if not parts or not parts[0]:
            raise ConfigError(f"blocks spec needs sizes, got {source!r}")
        try:
            sizes = tuple(int(s) for s in parts[0].split(","))
        except ValueError:
            raise ConfigError(f"bad block sizes in {source!r}") from None
        overlap: tuple = ()
        fill = True
        for extra in parts[1:]:
            if extra == "nofill":
                fill = False
            elif extra.startswith("overlap="):
                try:
                    overlap = tuple(int(s) for s in extra[len("overlap="):].split(","))
                except ValueError:
                    raise ConfigError(f"bad overlap list in {source!r}") from None
            else:
                raise ConfigError(f"unknown blocks option {extra!r} in {source!r}")
        return lattice.build_two_block_relation(sizes, overlap, fill_off_blocks=fill)
    if any(source.startswith(p) for p in ("diag", "blocks")) and ":" in source:
        raise ConfigError(f"unrecognized generator spec {source!r}")
    return lattice.relation_from_file(source)


def _run_lattice(config: ScenarioConfig, out_dir: str) -> dict:
    rel = relation_from_source(config.relation_source)
    lat = lattice.enumerate_lattice(rel)
    report = lattice.analyze_laws(lat)
    laws = lattice.law_report_json(report)
    summary = {
        "name": config.name,
        "kind": config.kind,
        "relation": {
            "source": config.relation_source,
            "n_rows": rel.n_rows,
            "n_cols": rel.n_cols,
        },
        "n_elements": len(lat),
        "n_hasse_edges": len(lattice.hasse_cover(lat)),
        "distributive": report.distributive,
        "orthomodular": report.orthomodular,
        "n_blocks": len(report.boolean_blocks),
        "shared_elements": laws["shared"],
    }
    files = {
        "lattice.dot": lattice.lattice_to_dot(lat),
        "laws.json": _json_text(laws),
        "summary.json": _json_text(summary),
    }
    manifest_files = _write_artifacts(out_dir, files)
    return _finish_manifest(config, out_dir, manifest_files)


def run_sweep(config: ScenarioConfig, out_dir: Optional[str] = None) -> dict:
    """One sub-run per (noise value, replicate); writes per-run artifacts
    plus grid.json with per-value event aggregates."""
    if config.kind != "sweep":
        raise ConfigError(f"run_sweep needs a sweep scenario, got kind {config.kind!r}")
    out_dir = out_dir or config.output_dir or os.path.join("runs", config.name)
    master = config.sim.seed
    files = {}
    grid_rows = []
    for vi, p_noise in enumerate(config.sweep_values):
        counts = {"spike_up": 0, "spike_down": 0, "sawtooth": 0}
        lock_ins = 0
        sub_runs = []
        for rep in range(config.seeds_per_value):
            seed = sub_run_seed(master, vi, rep)
            params = replace(
                config.sim,
                noise_schedule=NoiseSchedule(kind="constant", p0=p_noise),
                seed=seed,
            )
            series, _ = run_simulation(params, config.record_every)
            _, _, summary = _analyze_run(series, config.analysis)
            rel_dir = os.path.join(f"value_{vi}", f"seed_{rep}")
            summary["name"] = config.name
            summary["kind"] = "single"
            summary["record_every"] = config.record_every
            files[os.path.join(rel_dir, "series.csv")] = _series_csv(series)
            files[os.path.join(rel_dir, "summary.json")] = _json_text(summary)
            for kind in counts:
                counts[kind] += summary["events"][kind]
            lock_ins += bool(summary["lock_in"])
            sub_runs.append({"seed": seed, "path": rel_dir.replace(os.sep, "/")})
        total = sum(counts.values())
        spikes = counts["spike_up"] + counts["spike_down"]
        grid_rows.append(
            {
                "noise_p": p_noise,
                "n_runs": config.seeds_per_value,
                **counts,
                "total_events": total,
                "spike_fraction": (spikes / total) if total else 0.0,
                "sawtooth_fraction": (counts["sawtooth"] / total) if total else 0.0,
                "lock_in_runs": lock_ins,
                "lock_in_fraction": lock_ins / config.seeds_per_value,
                "sub_runs": sub_runs,
            }
        )
    grid = {
        "scenario": config.name,
        "master_seed": master,
        "seeds_per_value": config.seeds_per_value,
        "steps": config.sim.max_steps,
        "values": grid_rows,
    }
    files["grid.json"] = _json_text(grid)
    manifest_files = _write_artifacts(out_dir, files)
    return _finish_manifest(config, out_dir, manifest_files)


def _load_artifact(out_dir: str, name: str):
    with open(os.path.join(out_dir, name), "r", encoding="utf-8") as fh:
        return json.load(fh)


def _check_fig9a(out_dir: str, failures: list) -> None:
    rows = []
    with open(os.path.join(out_dir, "series.csv"), "r", encoding="utf-8") as fh:
        next(fh)
        for line in fh:
            t, c, a, _ = line.split(",")
            rows.append((int(c), int(a)))
    cc = np.array([r[0] for r in rows])
    ac = np.array([r[1] for r in rows])
    n = cc.max()
    if not np.all((ac == 0) | (ac == n)):
        failures.append("activity left {0, N} in the noise-free run")
    marks = [(t, "bottom") for t in np.flatnonzero(cc == 1)] + [
        (t, "top") for t in np.flatnonzero(cc == n)
    ]
    marks.sort()
    kinds = [k for _, k in marks]
    if any(kinds[i] == kinds[i + 1] for i in range(len(kinds) - 1)):
        failures.append("cluster count did not alternate between 1 and N")
    summary = _load_artifact(out_dir, "summary.json")
    if summary["events"]["total"] != 0:
        failures.append(
            f"noise-free run produced {summary['events']['total']} wave events"
        )


def _check_slope(out_dir: str, failures: list) -> None:
    summary = _load_artifact(out_dir, "summary.json")
    block = summary.get("psd")
    if not block:
        failures.append("summary has no PSD block")
        return
    if not -1.35 <= block["slope"] <= -0.65:
        failures.append(f"PSD slope {block['slope']:.3f} outside [-1.35, -0.65]")


def _check_fig9c(out_dir: str, failures: list) -> None:
    summary = _load_artifact(out_dir, "summary.json")
    ev = summary["events"]
    if ev["spike_up"] < 10:
        failures.append(f"only {ev['spike_up']} upward spikes, need >= 10")
    if ev["spike_down"] < 10:
        failures.append(f"only {ev['spike_down']} downward spikes, need >= 10")


def _check_fig11(out_dir: str, failures: list) -> None:
    grid = _load_artifact(out_dir, "grid.json")
    rows = {row["noise_p"]: row for row in grid["values"]}
    need = (0.0, 1e-6, 5e-3, 5e-2)
    missing = [p for p in need if p not in rows]
    if missing:
        failures.append(f"grid lacks noise values {missing}")
        return
    if rows[0.0]["total_events"] != 0:
        failures.append(
            f"{rows[0.0]['total_events']} events at zero noise, expected none"
        )
    if rows[1e-6]["lock_in_runs"] * 2 <= rows[1e-6]["n_runs"]:
        failures.append(
            f"lock-in in only {rows[1e-6]['lock_in_runs']}/{rows[1e-6]['n_runs']} "
            "runs at 1e-6"
        )
    r = rows[5e-3]
    if not r["sawtooth"] > r["spike_up"] + r["spike_down"]:
        failures.append(
            f"at 5e-3 sawtooth={r['sawtooth']} does not exceed "
            f"spikes={r['spike_up'] + r['spike_down']}"
        )
    r = rows[5e-2]
    if not r["spike_up"] + r["spike_down"] > r["sawtooth"]:
        failures.append(
            f"at 5e-2 spikes={r['spike_up'] + r['spike_down']} do not exceed "
            f"sawtooth={r['sawtooth']}"
        )


def _check_fig12(out_dir: str, failures: list) -> None:
    summary = _load_artifact(out_dir, "summary.json")
    onset = summary["params"]["noise_schedule"]["onset_step"]
    steps = summary["params"]["max_steps"]
    with open(os.path.join(out_dir, "series.csv"), "r", encoding="utf-8") as fh:
        next(fh)
        data = [line.split(",") for line in fh]
    tt = np.array([int(r[0]) for r in data])
    cc = np.array([int(r[1]) for r in data])
    ac = np.array([int(r[2]) for r in data])
    series = analysis.RunSeries(
        t=tt, cluster_count=cc, active_count=ac, params_snapshot=None,
        noise_trace=np.zeros(len(tt)),
    )
    events = analysis.detect_events(series, 25, 25, 0.8 * int(ac.max()))
    pre_onset = [e for e in events if e.t_peak < onset]
    if pre_onset:
        failures.append(f"{len(pre_onset)} events before noise onset")
    saw = [e.t_peak for e in events if e.kind == "sawtooth"]
    spike = [e.t_peak for e in events if e.kind.startswith("spike")]
    if not saw:
        failures.append("no sawtooth events after onset")
    if not spike:
        failures.append("no spike events after onset")
    if saw and spike and not saw[0] < spike[0]:
        failures.append(
            f"first sawtooth at t={saw[0]} not before first spike at t={spike[0]}"
        )
    tail = [e for e in events if e.t_peak >= 0.75 * steps]
    tail_spikes = sum(1 for e in tail if e.kind.startswith("spike"))
    tail_saw = len(tail) - tail_spikes
    if not (tail_spikes > 0 and tail_spikes > tail_saw):
        failures.append(
            f"final quarter not spike-dominant ({tail_spikes} spikes, {tail_saw} sawtooth)"
        )


def _check_fig5_lattice(out_dir: str, failures: list) -> None:
    laws = _load_artifact(out_dir, "laws.json")
    summary = _load_artifact(out_dir, "summary.json")
    if summary["n_elements"] != 30:
        failures.append(f"{summary['n_elements']} elements, expected 30")
    if laws["shared"] != ["{}", "{A1,A2,A3,A4,A5,A6,A7,A8}"]:
        failures.append(f"shared elements {laws['shared']} != [bottom, top]")
    if laws["distributive"] or not laws["witness"]:
        failures.append("expected a non-distributivity witness")
    if not laws["orthomodular"]:
        failures.append("expected the lattice to be orthomodular")


def _check_fig4_lattice(out_dir: str, failures: list) -> None:
    laws = _load_artifact(out_dir, "laws.json")
    summary = _load_artifact(out_dir, "summary.json")
    if summary["n_elements"] != 14:
        failures.append(f"{summary['n_elements']} elements, expected 14")
    want_shared = ["{}", "{A3}", "{A1,A2,A4,A5}", "{A1,A2,A3,A4,A5,A6,A7}"]
    if laws["shared"] != want_shared:
        failures.append(f"shared elements {laws['shared']} != {want_shared}")
    rel = relation_from_source("blocks:3,3,2:overlap=3")
    pairs = [
        (frozenset({0}), frozenset({0})),
        (frozenset({2}), frozenset({2})),
        (frozenset({0, 1}), frozenset({0, 1, 3, 4})),
        (frozenset({0, 5}), frozenset(range(7))),
    ]
    for x, want in pairs:
        got = lattice.closure(rel, x)
        if got != want:
            failures.append(
                f"closure({lattice.format_subset(x)}) = {lattice.format_subset(got)}"
                f" != {lattice.format_subset(want)}"
            )


_CHECKS = {
    "fig9a": _check_fig9a,
    "fig9b": _check_slope,
    "fig9c": _check_fig9c,
    "fig10": _check_slope,
    "fig11": _check_fig11,
    "fig12": _check_fig12,
    "fig5-lattice": _check_fig5_lattice,
    "fig4-lattice": _check_fig4_lattice,
}


def run_checks(name: str, out_dir: str) -> None:
    """Scenario-specific claims; raises CheckFailure listing violations."""
    checker = _CHECKS.get(name)
    if checker is None:
        print(f"check {name}: no scenario-specific checks defined")
        return
    failures: list = []
    checker(out_dir, failures)
    if failures:
        for f in failures:
            print(f"check {name}: FAIL {f}")
        raise CheckFailure(failures)
    print(f"check {name}: ok")


def _resolve_config(ref: str) -> ScenarioConfig:
    if ref in _builtin_table():
        return builtin_config(ref)
    if os.path.exists(ref):
        return parse_config(ref)
    raise ConfigError(f"{ref!r} is neither a builtin scenario nor a config file")


def _apply_overrides(config: ScenarioConfig, args) -> ScenarioConfig:
    updates = {}
    if args.out is not None:
        updates["output_dir"] = args.out
    if getattr(args, "record_every", None) is not None:
        updates["record_every"] = args.record_every
    sim_updates = {}
    if getattr(args, "seed", None) is not None:
        sim_updates["seed"] = args.seed
    if getattr(args, "steps", None) is not None:
        sim_updates["steps"] = args.steps
    if sim_updates and config.sim is None:
        raise ConfigError("--seed/--steps do not apply to lattice scenarios")
    if sim_updates:
        sim = config.sim
        if "seed" in sim_updates:
            sim = replace(sim, seed=sim_updates["seed"])
        if "steps" in sim_updates:
            sim = replace(sim, max_steps=sim_updates["steps"])
        updates["sim"] = sim
    return replace(config, **updates) if updates else config


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chemlattice",
        description=(
            "Cluster-chemistry simulator with rough-set lattice analysis. "
            "Scenarios are builtin names or JSON config files; defaults: "
            "record_every=1, seed from the scenario, N=200, "
            "theta_c=theta_dec=0.5, theta_a=0.3, p_coh=0.95."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_sim=True):
        p.add_argument("--out", help="output directory (default runs/<name>)")
        p.add_argument(
            "--check",
            action="store_true",
            help="validate scenario-specific claims; exit 4 on failure",
        )
        if with_sim:
            p.add_argument("--seed", type=int, help="override the master seed")
            p.add_argument("--steps", type=int, help="override the step budget")
            p.add_argument(
                "--record-every",
                type=int,
                dest="record_every",
                help="record every k-th step (default 1)",
            )

    p_run = sub.add_parser("run", help="run a single or ramp scenario")
    p_run.add_argument("scenario", help=f"builtin ({', '.join(BUILTIN_NAMES)}) or config path")
    common(p_run)

    p_sweep = sub.add_parser("sweep", help="run a noise sweep")
    p_sweep.add_argument("scenario", help="builtin sweep (fig11) or config path")
    common(p_sweep)

    p_lat = sub.add_parser("lattice", help="analyze a relation's fixed-point lattice")
    p_lat.add_argument(
        "relation",
        help="builtin (fig5-lattice, fig4-lattice), relation file, or "
        "generator spec like diag:3 or blocks:3,3,2:overlap=3",
    )
    common(p_lat, with_sim=False)
    return parser


def main(argv: Optional[list] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "lattice":
            ref = args.relation
            if ref in _builtin_table():
                config = builtin_config(ref)
            elif os.path.exists(ref) and ref.endswith(".json"):
                config = parse_config(ref)
            else:
                name = os.path.splitext(os.path.basename(ref))[0] or "lattice"
                config = ScenarioConfig(
                    name=name.replace(":", "-").replace(",", "-").replace("=", "-"),
                    kind="lattice",
                    relation_source=ref,
                )
            if config.kind != "lattice":
                raise ConfigError(
                    f"scenario {config.name!r} has kind {config.kind!r}, not lattice"
                )
            config = _apply_overrides(config, args)
        else:
            config = _resolve_config(args.scenario)
            if args.command == "sweep" and config.kind != "sweep":
                raise ConfigError(
                    f"scenario {config.name!r} has kind {config.kind!r}; "
                    "the sweep command needs a sweep scenario"
                )
            if args.command == "run" and config.kind == "sweep":
                raise ConfigError(
                    f"scenario {config.name!r} is a sweep; use the sweep command"
                )
            config = _apply_overrides(config, args)
        manifest = run_scenario(config, args.out)
        out_dir = manifest["output_dir"]
        for rel_path in sorted(manifest["files"]):
            print(f"wrote {os.path.join(out_dir, rel_path)}")
        print(f"wrote {os.path.join(out_dir, 'manifest.json')}")
        if args.check:
            run_checks(config.name, out_dir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except CheckFailure as exc:
        print(f"check failed: {'; '.join(str(f) for f in exc.failures)}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    except (RuntimeError, ValueError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3
    return 0


def cli() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    cli()
