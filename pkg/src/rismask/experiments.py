"""Experiment runs and figure-reproduction bundles."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .core import Scenario, StateMask, StateSet, UnsupportedError, direction_from_degrees, reference_scenario
from .io import (
    ExperimentSpec,
    dump_json,
    export_mask,
    export_phase_field,
    spec_hash,
    write_pattern_csv,
)
from .optimizer import GaConfig, exhaustive_optimize, fitness, ga_optimize
from .pattern import PatternCut, array_factor, pattern_metrics, pattern_sweep, theta_grid, to_db
from .synthesis import (
    baseline_mask,
    ideal_continuous_mask,
    phase_distribution_error,
    two_state_set,
    uniform_state_set,
)

FIGURES = ("fig3a", "fig4", "fig5")
FIGURE_COLUMNS = {
    "fig3a": ("Q180", "Q164", "Q134", "Q72"),
    "fig4": ("Cont", "3bit", "2bit", "1bit"),
    "fig5": ("Cont", "Q180", "G180", "Q150", "G150", "Q110", "G110", "Q50", "G50"),
}


@dataclass(frozen=True, eq=False)
class Solution:
    """An applied mask plus the numbers that describe how it was found."""

    applied: object  # PhaseField or StateMask
    states: StateSet | None
    info: dict


def solve(
    scenario: Scenario,
    mode: str,
    states: StateSet | None = None,
    config: GaConfig | None = None,
    workers: int = 1,
) -> Solution:
    if mode == "continuous":
        phase = ideal_continuous_mask(scenario)
        return Solution(phase, None, {"e_pd": phase_distribution_error(scenario, phase)})
    if states is None:
        raise UnsupportedError(f"mode {mode!r} needs a state set")
    if mode == "quantize":
        mask = baseline_mask(scenario, states)
        info = {"fitness": fitness(mask, scenario, states)}
    elif mode == "ga":
        res = ga_optimize(scenario, states, config or GaConfig(), workers=workers)
        mask = res.best_mask
        info = {
            "fitness": res.best_fitness,
            "baseline_fitness": res.baseline_fitness,
            "generations_run": res.generations_run,
            "fitness_history_tail": list(res.fitness_history[-5:]),
        }
    elif mode == "exhaustive":
        mask, best = exhaustive_optimize(scenario, states)
        info = {"fitness": best, "baseline_fitness": fitness(baseline_mask(scenario, states), scenario, states)}
    else:
        raise UnsupportedError(f"unknown mode {mode!r}")
    info["e_pd"] = phase_distribution_error(scenario, mask, states)
    info["state_counts"] = mask.counts(len(states)).tolist()
    return Solution(mask, states, info)


def sweep(scenario: Scenario, solution: Solution, theta_deg=None, phi_r: float = 0.0, workers: int = 1) -> PatternCut:
    return pattern_sweep(
        scenario.geometry, solution.applied, scenario.incident, phi_r, theta_deg, solution.states, workers=workers
    )


def _metrics(cut: PatternCut, scenario: Scenario) -> dict:
    return pattern_metrics(cut, scenario.target).to_dict()


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> dict:
    """Run one spec; writes pattern CSV, mask JSON, manifest JSON and optional SVG.

    Returns the manifest.
    """
    started, t0 = _now(), time.perf_counter()
    scenario = spec.scenario()
    states = None if spec.mode == "continuous" else spec.state_set()
    if spec.mode == "ga" and len(states) != 2:
        raise UnsupportedError("mode 'ga' needs a two-state set (use psi_deg or bits=1)")
    solution = solve(scenario, spec.mode, states, spec.ga_config(), workers)
    grid = theta_grid(spec.sweep.theta_start_deg, spec.sweep.theta_stop_deg, spec.sweep.theta_step_deg)
    cut = sweep(scenario, solution, grid, math.radians(spec.sweep.phi_r_deg), workers)

    payload = spec.to_dict()
    digest = spec_hash(payload)
    out = Path(spec.output.dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = spec.output.name
    files = {}
    files["pattern_csv"] = write_pattern_csv(out / f"{stem}_pattern.csv", grid, {spec.mode: cut.db}, spec.seed, digest)
    if isinstance(solution.applied, StateMask):
        files["mask_json"] = export_mask(solution.applied, states, out / f"{stem}_mask.json", spec.seed, digest)
    else:
        files["phase_json"] = export_phase_field(solution.applied, out / f"{stem}_phase.json", spec.seed, digest)
    if spec.output.svg:
        from .plotting import plot_cuts

        files["pattern_svg"] = plot_cuts(
            grid,
            {spec.mode: cut.db},
            out / f"{stem}_pattern.svg",
            title=f"{spec.mode}: {scenario.geometry.q_x}x{scenario.geometry.q_y}",
            target_deg=spec.target.theta_deg,
            provenance=f"seed={spec.seed} spec_hash={digest}",
        )

    metrics = _metrics(cut, scenario)
    metrics.update(solution.info)
    metrics["gain_at_target_linear"] = _gain(scenario, solution)
    manifest = {
        "schema_version": 1,
        "tool": "rismask",
        "version": __version__,
        "spec": payload,
        "spec_hash": digest,
        "seed": spec.seed,
        "workers": workers,
        "started_at": started,
        "duration_s": round(time.perf_counter() - t0, 6),
        "metrics": metrics,
        "files": {k: str(v) for k, v in files.items()},
    }
    dump_json(manifest, out / f"{stem}_manifest.json")
    return manifest


def _gain(scenario: Scenario, solution: Solution) -> float:
    return abs(array_factor(scenario.geometry, solution.applied, scenario.incident, scenario.target, solution.states))


def figure_curves(fig_id: str, seed: int = 1, workers: int = 1, scenario: Scenario | None = None):
    """Solutions for every curve of a figure, keyed by CSV column label."""
    if fig_id not in FIGURES:
        raise UnsupportedError(f"unknown figure id {fig_id!r}; valid ids: {', '.join(FIGURES)}")
    scenario = scenario or reference_scenario()
    config = GaConfig(seed=seed)
    curves: dict[str, Solution] = {}
    if fig_id == "fig3a":
        for psi in (180, 164, 134, 72):
            curves[f"Q{psi}"] = solve(scenario, "quantize", two_state_set(0.0, math.radians(psi)))
    elif fig_id == "fig4":
        curves["Cont"] = solve(scenario, "continuous")
        for bits in (3, 2, 1):
            curves[f"{bits}bit"] = solve(scenario, "quantize", uniform_state_set(bits))
    else:
        curves["Cont"] = solve(scenario, "continuous")
        for psi in (180, 150, 110, 50):
            states = two_state_set(0.0, math.radians(psi))
            curves[f"Q{psi}"] = solve(scenario, "quantize", states)
            curves[f"G{psi}"] = solve(scenario, "ga", states, config, workers)
    return scenario, curves


def reproduce_figure(fig_id: str, out_dir="out", seed: int = 1, svg: bool = True, workers: int = 1) -> dict:
    """Write ``<id>.csv``, ``<id>_manifest.json``, per-curve masks and optionally ``<id>.svg``."""
    started, t0 = _now(), time.perf_counter()
    scenario, curves = figure_curves(fig_id, seed, workers)
    grid = theta_grid()
    cuts = {label: sweep(scenario, sol, grid, 0.0, workers) for label, sol in curves.items()}
    payload = {"figure": fig_id, "seed": seed, "scenario": _scenario_dict(scenario), "sweep_deg": [0.0, 90.0, 0.1]}
    digest = spec_hash(payload)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {"csv": write_pattern_csv(out / f"{fig_id}.csv", grid, {k: c.db for k, c in cuts.items()}, seed, digest)}
    for label, sol in curves.items():
        if isinstance(sol.applied, StateMask):
            files[f"mask_{label}"] = export_mask(
                sol.applied, sol.states, out / f"{fig_id}_masks" / f"{label}.json", seed, digest
            )
    if svg:
        from .plotting import plot_cuts

        files["svg"] = plot_cuts(
            grid,
            {k: c.db for k, c in cuts.items()},
            out / f"{fig_id}.svg",
            title=f"{fig_id}: {scenario.geometry.q_x}x{scenario.geometry.q_y}, 0 -> 60 deg",
            target_deg=math.degrees(scenario.target.theta),
            provenance=f"seed={seed} spec_hash={digest}",
        )
    curve_metrics = {}
    for label, sol in curves.items():
        m = _metrics(cuts[label], scenario)
        m.update(sol.info)
        m["gain_at_target_linear"] = _gain(scenario, sol)
        curve_metrics[label] = m
    manifest = {
        "schema_version": 1,
        "tool": "rismask",
        "version": __version__,
        "spec": payload,
        "spec_hash": digest,
        "seed": seed,
        "workers": workers,
        "started_at": started,
        "duration_s": round(time.perf_counter() - t0, 6),
        "columns": ["theta_deg", *FIGURE_COLUMNS[fig_id]],
        "metrics": curve_metrics,
        "files": {k: str(v) for k, v in files.items()},
    }
    dump_json(manifest, out / f"{fig_id}_manifest.json")
    return {"manifest": manifest, "cuts": cuts, "curves": curves, "scenario": scenario}


def _scenario_dict(scenario: Scenario) -> dict:
    return {
        "geometry": scenario.geometry.to_dict(),
        "incident_deg": [scenario.incident.theta_deg, scenario.incident.phi_deg],
        "target_deg": [scenario.target.theta_deg, scenario.target.phi_deg],
    }


def gain_db_at(scenario: Scenario, solution: Solution, theta_deg: float, phi_deg: float = 0.0) -> float:
    obs = direction_from_degrees(theta_deg, phi_deg)
    return to_db(abs(array_factor(scenario.geometry, solution.applied, scenario.incident, obs, solution.states)))


__all__ = [
    "FIGURES",
    "FIGURE_COLUMNS",
    "Solution",
    "figure_curves",
    "gain_db_at",
    "reproduce_figure",
    "run_experiment",
    "solve",
    "sweep",
]
