"""Command-line entry point.

Usage:
    rismask synthesize --spec run.json --out out/
    rismask optimize --spec run.json --seed 3 --no-svg
    rismask pattern --spec run.json --mask out/run_mask.json
    rismask reproduce fig5 --seed 1 --out figures/

Exit codes: 0 success, 2 spec/validation error, 3 I/O error, 4 unsupported operation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .core import UnsupportedError, ValidationError

EXIT_OK, EXIT_SPEC, EXIT_IO, EXIT_UNSUPPORTED = 0, 2, 3, 4

_MODE_FOR = {"synthesize": "continuous", "quantize": "quantize", "optimize": "ga", "exhaustive": "exhaustive"}


def _add_common(p: argparse.ArgumentParser, spec_required: bool = True) -> None:
    if spec_required:
        p.add_argument("--spec", required=True, help="experiment spec (JSON)")
    p.add_argument("--seed", type=int, default=None, help="RNG seed, overrides the spec")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--no-svg", action="store_true", help="skip the SVG chart")
    p.add_argument("--workers", type=int, default=1, help="worker threads for sweeps and fitness")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rismask", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("synthesize", "ideal continuous mask and its pattern"),
        ("quantize", "nearest-state quantized mask and its pattern"),
        ("optimize", "GA-optimized binary mask and its pattern"),
        ("exhaustive", "exhaustively optimal mask (small arrays)"),
        ("pattern", "pattern of the spec's mode, or of a saved mask with --mask"),
        ("export-mask", "write only the mask JSON for the spec's mode"),
    ):
        p = sub.add_parser(name, help=help_)
        _add_common(p)
        if name == "pattern":
            p.add_argument("--mask", default=None, help="evaluate this mask JSON instead of solving")
    p = sub.add_parser("reproduce", help="figure-reproduction bundle")
    p.add_argument("figure", help="one of fig3a, fig4, fig5")
    _add_common(p, spec_required=False)
    return parser


def _load(args, mode=None):
    from .io import load_spec

    spec = load_spec(args.spec)
    return spec.with_overrides(mode=mode, seed=args.seed, out_dir=args.out, svg=False if args.no_svg else None)


def _summary(metrics: dict) -> str:
    keys = ("gain_at_target_db", "peak_theta_deg", "specular_db", "fitness", "baseline_fitness", "e_pd")
    return " ".join(f"{k}={metrics[k]:.6f}" for k in keys if isinstance(metrics.get(k), (int, float)))


def _run(args) -> int:
    from . import experiments
    from .io import export_mask, spec_hash, write_pattern_csv

    if args.command == "reproduce":
        from .experiments import FIGURES

        if args.figure not in FIGURES:
            print(f"rismask: unknown figure {args.figure!r}; valid ids: {', '.join(FIGURES)}", file=sys.stderr)
            return EXIT_SPEC
        bundle = experiments.reproduce_figure(
            args.figure, args.out or "out", seed=1 if args.seed is None else args.seed, svg=not args.no_svg, workers=args.workers
        )
        for label, m in bundle["manifest"]["metrics"].items():
            print(f"{label}: {_summary(m)}")
        return EXIT_OK

    if args.command in _MODE_FOR:
        manifest = experiments.run_experiment(_load(args, _MODE_FOR[args.command]), workers=args.workers)
        print(_summary(manifest["metrics"]))
        return EXIT_OK

    spec = _load(args)
    if args.command == "export-mask":
        if spec.mode == "continuous":
            raise UnsupportedError("export-mask needs a discrete mode (quantize, ga or exhaustive)")
        scenario, states = spec.scenario(), spec.state_set()
        sol = experiments.solve(scenario, spec.mode, states, spec.ga_config(), args.workers)
        path = Path(spec.output.dir) / f"{spec.output.name}_mask.json"
        export_mask(sol.applied, states, path, spec.seed, spec_hash(spec.to_dict()))
        print(path)
        return EXIT_OK

    # pattern
    if args.mask is None:
        manifest = experiments.run_experiment(spec, workers=args.workers)
        print(_summary(manifest["metrics"]))
        return EXIT_OK
    from .io import import_mask
    from .pattern import pattern_metrics, pattern_sweep, theta_grid

    scenario = spec.scenario()
    mask, states = import_mask(args.mask)
    if mask.geometry != scenario.geometry:
        raise ValidationError("mask geometry does not match the spec geometry", "mask")
    grid = theta_grid(spec.sweep.theta_start_deg, spec.sweep.theta_stop_deg, spec.sweep.theta_step_deg)
    cut = pattern_sweep(
        scenario.geometry, mask, scenario.incident, math.radians(spec.sweep.phi_r_deg), grid, states, workers=args.workers
    )
    digest = spec_hash(spec.to_dict())
    out = Path(spec.output.dir)
    path = write_pattern_csv(out / f"{spec.output.name}_pattern.csv", grid, {"mask": cut.db}, spec.seed, digest)
    if spec.output.svg:
        from .plotting import plot_cuts

        plot_cuts(grid, {"mask": cut.db}, out / f"{spec.output.name}_pattern.svg", target_deg=spec.target.theta_deg)
    metrics = pattern_metrics(cut, scenario.target).to_dict()
    print(json.dumps({"csv": str(path), **metrics}))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except UnsupportedError as exc:
        print(f"rismask: unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except ValidationError as exc:
        print(f"rismask: invalid input: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except OSError as exc:
        print(f"rismask: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
