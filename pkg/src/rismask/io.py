"""Experiment spec loading and JSON/CSV serialization."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .core import (
    PhaseField,
    RisGeometry,
    Scenario,
    StateMask,
    StateSet,
    ValidationError,
    direction_from_degrees,
    wavelength_from_frequency,
)
from .optimizer import GaConfig
from .synthesis import db_to_amplitude, two_state_set, uniform_state_set

SCHEMA_VERSION = 1
MODES = ("continuous", "quantize", "ga", "exhaustive")


class SpecError(ValidationError):
    """Invalid experiment spec; ``field`` holds the dotted key path."""


def _reject_unknown(block: Mapping, allowed, where: str) -> None:
    for key in block:
        if key not in allowed:
            raise SpecError(f"unknown key '{where}{key}'", where + key)


def _number(block: Mapping, key: str, where: str, default=None, required=False) -> float | None:
    if key not in block:
        if required:
            raise SpecError(f"missing required key '{where}{key}'", where + key)
        return default
    v = block[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise SpecError(f"'{where}{key}' must be a finite number, got {v!r}", where + key)
    return float(v)


def _pair(block: Mapping, key: str, where: str) -> tuple[float, float] | None:
    if key not in block:
        return None
    v = block[key]
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise SpecError(f"'{where}{key}' must be a number or an [x, y] pair", where + key)
        vals = [_number({key: x}, key, where) for x in v]
    else:
        vals = [_number(block, key, where)] * 2
    if min(vals) <= 0:
        raise SpecError(f"'{where}{key}' must be positive", where + key)
    return (vals[0], vals[1])


@dataclass(frozen=True)
class GeometrySpec:
    q_x: int
    q_y: int
    pitch_wavelengths: tuple[float, float] | None = None
    pitch_m: tuple[float, float] | None = None
    frequency_ghz: float | None = None
    wavelength_m: float | None = None

    @property
    def wavelength(self) -> float:
        if self.wavelength_m is not None:
            return self.wavelength_m
        return wavelength_from_frequency(self.frequency_ghz * 1e9)

    def build(self) -> RisGeometry:
        lam = self.wavelength
        if self.pitch_m is not None:
            dx, dy = self.pitch_m
        else:
            dx, dy = self.pitch_wavelengths[0] * lam, self.pitch_wavelengths[1] * lam
        return RisGeometry(self.q_x, self.q_y, dx, dy, lam)


@dataclass(frozen=True)
class AngleSpec:
    theta_deg: float
    phi_deg: float = 0.0


@dataclass(frozen=True)
class StatesSpec:
    bits: int | None = None
    gamma_deg: float = 0.0
    psi_deg: float = 180.0
    amplitudes_db: tuple[float, float] = (0.0, 0.0)

    def build(self) -> StateSet:
        if self.bits is not None:
            return uniform_state_set(self.bits)
        amps = tuple(db_to_amplitude(a) for a in self.amplitudes_db)
        return two_state_set(math.radians(self.gamma_deg), math.radians(self.psi_deg), amps)


@dataclass(frozen=True)
class SweepSpec:
    theta_start_deg: float = 0.0
    theta_stop_deg: float = 90.0
    theta_step_deg: float = 0.1
    phi_r_deg: float = 0.0


@dataclass(frozen=True)
class OutputSpec:
    dir: str = "out"
    name: str = "run"
    svg: bool = True


@dataclass(frozen=True)
class ExperimentSpec:
    geometry: GeometrySpec
    incident: AngleSpec
    target: AngleSpec
    mode: str = "continuous"
    states: StatesSpec = field(default_factory=StatesSpec)
    sweep: SweepSpec = field(default_factory=SweepSpec)
    ga: Mapping[str, Any] = field(default_factory=dict)
    seed: int = 1
    output: OutputSpec = field(default_factory=OutputSpec)

    def scenario(self) -> Scenario:
        return Scenario(
            self.geometry.build(),
            direction_from_degrees(self.incident.theta_deg, self.incident.phi_deg),
            direction_from_degrees(self.target.theta_deg, self.target.phi_deg),
        )

    def state_set(self) -> StateSet:
        return self.states.build()

    def ga_config(self, seed: int | None = None) -> GaConfig:
        return GaConfig(**dict(self.ga), seed=self.seed if seed is None else seed)

    def to_dict(self) -> dict:
        """Canonical JSON-ready form; unset optional keys are omitted."""
        geo = {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(self.geometry).items() if v is not None}
        if self.states.bits is not None:
            states = {"bits": self.states.bits}
        else:
            states = {
                "gamma_deg": self.states.gamma_deg,
                "psi_deg": self.states.psi_deg,
                "amplitudes_db": list(self.states.amplitudes_db),
            }
        return {
            "schema_version": SCHEMA_VERSION,
            "geometry": geo,
            "incident": asdict(self.incident),
            "target": asdict(self.target),
            "mode": self.mode,
            "states": states,
            "sweep": asdict(self.sweep),
            "ga": dict(sorted(self.ga.items())),
            "seed": self.seed,
            "output": asdict(self.output),
        }

    def with_overrides(self, mode=None, seed=None, out_dir=None, svg=None) -> "ExperimentSpec":
        from dataclasses import replace

        out = self.output
        if out_dir is not None or svg is not None:
            out = replace(out, dir=out.dir if out_dir is None else str(out_dir), svg=out.svg if svg is None else svg)
        return replace(
            self,
            mode=self.mode if mode is None else mode,
            seed=self.seed if seed is None else seed,
            output=out,
        )


def spec_hash(payload: Mapping) -> str:
    """SHA-256 over the canonical JSON of ``payload`` with output paths removed."""
    data = {k: v for k, v in payload.items() if k != "output"}
    blob = json.dumps(data, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _int(block: Mapping, key: str, where: str, default=None, required=False) -> int | None:
    if key not in block:
        if required:
            raise SpecError(f"missing required key '{where}{key}'", where + key)
        return default
    v = block[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise SpecError(f"'{where}{key}' must be an integer, got {v!r}", where + key)
    return v


def _block(data: Mapping, key: str, required=False) -> Mapping:
    if key not in data:
        if required:
            raise SpecError(f"missing required block '{key}'", key)
        return {}
    v = data[key]
    if not isinstance(v, Mapping):
        raise SpecError(f"'{key}' must be an object", key)
    return v


def _angle(data: Mapping, key: str) -> AngleSpec:
    block = _block(data, key, required=True)
    where = key + "."
    _reject_unknown(block, ("theta_deg", "phi_deg"), where)
    theta = _number(block, "theta_deg", where, required=True)
    if not 0.0 <= theta <= 90.0:
        raise SpecError(f"'{where}theta_deg' must lie in [0, 90], got {theta}", where + "theta_deg")
    return AngleSpec(theta, _number(block, "phi_deg", where, 0.0))


def parse_spec(data: Any) -> ExperimentSpec:
    """Validate a decoded JSON document and fill defaults."""
    if not isinstance(data, Mapping):
        raise SpecError("spec must be a JSON object", "")
    _reject_unknown(
        data,
        ("schema_version", "geometry", "incident", "target", "mode", "states", "sweep", "ga", "seed", "output"),
        "",
    )
    version = _int(data, "schema_version", "", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise SpecError(f"unsupported schema_version {version}; expected {SCHEMA_VERSION}", "schema_version")

    g = _block(data, "geometry", required=True)
    w = "geometry."
    _reject_unknown(g, ("q_x", "q_y", "pitch_wavelengths", "pitch_m", "frequency_ghz", "wavelength_m"), w)
    q_x, q_y = _int(g, "q_x", w, required=True), _int(g, "q_y", w, required=True)
    for k, v in (("q_x", q_x), ("q_y", q_y)):
        if v < 1:
            raise SpecError(f"'{w}{k}' must be >= 1", w + k)
    pw, pm = _pair(g, "pitch_wavelengths", w), _pair(g, "pitch_m", w)
    if (pw is None) == (pm is None):
        raise SpecError("give exactly one of 'geometry.pitch_wavelengths' or 'geometry.pitch_m'", w + "pitch_wavelengths")
    fg, wl = _number(g, "frequency_ghz", w), _number(g, "wavelength_m", w)
    if (fg is None) == (wl is None):
        raise SpecError("give exactly one of 'geometry.frequency_ghz' or 'geometry.wavelength_m'", w + "frequency_ghz")
    for k, v in (("frequency_ghz", fg), ("wavelength_m", wl)):
        if v is not None and v <= 0:
            raise SpecError(f"'{w}{k}' must be positive", w + k)
    geometry = GeometrySpec(q_x, q_y, pw, pm, fg, wl)

    mode = data.get("mode", "continuous")
    if mode not in MODES:
        raise SpecError(f"'mode' must be one of {', '.join(MODES)}, got {mode!r}", "mode")

    s = _block(data, "states")
    w = "states."
    _reject_unknown(s, ("bits", "gamma_deg", "psi_deg", "amplitudes_db"), w)
    if "bits" in s:
        if len(s) > 1:
            raise SpecError("'states.bits' cannot be combined with gamma/psi/amplitudes", w + "bits")
        bits = _int(s, "bits", w)
        if not 1 <= bits <= 8:
            raise SpecError(f"'states.bits' must lie in 1..8, got {bits}", w + "bits")
        states = StatesSpec(bits=bits)
    else:
        psi = _number(s, "psi_deg", w, 180.0)
        if not 0.0 < psi <= 180.0:
            raise SpecError(f"'states.psi_deg' must lie in (0, 180], got {psi}", w + "psi_deg")
        amps = s.get("amplitudes_db", [0.0, 0.0])
        if not isinstance(amps, (list, tuple)) or len(amps) != 2:
            raise SpecError("'states.amplitudes_db' must be a list of two numbers", w + "amplitudes_db")
        amps = tuple(_number({"a": a}, "a", w + "amplitudes_db.") for a in amps)
        if max(amps) > 0:
            raise SpecError("'states.amplitudes_db' values must be <= 0 dB", w + "amplitudes_db")
        states = StatesSpec(None, _number(s, "gamma_deg", w, 0.0), psi, amps)

    sw = _block(data, "sweep")
    w = "sweep."
    _reject_unknown(sw, tuple(f.name for f in fields(SweepSpec)), w)
    sweep = SweepSpec(
        _number(sw, "theta_start_deg", w, 0.0),
        _number(sw, "theta_stop_deg", w, 90.0),
        _number(sw, "theta_step_deg", w, 0.1),
        _number(sw, "phi_r_deg", w, 0.0),
    )
    if sweep.theta_step_deg <= 0:
        raise SpecError("'sweep.theta_step_deg' must be > 0", w + "theta_step_deg")
    if not 0 <= sweep.theta_start_deg <= sweep.theta_stop_deg <= 90:
        raise SpecError("'sweep' must satisfy 0 <= theta_start_deg <= theta_stop_deg <= 90", w + "theta_start_deg")

    ga = dict(_block(data, "ga"))
    allowed_ga = tuple(f.name for f in fields(GaConfig) if f.name != "seed")
    _reject_unknown(ga, allowed_ga, "ga.")
    seed = _int(data, "seed", "", 1)
    if not 0 <= seed < 2**64:
        raise SpecError("'seed' must be an unsigned 64-bit integer", "seed")
    try:
        GaConfig(**ga, seed=seed).validate()
    except ValidationError as exc:
        raise SpecError(str(exc), "ga." + str(exc.field)) from None
    except TypeError as exc:
        raise SpecError(f"invalid 'ga' block: {exc}", "ga") from None

    o = _block(data, "output")
    w = "output."
    _reject_unknown(o, ("dir", "name", "svg"), w)
    for k in ("dir", "name"):
        if k in o and not isinstance(o[k], str):
            raise SpecError(f"'{w}{k}' must be a string", w + k)
    if "svg" in o and not isinstance(o["svg"], bool):
        raise SpecError("'output.svg' must be true or false", w + "svg")
    output = OutputSpec(o.get("dir", "out"), o.get("name", "run"), o.get("svg", True))

    return ExperimentSpec(
        geometry=geometry,
        incident=_angle(data, "incident"),
        target=_angle(data, "target"),
        mode=mode,
        states=states,
        sweep=sweep,
        ga=ga,
        seed=seed,
        output=output,
    )


def load_spec(path) -> ExperimentSpec:
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise SpecError(f"spec file not found: {path}", "path") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"malformed JSON in {path}: {exc}", "path") from None
    return parse_spec(data)


def save_spec(spec: ExperimentSpec, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(spec.to_dict(), indent=2) + "\n")
    return path


def dump_json(payload: Mapping, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=False) + "\n")
    return path


PREVIEW_CHARS = ".#23456789"


def mask_preview(mask: StateMask) -> list[str]:
    return ["".join(PREVIEW_CHARS[s] if s < len(PREVIEW_CHARS) else "?" for s in row) for row in mask.states.tolist()]


def state_set_to_dict(states: StateSet) -> dict:
    return {
        "reference_rad": states.reference,
        "offsets_rad": list(states.offsets),
        "amplitudes": list(states.amplitudes),
    }


def mask_to_dict(mask: StateMask, states: StateSet, seed=None, spec_digest=None) -> dict:
    """JSON form of a mask; ``grid`` rows run over ``n_y``, columns over ``n_x``."""
    mask.check(states)
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "state_mask",
        "seed": seed,
        "spec_hash": spec_digest,
        "geometry": mask.geometry.to_dict(),
        "states": state_set_to_dict(states),
        "grid": mask.states.tolist(),
        "preview": mask_preview(mask),
    }


def export_mask(mask: StateMask, states: StateSet, path, seed=None, spec_digest=None) -> Path:
    path = Path(path)
    try:
        return dump_json(mask_to_dict(mask, states, seed, spec_digest), path)
    except OSError as exc:
        raise OSError(f"cannot write mask to {path}: {exc}") from exc


def import_mask(path) -> tuple[StateMask, StateSet]:
    data = json.loads(Path(path).read_text())
    if data.get("kind") != "state_mask":
        raise ValidationError(f"{path} is not a state-mask file", "kind")
    s = data["states"]
    states = StateSet(tuple(s["offsets_rad"]), tuple(s["amplitudes"]), s["reference_rad"])
    mask = StateMask(RisGeometry(**data["geometry"]), np.array(data["grid"], dtype=np.int64))
    mask.check(states)
    return mask, states


def export_phase_field(phase: PhaseField, path, seed=None, spec_digest=None) -> Path:
    return dump_json(
        {
            "schema_version": SCHEMA_VERSION,
            "kind": "phase_field",
            "seed": seed,
            "spec_hash": spec_digest,
            "geometry": phase.geometry.to_dict(),
            "values_rad": phase.values.tolist(),
        },
        path,
    )


def write_pattern_csv(path, theta_deg, columns: Mapping[str, np.ndarray], seed=None, spec_digest=None) -> Path:
    """Write ``theta_deg`` plus one dB column per curve, 6 decimals.

    The first line is a ``#`` comment carrying the seed and spec hash.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# seed={seed} spec_hash={spec_digest}", ",".join(["theta_deg", *columns])]
    cols = [np.asarray(c, dtype=float) for c in columns.values()]
    for i, t in enumerate(theta_deg):
        lines.append(",".join([f"{t:.6f}", *(f"{c[i]:.6f}" for c in cols)]))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def read_pattern_csv(path) -> tuple[list[str], np.ndarray]:
    """Return the header names and the numeric table of a pattern CSV."""
    rows = [ln for ln in Path(path).read_text().splitlines() if ln and not ln.startswith("#")]
    header = rows[0].split(",")
    table = np.array([[float(x) for x in r.split(",")] for r in rows[1:]])
    return header, table
