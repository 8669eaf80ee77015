"""Geometry, direction, mask and state-set types shared across the package.

Grids are numpy arrays of shape ``(q_y, q_x)`` indexed ``[n_y, n_x]``, so a
row-major flatten runs ``n_x`` fastest. Cell ``(0, 0)`` is a corner cell.
All values are immutable once built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0
TWO_PI = 2.0 * math.pi


class ValidationError(ValueError):
    """Raised when a constructor or operation receives an invalid value.

    ``field`` names the offending argument or key when known.
    """

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class UnsupportedError(ValueError):
    """Raised for valid inputs that an operation does not handle."""


def _frozen_array(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


def _positive(name: str, value) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"{name} must be a number, got {value!r}", name) from None
    if not math.isfinite(v) or v <= 0:
        raise ValidationError(f"{name} must be positive and finite, got {value!r}", name)
    return v


def _count(name: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        else:
            raise ValidationError(f"{name} must be an integer, got {value!r}", name)
    if value < 1:
        raise ValidationError(f"{name} must be >= 1, got {value}", name)
    return int(value)


@dataclass(frozen=True)
class RisGeometry:
    q_x: int
    q_y: int
    d_x: float
    d_y: float
    wavelength: float

    def __post_init__(self):
        object.__setattr__(self, "q_x", _count("q_x", self.q_x))
        object.__setattr__(self, "q_y", _count("q_y", self.q_y))
        object.__setattr__(self, "d_x", _positive("d_x", self.d_x))
        object.__setattr__(self, "d_y", _positive("d_y", self.d_y))
        object.__setattr__(self, "wavelength", _positive("wavelength", self.wavelength))

    @property
    def kappa(self) -> float:
        """Wavenumber 2*pi/wavelength in rad/m."""
        return TWO_PI / self.wavelength

    @property
    def shape(self) -> tuple[int, int]:
        return (self.q_y, self.q_x)

    @property
    def n_cells(self) -> int:
        return self.q_x * self.q_y

    def to_dict(self) -> dict:
        return {
            "q_x": self.q_x,
            "q_y": self.q_y,
            "d_x": self.d_x,
            "d_y": self.d_y,
            "wavelength": self.wavelength,
        }


def make_geometry(q_x, q_y, d_x, d_y, wavelength) -> RisGeometry:
    return RisGeometry(q_x, q_y, d_x, d_y, wavelength)


@dataclass(frozen=True)
class Direction:
    """Elevation ``theta`` from the surface normal and azimuth ``phi``, radians."""

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        theta = float(self.theta)
        phi = float(self.phi)
        if not (math.isfinite(theta) and math.isfinite(phi)):
            raise ValidationError("direction angles must be finite", "theta")
        if theta < 0.0 or theta > math.pi / 2:
            raise ValidationError(f"theta must lie in [0, pi/2], got {theta!r}", "theta")
        phi = phi % TWO_PI
        if phi >= TWO_PI:
            phi = 0.0
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)

    @property
    def theta_deg(self) -> float:
        return math.degrees(self.theta)

    @property
    def phi_deg(self) -> float:
        return math.degrees(self.phi)

    def mirrored(self) -> "Direction":
        """Specular partner: same elevation, azimuth rotated by 180 degrees."""
        return Direction(self.theta, self.phi + math.pi)


def direction_from_degrees(theta_deg: float, phi_deg: float = 0.0) -> Direction:
    theta_deg = float(theta_deg)
    if not math.isfinite(theta_deg) or theta_deg < 0.0 or theta_deg > 90.0:
        raise ValidationError(f"theta_deg must lie in [0, 90], got {theta_deg!r}", "theta_deg")
    phi_deg = float(phi_deg)
    if not math.isfinite(phi_deg):
        raise ValidationError(f"phi_deg must be finite, got {phi_deg!r}", "phi_deg")
    return Direction(math.radians(theta_deg), math.radians(phi_deg % 360.0))


@dataclass(frozen=True, eq=False)
class PhaseField:
    """Continuous per-cell phase in radians, stored unwrapped."""

    geometry: RisGeometry
    values: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.values, float)
        if arr.shape != self.geometry.shape:
            raise ValidationError(
                f"phase grid shape {arr.shape} does not match geometry (q_y, q_x) = {self.geometry.shape}",
                "values",
            )
        if not np.all(np.isfinite(arr)):
            raise ValidationError("phase values must be finite", "values")
        object.__setattr__(self, "values", arr)

    def shifted(self, offset: float) -> "PhaseField":
        return PhaseField(self.geometry, self.values + offset)


@dataclass(frozen=True)
class StateSet:
    """Discrete reflection coefficients ``a_k * exp(j*(reference + offsets[k]))``.

    The common ``reference`` phase (gamma) is kept apart from the per-state
    ``offsets`` so that magnitude computations can drop it exactly.
    """

    offsets: tuple[float, ...]
    amplitudes: tuple[float, ...] = ()
    reference: float = 0.0

    def __post_init__(self):
        offsets = tuple(float(v) for v in self.offsets)
        if len(offsets) < 2:
            raise ValidationError("a state set needs at least 2 states", "offsets")
        amps = tuple(float(a) for a in self.amplitudes) if self.amplitudes else (1.0,) * len(offsets)
        if len(amps) != len(offsets):
            raise ValidationError("amplitudes and offsets differ in length", "amplitudes")
        for a in amps:
            if not math.isfinite(a) or a <= 0.0 or a > 1.0:
                raise ValidationError(f"state amplitude must lie in (0, 1], got {a!r}", "amplitudes")
        if not all(math.isfinite(v) for v in offsets) or not math.isfinite(float(self.reference)):
            raise ValidationError("state phases must be finite", "offsets")
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "reference", float(self.reference))

    @classmethod
    def from_coefficients(cls, coefficients: Sequence[complex]) -> "StateSet":
        c = np.asarray(coefficients, dtype=complex)
        return cls(tuple(np.angle(c)), tuple(np.abs(c)), 0.0)

    def __len__(self) -> int:
        return len(self.offsets)

    @property
    def phases(self) -> np.ndarray:
        """Absolute state phases in radians."""
        return self.reference + np.asarray(self.offsets)

    @property
    def coefficients(self) -> np.ndarray:
        return np.asarray(self.amplitudes) * np.exp(1j * self.phases)

    def relative_phasors(self) -> np.ndarray:
        """Coefficients with the common reference phase removed."""
        return np.asarray(self.amplitudes) * np.exp(1j * np.asarray(self.offsets))

    def with_reference(self, reference: float) -> "StateSet":
        return StateSet(self.offsets, self.amplitudes, reference)


@dataclass(frozen=True, eq=False)
class StateMask:
    """Per-cell state indices into a :class:`StateSet`."""

    geometry: RisGeometry
    states: np.ndarray

    def __post_init__(self):
        raw = np.asarray(self.states)
        if raw.size and not np.issubdtype(raw.dtype, np.integer):
            if not np.all(np.equal(np.mod(raw, 1), 0)):
                raise ValidationError("state indices must be integers", "states")
        arr = _frozen_array(raw, np.int64)
        if arr.shape != self.geometry.shape:
            raise ValidationError(
                f"state grid shape {arr.shape} does not match geometry (q_y, q_x) = {self.geometry.shape}",
                "states",
            )
        if arr.size and arr.min() < 0:
            raise ValidationError("state indices must be non-negative", "states")
        object.__setattr__(self, "states", arr)

    def check(self, state_set: StateSet) -> None:
        if self.states.max() >= len(state_set):
            raise ValidationError(
                f"mask uses state {int(self.states.max())} but the state set has {len(state_set)} states",
                "states",
            )

    def flat(self) -> np.ndarray:
        return self.states.reshape(-1)

    def counts(self, n_states: int) -> np.ndarray:
        return np.bincount(self.flat(), minlength=n_states)

    def __eq__(self, other):
        if not isinstance(other, StateMask):
            return NotImplemented
        return self.geometry == other.geometry and np.array_equal(self.states, other.states)

    __hash__ = None


@dataclass(frozen=True)
class Scenario:
    geometry: RisGeometry
    incident: Direction
    target: Direction

    def __post_init__(self):
        if not isinstance(self.geometry, RisGeometry):
            raise ValidationError("scenario geometry must be a RisGeometry", "geometry")
        for name in ("incident", "target"):
            if not isinstance(getattr(self, name), Direction):
                raise ValidationError(f"scenario {name} must be a Direction", name)


def wavelength_from_frequency(frequency_hz: float) -> float:
    return SPEED_OF_LIGHT / _positive("frequency", frequency_hz)


def reference_scenario(q: int = 11, frequency_ghz: float = 28.0, target_deg: float = 60.0) -> Scenario:
    """Square half-wavelength array at normal incidence, steered to ``target_deg``."""
    lam = wavelength_from_frequency(frequency_ghz * 1e9)
    geom = RisGeometry(q, q, lam / 2, lam / 2, lam)
    return Scenario(geom, direction_from_degrees(0.0), direction_from_degrees(target_deg))


__all__ = [
    "SPEED_OF_LIGHT",
    "Direction",
    "PhaseField",
    "RisGeometry",
    "Scenario",
    "StateMask",
    "StateSet",
    "UnsupportedError",
    "ValidationError",
    "direction_from_degrees",
    "make_geometry",
    "reference_scenario",
    "wavelength_from_frequency",
]
