"""Phase-field synthesis, discrete state sets, quantization and phase error."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    TWO_PI,
    Direction,
    PhaseField,
    RisGeometry,
    Scenario,
    StateMask,
    StateSet,
    ValidationError,
)


@dataclass(frozen=True)
class DirectionalCosines:
    w_x: float
    w_y: float


def directional_cosines(incident: Direction, reflected: Direction) -> DirectionalCosines:
    st, sr = math.sin(incident.theta), math.sin(reflected.theta)
    w_x = st * math.cos(incident.phi) + sr * math.cos(reflected.phi)
    w_y = st * math.sin(incident.phi) + sr * math.sin(reflected.phi)
    return DirectionalCosines(w_x, w_y)


def phase_gradient(geometry: RisGeometry, w: DirectionalCosines) -> np.ndarray:
    """Return ``kappa*d_x*w_x*n_x + kappa*d_y*w_y*n_y`` on the ``(q_y, q_x)`` grid."""
    k = geometry.kappa
    px = k * geometry.d_x * w.w_x * np.arange(geometry.q_x)
    py = k * geometry.d_y * w.w_y * np.arange(geometry.q_y)
    return py[:, None] + px[None, :]


def initial_phase_field(geometry: RisGeometry, incident: Direction, reflected: Direction) -> PhaseField:
    return PhaseField(geometry, phase_gradient(geometry, directional_cosines(incident, reflected)))


def ideal_continuous_mask(scenario: Scenario) -> PhaseField:
    """Continuous compensation that cancels the design-pair initial phase (unwrapped)."""
    alpha = initial_phase_field(scenario.geometry, scenario.incident, scenario.target)
    return PhaseField(scenario.geometry, -alpha.values)


def two_state_set(gamma: float = 0.0, psi: float = math.pi, amplitudes: Sequence[float] | None = None) -> StateSet:
    """ON/OFF pair ``[a0*e^{j*gamma}, a1*e^{j*(gamma+psi)}]``."""
    psi = float(psi)
    if not math.isfinite(psi) or psi <= 0.0 or psi > math.pi + 1e-12:
        raise ValidationError(f"psi must lie in (0, pi], got {psi!r}", "psi")
    psi = min(psi, math.pi)
    if amplitudes is None:
        amplitudes = (1.0, 1.0)
    if len(amplitudes) != 2:
        raise ValidationError("a two-state set takes exactly two amplitudes", "amplitudes")
    return StateSet((0.0, psi), tuple(amplitudes), gamma)


def uniform_state_set(bits: int) -> StateSet:
    """``2**bits`` unit-magnitude states spaced uniformly around the circle."""
    if isinstance(bits, bool) or not isinstance(bits, (int, np.integer)) or not 1 <= bits <= 8:
        raise ValidationError(f"bits must be an integer in 1..8, got {bits!r}", "bits")
    n = 1 << int(bits)
    return StateSet(tuple(TWO_PI * k / n for k in range(n)))


def db_to_amplitude(db: float) -> float:
    return 10.0 ** (db / 20.0)


def quantize_mask(continuous: PhaseField, states: StateSet) -> StateMask:
    """Assign each cell the state nearest on the circle; ties go to the lower index."""
    beta = np.mod(continuous.values, TWO_PI)
    state_phase = np.mod(states.phases, TWO_PI)
    diff = np.abs(beta[..., None] - state_phase)
    dist = np.minimum(diff, TWO_PI - diff)
    # argmin returns the first minimum, which is the lowest index
    return StateMask(continuous.geometry, np.argmin(dist, axis=-1))


def baseline_mask(scenario: Scenario, states: StateSet) -> StateMask:
    """Nearest-state quantization of the ideal mask with the ideal mask aligned to gamma.

    The ideal compensation is only defined up to a global phase; quantizing
    against the gamma-free offsets makes the result independent of gamma.
    """
    return quantize_mask(ideal_continuous_mask(scenario), states.with_reference(0.0))


def applied_phasors(applied, states: StateSet | None = None) -> np.ndarray:
    """Per-cell complex weight ``a*e^{j*beta}`` for a field or a mask.

    For masks the common reference phase is dropped, which leaves every
    magnitude unchanged.
    """
    if isinstance(applied, PhaseField):
        return np.exp(1j * applied.values)
    if isinstance(applied, StateMask):
        if states is None:
            raise ValidationError("a StateMask needs its StateSet", "states")
        applied.check(states)
        return states.relative_phasors()[applied.states]
    raise ValidationError(f"unsupported applied mask type {type(applied).__name__}", "applied")


def _check_geometry(geometry: RisGeometry, applied) -> None:
    if applied.geometry != geometry:
        raise ValidationError("applied mask geometry does not match the scenario geometry", "geometry")


def phase_distribution_error(scenario: Scenario, applied, states: StateSet | None = None) -> float:
    """Shortfall of the coherent design-direction sum from ``q_x*q_y``."""
    _check_geometry(scenario.geometry, applied)
    alpha = initial_phase_field(scenario.geometry, scenario.incident, scenario.target).values
    total = np.sum(applied_phasors(applied, states) * np.exp(1j * alpha))
    return scenario.geometry.n_cells - float(abs(total))


__all__ = [
    "DirectionalCosines",
    "applied_phasors",
    "baseline_mask",
    "db_to_amplitude",
    "directional_cosines",
    "ideal_continuous_mask",
    "initial_phase_field",
    "phase_distribution_error",
    "phase_gradient",
    "quantize_mask",
    "two_state_set",
    "uniform_state_set",
]
