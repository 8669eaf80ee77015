"""Reflected-field response: direct phasor sum, closed form, sweeps and metrics."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import Direction, PhaseField, RisGeometry, StateMask, StateSet, ValidationError
from .synthesis import DirectionalCosines, applied_phasors, directional_cosines, phase_gradient

DB_FLOOR = -300.0
SINGULAR_EPS = 1e-12


def to_db(magnitude, offset: float = 0.0):
    """``20*log10(magnitude) + offset``; an exact zero maps to ``DB_FLOOR``."""
    mag = np.asarray(magnitude, dtype=float)
    with np.errstate(divide="ignore"):
        db = np.where(mag > 0, 20.0 * np.log10(np.where(mag > 0, mag, 1.0)) + offset, DB_FLOOR)
    return float(db) if db.ndim == 0 else db


def _weights(geometry: RisGeometry, applied, states: StateSet | None) -> np.ndarray:
    if applied.geometry != geometry:
        raise ValidationError("applied mask geometry does not match geometry", "geometry")
    return applied_phasors(applied, states)


def _sum(weights: np.ndarray, geometry: RisGeometry, incident: Direction, observe: Direction) -> complex:
    alpha = phase_gradient(geometry, directional_cosines(incident, observe))
    return complex(np.sum(weights * np.exp(1j * alpha)))


def array_factor(
    geometry: RisGeometry,
    applied: PhaseField | StateMask,
    incident: Direction,
    observe: Direction,
    states: StateSet | None = None,
) -> complex:
    """Complex reflected-field sum; its magnitude is the response ``g_pd``."""
    z = _sum(_weights(geometry, applied, states), geometry, incident, observe)
    if states is not None and isinstance(applied, StateMask):
        z *= complex(math.cos(states.reference), math.sin(states.reference))
    return z


def _kernel(q: int, psi: float) -> float:
    half = 0.5 * psi
    s = math.sin(half)
    if abs(s) < SINGULAR_EPS:
        return float(q)
    return abs(math.sin(q * half) / s)


def closed_form_gain(geometry: RisGeometry, w: DirectionalCosines, w_star: DirectionalCosines) -> float:
    """Product of the two Dirichlet kernels for an ideally compensated array."""
    k = geometry.kappa
    psi_x = k * geometry.d_x * (w.w_x - w_star.w_x)
    psi_y = k * geometry.d_y * (w.w_y - w_star.w_y)
    return _kernel(geometry.q_x, psi_x) * _kernel(geometry.q_y, psi_y)


@dataclass(frozen=True, eq=False)
class PatternCut:
    geometry: RisGeometry
    incident: Direction
    phi_r: float
    theta: np.ndarray  # radians, strictly increasing
    magnitude: np.ndarray
    db: np.ndarray

    @property
    def theta_deg(self) -> np.ndarray:
        return np.degrees(self.theta)

    def samples(self):
        return list(zip(self.theta.tolist(), self.magnitude.tolist(), self.db.tolist()))


def theta_grid(start_deg: float = 0.0, stop_deg: float = 90.0, step_deg: float = 0.1) -> np.ndarray:
    """Inclusive degree grid; points are rounded so that e.g. 60.0 is hit exactly."""
    if not step_deg > 0:
        raise ValidationError(f"sweep step must be > 0, got {step_deg!r}", "theta_step_deg")
    if start_deg < 0 or stop_deg > 90 or stop_deg < start_deg:
        raise ValidationError(
            f"sweep range [{start_deg}, {stop_deg}] must lie within [0, 90] and be ordered", "theta_start_deg"
        )
    n = int(math.floor((stop_deg - start_deg) / step_deg + 1e-9)) + 1
    return np.round(start_deg + step_deg * np.arange(n), 9)


def pattern_sweep(
    geometry: RisGeometry,
    applied: PhaseField | StateMask,
    incident: Direction,
    phi_r: float = 0.0,
    theta_deg: np.ndarray | None = None,
    states: StateSet | None = None,
    db_offset: float = 0.0,
    workers: int = 1,
) -> PatternCut:
    """Evaluate ``|g_pd|`` along an elevation cut at fixed azimuth ``phi_r`` (radians).

    Each sample is computed independently, so results do not depend on
    ``workers``.
    """
    if theta_deg is None:
        theta_deg = theta_grid()
    theta_deg = np.asarray(theta_deg, dtype=float)
    if theta_deg.size == 0:
        raise ValidationError("theta grid is empty", "theta_grid")
    if np.any(np.diff(theta_deg) <= 0):
        raise ValidationError("theta grid must be strictly increasing", "theta_grid")
    if theta_deg[0] < 0 or theta_deg[-1] > 90:
        raise ValidationError("theta grid must lie within [0, 90] degrees", "theta_grid")
    weights = _weights(geometry, applied, states)
    directions = [Direction(math.radians(t), phi_r) for t in theta_deg]

    def one(d: Direction) -> float:
        return abs(_sum(weights, geometry, incident, d))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            mags = list(pool.map(one, directions))
    else:
        mags = [one(d) for d in directions]
    mag = np.array(mags)
    theta = np.array([d.theta for d in directions])
    return PatternCut(geometry, incident, Direction(0.0, phi_r).phi, theta, mag, np.asarray(to_db(mag, db_offset)))


@dataclass(frozen=True)
class PatternMetrics:
    peak_theta: float
    peak_db: float
    gain_at_target_db: float
    specular_db: float
    first_sidelobe_db: float | None
    first_sidelobe_theta: float | None
    target_peak_offset: float

    def to_dict(self) -> dict:
        deg = lambda v: None if v is None else math.degrees(v)  # noqa: E731
        return {
            "peak_theta_deg": deg(self.peak_theta),
            "peak_db": self.peak_db,
            "gain_at_target_db": self.gain_at_target_db,
            "specular_db": self.specular_db,
            "first_sidelobe_db": self.first_sidelobe_db,
            "first_sidelobe_theta_deg": deg(self.first_sidelobe_theta),
            "target_peak_offset_deg": deg(self.target_peak_offset),
        }


def _interp(theta: np.ndarray, values: np.ndarray, at: float) -> float:
    if at <= theta[0]:
        return float(values[0])
    if at >= theta[-1]:
        return float(values[-1])
    i = int(np.searchsorted(theta, at))
    if theta[i] == at:
        return float(values[i])
    t0, t1 = theta[i - 1], theta[i]
    w = (at - t0) / (t1 - t0)
    return float(values[i - 1] + w * (values[i] - values[i - 1]))


def pattern_metrics(cut: PatternCut, target: Direction) -> PatternMetrics:
    """Peak, design-angle gain, specular level and nearest sidelobe of a cut.

    The specular level is read from the cut at ``theta_r = theta_t``; that is
    only meaningful when the cut contains the mirror plane (always true for
    normal incidence).
    """
    db = cut.db
    n = db.size
    if n < 3:
        raise ValidationError("pattern metrics need at least 3 samples", "samples")
    peak = int(np.argmax(db))
    lo = _lobe_edge(db, peak, -1)
    hi = _lobe_edge(db, peak, +1)
    side_i = None
    for i in range(1, n - 1):
        if lo <= i <= hi:
            continue
        if db[i] > db[i - 1] and db[i] >= db[i + 1]:
            if side_i is None or db[i] > db[side_i]:
                side_i = i
    return PatternMetrics(
        peak_theta=float(cut.theta[peak]),
        peak_db=float(db[peak]),
        gain_at_target_db=_interp(cut.theta, db, target.theta),
        specular_db=_interp(cut.theta, db, cut.incident.theta),
        first_sidelobe_db=None if side_i is None else float(db[side_i]),
        first_sidelobe_theta=None if side_i is None else float(cut.theta[side_i]),
        target_peak_offset=abs(float(cut.theta[peak]) - target.theta),
    )


def _lobe_edge(db: np.ndarray, peak: int, step: int) -> int:
    """Index of the first strict local minimum walking away from ``peak``."""
    i = peak
    n = db.size
    while 0 < i + step < n:
        nxt = i + step
        if db[nxt] > db[i]:
            return i
        i = nxt
    return i


__all__ = [
    "DB_FLOOR",
    "PatternCut",
    "PatternMetrics",
    "array_factor",
    "closed_form_gain",
    "pattern_metrics",
    "pattern_sweep",
    "theta_grid",
    "to_db",
]
