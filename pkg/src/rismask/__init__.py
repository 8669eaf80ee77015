"""Phase-mask synthesis, 1-bit quantization and GA optimization for planar RIS arrays."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    Direction,
    PhaseField,
    RisGeometry,
    Scenario,
    StateMask,
    StateSet,
    UnsupportedError,
    ValidationError,
    direction_from_degrees,
    make_geometry,
    reference_scenario,
)
from .optimizer import GaConfig, GaResult, exhaustive_optimize, fitness, ga_optimize  # noqa: E402
from .pattern import PatternCut, PatternMetrics, array_factor, closed_form_gain, pattern_metrics, pattern_sweep  # noqa: E402
from .synthesis import (  # noqa: E402
    baseline_mask,
    DirectionalCosines,
    directional_cosines,
    ideal_continuous_mask,
    initial_phase_field,
    phase_distribution_error,
    quantize_mask,
    two_state_set,
    uniform_state_set,
)

__all__ = [
    "baseline_mask",
    "__version__",
    "Direction",
    "DirectionalCosines",
    "GaConfig",
    "GaResult",
    "PatternCut",
    "PatternMetrics",
    "PhaseField",
    "RisGeometry",
    "Scenario",
    "StateMask",
    "StateSet",
    "UnsupportedError",
    "ValidationError",
    "array_factor",
    "closed_form_gain",
    "direction_from_degrees",
    "directional_cosines",
    "exhaustive_optimize",
    "fitness",
    "ga_optimize",
    "ideal_continuous_mask",
    "initial_phase_field",
    "make_geometry",
    "reference_scenario",
    "pattern_metrics",
    "pattern_sweep",
    "phase_distribution_error",
    "quantize_mask",
    "two_state_set",
    "uniform_state_set",
]
