"""Bell-test calculator for dissociation-time entangled atom pairs."""

from ._dtebell import (
    TSIRELSON_BOUND,
    VIOLATION_THRESHOLD,
    BelowThresholdError,
    ClosedFormModel,
    ConfigError,
    CorrelationResult,
    DomainError,
    Error,
    Feasibility,
    InsufficientDataError,
    PulseSequence,
    QuadratureError,
    Resonance,
    Scenario,
    Species,
    TimescaleSummary,
    TrapGuide,
    chsh,
    correlate_quadrature,
    feasible,
    load_scenario,
    montecarlo,
    optimize_chsh,
    p0_from_fields,
    phase_stability,
    phi_tau,
    run_cli,
    scales,
    visibility,
)

__all__ = [name for name in dir() if not name.startswith("_")]
