"""Simulation and design-optimization toolkit for flux sensing with
tunable superconducting qubits.

The package models a flux-tunable transmon used as a magnetometer:
its spectrum and decoherence channels, Ramsey/GHZ fringe patterns, the
sensitivity optimum over bias flux and delay, an iterative
phase-estimation campaign simulator, and the bias-line magnetostatics
that set the flux coupling.
"""

from .config import (
    ConfigError,
    ToolConfig,
    config_from_dict,
    config_to_dict,
    load_config,
    parse_config,
)
from .decoherence import (
    RATES_TABLE_HEADER,
    DecayRates,
    capacitive_rate,
    composite_rates,
    critical_current_dephasing_rate,
    flux_dephasing_rates,
    inductive_rate,
    purcell_rate,
    rates_table,
)
from .fringes import (
    FringeEvaluator,
    GateSequenceState,
    entangler,
    pattern_grid,
    phase_accumulator,
    projector,
    simulate_projection_sequence,
)
from .magnetostatics import (
    BiasLineGeometry,
    FieldComponents,
    FieldSingularityError,
    FluxPatch,
    InductanceReport,
    field_at,
    field_components,
    flux_through_rectangle,
    mutual_inductances,
)
from .optimizer import (
    DEFAULT_TAU_MIN,
    OptimalPoint,
    RidgeScan,
    coherence_time,
    dynamic_range,
    find_optimal_flux,
    optimal_delay,
    ridge_scan,
    sensitivity,
    step_budget,
)
from .pea import (
    DESK_PRESET,
    FULL_PRESET,
    GRID_SIZES,
    CampaignResult,
    CandidateSet,
    DegenerateLikelihoodError,
    PeaConfig,
    RunResult,
    StepRecord,
    aggregate_report,
    build_flux_grid,
    campaign_targets,
    choose_delay,
    posterior_update,
    run_campaign,
    run_single,
    run_step,
    runs_report,
    sample_measurement,
)
from .qubit import (
    CONSTANTS,
    OPERATIONAL_PHI_MAX,
    FluxBias,
    FluxDomainError,
    PhysicalConstants,
    SensorDesign,
    SpectrumDerivatives,
    coupling_g01,
    josephson_inductance,
    spectrum_derivatives,
    thermal_visibility,
    transition_frequency,
)

__version__ = "0.1.0"

__all__ = [
    "CONSTANTS",
    "DEFAULT_TAU_MIN",
    "DESK_PRESET",
    "FULL_PRESET",
    "GRID_SIZES",
    "OPERATIONAL_PHI_MAX",
    "RATES_TABLE_HEADER",
    "BiasLineGeometry",
    "CampaignResult",
    "CandidateSet",
    "ConfigError",
    "DecayRates",
    "DegenerateLikelihoodError",
    "FieldComponents",
    "FieldSingularityError",
    "FluxBias",
    "FluxDomainError",
    "FluxPatch",
    "FringeEvaluator",
    "GateSequenceState",
    "InductanceReport",
    "OptimalPoint",
    "PeaConfig",
    "PhysicalConstants",
    "RidgeScan",
    "RunResult",
    "SensorDesign",
    "SpectrumDerivatives",
    "StepRecord",
    "ToolConfig",
    "aggregate_report",
    "build_flux_grid",
    "campaign_targets",
    "capacitive_rate",
    "choose_delay",
    "coherence_time",
    "composite_rates",
    "config_from_dict",
    "config_to_dict",
    "coupling_g01",
    "critical_current_dephasing_rate",
    "dynamic_range",
    "entangler",
    "field_at",
    "field_components",
    "find_optimal_flux",
    "flux_dephasing_rates",
    "flux_through_rectangle",
    "inductive_rate",
    "josephson_inductance",
    "load_config",
    "mutual_inductances",
    "optimal_delay",
    "parse_config",
    "pattern_grid",
    "phase_accumulator",
    "posterior_update",
    "projector",
    "purcell_rate",
    "rates_table",
    "ridge_scan",
    "run_campaign",
    "run_single",
    "run_step",
    "runs_report",
    "sample_measurement",
    "sensitivity",
    "simulate_projection_sequence",
    "spectrum_derivatives",
    "step_budget",
    "thermal_visibility",
    "transition_frequency",
]
