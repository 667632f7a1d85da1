from gatecat.requests import (
    CorrectionSettings,
    GateKind,
    GateRequest,
    correction_settings,
    duration_for,
    gate_kind,
    lambda_for,
    parameter_map,
    parameter_rate,
)
from gatecat.plans import WaveformPlan, plan_waveforms
from gatecat.targets import TargetUnitary, displacement_matrix, sigma_phi, squeezing_matrix, target_unitary
from gatecat.runner import (
    FidelityReport,
    GateContext,
    GateOutcome,
    CompiledGate,
    cached_spectrum,
    compile_gate,
    composite_fidelity,
    correction_comparison,
    default_lambda_grid,
    feasible_lambda_limit,
    optimize_lambda,
    resolve_lambda,
    run_gate,
    simulate_gate,
)
