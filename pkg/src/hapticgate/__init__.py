"""Haptic shared-control teleoperation simulator.

A planar double-integrator robot is steered by an operator's velocity command
while a control-barrier-function filter computes the safe input it would have
applied. The discrepancy between the two becomes a haptic force cue, which is
projected in closed form onto a feasible ball (strict-output-passivity mode,
or finite-L2-gain mode with an energy tank) so the human-robot feedback loop
stays small-gain stable. The package bundles a scenario-driven simulation
harness with stability audits, a CLI, and a real-time WebSocket service.
"""

from .dynamics import (
    RenderParams,
    RobotState,
    closed_loop_matrices,
    reference_control,
    step,
    storage_energy,
    storage_rate,
)
from .cbf import (
    EcbfGains,
    SafeInputResult,
    SafetyHalfspace,
    barrier_rate,
    barrier_value,
    ecbf_margin,
    reference_force,
    safe_input,
)
from .rendering import (
    FeasibleBall,
    FeasibilityError,
    RenderResult,
    TankState,
    finite_gain_ball,
    passivity_ball,
    project_to_ball,
    render_finite_gain,
    render_passive,
    tank_step,
    validate_params,
)
from .operators import (
    IntentionProfile,
    OperatorModel,
    StylusMapping,
    operator_command,
    stylus_to_velocity,
)
from .errors import ConfigError
from .scenario import ScenarioConfig, load_scenario
from .simulation import TraceSample, run_scenario
from .audits import (
    AuditCheck,
    AuditReport,
    audit_characteristics,
    audit_forward_invariance,
    audit_l2_gain,
)
from .trace_io import export_trace, import_trace

__all__ = [
    "AuditCheck",
    "AuditReport",
    "ConfigError",
    "EcbfGains",
    "FeasibleBall",
    "FeasibilityError",
    "IntentionProfile",
    "OperatorModel",
    "RenderParams",
    "RenderResult",
    "RobotState",
    "SafeInputResult",
    "SafetyHalfspace",
    "ScenarioConfig",
    "StylusMapping",
    "TankState",
    "TraceSample",
    "audit_characteristics",
    "audit_forward_invariance",
    "audit_l2_gain",
    "barrier_rate",
    "barrier_value",
    "closed_loop_matrices",
    "ecbf_margin",
    "export_trace",
    "finite_gain_ball",
    "import_trace",
    "load_scenario",
    "operator_command",
    "passivity_ball",
    "project_to_ball",
    "reference_control",
    "reference_force",
    "render_finite_gain",
    "render_passive",
    "run_scenario",
    "safe_input",
    "step",
    "storage_energy",
    "storage_rate",
    "stylus_to_velocity",
    "tank_step",
    "validate_params",
]
