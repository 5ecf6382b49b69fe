"""Deterministic closed-loop simulation of the shared-control pipeline.

One loop iteration per dt:

    x2d   = operator command (sees the force rendered last step)
    u_ref = proportional controller on x2d
    u_cbf = barrier-filtered reference, F_ref = u_cbf - u_ref
    F     = F_ref projected per the render mode (tank advanced)
    plant advanced with u_ref + disturbance  (shared control: the force only
    shapes the operator's next command, never the plant input directly)

`plant_input: u_cbf` switches the plant onto the filtered input instead —
the validation mode used to check forward invariance of the safe set.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .cbf import barrier_value, safe_input
from .dynamics import RobotState, reference_control, step
from .operators import IntentionProfile, OperatorModel, operator_command
from .rendering import (
    FINITE_GAIN,
    PASSIVITY,
    TankState,
    finite_gain_ball,
    passivity_ball,
    render_finite_gain,
    render_passive,
)
from .scenario import (
    MODE_NONE,
    PLANT_INPUT_CBF,
    ScenarioConfig,
    disturbance_sequence,
)


@dataclass(frozen=True)
class TraceSample:
    """One control step: pre-step state, commands, forces, tank, ball.

    e is the tank energy entering the step (the value the feasible ball was
    built from); the post-step energy is clamp(e + eps*dt, 0, e_max).
    """

    t: float
    x1: np.ndarray
    x2: np.ndarray
    x2d: np.ndarray
    u_ref: np.ndarray
    u_cbf: np.ndarray
    f_ref: np.ndarray
    f: np.ndarray
    eps: float
    e: float
    h: float
    radius_sq: float
    saturated: bool


class SimulationError(RuntimeError):
    """A module error aborted the run; carries the step index and partial trace."""

    def __init__(self, message: str, step_index: int, trace: list[TraceSample]):
        super().__init__(message)
        self.step_index = step_index
        self.trace = trace


def simulate_step(
    config: ScenarioConfig,
    state: RobotState,
    tank: TankState,
    x2d: np.ndarray,
    disturbance: np.ndarray,
    t: float,
) -> tuple[TraceSample, RobotState, TankState]:
    """Advance the pipeline one step. Shared by run_scenario and the service."""
    u_ref = reference_control(x2d, state.x2, config.dt)
    filt = safe_input(config.halfspace, config.gains, state, u_ref)

    if config.mode == FINITE_GAIN:
        ball = finite_gain_ball(state.x2, x2d, tank.e, config.params)
        result, new_tank = render_finite_gain(filt.f_ref, state.x2, x2d, tank, config.params)
        eps = result.eps
    elif config.mode == PASSIVITY:
        ball = passivity_ball(state.x2, x2d, config.params)
        result = render_passive(filt.f_ref, state.x2, x2d, config.params)
        new_tank, eps = tank, 0.0
    else:  # rendering disabled
        ball = None
        result = None
        new_tank, eps = tank, 0.0

    f = result.f if result is not None else np.zeros(config.dim)
    sample = TraceSample(
        t=t,
        x1=state.x1,
        x2=state.x2,
        x2d=x2d,
        u_ref=u_ref,
        u_cbf=filt.u_cbf,
        f_ref=filt.f_ref,
        f=f,
        eps=eps,
        e=tank.e if config.mode == FINITE_GAIN else 0.0,
        h=barrier_value(config.halfspace, state.x1),
        radius_sq=ball.radius_sq if ball is not None else 0.0,
        saturated=bool(result.saturated) if result is not None else False,
    )

    u_plant = filt.u_cbf if config.plant_input == PLANT_INPUT_CBF else u_ref
    new_state = step(state, u_plant + disturbance, config.dt)
    return sample, new_state, new_tank


def run_scenario(config: ScenarioConfig) -> list[TraceSample]:
    """Run the closed loop for the configured duration; one sample per step."""
    n = config.n_steps
    d = config.dim
    disturbances = disturbance_sequence(config.disturbance, n, d, config.dt, config.seed)
    state = config.initial
    tank = TankState(e=0.0)
    last_f = np.zeros(d)
    trace: list[TraceSample] = []
    for i in range(n):
        t = i * config.dt
        try:
            x2d = operator_command(config.operator, t, last_f)
            sample, state, tank = simulate_step(config, state, tank, x2d, disturbances[i], t)
        except Exception as exc:
            raise SimulationError(f"step {i} (t={t:.6g}): {exc}", step_index=i, trace=trace) from exc
        trace.append(sample)
        last_f = sample.f
    return trace


def replay_config(config: ScenarioConfig, times, x2d_values) -> ScenarioConfig:
    """Config that replays a recorded x2d sequence open-loop (scripted ZOH samples).

    With the plant on u_ref, states depend only on the x2d sequence, so
    replaying one recorded sequence through different render modes compares
    the force shaping on identical state trajectories.
    """
    op = OperatorModel(kind="scripted", intention=IntentionProfile.samples(times, x2d_values))
    return dataclasses.replace(config, operator=op)


def trace_columns(trace: list[TraceSample]) -> dict[str, np.ndarray]:
    """Stack a trace into column arrays (vectors become (n, d) arrays)."""
    if not trace:
        raise ValueError("empty trace")
    cols: dict[str, np.ndarray] = {}
    for name in ("x1", "x2", "x2d", "u_ref", "u_cbf", "f_ref", "f"):
        cols[name] = np.stack([getattr(s, name) for s in trace])
    for name in ("t", "eps", "e", "h", "radius_sq"):
        cols[name] = np.array([getattr(s, name) for s in trace])
    cols["saturated"] = np.array([s.saturated for s in trace], dtype=bool)
    return cols
