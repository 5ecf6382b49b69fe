"""Scenario configuration: dataclass model plus a strict YAML loader.

A scenario file is a single nested key/value document (YAML). Unknown keys
are errors — a typo in a gain name must not silently fall back to defaults.
The full schema with defaults is documented in the README and mirrored by
the bundled files under configs/.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .cbf import EcbfGains, SafetyHalfspace
from .dynamics import RenderParams, RobotState
from .errors import ConfigError
from .operators import (
    ADMITTANCE,
    IntentionProfile,
    OperatorModel,
    StylusMapping,
)
from .rendering import FINITE_GAIN, PASSIVITY, validate_params

MODE_NONE = "none"
SCENARIO_MODES = (PASSIVITY, FINITE_GAIN, MODE_NONE)

PLANT_INPUT_REFERENCE = "u_ref"
PLANT_INPUT_CBF = "u_cbf"
PLANT_INPUTS = (PLANT_INPUT_REFERENCE, PLANT_INPUT_CBF)

DISTURBANCE_KINDS = ("none", "step", "noise")


@dataclass(frozen=True)
class DisturbanceSpec:
    """Additive acceleration disturbance applied to the plant input.

    none  : zero.
    step  : amplitude on [t_start, t_end).
    noise : white Gaussian acceleration (per-axis std) through a first-order
            low-pass with the given cutoff; realized from the scenario seed.
    """

    kind: str = "none"
    amplitude: np.ndarray | None = None
    t_start: float = 0.0
    t_end: float = float("inf")
    std: float = 0.0
    cutoff_hz: float = 1.0

    def __post_init__(self):
        if self.kind not in DISTURBANCE_KINDS:
            raise ConfigError(f"unknown disturbance kind {self.kind!r}; expected one of {DISTURBANCE_KINDS}")
        if self.kind == "step":
            if self.amplitude is None:
                raise ConfigError("step disturbance requires 'amplitude'")
            object.__setattr__(self, "amplitude", np.atleast_1d(np.asarray(self.amplitude, dtype=float)))
        if self.kind == "noise":
            if self.std < 0:
                raise ConfigError(f"noise std must be >= 0, got {self.std}")
            if not self.cutoff_hz > 0:
                raise ConfigError(f"noise cutoff_hz must be > 0, got {self.cutoff_hz}")


def disturbance_sequence(spec: DisturbanceSpec, n_steps: int, dim: int, dt: float, seed: int) -> np.ndarray:
    """Materialize the disturbance as an (n_steps, dim) array, deterministically."""
    out = np.zeros((n_steps, dim))
    if spec.kind == "step":
        amp = spec.amplitude
        if amp.shape[0] != dim:
            raise ConfigError(f"step disturbance dimension {amp.shape[0]} != scenario dimension {dim}")
        t = np.arange(n_steps) * dt
        mask = (t >= spec.t_start) & (t < spec.t_end)
        out[mask] = amp
    elif spec.kind == "noise":
        rng = np.random.default_rng(seed)
        white = rng.normal(0.0, spec.std, size=(n_steps, dim))
        tau = 1.0 / (2.0 * np.pi * spec.cutoff_hz)
        alpha = dt / (tau + dt)
        y = np.zeros(dim)
        for i in range(n_steps):
            y = y + alpha * (white[i] - y)
            out[i] = y
    return out


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything one deterministic closed-loop run needs."""

    dt: float
    duration: float
    initial: RobotState
    halfspace: SafetyHalfspace
    gains: EcbfGains
    params: RenderParams
    mode: str
    operator: OperatorModel
    disturbance: DisturbanceSpec = field(default_factory=DisturbanceSpec)
    seed: int = 0
    plant_input: str = PLANT_INPUT_REFERENCE
    stylus: StylusMapping = field(default_factory=StylusMapping)
    name: str = "scenario"

    def __post_init__(self):
        if self.mode not in SCENARIO_MODES:
            raise ConfigError(f"unknown render mode {self.mode!r}; expected one of {SCENARIO_MODES}")
        if self.plant_input not in PLANT_INPUTS:
            raise ConfigError(f"unknown plant_input {self.plant_input!r}; expected one of {PLANT_INPUTS}")
        if not self.duration > 0:
            raise ConfigError(f"duration must be > 0, got {self.duration}")
        if self.params.dt != self.dt:
            raise ConfigError("render params must share the scenario dt")
        if self.mode != MODE_NONE:
            validate_params(self.params, self.mode)
        n = round(self.duration / self.dt)
        if n < 1 or abs(n * self.dt - self.duration) > 1e-9 * max(1.0, self.duration):
            raise ConfigError(
                f"duration {self.duration} is not an integer multiple of dt {self.dt}"
            )
        d = self.initial.dim
        if self.halfspace.a.shape[0] != d:
            raise ConfigError("halfspace normal dimension does not match the initial state")
        if self.operator.intention.dim != d:
            raise ConfigError("operator intention dimension does not match the initial state")

    @property
    def n_steps(self) -> int:
        return round(self.duration / self.dt)

    @property
    def dim(self) -> int:
        return self.initial.dim

    @property
    def small_gain_product(self) -> float:
        """k_h * (1/k): the loop is small-gain certified iff this is < 1."""
        return self.operator.k_h / self.params.k

    @property
    def small_gain_certified(self) -> bool:
        return self.small_gain_product < 1.0


def _require_mapping(node, where: str) -> dict:
    if not isinstance(node, dict):
        raise ConfigError(f"{where} must be a mapping, got {type(node).__name__}")
    return node


def _check_keys(node: dict, allowed: set[str], where: str) -> None:
    unknown = set(node) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {where}; allowed: {sorted(allowed)}")


def _intention_from_dict(node: dict, stylus: StylusMapping) -> IntentionProfile:
    _check_keys(
        node,
        {"kind", "value", "knots", "times", "values", "amplitude", "frequency_hz", "phase", "offset", "stylus"},
        "operator.intention",
    )
    kind = node.get("kind")
    sty = _stylus_from_dict(node["stylus"]) if "stylus" in node else stylus
    if kind == "constant":
        return IntentionProfile(kind="constant", value=node.get("value"))
    if kind in ("piecewise", "stylus_trace"):
        knots = node.get("knots")
        if not knots:
            raise ConfigError(f"{kind} intention requires 'knots'")
        times = [k[0] for k in knots]
        values = [k[1] for k in knots]
        return IntentionProfile(kind=kind, times=times, values=values, stylus=sty)
    if kind == "samples":
        return IntentionProfile(kind="samples", times=node.get("times"), values=node.get("values"))
    if kind == "sinusoid":
        return IntentionProfile(
            kind="sinusoid",
            amplitude=node.get("amplitude"),
            frequency_hz=float(node.get("frequency_hz", 0.0)),
            phase=float(node.get("phase", 0.0)),
            offset=node.get("offset"),
        )
    raise ConfigError(f"unknown intention kind {kind!r}")


def _stylus_from_dict(node: dict) -> StylusMapping:
    _check_keys(node, {"dead_zone_cm", "gain_mps_per_cm"}, "stylus")
    return StylusMapping(
        dead_zone_cm=float(node.get("dead_zone_cm", 1.0)),
        gain_mps_per_cm=float(node.get("gain_mps_per_cm", 0.2)),
    )


def scenario_from_dict(doc: dict) -> ScenarioConfig:
    """Build a validated ScenarioConfig from a parsed config document."""
    doc = _require_mapping(doc, "scenario")
    _check_keys(
        doc,
        {
            "name", "dt", "duration", "seed", "mode", "plant_input", "initial",
            "halfspace", "ecbf", "render", "operator", "disturbance", "stylus",
        },
        "scenario",
    )
    for key in ("dt", "duration", "mode", "initial", "halfspace", "render", "operator"):
        if key not in doc:
            raise ConfigError(f"scenario is missing required key {key!r}")
    try:
        dt = float(doc["dt"])

        init = _require_mapping(doc["initial"], "initial")
        _check_keys(init, {"x1", "x2"}, "initial")
        initial = RobotState(x1=init["x1"], x2=init["x2"])

        hs_node = _require_mapping(doc["halfspace"], "halfspace")
        _check_keys(hs_node, {"a", "b"}, "halfspace")
        halfspace = SafetyHalfspace(a=hs_node["a"], b=float(hs_node["b"]))

        ecbf = _require_mapping(doc.get("ecbf", {}), "ecbf")
        _check_keys(ecbf, {"k1", "k2"}, "ecbf")
        gains = EcbfGains(k1=float(ecbf.get("k1", 1.0)), k2=float(ecbf.get("k2", 2.0)))

        render = _require_mapping(doc["render"], "render")
        _check_keys(render, {"k", "k_v", "e_max"}, "render")
        params = RenderParams(
            k=float(render["k"]),
            k_v=float(render["k_v"]),
            dt=dt,
            e_max=float(render.get("e_max", 0.0)),
        )

        stylus = _stylus_from_dict(_require_mapping(doc.get("stylus", {}), "stylus"))

        op_node = _require_mapping(doc["operator"], "operator")
        _check_keys(op_node, {"kind", "k_h", "intention"}, "operator")
        if "intention" not in op_node:
            raise ConfigError("operator requires 'intention'")
        intention = _intention_from_dict(_require_mapping(op_node["intention"], "operator.intention"), stylus)
        op_kind = op_node.get("kind", "scripted")
        operator = OperatorModel(kind=op_kind, intention=intention, k_h=float(op_node.get("k_h", 0.0)))
        if op_kind == ADMITTANCE and "k_h" not in op_node:
            raise ConfigError("admittance operator requires an explicit k_h")

        dist_node = _require_mapping(doc.get("disturbance", {"kind": "none"}), "disturbance")
        _check_keys(dist_node, {"kind", "amplitude", "t_start", "t_end", "std", "cutoff_hz"}, "disturbance")
        disturbance = DisturbanceSpec(
            kind=dist_node.get("kind", "none"),
            amplitude=dist_node.get("amplitude"),
            t_start=float(dist_node.get("t_start", 0.0)),
            t_end=float(dist_node.get("t_end", float("inf"))),
            std=float(dist_node.get("std", 0.0)),
            cutoff_hz=float(dist_node.get("cutoff_hz", 1.0)),
        )

        return ScenarioConfig(
            dt=dt,
            duration=float(doc["duration"]),
            initial=initial,
            halfspace=halfspace,
            gains=gains,
            params=params,
            mode=str(doc["mode"]),
            operator=operator,
            disturbance=disturbance,
            seed=int(doc.get("seed", 0)),
            plant_input=str(doc.get("plant_input", PLANT_INPUT_REFERENCE)),
            stylus=stylus,
            name=str(doc.get("name", "scenario")),
        )
    except (TypeError, KeyError) as exc:
        raise ConfigError(f"malformed scenario config: {exc}") from exc


def load_scenario(path: str | Path) -> ScenarioConfig:
    """Load and validate a scenario YAML file."""
    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if doc is None:
        raise ConfigError(f"{path} is empty")
    return scenario_from_dict(doc)


def with_mode(config: ScenarioConfig, mode: str) -> ScenarioConfig:
    return dataclasses.replace(config, mode=mode)


def with_overrides(config: ScenarioConfig, **updates) -> ScenarioConfig:
    """Replace selected leaf parameters (k, k_v, e_max, k_h, seed, duration, mode)."""
    cfg = config
    render_updates = {key: updates.pop(key) for key in ("k", "k_v", "e_max") if key in updates}
    if render_updates:
        cfg = dataclasses.replace(cfg, params=dataclasses.replace(cfg.params, **render_updates))
    if "k_h" in updates:
        cfg = dataclasses.replace(cfg, operator=dataclasses.replace(cfg.operator, k_h=updates.pop("k_h")))
    if updates.keys() - {"seed", "duration", "mode", "plant_input", "name"}:
        raise ConfigError(f"unknown override(s): {sorted(updates)}")
    if updates:
        cfg = dataclasses.replace(cfg, **updates)
    return cfg
