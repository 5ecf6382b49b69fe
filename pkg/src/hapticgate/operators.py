"""Synthetic operator models and the stylus-to-velocity input mapping.

The stability story only needs the human to be a finite-L2-gain map from the
rendered force to the commanded velocity. Two models realize that here:

* scripted   — x2d = r(t), ignoring the force (gain 0; open loop).
* admittance — x2d = r(t) - k_h * F, a static map whose gain from F to
               (x2d - r) is exactly k_h.

r(t) is an intention profile; the stylus kinds reproduce the physical input
device: displacement maps to velocity at 0.2 (m/s)/cm with a 1 cm dead-zone
so the operator can reliably command zero velocity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import as_vector
from .errors import ConfigError

SCRIPTED = "scripted"
ADMITTANCE = "admittance"
OPERATOR_KINDS = (SCRIPTED, ADMITTANCE)

INTENTION_KINDS = ("constant", "piecewise", "sinusoid", "stylus_trace", "samples")


@dataclass(frozen=True)
class StylusMapping:
    """Displacement-to-velocity map: full-displacement scaling outside the dead-zone."""

    dead_zone_cm: float = 1.0
    gain_mps_per_cm: float = 0.2

    def __post_init__(self):
        if self.dead_zone_cm < 0:
            raise ConfigError(f"dead_zone_cm must be >= 0, got {self.dead_zone_cm}")
        if self.gain_mps_per_cm < 0:
            raise ConfigError(f"gain_mps_per_cm must be >= 0, got {self.gain_mps_per_cm}")


def stylus_to_velocity(displacement_cm, mapping: StylusMapping) -> np.ndarray:
    """Per-axis: 0 inside the dead-zone, gain * full displacement outside.

    The jump at the dead-zone edge has magnitude gain * dead_zone by design
    (the full displacement is scaled, not the excess beyond the dead-zone).
    """
    d = as_vector(displacement_cm)
    out = mapping.gain_mps_per_cm * d
    out[np.abs(d) < mapping.dead_zone_cm] = 0.0
    return out


@dataclass(frozen=True)
class IntentionProfile:
    """Operator intention r(t) [m/s]; see INTENTION_KINDS.

    constant     : value
    piecewise    : knots (t, vector), linear interpolation, clamped ends
    sinusoid     : offset + amplitude * sin(2*pi*frequency_hz*t + phase)
    stylus_trace : piecewise-linear stylus displacement [cm] run through
                   `stylus_to_velocity`
    samples      : zero-order hold over explicit (t, vector) samples — used
                   to replay a recorded x2d sequence exactly
    """

    kind: str
    value: np.ndarray | None = None
    times: np.ndarray | None = None
    values: np.ndarray | None = None
    amplitude: np.ndarray | None = None
    frequency_hz: float = 0.0
    phase: float = 0.0
    offset: np.ndarray | None = None
    stylus: StylusMapping = field(default_factory=StylusMapping)

    def __post_init__(self):
        if self.kind not in INTENTION_KINDS:
            raise ConfigError(f"unknown intention kind {self.kind!r}; expected one of {INTENTION_KINDS}")
        if self.kind == "constant":
            if self.value is None:
                raise ConfigError("constant intention requires 'value'")
            object.__setattr__(self, "value", as_vector(self.value))
        elif self.kind in ("piecewise", "stylus_trace", "samples"):
            if self.times is None or self.values is None:
                raise ConfigError(f"{self.kind} intention requires 'times' and 'values'")
            t = np.asarray(self.times, dtype=float)
            v = np.atleast_2d(np.asarray(self.values, dtype=float))
            if t.ndim != 1 or v.shape[0] != t.shape[0]:
                raise ConfigError("intention knots must pair one time with one vector each")
            if np.any(np.diff(t) < 0):
                raise ConfigError("intention knot times must be non-decreasing")
            object.__setattr__(self, "times", t)
            object.__setattr__(self, "values", v)
        elif self.kind == "sinusoid":
            if self.amplitude is None:
                raise ConfigError("sinusoid intention requires 'amplitude'")
            amp = as_vector(self.amplitude)
            off = np.zeros_like(amp) if self.offset is None else as_vector(self.offset)
            if off.shape != amp.shape:
                raise ConfigError("sinusoid offset and amplitude must share a dimension")
            object.__setattr__(self, "amplitude", amp)
            object.__setattr__(self, "offset", off)

    @classmethod
    def constant(cls, value) -> "IntentionProfile":
        return cls(kind="constant", value=value)

    @classmethod
    def piecewise(cls, knots) -> "IntentionProfile":
        times = [t for t, _ in knots]
        values = [as_vector(v) for _, v in knots]
        return cls(kind="piecewise", times=times, values=values)

    @classmethod
    def samples(cls, times, values) -> "IntentionProfile":
        return cls(kind="samples", times=times, values=values)

    def __call__(self, t: float) -> np.ndarray:
        if self.kind == "constant":
            return self.value.copy()
        if self.kind == "sinusoid":
            return self.offset + self.amplitude * np.sin(2.0 * np.pi * self.frequency_hz * t + self.phase)
        if self.kind == "samples":
            idx = int(np.searchsorted(self.times, t, side="right")) - 1
            return self.values[max(idx, 0)].copy()
        # piecewise / stylus_trace: linear interpolation, clamped at the ends
        raw = np.array([np.interp(t, self.times, self.values[:, j]) for j in range(self.values.shape[1])])
        if self.kind == "stylus_trace":
            return stylus_to_velocity(raw, self.stylus)
        return raw

    @property
    def dim(self) -> int:
        if self.kind == "constant":
            return self.value.shape[0]
        if self.kind == "sinusoid":
            return self.amplitude.shape[0]
        return self.values.shape[1]


@dataclass(frozen=True)
class OperatorModel:
    """Operator map from rendered force to commanded velocity."""

    kind: str
    intention: IntentionProfile
    k_h: float = 0.0

    def __post_init__(self):
        if self.kind not in OPERATOR_KINDS:
            raise ConfigError(f"unknown operator kind {self.kind!r}; expected one of {OPERATOR_KINDS}")
        if self.k_h < 0:
            raise ConfigError(f"k_h must be >= 0, got {self.k_h}")


def operator_command(model: OperatorModel, t: float, f) -> np.ndarray:
    """Commanded velocity x2d at time t given the last rendered force f."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    r = model.intention(t)
    if model.kind == SCRIPTED:
        return r
    fv = as_vector(f)
    if fv.shape != r.shape:
        raise ValueError(f"dimension mismatch: force {fv.shape} vs intention {r.shape}")
    return r - model.k_h * fv
