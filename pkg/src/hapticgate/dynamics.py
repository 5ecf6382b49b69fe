"""Double-integrator plant, proportional velocity controller, storage energy.

The robot is a point mass commanded in acceleration; position/velocity live in
d dimensions (d=2 for the planar cockpit scenario). The velocity loop is a
one-step proportional controller: applying its output for exactly dt drives
the velocity onto the commanded value, so the closed loop per axis is
xdot = A_new x + B_new x2d with A_new = [[0, 1], [0, -1/dt]].

Discretization is exact zero-order hold: the plant is linear, so using the
closed-form step removes integrator error from every downstream stability
audit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


def as_vector(x) -> np.ndarray:
    """Coerce scalars / sequences to a 1-D float array (scalars become d=1)."""
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.ndim != 1:
        raise ValueError(f"expected a scalar or 1-D vector, got shape {v.shape}")
    return v


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    va, vb = as_vector(a), as_vector(b)
    if va.shape != vb.shape:
        raise ValueError(f"dimension mismatch: {va.shape} vs {vb.shape}")
    return va, vb


@dataclass(frozen=True)
class RobotState:
    """Position x1 [m] and velocity x2 [m/s] of the double integrator."""

    x1: np.ndarray
    x2: np.ndarray

    def __post_init__(self):
        x1, x2 = _pair(self.x1, self.x2)
        object.__setattr__(self, "x1", x1)
        object.__setattr__(self, "x2", x2)
        if not (np.all(np.isfinite(x1)) and np.all(np.isfinite(x2))):
            raise ValueError("robot state must be finite")

    @property
    def dim(self) -> int:
        return self.x1.shape[0]


@dataclass(frozen=True)
class RenderParams:
    """Force-shaping parameters shared by both projection modes.

    k      : L2-gain parameter (>0); the rendered-force energy is bounded by
             1/k^2 times the command energy.
    k_v    : storage scale (>=0) in V = (k_v/2)|x2|^2.
    dt     : controller time constant = simulation step [s].
    e_max  : energy-tank cap (>=0); only the finite-gain mode uses the tank.

    The feasibility ratio k*k_v/dt must stay within [0, 1] (passivity mode)
    or [0, 2] (finite-gain mode); `rendering.validate_params` checks the
    mode-specific bound.
    """

    k: float
    k_v: float
    dt: float
    e_max: float = 0.0

    def __post_init__(self):
        if not self.k > 0:
            raise ConfigError(f"k must be > 0, got {self.k}")
        if self.k_v < 0:
            raise ConfigError(f"k_v must be >= 0, got {self.k_v}")
        if not self.dt > 0:
            raise ConfigError(f"dt must be > 0, got {self.dt}")
        if self.e_max < 0:
            raise ConfigError(f"e_max must be >= 0, got {self.e_max}")

    @property
    def ratio(self) -> float:
        """Feasibility ratio k*k_v/dt."""
        return self.k * self.k_v / self.dt


def reference_control(x2d, x2, dt: float) -> np.ndarray:
    """One-step proportional controller u_ref = (x2d - x2)/dt."""
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    vd, v = _pair(x2d, x2)
    return (vd - v) / dt


def step(state: RobotState, u, dt: float) -> RobotState:
    """Advance the double integrator by one exact ZOH step.

    x1' = x1 + x2*dt + u*dt^2/2,  x2' = x2 + u*dt.
    """
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    uv = as_vector(u)
    if uv.shape != state.x2.shape:
        raise ValueError(f"dimension mismatch: u {uv.shape} vs state {state.x2.shape}")
    if not np.all(np.isfinite(uv)):
        raise ValueError("control input must be finite")
    x1 = state.x1 + state.x2 * dt + uv * (dt * dt / 2.0)
    x2 = state.x2 + uv * dt
    return RobotState(x1=x1, x2=x2)


def closed_loop_matrices(dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Per-axis closed-loop matrices under the proportional controller.

    Returns (A_new, B_new) of xdot = A_new x + B_new x2d with
    A_new = [[0, 1], [0, -1/dt]], B_new = [0, 1/dt]^T.
    """
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    a = np.array([[0.0, 1.0], [0.0, -1.0 / dt]])
    b = np.array([[0.0], [1.0 / dt]])
    return a, b


def storage_energy(x2, k_v: float) -> float:
    """Storage function V = (k_v/2)*|x2|^2."""
    if k_v < 0:
        raise ValueError(f"k_v must be >= 0, got {k_v}")
    v = as_vector(x2)
    return 0.5 * k_v * float(np.dot(v, v))


def storage_rate(x2, x2d, k_v: float, dt: float) -> float:
    """Vdot = k_v * x2.(x2d - x2)/dt under the closed-loop velocity dynamics."""
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    v, vd = _pair(x2, x2d)
    return k_v * float(np.dot(v, vd - v)) / dt
