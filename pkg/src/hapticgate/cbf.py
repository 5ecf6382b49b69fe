"""Linear barrier, second-order exponential CBF filter, reference force.

The safe set is a halfspace on position, h(x) = a.x1 + b >= 0. Because h
depends on position only, it has relative degree 2 for the double integrator
(the input does not appear in hdot), so safety is enforced through the
second-order exponential condition

    a.u + k1*h + k2*(a.x2) >= 0

with s^2 + k2*s + k1 Hurwitz. The filter solves

    min 0.5*|u - u_ref|^2  s.t.  margin(u) >= 0

whose single linear inequality admits the closed-form halfspace projection.
The reference haptic cue is the discrepancy F_ref = u_cbf - u_ref.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import RobotState, as_vector


@dataclass(frozen=True)
class SafetyHalfspace:
    """Safe halfspace h(x) = a.x1 + b >= 0 (a is the inward normal)."""

    a: np.ndarray
    b: float

    def __post_init__(self):
        a = as_vector(self.a)
        object.__setattr__(self, "a", a)
        if not float(np.dot(a, a)) > 0:
            raise ValueError("halfspace normal must be nonzero")


@dataclass(frozen=True)
class EcbfGains:
    """Gains of the exponential barrier condition; s^2 + k2 s + k1 Hurwitz."""

    k1: float
    k2: float

    def __post_init__(self):
        if not (self.k1 > 0 and self.k2 > 0):
            raise ValueError(f"gains must be > 0 for a Hurwitz polynomial, got k1={self.k1}, k2={self.k2}")

    @property
    def has_real_poles(self) -> bool:
        """True iff s^2 + k2 s + k1 has real roots (no barrier overshoot)."""
        return self.k2 * self.k2 >= 4.0 * self.k1

    @property
    def fast_pole(self) -> float:
        """Magnitude of the faster closed-loop pole of s^2 + k2 s + k1.

        With real poles, starting states in {h >= 0, hdot + fast_pole*h >= 0}
        keep h >= 0 under the active barrier condition. Complex poles make h
        oscillate, so no such ray exists; this then returns the decay rate
        k2/2, useful only as a time scale.
        """
        disc = self.k2 * self.k2 - 4.0 * self.k1
        if disc < 0:
            return self.k2 / 2.0
        return (self.k2 + disc**0.5) / 2.0


@dataclass(frozen=True)
class SafeInputResult:
    """Filter output: safe input, haptic reference force, activity flag."""

    u_cbf: np.ndarray
    f_ref: np.ndarray
    constraint_active: bool


def barrier_value(hs: SafetyHalfspace, x1) -> float:
    """h(x) = a.x1 + b; nonnegative iff the position is in the safe set."""
    p = as_vector(x1)
    if p.shape != hs.a.shape:
        raise ValueError(f"dimension mismatch: x1 {p.shape} vs normal {hs.a.shape}")
    return float(np.dot(hs.a, p)) + hs.b


def barrier_rate(hs: SafetyHalfspace, x2) -> float:
    """hdot = a.x2 (approach speed toward the boundary is -hdot)."""
    v = as_vector(x2)
    if v.shape != hs.a.shape:
        raise ValueError(f"dimension mismatch: x2 {v.shape} vs normal {hs.a.shape}")
    return float(np.dot(hs.a, v))


def ecbf_margin(hs: SafetyHalfspace, gains: EcbfGains, x1, x2, u) -> float:
    """Safety margin a.u + k1*h + k2*hdot; u is certified safe iff >= 0."""
    uv = as_vector(u)
    if uv.shape != hs.a.shape:
        raise ValueError(f"dimension mismatch: u {uv.shape} vs normal {hs.a.shape}")
    h = barrier_value(hs, x1)
    hd = barrier_rate(hs, x2)
    return float(np.dot(hs.a, uv)) + gains.k1 * h + gains.k2 * hd


def safe_input(hs: SafetyHalfspace, gains: EcbfGains, state: RobotState, u_ref) -> SafeInputResult:
    """Minimally modify u_ref to satisfy the barrier condition.

    If margin(u_ref) >= 0 the reference is already safe. Otherwise the
    minimizer is the Euclidean projection of u_ref onto the hyperplane
    margin(u) = 0: u_cbf = u_ref - a * margin(u_ref)/|a|^2. The inequality
    is a single halfspace in u, so the problem is always feasible.
    """
    u = as_vector(u_ref)
    m = ecbf_margin(hs, gains, state.x1, state.x2, u)
    if m >= 0.0:
        return SafeInputResult(u_cbf=u.copy(), f_ref=np.zeros_like(u), constraint_active=False)
    correction = -hs.a * (m / float(np.dot(hs.a, hs.a)))
    return SafeInputResult(u_cbf=u + correction, f_ref=correction, constraint_active=True)


def reference_force(u_cbf, u_ref) -> np.ndarray:
    """Haptic reference cue F_ref = u_cbf - u_ref."""
    a = as_vector(u_cbf)
    b = as_vector(u_ref)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a - b
