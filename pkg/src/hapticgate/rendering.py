"""Closed-form projection of the haptic cue onto a stability-feasible ball.

Two differential constraints bound the rendered force F, each turning the
nearest-point problem min |F - F_ref|^2 into a projection onto a ball:

Strict output passivity. Requiring x2d.F >= Vdot + k*|F|^2 with storage
V = (k_v/2)|x2|^2 and completing the square gives a ball centered at
x2d/(2k) with

    radius^2 = (1/4k^2) * (|x2d|^2 - (4k*k_v/dt)*x2.x2d + (4k*k_v/dt)*|x2|^2).

The radius is nonnegative for every state iff k*k_v/dt <= 1 (discriminant of
the quadratic form). Drawback: the ball is centered away from the origin, so
a small radius ties F to x2d/(2k) regardless of F_ref — the renderer can push
a force even when F_ref = 0.

Finite L2 gain with an energy tank. Instead of the pointwise passivity
inequality, the gain bound is enforced through a tank state E (Edot = eps)
that banks slack and releases it later:

    (k/2)|F|^2 + eps = |x2d|^2/(2k) - Vdot,      eps >= -E/dt.

Eliminating eps yields an origin-centered ball:

    radius^2 = (2/k) * (E/dt + |x2d|^2/(2k) - Vdot)
             = (1/k^2) * (2k*E/dt + |x2d|^2 - (2k*k_v/dt)*x2.x2d
                          + (2k*k_v/dt)*|x2|^2),

nonnegative for every state (given E >= 0) iff k*k_v/dt <= 2. Note the
placement of the terms: a tempting variant with x2 and x2d swapped in the
cross/quadratic terms does not follow from substituting
Vdot = k_v*x2.(x2d - x2)/dt and fails the feasibility bound above, so it is
deliberately not used. Because the ball is origin-centered, F_ref = 0 always
renders F = 0, and F never flips sign against F_ref.

Summing the equality constraint over a trace gives the prefix energy bound
sum |F|^2 dt <= (1/k^2) sum |x2d|^2 dt + (2/k) V(0) (the tank only ever
defers slack; the cap E_max discards surplus). `audits.audit_l2_gain` checks
exactly this inequality.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import RenderParams, as_vector, storage_rate
from .errors import ConfigError, FeasibilityError

PASSIVITY = "passivity"
FINITE_GAIN = "finite_gain"
RENDER_MODES = (PASSIVITY, FINITE_GAIN)

# radius^2 in [-RADIUS_SNAP, 0) snaps to 0; below -RADIUS_HARD is a hard error.
_RADIUS_SNAP = 1e-12
_RADIUS_HARD = 1e-9


@dataclass(frozen=True)
class TankState:
    """Energy tank: stored energy e >= 0 and the last flow eps (power)."""

    e: float
    eps: float = 0.0

    def __post_init__(self):
        if self.e < 0 or not np.isfinite(self.e):
            raise ValueError(f"tank energy must be finite and >= 0, got {self.e}")


@dataclass(frozen=True)
class FeasibleBall:
    """Ball |F - center|^2 <= radius_sq of stability-admissible forces."""

    center: np.ndarray
    radius_sq: float

    def contains(self, f, tol: float = 1e-9) -> bool:
        d = as_vector(f) - self.center
        return float(np.dot(d, d)) <= self.radius_sq + tol


@dataclass(frozen=True)
class RenderResult:
    """Rendered force; eps is the tank flow (finite-gain mode only)."""

    f: np.ndarray
    eps: float | None
    saturated: bool


def validate_params(params: RenderParams, mode: str) -> None:
    """Check the mode's feasibility bound on k*k_v/dt; raise ConfigError if violated."""
    if mode == PASSIVITY:
        bound = 1.0
    elif mode == FINITE_GAIN:
        bound = 2.0
    else:
        raise ConfigError(f"unknown render mode {mode!r}; expected one of {RENDER_MODES}")
    r = params.ratio
    if not 0.0 <= r <= bound:
        raise ConfigError(
            f"k*k_v/dt = {r:.6g} violates the {mode} feasibility bound 0 <= k*k_v/dt <= {bound:g}"
        )


def _checked_radius(radius_sq: float) -> float:
    if radius_sq < -_RADIUS_HARD:
        raise FeasibilityError(
            f"feasible-ball radius^2 = {radius_sq:.6g} < 0; parameter validation was bypassed"
        )
    return max(radius_sq, 0.0) if radius_sq < 0.0 else radius_sq


def passivity_ball(x2, x2d, params: RenderParams) -> FeasibleBall:
    """Feasible ball of the strict-output-passivity constraint."""
    validate_params(params, PASSIVITY)
    v, vd = as_vector(x2), as_vector(x2d)
    if v.shape != vd.shape:
        raise ValueError(f"dimension mismatch: x2 {v.shape} vs x2d {vd.shape}")
    k = params.k
    c = 4.0 * k * params.k_v / params.dt
    quad = float(np.dot(vd, vd)) - c * float(np.dot(v, vd)) + c * float(np.dot(v, v))
    radius_sq = quad / (4.0 * k * k)
    return FeasibleBall(center=vd / (2.0 * k), radius_sq=_checked_radius(radius_sq))


def finite_gain_ball(x2, x2d, e: float, params: RenderParams) -> FeasibleBall:
    """Origin-centered feasible ball of the finite-gain tank constraint."""
    validate_params(params, FINITE_GAIN)
    if e < 0:
        raise ValueError(f"tank energy must be >= 0, got {e}")
    v, vd = as_vector(x2), as_vector(x2d)
    if v.shape != vd.shape:
        raise ValueError(f"dimension mismatch: x2 {v.shape} vs x2d {vd.shape}")
    k = params.k
    c = 2.0 * k * params.k_v / params.dt
    quad = (
        2.0 * k * e / params.dt
        + float(np.dot(vd, vd))
        - c * float(np.dot(v, vd))
        + c * float(np.dot(v, v))
    )
    radius_sq = quad / (k * k)
    return FeasibleBall(center=np.zeros_like(vd), radius_sq=_checked_radius(radius_sq))


def project_to_ball(f_ref, ball: FeasibleBall) -> np.ndarray:
    """Nearest point of the ball to f_ref (f_ref itself when inside)."""
    f = as_vector(f_ref)
    if f.shape != ball.center.shape:
        raise ValueError(f"dimension mismatch: f_ref {f.shape} vs center {ball.center.shape}")
    if ball.radius_sq < 0:
        raise ValueError("ball radius_sq must be >= 0")
    d = f - ball.center
    dist_sq = float(np.dot(d, d))
    if dist_sq <= ball.radius_sq:
        return f.copy()
    if ball.radius_sq == 0.0:
        return ball.center.copy()
    return ball.center + d * (np.sqrt(ball.radius_sq) / np.sqrt(dist_sq))


def render_passive(f_ref, x2, x2d, params: RenderParams) -> RenderResult:
    """Project F_ref onto the passivity ball."""
    ball = passivity_ball(x2, x2d, params)
    f = project_to_ball(f_ref, ball)
    saturated = not np.array_equal(f, as_vector(f_ref))
    return RenderResult(f=f, eps=None, saturated=saturated)


def render_finite_gain(
    f_ref, x2, x2d, tank: TankState, params: RenderParams
) -> tuple[RenderResult, TankState]:
    """Project F_ref onto the finite-gain ball and advance the tank.

    The flow is recovered from the equality constraint,
    eps = |x2d|^2/(2k) - Vdot - (k/2)|F|^2; the ball construction already
    guarantees eps >= -e/dt, so the lower clamp in the tank update only
    guards float rounding.
    """
    if not 0.0 <= tank.e <= params.e_max:
        raise RuntimeError(f"tank energy {tank.e} outside [0, {params.e_max}]")
    ball = finite_gain_ball(x2, x2d, tank.e, params)
    f = project_to_ball(f_ref, ball)
    saturated = not np.array_equal(f, as_vector(f_ref))
    vd = as_vector(x2d)
    eps = (
        float(np.dot(vd, vd)) / (2.0 * params.k)
        - storage_rate(x2, x2d, params.k_v, params.dt)
        - 0.5 * params.k * float(np.dot(f, f))
    )
    # The ball was built from tank.e, so eps >= -e/dt holds analytically;
    # anything below is cancellation noise (it scales with signal magnitude
    # and can exceed any absolute guard when a non-certified operator gain
    # makes the loop diverge).
    eps = max(eps, -tank.e / params.dt)
    new_tank = tank_step(tank, eps, params.dt, params.e_max)
    return RenderResult(f=f, eps=eps, saturated=saturated), new_tank


def tank_step(tank: TankState, eps: float, dt: float, e_max: float) -> TankState:
    """Integrate the tank one step: e' = clamp(e + eps*dt, 0, e_max).

    The cap discards surplus flow (Edot = 0 at the cap); the lower clamp only
    absorbs float error because callers must respect eps >= -e/dt.
    """
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if eps < -tank.e / dt - _RADIUS_HARD:
        raise RuntimeError(
            f"tank flow eps = {eps:.6g} would deplete e = {tank.e:.6g} in under one step"
        )
    e = min(max(tank.e + eps * dt, 0.0), e_max)
    return TankState(e=e, eps=eps)
