"""Trace audits: prefix L2-gain bound, forward invariance, behavior checks.

Every audit returns an AuditReport whose failed checks carry a concrete
witness timestamp. Sums use left-Riemann integration with the simulation dt
(matching the discrete loop); trapezoidal is available as an option.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cbf import SafetyHalfspace
from .dynamics import RenderParams, storage_energy
from .simulation import TraceSample, trace_columns


@dataclass(frozen=True)
class AuditCheck:
    name: str
    passed: bool
    worst_margin: float
    witness_t: float | None = None
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        wit = "" if self.witness_t is None else f" @ t={self.witness_t:.3f}s"
        det = f" ({self.detail})" if self.detail else ""
        return f"[{status}] {self.name}: worst margin {self.worst_margin:.3e}{wit}{det}"


@dataclass(frozen=True)
class AuditReport:
    checks: list[AuditCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __add__(self, other: "AuditReport") -> "AuditReport":
        return AuditReport(checks=self.checks + other.checks)

    def summary(self) -> str:
        return "\n".join(c.line() for c in self.checks)


def _prefix_integral(values: np.ndarray, dt: float, integrator: str) -> np.ndarray:
    if integrator == "left":
        return np.cumsum(values) * dt
    if integrator == "trapezoid":
        out = np.zeros_like(values)
        if len(values) > 1:
            out[1:] = np.cumsum((values[1:] + values[:-1]) / 2.0) * dt
        return out
    raise ValueError(f"unknown integrator {integrator!r}; expected 'left' or 'trapezoid'")


def audit_l2_gain(
    trace: list[TraceSample],
    params: RenderParams,
    tol: float = 1e-6,
    integrator: str = "left",
) -> AuditReport:
    """Check the prefix energy bound for every prefix [0, tau]:

        sum |F|^2 dt  <=  (1/k^2) sum |x2d|^2 dt + (2/k) V(0) + tol

    with V(0) taken from the first trace sample. Reports the worst slack.
    """
    cols = trace_columns(trace)
    k = params.k
    with np.errstate(over="ignore"):
        f_energy = _prefix_integral(np.sum(cols["f"] ** 2, axis=1), params.dt, integrator)
        cmd_energy = _prefix_integral(np.sum(cols["x2d"] ** 2, axis=1), params.dt, integrator)
        v0 = storage_energy(cols["x2"][0], params.k_v)
        slack = cmd_energy / (k * k) + 2.0 * v0 / k - f_energy
    if not np.all(np.isfinite(slack)):
        first = int(np.argmax(~np.isfinite(slack)))
        return AuditReport(
            checks=[
                AuditCheck(
                    name="l2_prefix",
                    passed=False,
                    worst_margin=float("-inf"),
                    witness_t=float(cols["t"][first]),
                    detail="signal energies overflow float64; bound not verifiable",
                )
            ]
        )
    worst = int(np.argmin(slack))
    return AuditReport(
        checks=[
            AuditCheck(
                name="l2_prefix",
                passed=bool(slack[worst] >= -tol),
                worst_margin=float(slack[worst]),
                witness_t=float(cols["t"][worst]),
                detail=f"V(0)={v0:.6g}",
            )
        ]
    )


def audit_forward_invariance(
    trace: list[TraceSample],
    hs: SafetyHalfspace,
    tol: float = 1e-6,
) -> AuditReport:
    """Pass iff min h over the trace >= -tol (h recomputed from positions).

    Meaningful as a guarantee only for validation-mode traces (plant driven
    by u_cbf); under shared control the operator may override the filter and
    the report is informational.
    """
    cols = trace_columns(trace)
    h = cols["x1"] @ hs.a + hs.b
    worst = int(np.argmin(h))
    return AuditReport(
        checks=[
            AuditCheck(
                name="forward_invariance",
                passed=bool(h[worst] >= -tol),
                worst_margin=float(h[worst]),
                witness_t=float(cols["t"][worst]),
            )
        ]
    )


@dataclass(frozen=True)
class CharacteristicsTolerances:
    """Thresholds for the qualitative force-behavior checks C1-C4.

    far_h / rest_speed define "far from the obstacle" (h above threshold
    while not approaching) and "stationary" (both speeds below threshold).
    """

    far_h: float = 2.0
    rest_speed: float = 1e-3
    force_tol: float = 1e-9
    fref_tol: float = 1e-12
    sign_tol: float = 1e-12
    pair_tol: float = 1e-9
    radius_gap: float = 1e-6
    l2_tol: float = 1e-6


def _tank_memory_witness(
    cols: dict[str, np.ndarray], tol: CharacteristicsTolerances
) -> tuple[bool, float, float | None, str]:
    """Search for two samples with equal (x2, x2d) but different ball radius."""
    keys = np.round(np.hstack([cols["x2"], cols["x2d"]]) / tol.pair_tol).astype(np.int64)
    groups: dict[bytes, list[int]] = {}
    for i, row in enumerate(keys):
        groups.setdefault(row.tobytes(), []).append(i)
    best_gap, best_pair = 0.0, None
    for idx in groups.values():
        if len(idx) < 2:
            continue
        r = cols["radius_sq"][idx]
        gap = float(r.max() - r.min())
        if gap > best_gap:
            best_gap = gap
            best_pair = (idx[int(np.argmin(r))], idx[int(np.argmax(r))])
    if best_pair is not None and best_gap > tol.radius_gap:
        i, j = sorted(best_pair)
        detail = (
            f"equal (x2, x2d) at t={cols['t'][i]:.3f}s and t={cols['t'][j]:.3f}s "
            f"with radius_sq gap {best_gap:.3g}"
        )
        return True, best_gap, float(cols["t"][j]), detail
    return False, best_gap, None, "no state revisit with differing radius found"


def audit_characteristics(
    trace: list[TraceSample],
    hs: SafetyHalfspace,
    params: RenderParams,
    tol: CharacteristicsTolerances | None = None,
) -> AuditReport:
    """Check the qualitative force-feedback characteristics:

    C1 zero force when far from the obstacle (not approaching) or at rest;
    C2 no sign flip of F against F_ref along the obstacle normal, and zero
       force when retreating far from the obstacle;
    C3 the prefix L2 bound holds;
    C4 the force bound has memory: with a tank (e_max > 0) some revisited
       (x2, x2d) state sees a different feasible radius.
    """
    tol = tol or CharacteristicsTolerances()
    cols = trace_columns(trace)
    a = hs.a / np.linalg.norm(hs.a)
    h = cols["h"]
    away = cols["x2"] @ a  # >= 0 means not approaching the boundary
    f_norm = np.linalg.norm(cols["f"], axis=1)
    fref_norm = np.linalg.norm(cols["f_ref"], axis=1)

    checks: list[AuditCheck] = []

    far = (h > tol.far_h) & (away >= 0.0)
    rest = (np.linalg.norm(cols["x2"], axis=1) < tol.rest_speed) & (
        np.linalg.norm(cols["x2d"], axis=1) < tol.rest_speed
    )
    c1_mask = far | rest
    if np.any(c1_mask):
        sub = np.where(c1_mask)[0]
        worst = sub[int(np.argmax(f_norm[sub]))]
        checks.append(
            AuditCheck(
                name="C1_zero_when_far_or_rest",
                passed=bool(f_norm[worst] <= tol.force_tol),
                worst_margin=float(tol.force_tol - f_norm[worst]),
                witness_t=float(cols["t"][worst]),
                detail=f"{len(sub)} samples in scope",
            )
        )
    else:
        checks.append(
            AuditCheck("C1_zero_when_far_or_rest", True, 0.0, None, "no samples in scope")
        )

    active = fref_norm > tol.fref_tol
    sign_prod = (cols["f"] @ a) * (cols["f_ref"] @ a)
    if np.any(active):
        sub = np.where(active)[0]
        worst = sub[int(np.argmin(sign_prod[sub]))]
        sign_ok = bool(sign_prod[worst] >= -tol.sign_tol)
    else:
        worst, sign_ok = None, True
    retreat_far = far & (away > 0.0)
    if np.any(retreat_far):
        sub = np.where(retreat_far)[0]
        worst_r = sub[int(np.argmax(f_norm[sub]))]
        retreat_ok = bool(f_norm[worst_r] <= tol.force_tol)
    else:
        worst_r, retreat_ok = None, True
    checks.append(
        AuditCheck(
            name="C2_sign_and_retreat",
            passed=sign_ok and retreat_ok,
            worst_margin=float(sign_prod[worst]) if worst is not None else 0.0,
            witness_t=(
                float(cols["t"][worst]) if not sign_ok
                else float(cols["t"][worst_r]) if not retreat_ok
                else None
            ),
            detail=f"{int(np.sum(active))} samples with F_ref != 0",
        )
    )

    l2 = audit_l2_gain(trace, params, tol=tol.l2_tol).checks[0]
    checks.append(
        AuditCheck("C3_l2_prefix", l2.passed, l2.worst_margin, l2.witness_t, l2.detail)
    )

    if params.e_max > 0:
        found, gap, witness_t, detail = _tank_memory_witness(cols, tol)
        checks.append(AuditCheck("C4_tank_memory", found, gap, witness_t, detail))
    else:
        checks.append(
            AuditCheck("C4_tank_memory", True, 0.0, None, "not applicable (e_max = 0)")
        )

    return AuditReport(checks=checks)
