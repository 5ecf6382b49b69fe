"""Acceptance gate: every release criterion at its stated tolerance.

Each test records one PASS/FAIL line; the conftest terminal-summary hook
prints the collected lines at the end of the session.
"""

import dataclasses
import json
import time

import numpy as np
import pytest

from hapticgate import (
    EcbfGains,
    RenderParams,
    RobotState,
    SafetyHalfspace,
    TankState,
    audit_characteristics,
    audit_l2_gain,
    finite_gain_ball,
    load_scenario,
    passivity_ball,
    render_finite_gain,
    render_passive,
    run_scenario,
    safe_input,
)
from hapticgate.scenario import with_overrides
from hapticgate.simulation import replay_config, trace_columns
from hapticgate.trace_io import trace_from_csv, trace_to_csv

from oracles import cbf_zoom_grid_oracle, finite_gain_qcqp_oracle, passivity_qcqp_oracle

ACCEPTANCE_LINES: list[str] = []


def record(name: str, passed: bool, detail: str = ""):
    status = "PASS" if passed else "FAIL"
    ACCEPTANCE_LINES.append(f"[{status}] {name}" + (f" — {detail}" if detail else ""))
    assert passed, f"{name}: {detail}"


def random_params(rng, max_ratio: float) -> RenderParams:
    k = rng.uniform(0.2, 3.0)
    dt = rng.uniform(0.01, 0.2)
    ratio = rng.uniform(0.0, 0.995 * max_ratio)
    return RenderParams(k=k, k_v=ratio * dt / k, dt=dt, e_max=rng.uniform(0.0, 0.2))


class TestQcqpOracleEquivalence:
    def test_both_modes_1000_instances_under_10s(self):
        rng = np.random.default_rng(2024)
        t0 = time.perf_counter()
        worst = 0.0
        for _ in range(1000):
            params = random_params(rng, 1.0)
            x2, x2d = rng.normal(0, 2, 2), rng.normal(0, 2, 2)
            f_ref = rng.normal(0, 10, 2)
            got = render_passive(f_ref, x2, x2d, params).f
            want = passivity_qcqp_oracle(f_ref, x2, x2d, params.k, params.k_v, params.dt)
            worst = max(worst, float(np.linalg.norm(got - want)))
        for _ in range(1000):
            params = random_params(rng, 2.0)
            x2, x2d = rng.normal(0, 2, 2), rng.normal(0, 2, 2)
            f_ref = rng.normal(0, 10, 2)
            e = rng.uniform(0.0, params.e_max)
            got, _ = render_finite_gain(f_ref, x2, x2d, TankState(e), params)
            want, _ = finite_gain_qcqp_oracle(f_ref, x2, x2d, e, params.k, params.k_v, params.dt)
            worst = max(worst, float(np.linalg.norm(got.f - want)))
        elapsed = time.perf_counter() - t0
        record(
            "QCQP oracle equivalence (1000/mode, tol 1e-6, <10 s)",
            worst <= 1e-6 and elapsed < 10.0,
            f"worst |ΔF| = {worst:.2e}, {elapsed:.2f}s",
        )


class TestCbfOracleEquivalence:
    def test_1000_instances(self):
        rng = np.random.default_rng(7)
        worst_scaled = 0.0
        for _ in range(1000):
            a = rng.normal(0, 1, 2)
            while np.linalg.norm(a) < 0.3:
                a = rng.normal(0, 1, 2)
            b = rng.uniform(0.0, 5.0)
            gains = EcbfGains(k1=rng.uniform(0.2, 4.0), k2=rng.uniform(0.2, 4.0))
            x1, x2 = rng.normal(0, 2, 2), rng.normal(0, 2, 2)
            u_ref = rng.normal(0, 5, 2)
            hs = SafetyHalfspace(a=a, b=b)
            got = safe_input(hs, gains, RobotState(x1=x1, x2=x2), u_ref).u_cbf
            want = cbf_zoom_grid_oracle(a, b, gains.k1, gains.k2, x1, x2, u_ref)
            err = np.linalg.norm(got - want) / max(1.0, float(np.linalg.norm(want)))
            worst_scaled = max(worst_scaled, float(err))
        record(
            "CBF-QP oracle equivalence (1000 instances vs refined-grid minimizer, tol 1e-6)",
            worst_scaled <= 1e-6,
            f"worst scaled |Δu| = {worst_scaled:.2e}",
        )


class TestL2PrefixInequality:
    def test_bundled_finite_gain_scenarios(self, config_dir):
        results = []
        for name in ("wall_approach.yaml", "wall_approach_notank.yaml", "small_gain_sweep.yaml"):
            cfg = load_scenario(config_dir / name)
            assert cfg.mode == "finite_gain"
            cfg = with_overrides(cfg, duration=60.0)
            t0 = time.perf_counter()
            trace = run_scenario(cfg)
            report = audit_l2_gain(trace, cfg.params, tol=1e-6)
            elapsed = time.perf_counter() - t0
            results.append((name, report.passed, elapsed))
        ok = all(p for _, p, _ in results) and all(el < 1.0 for _, _, el in results)
        record(
            "L2 prefix inequality on bundled finite-gain scenarios (tol 1e-6, 60 s, <1 s)",
            ok,
            "; ".join(f"{n}: {'pass' if p else 'FAIL'} {el*1e3:.0f}ms" for n, p, el in results),
        )


class TestFeasibilityBounds:
    @staticmethod
    def _raw_radius(x2, x2d, ratio, mode):
        # unvalidated quadratic forms, per axis coefficients only
        if mode == "passivity":
            c = 4.0 * ratio
            return x2d @ x2d - c * (x2 @ x2d) + c * (x2 @ x2)
        c = 2.0 * ratio
        return x2d @ x2d - c * (x2 @ x2d) + c * (x2 @ x2)

    def test_nonnegative_inside_and_witness_outside(self):
        rng = np.random.default_rng(11)
        # inside the bounds: never negative through the public constructors
        worst = np.inf
        for _ in range(20_000):
            x2, x2d = rng.normal(0, 2, 2), rng.normal(0, 2, 2)
            p1 = random_params(rng, 1.0)
            p2 = random_params(rng, 2.0)
            worst = min(worst, passivity_ball(x2, x2d, p1).radius_sq)
            worst = min(worst, finite_gain_ball(x2, x2d, rng.uniform(0, 1), p2).radius_sq)
        inside_ok = worst >= 0.0

        # ratio = bound + 0.5: a negative-radius witness within 1e5 samples
        def witness(mode, ratio):
            for _ in range(100_000):
                x2, x2d = rng.normal(size=2), rng.normal(size=2)
                if self._raw_radius(x2, x2d, ratio, mode) < 0.0:
                    return True
            return False

        w1 = witness("passivity", 1.5)
        w2 = witness("finite_gain", 2.5)
        record(
            "Feasibility bounds (radius ≥ 0 inside; negative witness at bound+0.5)",
            inside_ok and w1 and w2,
            f"min radius_sq inside = {worst:.2e}; witnesses: passivity={w1}, finite_gain={w2}",
        )


class TestCharacteristics:
    def test_wall_approach_c1_to_c4(self, wall_config):
        trace = run_scenario(wall_config)
        report = audit_characteristics(trace, wall_config.halfspace, wall_config.params)
        cols = trace_columns(trace)
        t, f = cols["t"], np.linalg.norm(cols["f"], axis=1)
        stationary_zero = bool(np.all(f[(t >= 18.0) & (t <= 20.0)] == 0.0))
        retreat_zero = bool(np.all(f[(t >= 11.6) & (t <= 13.0)] == 0.0))
        c4 = report.checks[3]
        ok = report.passed and stationary_zero and retreat_zero and c4.passed
        record(
            "Characteristics C1-C4 on wall_approach (E_max=0.05)",
            ok,
            f"{report.summary().count('[PASS]')}/4 checks; stationary-zero={stationary_zero}, "
            f"retreat-zero={retreat_zero}, tank witness gap={c4.worst_margin:.3g}",
        )


class TestPassivityDrawback:
    def test_zero_reference_renders_force_only_in_passivity(self):
        params = RenderParams(k=1.0, k_v=0.025, dt=0.05, e_max=0.0)
        pv = render_passive(0.0, 0.5, 1.0, params)
        fg, _ = render_finite_gain(0.0, 0.5, 1.0, TankState(0.0), params)
        pv_norm = float(np.linalg.norm(pv.f))
        fg_norm = float(np.linalg.norm(fg.f))
        ok = abs(pv_norm - 0.1464) <= 1e-4 and fg_norm == 0.0
        record(
            "Passivity drawback (F_ref=0 ⇒ |F|≈0.1464 passive, ≡0 finite-gain)",
            ok,
            f"passivity |F| = {pv_norm:.6f}, finite-gain |F| = {fg_norm}",
        )


class TestSmallGainBoundedness:
    def test_certified_loop_stays_bounded_300s(self, config_dir):
        cfg = load_scenario(config_dir / "small_gain_sweep.yaml")
        assert cfg.operator.k_h == 0.5 and cfg.params.k == 1.0 and cfg.duration == 300.0
        trace = run_scenario(cfg)
        cols = trace_columns(trace)
        peak = max(
            float(np.max(np.abs(cols[name])))
            for name in ("x1", "x2", "x2d", "u_ref", "u_cbf", "f_ref", "f")
        )
        record(
            "Small-gain boundedness (k_h·k⁻¹=0.5, sinusoid + step disturbance, 300 s, <1e3)",
            peak < 1e3,
            f"peak |signal| = {peak:.3f}",
        )


class TestForwardInvariance:
    def test_validation_mode_60s_adversarial(self, config_dir):
        cfg = load_scenario(config_dir / "validation_invariance.yaml")
        assert cfg.plant_input == "u_cbf"
        trace = run_scenario(cfg)
        h_min = float(min(s.h for s in trace))
        record(
            "Forward invariance in validation mode (h(0)=4, adversarial x2d, 60 s, h ≥ -1e-6)",
            h_min >= -1e-6,
            f"min h = {h_min:.3e}",
        )


class TestDeterminism:
    def test_bit_identical_csv_exports(self, config_dir):
        ok = True
        details = []
        for name in ("wall_approach.yaml", "small_gain_sweep.yaml", "validation_invariance.yaml"):
            cfg = with_overrides(load_scenario(config_dir / name), duration=30.0)
            if name == "small_gain_sweep.yaml":
                cfg = dataclasses.replace(
                    cfg,
                    disturbance=dataclasses.replace(cfg.disturbance, kind="noise", std=0.3),
                )
            same = trace_to_csv(run_scenario(cfg)) == trace_to_csv(run_scenario(cfg))
            ok &= same
            details.append(f"{name}: {'identical' if same else 'DIFFERS'}")
        record("Determinism (config+seed ⇒ bit-identical CSV)", ok, "; ".join(details))


class TestCockpitLoopSecondary:
    def test_synthetic_client_20hz_30s_replay_and_l2(self, wall_config):
        from fastapi.testclient import TestClient

        from hapticgate.service import FreeRunPacer, create_app

        config = dataclasses.replace(wall_config, duration=60.0)
        app = create_app(config, pacer=FreeRunPacer(min_sleep=0.0))
        n_commands = 600  # 30 s at the 20 Hz loop rate, self-clocked on frames
        with TestClient(app) as client:
            with client.websocket_connect("/ws") as ws:
                sent = 0
                deadline = time.monotonic() + 120.0
                while sent < n_commands and time.monotonic() < deadline:
                    t = sent / 20.0
                    vy = 0.5 * np.sin(2 * np.pi * 0.1 * t)
                    ws.send_text(json.dumps(
                        {"v": 1, "type": "command", "seq": sent + 1,
                         "stylus_cm": [0.0, round(5.0 * vy, 4)]}
                    ))
                    sent += 1
                    while True:
                        msg = json.loads(ws.receive_text())
                        if msg.get("type") == "telemetry":
                            break
            snapshot = trace_from_csv(client.get("/trace").text)

        enough = len(snapshot) >= n_commands
        l2_ok = audit_l2_gain(snapshot, config.params).passed
        cols = trace_columns(snapshot)
        replay = dataclasses.replace(
            replay_config(config, cols["t"], cols["x2d"]),
            duration=len(snapshot) * config.dt,
        )
        offline = run_scenario(replay)
        match = trace_to_csv(offline) == trace_to_csv(snapshot)
        record(
            "[secondary] Cockpit loop (20 Hz × 30 s through the wire schema: L2 + exact replay)",
            enough and l2_ok and match,
            f"{len(snapshot)} samples, l2={'pass' if l2_ok else 'FAIL'}, replay_exact={match}",
        )
