import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hapticgate import (
    EcbfGains,
    RobotState,
    SafetyHalfspace,
    barrier_rate,
    barrier_value,
    ecbf_margin,
    reference_force,
    safe_input,
    step,
)
from oracles import cbf_grid_oracle, cbf_zoom_grid_oracle

finite = st.floats(min_value=-50, max_value=50, allow_nan=False)
vec2 = arrays(np.float64, 2, elements=finite)
normals = vec2.filter(lambda a: np.linalg.norm(a) > 1e-3)
gains_st = st.builds(
    EcbfGains,
    k1=st.floats(min_value=0.1, max_value=5.0),
    k2=st.floats(min_value=0.1, max_value=5.0),
)


@pytest.fixture
def wall():
    return SafetyHalfspace(a=[0.0, -1.0], b=4.0)


class TestBarrier:
    def test_wall_values(self, wall):
        assert barrier_value(wall, [0.0, 3.0]) == pytest.approx(1.0)
        assert barrier_value(wall, [0.0, 4.0]) == pytest.approx(0.0)
        assert barrier_value(wall, [5.0, 0.0]) == pytest.approx(4.0)

    def test_rate(self, wall):
        assert barrier_rate(wall, [0.0, 1.0]) == pytest.approx(-1.0)
        assert barrier_rate(wall, [0.0, 0.0]) == 0.0
        assert barrier_rate(wall, [2.0, 0.0]) == 0.0

    def test_zero_normal_rejected(self):
        with pytest.raises(ValueError):
            SafetyHalfspace(a=[0.0, 0.0], b=1.0)

    def test_dimension_mismatch(self, wall):
        with pytest.raises(ValueError):
            barrier_value(wall, [1.0])


class TestEcbfMargin:
    def test_wall_example(self, wall):
        g = EcbfGains(1.0, 2.0)
        assert ecbf_margin(wall, g, [0.0, 3.0], [0.0, 1.0], [0.0, 0.0]) == pytest.approx(-1.0)

    def test_boundary_input(self, wall):
        g = EcbfGains(1.0, 2.0)
        # a.u = +1 cancels the -1 margin of the zero input
        assert ecbf_margin(wall, g, [0.0, 3.0], [0.0, 1.0], [0.0, -1.0]) == pytest.approx(0.0)

    def test_deep_inside(self, wall):
        g = EcbfGains(1.5, 2.0)
        hs = SafetyHalfspace(a=[0.0, -1.0], b=100.0)
        assert ecbf_margin(hs, g, [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]) == pytest.approx(150.0)

    def test_non_hurwitz_rejected(self):
        with pytest.raises(ValueError):
            EcbfGains(k1=0.0, k2=1.0)
        with pytest.raises(ValueError):
            EcbfGains(k1=1.0, k2=-2.0)


class TestSafeInput:
    def test_wall_scenario_projection(self, wall):
        g = EcbfGains(1.0, 2.0)
        state = RobotState(x1=[0.0, 3.0], x2=[0.0, 1.0])
        res = safe_input(wall, g, state, [0.0, 20.0])  # u_ref for x2d=[0,2], dt=0.05
        assert res.constraint_active
        np.testing.assert_allclose(res.u_cbf, [0.0, -1.0], atol=1e-12)
        np.testing.assert_allclose(res.f_ref, [0.0, -21.0], atol=1e-12)

    def test_inactive_when_safe(self, wall):
        g = EcbfGains(1.0, 2.0)
        state = RobotState(x1=[0.0, 0.0], x2=[0.0, 0.0])
        res = safe_input(wall, g, state, [0.0, 1.0])
        assert not res.constraint_active
        np.testing.assert_array_equal(res.u_cbf, [0.0, 1.0])
        np.testing.assert_array_equal(res.f_ref, [0.0, 0.0])

    def test_retreating_far_inside_gives_zero_force(self, wall):
        g = EcbfGains(1.0, 2.0)
        state = RobotState(x1=[0.0, 0.5], x2=[0.0, -1.0])  # moving away, h = 3.5
        res = safe_input(wall, g, state, [0.0, 2.0])
        assert not res.constraint_active and np.all(res.f_ref == 0.0)

    @given(a=normals, b=finite, gains=gains_st, x1=vec2, x2=vec2, u_ref=vec2)
    @settings(max_examples=200)
    def test_certified_and_consistent(self, a, b, gains, x1, x2, u_ref):
        hs = SafetyHalfspace(a=a, b=b)
        res = safe_input(hs, gains, RobotState(x1=x1, x2=x2), u_ref)
        m = ecbf_margin(hs, gains, x1, x2, res.u_cbf)
        scale = max(1.0, np.linalg.norm(u_ref), abs(b)) * max(1.0, float(np.linalg.norm(a)))
        assert m >= -1e-9 * scale
        np.testing.assert_allclose(res.f_ref, res.u_cbf - u_ref, atol=1e-12)
        if not res.constraint_active:
            assert np.all(res.f_ref == 0.0)

    @given(a=normals, b=finite, gains=gains_st, x1=vec2, x2=vec2, u_ref=vec2, data=st.data())
    @settings(max_examples=100)
    def test_minimality_vs_random_feasible_points(self, a, b, gains, x1, x2, u_ref, data):
        hs = SafetyHalfspace(a=a, b=b)
        res = safe_input(hs, gains, RobotState(x1=x1, x2=x2), u_ref)
        base = np.linalg.norm(res.u_cbf - u_ref)
        for _ in range(10):
            probe = np.array(data.draw(st.lists(finite, min_size=2, max_size=2)))
            if ecbf_margin(hs, gains, x1, x2, probe) >= 0.0:
                assert base <= np.linalg.norm(probe - u_ref) + 1e-9

    @given(a=normals, b=finite, gains=gains_st, x1=vec2, x2=vec2, u_ref=vec2)
    @settings(max_examples=100)
    def test_correction_parallel_to_normal(self, a, b, gains, x1, x2, u_ref):
        hs = SafetyHalfspace(a=a, b=b)
        res = safe_input(hs, gains, RobotState(x1=x1, x2=x2), u_ref)
        if res.constraint_active:
            cross = res.f_ref[0] * a[1] - res.f_ref[1] * a[0]
            assert abs(cross) <= 1e-9 * max(1.0, np.linalg.norm(res.f_ref)) * np.linalg.norm(a)

    @given(a=normals, b=finite, gains=gains_st, x1=vec2, x2=vec2, u_ref=vec2)
    @settings(max_examples=50, deadline=None)
    def test_matches_refined_grid_oracle(self, a, b, gains, x1, x2, u_ref):
        hs = SafetyHalfspace(a=a, b=b)
        res = safe_input(hs, gains, RobotState(x1=x1, x2=x2), u_ref)
        expected = cbf_zoom_grid_oracle(a, b, gains.k1, gains.k2, x1, x2, u_ref)
        scale = max(1.0, float(np.linalg.norm(expected)), float(np.linalg.norm(u_ref)))
        np.testing.assert_allclose(res.u_cbf, expected, rtol=0, atol=1e-6 * scale)

    def test_matches_dense_grid_oracle(self, wall):
        # coarse second opinion on a handful of fixed instances
        g = EcbfGains(1.0, 2.0)
        cases = [
            (np.array([0.0, 3.0]), np.array([0.0, 1.0]), np.array([0.0, 20.0])),
            (np.array([1.0, 3.9]), np.array([0.5, 0.5]), np.array([-3.0, 8.0])),
            (np.array([-2.0, 1.0]), np.array([0.0, 2.5]), np.array([4.0, 15.0])),
        ]
        for x1, x2, u_ref in cases:
            res = safe_input(wall, g, RobotState(x1=x1, x2=x2), u_ref)
            approx = cbf_grid_oracle(wall.a, wall.b, g.k1, g.k2, x1, x2, u_ref)
            assert np.linalg.norm(res.u_cbf - approx) < 0.15  # grid resolution


class TestReferenceForce:
    def test_zero(self):
        np.testing.assert_array_equal(reference_force([1.0, 2.0], [1.0, 2.0]), [0.0, 0.0])

    def test_wall_example(self):
        np.testing.assert_allclose(reference_force([0.0, -1.0], [0.0, 20.0]), [0.0, -21.0])

    def test_scalar(self):
        assert reference_force(-3.0, 2.0) == pytest.approx([-5.0])


class TestForwardInvariance:
    @staticmethod
    def _simulate(hs, gains, state, u_ref_fn, dt, n):
        h_min = barrier_value(hs, state.x1)
        for i in range(n):
            res = safe_input(hs, gains, state, u_ref_fn(i, state))
            state = step(state, res.u_cbf, dt)
            h_min = min(h_min, barrier_value(hs, state.x1))
        return h_min

    def test_adversarial_from_acceptance_start(self, wall):
        # h(0) = 4, at rest, commanded hard into the wall
        g = EcbfGains(1.0, 2.0)
        state = RobotState(x1=[0.0, 0.0], x2=[0.0, 0.0])
        u_ref = lambda i, s: (np.array([0.0, 2.0]) - s.x2) / 0.05
        assert self._simulate(wall, g, state, u_ref, 0.05, 1200) >= -1e-6

    @given(
        gains=st.builds(
            EcbfGains,
            k1=st.floats(min_value=0.2, max_value=9.0),
            k2=st.floats(min_value=0.2, max_value=6.0),
        ).filter(lambda g: g.has_real_poles),
        h0=st.floats(min_value=0.0, max_value=5.0),
        rate_frac=st.floats(min_value=-1.0, max_value=1.0),
        cmd=st.floats(min_value=-3.0, max_value=3.0),
    )
    @settings(max_examples=60, deadline=None)
    def test_invariance_from_admissible_set(self, gains, h0, rate_frac, cmd):
        # start anywhere in {h >= 0, hdot + fast_pole*h >= 0}; needs real
        # poles (complex ones oscillate and overshoot the boundary) and ECBF
        # poles well below the sampling rate for the discrete realization
        dt = 0.05
        if gains.fast_pole * dt > 0.5:
            return
        hs = SafetyHalfspace(a=[0.0, -1.0], b=4.0)
        hdot = -gains.fast_pole * h0 + abs(rate_frac) * 2.0  # on or inside the ray
        state = RobotState(x1=[0.0, 4.0 - h0], x2=[0.0, -hdot])
        u_ref = lambda i, s: (np.array([0.0, cmd]) - s.x2) / dt
        assert self._simulate(hs, gains, state, u_ref, dt, 600) >= -1e-6
