import dataclasses

import numpy as np
import pytest
import yaml

from hapticgate import load_scenario
from hapticgate.errors import ConfigError
from hapticgate.scenario import (
    DisturbanceSpec,
    disturbance_sequence,
    scenario_from_dict,
    with_mode,
    with_overrides,
)

MINIMAL = {
    "name": "t",
    "dt": 0.05,
    "duration": 1.0,
    "mode": "finite_gain",
    "initial": {"x1": [0.0, 0.0], "x2": [0.0, 0.0]},
    "halfspace": {"a": [0.0, -1.0], "b": 4.0},
    "render": {"k": 1.0, "k_v": 0.025, "e_max": 0.05},
    "operator": {"kind": "scripted", "intention": {"kind": "constant", "value": [0.0, 0.1]}},
}


def doc(**overrides):
    import copy

    d = copy.deepcopy(MINIMAL)
    d.update(overrides)
    return d


class TestLoading:
    def test_bundled_configs_load(self, config_dir):
        for path in sorted(config_dir.glob("*.yaml")):
            cfg = load_scenario(path)
            assert cfg.n_steps * cfg.dt == pytest.approx(cfg.duration)

    def test_minimal_dict(self):
        cfg = scenario_from_dict(doc())
        assert cfg.dim == 2 and cfg.n_steps == 20
        assert cfg.params.dt == cfg.dt
        assert cfg.small_gain_certified

    def test_unknown_top_level_key(self):
        with pytest.raises(ConfigError, match="unknown key"):
            scenario_from_dict(doc(gravity=9.81))

    def test_unknown_nested_key(self):
        d = doc()
        d["render"] = dict(d["render"], kv_typo=1.0)
        with pytest.raises(ConfigError, match="kv_typo"):
            scenario_from_dict(d)

    def test_missing_required_key(self):
        d = doc()
        del d["halfspace"]
        with pytest.raises(ConfigError, match="halfspace"):
            scenario_from_dict(d)

    def test_duration_must_divide(self):
        with pytest.raises(ConfigError, match="integer multiple"):
            scenario_from_dict(doc(duration=1.02))

    def test_mode_feasibility_enforced(self):
        d = doc(mode="passivity")
        d["render"] = {"k": 1.0, "k_v": 0.075, "e_max": 0.0}  # ratio 1.5
        with pytest.raises(ConfigError, match="passivity"):
            scenario_from_dict(d)
        d2 = doc(mode="finite_gain")
        d2["render"] = {"k": 1.0, "k_v": 0.075, "e_max": 0.0}
        scenario_from_dict(d2)  # ratio 1.5 fine here

    def test_mode_none_skips_feasibility(self):
        d = doc(mode="none")
        d["render"] = {"k": 1.0, "k_v": 0.2, "e_max": 0.0}  # ratio 4
        scenario_from_dict(d)

    def test_dimension_consistency(self):
        d = doc()
        d["halfspace"] = {"a": [1.0], "b": 0.0}
        with pytest.raises(ConfigError, match="dimension"):
            scenario_from_dict(d)

    def test_admittance_requires_k_h(self):
        d = doc()
        d["operator"] = {"kind": "admittance", "intention": {"kind": "constant", "value": [0.0, 0.1]}}
        with pytest.raises(ConfigError, match="k_h"):
            scenario_from_dict(d)

    def test_empty_file_rejected(self, tmp_path):
        p = tmp_path / "empty.yaml"
        p.write_text("")
        with pytest.raises(ConfigError):
            load_scenario(p)

    def test_yaml_roundtrip(self, tmp_path):
        p = tmp_path / "s.yaml"
        p.write_text(yaml.safe_dump(doc()))
        cfg = load_scenario(p)
        assert cfg.name == "t"


class TestOverrides:
    def test_with_mode(self):
        cfg = scenario_from_dict(doc())
        assert with_mode(cfg, "passivity").mode == "passivity"

    def test_with_overrides_nested(self):
        cfg = scenario_from_dict(doc())
        out = with_overrides(cfg, k_h=0.25, e_max=0.2, seed=9)
        assert out.operator.k_h == 0.25
        assert out.params.e_max == 0.2 and out.seed == 9
        assert cfg.operator.k_h == 0.0  # original untouched

    def test_unknown_override(self):
        cfg = scenario_from_dict(doc())
        with pytest.raises(ConfigError):
            with_overrides(cfg, warp_factor=9)


class TestDisturbance:
    def test_none_is_zero(self):
        seq = disturbance_sequence(DisturbanceSpec(kind="none"), 10, 2, 0.05, 0)
        assert np.all(seq == 0.0)

    def test_step_window(self):
        spec = DisturbanceSpec(kind="step", amplitude=[0.0, 1.0], t_start=0.1, t_end=0.2)
        seq = disturbance_sequence(spec, 6, 2, 0.05, 0)
        np.testing.assert_allclose(seq[:, 1], [0, 0, 1, 1, 0, 0])

    def test_noise_deterministic_and_prefix_stable(self):
        spec = DisturbanceSpec(kind="noise", std=0.5, cutoff_hz=2.0)
        a = disturbance_sequence(spec, 50, 2, 0.05, 42)
        b = disturbance_sequence(spec, 50, 2, 0.05, 42)
        np.testing.assert_array_equal(a, b)
        # longer horizon keeps the shared prefix (service relies on this)
        c = disturbance_sequence(spec, 100, 2, 0.05, 42)
        np.testing.assert_array_equal(c[:50], a)

    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            DisturbanceSpec(kind="earthquake")
