import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for the oracles helper module

from hapticgate import EcbfGains, RenderParams, SafetyHalfspace, load_scenario

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"


@pytest.fixture(scope="session")
def config_dir() -> Path:
    return CONFIG_DIR


@pytest.fixture
def wall_params() -> RenderParams:
    """The desk-scale experiment parameterization (ratio k*k_v/dt = 0.5)."""
    return RenderParams(k=1.0, k_v=0.025, dt=0.05, e_max=0.05)


@pytest.fixture
def wall_halfspace() -> SafetyHalfspace:
    return SafetyHalfspace(a=[0.0, -1.0], b=4.0)


@pytest.fixture
def wall_gains() -> EcbfGains:
    return EcbfGains(k1=1.0, k2=2.0)


@pytest.fixture(scope="session")
def wall_config():
    return load_scenario(CONFIG_DIR / "wall_approach.yaml")


def pytest_terminal_summary(terminalreporter):
    """Print one line per acceptance criterion at the end of the session."""
    try:
        from test_acceptance import ACCEPTANCE_LINES
    except ImportError:
        return
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
