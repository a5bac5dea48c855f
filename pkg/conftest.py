"""
Pytest configuration and shared fixtures for the Andreev spectrum tests

License: MIT
"""
import json
import math
import os
import tempfile

import pytest

from junction_model import RampShape, build_profile


# =============================================================================
# COMMON FIXTURES
# =============================================================================

@pytest.fixture
def temp_dir():
    """Create a temporary directory for test files"""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield tmpdir


@pytest.fixture
def reference_profile():
    """Quintic ramp, infinite bank, phi = pi/3"""
    return build_profile(delta0=1.0, mu0=4.0, phi=math.pi / 3, x1=0.5, x2=1.5, L=1.0)


@pytest.fixture
def linear_profile():
    """Unit-slope linear ramp, infinite bank"""
    return build_profile(delta0=1.0, mu0=4.0, phi=math.pi / 3, x1=0.5, x2=1.5, L=1.0,
                         ramp_shape=RampShape.LINEAR)


@pytest.fixture
def leaky_profile():
    """Unit-slope linear ramp with a normal reservoir behind bank_edge = 2"""
    return build_profile(delta0=1.0, mu0=4.0, phi=math.pi / 3, x1=0.5, x2=1.5, L=1.0,
                         ramp_shape=RampShape.LINEAR, bank_edge=2.0)


@pytest.fixture
def hard_wall_profile():
    """Step gap at |x| = L"""
    return build_profile(delta0=1.0, mu0=4.0, phi=math.pi / 3, x1=0.5, x2=1.5, L=1.0,
                         ramp_shape=RampShape.HARD_WALL)


@pytest.fixture
def config_data():
    """Small spectrum configuration document (Bohr-Sommerfeld only)"""
    return {
        "profile": {"delta0": 1.0, "mu0": 4.0, "phi": math.pi / 3,
                    "x1": 0.5, "x2": 1.5, "L": 1.0, "ramp_shape": "quintic_smoothstep"},
        "h_list": [0.1, 0.08],
        "phi_list": [math.pi / 3],
        "window": [0.05, 0.95],
        "scan_points": 300,
        "solvers": {"bohr_sommerfeld": True},
    }


@pytest.fixture
def config_file(temp_dir, config_data):
    """Write config_data to a JSON file"""
    path = os.path.join(temp_dir, "config.json")
    with open(path, "w") as f:
        json.dump(config_data, f)
    return path


# =============================================================================
# MARKER-BASED SKIPPING
# =============================================================================

def pytest_configure(config):
    """Register custom markers"""
    config.addinivalue_line("markers", "unit: Unit tests")
    config.addinivalue_line("markers", "slow: Long-running tests")
    config.addinivalue_line("markers", "multithreaded: Multi-threaded tests")
    config.addinivalue_line("markers", "acceptance: Full-resolution accuracy oracles")


def pytest_collection_modifyitems(config, items):
    """Skip acceptance oracles unless ANDREEV_ACCEPTANCE is set"""
    skip_acceptance = pytest.mark.skip(reason="Set ANDREEV_ACCEPTANCE=1 to run acceptance oracles")

    for item in items:
        if "acceptance" in item.keywords and not os.environ.get("ANDREEV_ACCEPTANCE"):
            item.add_marker(skip_acceptance)
