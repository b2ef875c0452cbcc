"""
Shared pytest fixtures for the MAC policy engine tests.
"""

import os
import sys
from pathlib import Path

import pytest

# Add src to path so we can import our modules
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from mac_policy import config_manager  # noqa: E402
from mac_policy.scenario_loader import load_scenario  # noqa: E402

PROJECT_ROOT = Path(__file__).resolve().parent.parent
FIXTURES_DIR = PROJECT_ROOT / "fixtures"


def fixture_text(name: str) -> str:
    """Text of a bundled fixture by name, e.g. "biba-org"."""
    return (FIXTURES_DIR / f"{name}.mac").read_text(encoding="utf-8")


@pytest.fixture(autouse=True)
def project_config():
    """Point the global config at the repository checkout for every test."""
    config_manager.initialize_config(str(PROJECT_ROOT))
    yield
    config_manager._config_manager = None


@pytest.fixture
def biba_org():
    return load_scenario(fixture_text("biba-org"))


@pytest.fixture
def mls_org():
    return load_scenario(fixture_text("mls-org"))


@pytest.fixture
def compart_org():
    return load_scenario(fixture_text("compart-org"))
