import logging
from pathlib import Path

import pytest

import tests.common
from nematiclab.config.setup import wire_lab_dependencies
from nematiclab.domain.grid import Grid

pytest_plugins = ["tests.services"]

ASSETS_DIR = Path(__file__).parent / "assets"


@pytest.fixture(autouse=True, scope="session")
def setup_logging_for_tests() -> None:
    tests.common.setup_logging_for_tests(level=logging.INFO)


@pytest.fixture(autouse=True, scope="session")
def wired_services() -> None:
    """
    Autowiring is disabled in the test environment, so the services are wired once per session.
    """
    wire_lab_dependencies()


@pytest.fixture
def grid16() -> Grid:
    return tests.common.grid(16)


@pytest.fixture
def grid32() -> Grid:
    return tests.common.grid(32)
