import os
from pathlib import Path

import pytest


@pytest.fixture(scope="session")
def scenario_dir():
    return Path(os.environ.get("SECUAV_SCENARIO_DIR", Path(__file__).resolve().parents[2] / "scenarios"))


@pytest.fixture(scope="session")
def cli():
    path = os.environ.get("SECUAV_CLI")
    if not path:
        pytest.skip("SECUAV_CLI not set")
    return path
