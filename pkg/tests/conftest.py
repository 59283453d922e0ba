import dataclasses
from pathlib import Path

import pytest

from csdsim import RunConfig

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture()
def tiny_cfg() -> RunConfig:
    """A fast configuration: same mechanics, far fewer arrivals."""
    return dataclasses.replace(
        RunConfig(),
        replications=2,
        task_lambda=25.0,
        agent_gamma=120.0,
    )
