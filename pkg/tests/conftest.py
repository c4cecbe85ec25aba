from pathlib import Path

import pytest

from echoalign.config import load_benchmark

REPO = Path(__file__).resolve().parents[1]
CONFIGS = REPO / "configs"


@pytest.fixture(scope="session")
def b1_benchmark():
    return load_benchmark(CONFIGS / "b1_idn30.cfg")


@pytest.fixture(scope="session")
def b2_benchmark():
    return load_benchmark(CONFIGS / "b2_sym50.cfg")
