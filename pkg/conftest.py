"""
Shared pytest fixtures: the bundled worked examples and small closed-form maps.
"""
import logging
import math
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from pwrot.config import reset_config  # noqa: E402
from pwrot.core_map import PiecewiseRotation  # noqa: E402
from pwrot.models.angle import RationalSpec, SurdSpec  # noqa: E402
from pwrot.services.verify_service import DATA_DIR, load_example  # noqa: E402


@pytest.fixture(autouse=True)
def fresh_config(monkeypatch):
    """Every test starts from the shipped config.yaml and a clean pwrot logger."""
    monkeypatch.delenv("PWROT_THREADS", raising=False)
    monkeypatch.delenv("PWROT_CONFIG_PATH", raising=False)
    reset_config()
    yield
    reset_config()
    logger = logging.getLogger("pwrot")
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    logger.setLevel(logging.NOTSET)


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def irrational_map() -> PiecewiseRotation:
    """a = sqrt(2)/4, |C0| = 1, |C1| = 1.5, gamma = pi/2; injective."""
    return load_example("irrational_example")


@pytest.fixture
def rational_map() -> PiecewiseRotation:
    """Same centres, a = 169/478."""
    return load_example("rational_example")


@pytest.fixture
def pentagon_map() -> PiecewiseRotation:
    """Bijective: alpha = 2*pi/5, centres -1 and 1, gamma = 3*pi/10."""
    return PiecewiseRotation.from_spec(RationalSpec(p=1, q=5), -1 + 0j, 1 + 0j, 3 * math.pi / 10)


@pytest.fixture
def zero_delta_q4() -> PiecewiseRotation:
    """Bijective with q = 4: C1 - C0 points along beta = pi/4."""
    c = complex(math.cos(math.pi / 4), math.sin(math.pi / 4))
    return PiecewiseRotation.from_spec(RationalSpec(p=1, q=4), -c, c, math.pi / 2)


@pytest.fixture
def attract_q6() -> PiecewiseRotation:
    """alpha = pi/3, centres -1, 1, gamma = pi/2: delta = +1, |||T||| = 1."""
    return PiecewiseRotation.from_spec(RationalSpec(p=1, q=6), -1 + 0j, 1 + 0j, math.pi / 2)


@pytest.fixture
def escape_q6() -> PiecewiseRotation:
    """alpha = pi/3, centres -1, 1, gamma = 3*pi/2: delta = -1, |||T||| = 1."""
    return PiecewiseRotation.from_spec(RationalSpec(p=1, q=6), -1 + 0j, 1 + 0j, 3 * math.pi / 2)


@pytest.fixture
def attract_q4() -> PiecewiseRotation:
    """alpha = pi/2, centres -1, 1, gamma = pi/2: delta = +2, M = 8 sqrt(2)."""
    return PiecewiseRotation.from_spec(RationalSpec(p=1, q=4), -1 + 0j, 1 + 0j, math.pi / 2)


@pytest.fixture
def bijective_irrational() -> PiecewiseRotation:
    """a = sqrt(2)/4 with gamma = pi/2 - alpha/2: delta vanishes."""
    spec = SurdSpec(p=0, q=1, d=2, r=4)
    return PiecewiseRotation.from_spec(spec, -1 + 0j, 1 + 0j, math.pi / 2 - spec.radians() / 2)
