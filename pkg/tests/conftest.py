import pytest

from heavytail.core.config import PINNED_SEED, settings
from heavytail.models import QuadratureConfig


@pytest.fixture
def seed():
    return PINNED_SEED


@pytest.fixture
def quad_cfg():
    return QuadratureConfig()


@pytest.fixture
def serial_workers(monkeypatch):
    """Run every fan-out sequentially in-process"""
    monkeypatch.setattr(settings, "WORKERS", 1)
    return 1
