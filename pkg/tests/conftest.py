import sys
from pathlib import Path

import numpy as np
import pytest

# Modules live at the repository root
sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from dynamics import MassMatrix  # noqa: E402
from target_models import TargetModel, gaussian_model  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: desk-scale experiment reproductions (minutes)")


@pytest.fixture
def oscillator():
    """U(q) = q^2 / 2 in one dimension."""
    return gaussian_model(1)


@pytest.fixture
def unit_mass():
    return MassMatrix.identity(1)


@pytest.fixture
def free_particle():
    return TargetModel("flat", 2, lambda q: 0.0, lambda q: np.zeros(2))


@pytest.fixture
def out_dir(tmp_path):
    return tmp_path / "runs"
