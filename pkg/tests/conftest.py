"""Pytest configuration and fixtures."""

import pytest
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.kober import KoberParams
from src.qcore import QBase
from src.qml import ExtendedMLParams
from src.series import Truncation


@pytest.fixture
def q():
    """Deformation parameter used by most point checks."""
    return QBase(0.5)


@pytest.fixture
def params():
    """A generic admissible parameter set with distinct sigma and c."""
    return ExtendedMLParams(eta=1.0, kappa=1.5, sigma=0.7, c=1.8)


@pytest.fixture
def kober_params():
    """Operator pair away from every gamma pole."""
    return KoberParams(nu=0.3, mu=1.2)


@pytest.fixture
def tight():
    """Truncation policy tighter than the library default."""
    return Truncation(abs_tol=1e-16, rel_tol=1e-16, max_terms=20000)
