import numpy as np
import pytest


@pytest.fixture
def rng():
    """Fresh deterministic generator per test."""
    return np.random.default_rng(0xA11CE)


def pair_joint(p_match: float = 0.35, p_cross: float = 0.15) -> np.ndarray:
    """Correlated two-spin joint table used by several enumeration tests."""
    return np.array([[p_match, p_cross], [p_cross, p_match]])
