import numpy as np
import pytest

from tubeharm import cone as cone_mod

SQ2 = np.sqrt(2.0)


@pytest.fixture(scope="session")
def axis_cone():
    return cone_mod.validate_cone(np.eye(2))


@pytest.fixture(scope="session")
def cone_b():
    """n=2, m=3 workhorse cone: axes plus the diagonal."""
    return cone_mod.validate_cone(
        [[1.0, 0.0], [0.0, 1.0], [SQ2 / 2, SQ2 / 2]]
    )


@pytest.fixture(scope="session")
def skew_cone():
    return cone_mod.validate_cone([[1.0, 0.0], [SQ2 / 2, SQ2 / 2]])
