import dataclasses

import numpy as np
import pytest

import jumpwork as jw


@pytest.fixture(scope="session")
def cfg():
    """Default configuration: the strongly driven ohmic-bath qubit."""
    return jw.SystemConfig()


@pytest.fixture(scope="session")
def small_cfg():
    """Reduced step/trajectory counts for engine unit tests."""
    return dataclasses.replace(jw.SystemConfig(), n_steps=5_000, n_traj=2_000)


def assert_unit_ket(v):
    assert abs(np.vdot(v, v) - 1.0) < 1e-12
