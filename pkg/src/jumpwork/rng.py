"""Counter-based random numbers for order-independent Monte Carlo.

Every uniform variate is a pure function of (master seed, trajectory index,
step counter, draw counter), so ensembles are bitwise reproducible no matter
how trajectories are scheduled across threads or how many workers run.

The generator is the splitmix64 finalizer applied to a Weyl sequence: each
trajectory gets a key derived by hashing (seed, trajectory index), and draw
c of step k consumes stream element 2*k + c of that trajectory's splitmix64
stream.  Two reserved counters past the step range supply the initial and
final measurement draws.
"""

from __future__ import annotations

import numpy as np
from numba import njit, uint64

__all__ = ["mix64", "trajectory_key", "uniform", "uniform_for", "measurement_uniforms"]

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX_A = np.uint64(0xBF58476D1CE4E5B9)
_MIX_B = np.uint64(0x94D049BB133111EB)
_INV_2_53 = 1.0 / 9007199254740992.0  # 2^-53


@njit(uint64(uint64), cache=True, inline="always")
def mix64(z):
    """splitmix64 finalizer: bijective 64-bit avalanche mix."""
    z = (z ^ (z >> np.uint64(30))) * _MIX_A
    z = (z ^ (z >> np.uint64(27))) * _MIX_B
    return z ^ (z >> np.uint64(31))


@njit(uint64(uint64, uint64), cache=True, inline="always")
def trajectory_key(seed, traj_index):
    """Per-trajectory stream key."""
    return mix64(seed ^ mix64(traj_index + _GOLDEN))


@njit(cache=True, inline="always")
def uniform(key, counter):
    """Uniform in [0, 1) for stream element `counter` of stream `key`."""
    return (mix64(key + _GOLDEN * counter) >> np.uint64(11)) * _INV_2_53


def uniform_for(seed: int, traj_index: int, step: int, draw: int) -> float:
    """Scalar access: draw `draw` of step `step` of one trajectory's stream."""
    key = trajectory_key(np.uint64(seed), np.uint64(traj_index))
    return float(uniform(np.uint64(key), np.uint64(2 * step + draw)))


def measurement_uniforms(seed: int, traj_index: int, n_steps: int):
    """The two reserved draws used by the initial and final measurements."""
    key = np.uint64(trajectory_key(np.uint64(seed), np.uint64(traj_index)))
    u_init = float(uniform(key, np.uint64(2 * n_steps)))
    u_final = float(uniform(key, np.uint64(2 * n_steps + 1)))
    return u_init, u_final
