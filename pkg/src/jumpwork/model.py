"""Physical parameters and the sinusoidal drive protocol.

Natural units hbar = k_B = 1 are used everywhere: energies are reported in
units of hbar*omega0 and times in units of 1/omega0, where omega0 is the
resonance angular frequency of the undriven two-level system.  The damping
constant mu carries units of 1/(hbar*omega0^2) in these conventions.

Basis ordering convention (fixed globally): the diabatic basis is ordered
(excited, ground), i.e. component 0 of every 2-vector is the amplitude of
|e> and component 1 is the amplitude of |g>.  All 2x2 matrices in this
package follow the same ordering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["SystemConfig", "DriveProtocol", "drive_at", "hamiltonian_at"]


@dataclass(frozen=True)
class SystemConfig:
    """All physical and numerical parameters of a simulation run.

    Defaults correspond to a strongly but nearly adiabatically driven qubit
    coupled to an ohmic bath: drive frequency 3*omega0/10, drive amplitude
    omega0/2, coupling omega0/(5*sqrt(2)), bath temperature omega0/2
    (beta = 2/omega0), dephasing temperature omega0, damping 1/omega0^2,
    three full drive cycles.

    Attributes
    ----------
    omega0 : float
        Resonance angular frequency of the undriven system (rad/time).
    lambda0 : float
        Drive amplitude (energy).
    omega_d : float
        Drive angular frequency (rad/time).
    g : complex
        Coupling strength to the environment (energy).
    mu : float
        Damping constant of the ohmic spectrum (time*energy^-2).
    beta : float
        Inverse bath temperature (1/energy).
    T0 : float
        Effective dephasing temperature (energy, since k_B = 1).
    n_cycles : int
        Number of full drive periods in the protocol.
    n_order : int
        Renormalization order of the dissipator, one of {0, 1, 2}.
    n_steps : int
        Number of equidistant time steps over the whole protocol.
    n_traj : int
        Ensemble size for stochastic runs.
    seed : int
        Master seed of the counter-based random number generator.
    """

    omega0: float = 1.0
    lambda0: float = 0.5
    omega_d: float = 0.3
    g: complex = 1.0 / (5.0 * math.sqrt(2.0)) + 0.0j
    mu: float = 1.0
    beta: float = 2.0
    T0: float = 1.0
    n_cycles: int = 3
    n_order: int = 2
    n_steps: int = 100_000
    n_traj: int = 100_000
    seed: int = 7

    def __post_init__(self) -> None:
        if not self.omega0 > 0:
            raise ValueError(f"omega0 must be positive, got {self.omega0}")
        if not self.omega_d > 0:
            raise ValueError(f"omega_d must be positive, got {self.omega_d}")
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if self.T0 < 0:
            raise ValueError(f"T0 must be non-negative, got {self.T0}")
        if self.n_order not in (0, 1, 2):
            raise ValueError(f"unsupported renormalization order {self.n_order}; must be 0, 1 or 2")
        if self.n_cycles < 1:
            raise ValueError(f"n_cycles must be >= 1, got {self.n_cycles}")
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be >= 1, got {self.n_steps}")
        if self.n_traj < 1:
            raise ValueError(f"n_traj must be >= 1, got {self.n_traj}")

    @property
    def t_drive(self) -> float:
        """Duration of one drive period, 2*pi/omega_d."""
        return 2.0 * math.pi / self.omega_d

    @property
    def t_final(self) -> float:
        """Total protocol duration, n_cycles * t_drive."""
        return self.n_cycles * self.t_drive

    @property
    def dt(self) -> float:
        """Time step of the stochastic propagation."""
        return self.t_final / self.n_steps


@dataclass(frozen=True)
class DriveProtocol:
    """Closed-form drive: lam(t) plus its first two analytic derivatives.

    This is the internal extension point for non-sinusoidal protocols;
    every waveform must supply exact derivatives (never finite differences),
    since the superadiabatic frames differentiate through them analytically.
    """

    lam: Callable[[float], float]
    lam_dot: Callable[[float], float]
    lam_ddot: Callable[[float], float]

    @staticmethod
    def sinusoidal(lambda0: float, omega_d: float) -> "DriveProtocol":
        return DriveProtocol(
            lam=lambda t: lambda0 * math.sin(omega_d * t),
            lam_dot=lambda t: lambda0 * omega_d * math.cos(omega_d * t),
            lam_ddot=lambda t: -lambda0 * omega_d**2 * math.sin(omega_d * t),
        )


def drive_at(config: SystemConfig, t):
    """Evaluate the sinusoidal drive and its first two derivatives at time t.

    Returns the triple (lam, lam_dot, lam_ddot) with
    lam(t) = lambda0 * sin(omega_d * t).  Accepts scalars or arrays.
    """
    phase = config.omega_d * np.asarray(t, dtype=np.float64)
    s = np.sin(phase)
    c = np.cos(phase)
    lam = config.lambda0 * s
    lam_dot = config.lambda0 * config.omega_d * c
    lam_ddot = -config.lambda0 * config.omega_d**2 * s
    if np.ndim(t) == 0:
        return float(lam), float(lam_dot), float(lam_ddot)
    return lam, lam_dot, lam_ddot


def hamiltonian_at(config: SystemConfig, t: float) -> np.ndarray:
    """System Hamiltonian at time t in the diabatic (e, g) ordering.

    H(t) = (omega0/2) sigma_z + lam(t) sigma_x, i.e. the matrix
    [[+omega0/2, lam], [lam, -omega0/2]]; traceless and Hermitian.
    """
    lam, _, _ = drive_at(config, t)
    h = 0.5 * config.omega0
    return np.array([[h, lam], [lam, -h]], dtype=np.complex128)
