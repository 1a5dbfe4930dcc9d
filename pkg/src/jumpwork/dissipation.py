"""Noise spectrum, drive-dressed transition rates, and jump operators.

The environment is an ohmic noise source at inverse temperature beta,
S(omega) = 2*mu*omega / (1 - exp(-beta*omega)), which satisfies detailed
balance S(omega) = exp(beta*omega) * S(-omega).  Pure dephasing is fed by
the zero-frequency value, which is overridden by S(0) = 2*mu*T0 with an
effective dephasing temperature T0 (the ohmic omega -> 0 limit would give
2*mu/beta instead).

For a frame of order n the three dissipative channels are
    L0 = sqrt(Gamma_down) |g_n><e_n|        (decay,      rate S(+gap)|m2|^2)
    L1 = sqrt(Gamma_up)   |e_n><g_n|        (excitation, rate S(-gap)|m2|^2)
    L2 = sqrt(Gamma_phi) (|e_n><e_n| - |g_n><g_n|)  (dephasing, S(0)|m1|^2)
expressed in the diabatic representation through the frame kets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .frames import Frame
from .model import SystemConfig

__all__ = ["RateSet", "spectral_density", "rates_at", "reversed_rates"]


@dataclass(frozen=True)
class RateSet:
    """Transition rates and the paired jump operators of one frame."""

    gamma_down: float
    gamma_up: float
    gamma_phi: float
    L0: np.ndarray
    L1: np.ndarray
    L2: np.ndarray

    @property
    def operators(self):
        return (self.L0, self.L1, self.L2)


def spectral_density(omega, config: SystemConfig):
    """Ohmic noise spectrum with the flat dephasing override at omega = 0.

    Accepts scalars or arrays; the omega = 0 entries evaluate to 2*mu*T0.
    """
    omega_arr = np.asarray(omega, dtype=np.float64)
    x = config.beta * omega_arr
    # 1 - exp(-x) via expm1 for accuracy; clip the exponent so that the
    # deeply negative-frequency tail underflows to 0 instead of overflowing.
    with np.errstate(over="ignore", invalid="ignore"):
        denom = -np.expm1(-np.clip(x, -700.0, None))
        s = np.where(x < -700.0, 0.0, 2.0 * config.mu * omega_arr / np.where(denom == 0.0, 1.0, denom))
    s = np.where(omega_arr == 0.0, 2.0 * config.mu * config.T0, s)
    if np.ndim(omega) == 0:
        return float(s)
    return s


def _outer(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.outer(a, np.conj(b))


def rates_at(frame: Frame, config: SystemConfig) -> RateSet:
    """Transition rates and jump operators for one frame.

    Gamma_down = S(+omega01)|m2|^2, Gamma_up = S(-omega01)|m2|^2,
    Gamma_phi = S(0)|m1|^2; the operators are assembled from the frame kets.
    """
    m2_sq = abs(frame.m2) ** 2
    gamma_down = spectral_density(frame.omega01, config) * m2_sq
    gamma_up = spectral_density(-frame.omega01, config) * m2_sq
    gamma_phi = spectral_density(0.0, config) * abs(frame.m1) ** 2
    L0 = math.sqrt(gamma_down) * _outer(frame.ket_g, frame.ket_e)
    L1 = math.sqrt(gamma_up) * _outer(frame.ket_e, frame.ket_g)
    L2 = math.sqrt(gamma_phi) * (_outer(frame.ket_e, frame.ket_e) - _outer(frame.ket_g, frame.ket_g))
    return RateSet(gamma_down, gamma_up, gamma_phi, L0, L1, L2)


def reversed_rates(rateset: RateSet) -> RateSet:
    """Rates of the time-reversed unraveling: swap decay and excitation.

    The reversed channel i carries the adjoint of the forward collapse
    operator with the swapped rate; channel 2 is self-adjoint and keeps its
    rate.  Hence the reversed channel-0 operator equals the forward L1 and
    vice versa, and the operator sum over channels, sum_i L_i^dag L_i, is
    left unchanged by the reversal.
    """
    return RateSet(
        gamma_down=rateset.gamma_up,
        gamma_up=rateset.gamma_down,
        gamma_phi=rateset.gamma_phi,
        L0=rateset.L1.copy(),
        L1=rateset.L0.copy(),
        L2=rateset.L2.copy(),
    )
