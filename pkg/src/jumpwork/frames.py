"""Adiabatic renormalization frames of the driven two-level system.

A frame of order n packages everything the dissipator needs at one time
instant: the instantaneous energies, the basis kets expressed in the fixed
diabatic representation, the off-diagonal rotation-generator element
w_ge = -i <g|D_n^dag dD_n/dt|e>, the coupling matrix elements
m1 = <g_n|Y|g_n> and m2 = <g_n|Y|e_n> of the traceless system-bath coupling
Y = g* sigma_+ + g sigma_-, and the local (super)adiabatic parameter
alpha_n = ||w_n|| / omega01_n.

Order 0 is the static diabatic frame (the basis of the undriven
Hamiltonian), order 1 the instantaneous eigenbasis of H(t), and order 2 the
first superadiabatic basis, i.e. the eigenbasis of the order-1 frame
Hamiltonian including its own rotation generator.

Phase convention: basis amplitudes are fixed so that the diagonal elements
of each rotation generator vanish and w_eg = -w_ge (w_ge purely imaginary).
Concretely, the dominant amplitudes C_ee, C_gg of the order-1 rotation are
real positive, and the order-2 amplitudes keep C_gg real positive with
C_ee on the positive imaginary axis.  All amplitude formulas below are
algebraically exact rewritings of the standard eigenvector expressions in
which the removable 0/0 singularities (at lam = 0 for order 1 and at
dlam/dt = 0 for order 2) have been cancelled, so every quantity is a smooth
function of time and no series-expansion switchover is needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import SystemConfig, drive_at

__all__ = [
    "Frame",
    "FrameGrid",
    "UnsupportedOrderError",
    "frame0",
    "frame1",
    "frame2",
    "frame_at",
    "frame_grid",
    "alphas_over_cycle",
]


class UnsupportedOrderError(ValueError):
    """Raised for renormalization orders outside {0, 1, 2}."""


@dataclass(frozen=True)
class Frame:
    """Order-n basis data at a single time instant.

    Energies are in units of hbar*omega0; kets are complex 2-vectors in the
    diabatic (e, g) ordering, orthonormal to machine precision.
    """

    order: int
    t: float
    E_g: float
    E_e: float
    omega01: float
    ket_g: np.ndarray
    ket_e: np.ndarray
    w_ge: complex
    m1: complex
    m2: complex
    alpha: float


@dataclass(frozen=True)
class FrameGrid:
    """Vectorized frame data on a time grid (arrays share the leading axis)."""

    order: int
    t: np.ndarray
    E_g: np.ndarray
    E_e: np.ndarray
    omega01: np.ndarray
    ket_g: np.ndarray  # shape (N, 2) complex
    ket_e: np.ndarray  # shape (N, 2) complex
    w_ge: np.ndarray
    m1: np.ndarray
    m2: np.ndarray
    alpha: np.ndarray


def _order1_arrays(config: SystemConfig, t: np.ndarray):
    """Order-1 (adiabatic) frame quantities, vectorized over t.

    The amplitudes come from the half-gap-regularized eigenvector form
        C_ee = C_gg = (omega0 + s)/N,   C_eg = -C_ge = 2*lam/N,
    with s = sqrt(omega0^2 + 4 lam^2) and N = sqrt((omega0 + s)^2 + 4 lam^2),
    which equals the textbook amplitudes (that divide by 2*lam) wherever
    those are defined and continues them smoothly through lam = 0.
    """
    omega0 = config.omega0
    g = config.g
    lam, lam_dot, _ = drive_at(config, t)
    lam = np.asarray(lam, dtype=np.float64)
    lam_dot = np.asarray(lam_dot, dtype=np.float64)

    s = np.sqrt(omega0 * omega0 + 4.0 * lam * lam)
    ap = omega0 + s
    n1 = np.sqrt(ap * ap + 4.0 * lam * lam)
    cee = ap / n1
    ceg = 2.0 * lam / n1
    cgg = cee
    cge = -ceg

    E_e = 0.5 * s
    E_g = -E_e
    # w_ge^(1) = -i lam_dot (C_ee C_gg* + C_eg C_ge*) / (E_e - E_g); purely imaginary
    w_ge = -1j * lam_dot * (cee * cgg + ceg * cge) / s
    m1 = 2.0 * (g * np.conj(cgg) * cge).real + 0.0j
    m2 = g * np.conj(cgg) * cee + np.conj(g) * np.conj(cge) * ceg
    return lam, lam_dot, s, cee, ceg, cgg, cge, E_g, E_e, w_ge, m1, m2


def _order2_arrays(config: SystemConfig, t: np.ndarray):
    """Order-2 (first superadiabatic) frame quantities, vectorized over t.

    Writes w_ge^(1) = -i*r with real r and diagonalizes the order-1 frame
    generator [[E1, i r], [-i r, -E1]] via the regular eigenvector form
        C_ee = i (E2 + E1)/N,  C_eg = r/N,  C_gg = (E2 + E1)/N,
        C_ge = -i r/N,         N = sqrt((E2 + E1)^2 + r^2),
    which matches the standard amplitudes (that divide by w_ge^(1)) up to a
    global ket sign and stays smooth where the drive velocity vanishes.
    """
    omega0 = config.omega0
    lam, lam_dot, s, cee1, ceg1, cgg1, cge1, E_g1, E_e1, w_ge1, m1_1, m2_1 = _order1_arrays(
        config, t
    )
    _, _, lam_ddot = drive_at(config, t)
    lam_ddot = np.asarray(lam_ddot, dtype=np.float64)

    r = -w_ge1.imag  # w_ge^(1) = -i r
    E1 = E_e1
    E2 = np.sqrt(E1 * E1 + r * r)
    n2 = np.sqrt((E2 + E1) ** 2 + r * r)
    cee2 = 1j * (E2 + E1) / n2
    ceg2 = (r / n2).astype(np.complex128)
    cgg2 = ((E2 + E1) / n2).astype(np.complex128)
    cge2 = -1j * r / n2

    s2 = s * s
    E_dot_e = lam_dot * 2.0 * lam / s
    E_dot_g = -E_dot_e
    # d(w_ge^(1))/dt with the overall factor lam cancelled, regular at lam = 0
    w_dot = -1j * lam_ddot * omega0 / s2 + 1j * lam_dot * lam_dot * 8.0 * omega0 * lam / (s2 * s2)

    gap2 = 2.0 * E2
    w_ge2 = (
        -1j
        * (
            np.conj(cge2) * (cee2 * E_dot_e - ceg2 * w_dot)
            + np.conj(cgg2) * (ceg2 * E_dot_g + cee2 * w_dot)
        )
        / gap2
    )

    m1_2 = (np.abs(cgg2) ** 2 - np.abs(cge2) ** 2) * m1_1 + 2.0 * (
        cge2 * np.conj(cgg2) * m2_1
    ).real
    m2_2 = (
        (np.conj(cgg2) * ceg2 - np.conj(cge2) * cee2) * m1_1
        + np.conj(cgg2) * cee2 * m2_1
        + np.conj(cge2) * ceg2 * np.conj(m2_1)
    )

    # superadiabatic kets: |k^(2)> = D1 D2 |k>
    ket_e2_e = cee2 * cee1 + ceg2 * cge1
    ket_e2_g = cee2 * ceg1 + ceg2 * cgg1
    ket_g2_e = cge2 * cee1 + cgg2 * cge1
    ket_g2_g = cge2 * ceg1 + cgg2 * cgg1
    return E2, gap2, ket_e2_e, ket_e2_g, ket_g2_e, ket_g2_g, w_ge2, m1_2, m2_2


def frame_grid(config: SystemConfig, t, order: int) -> FrameGrid:
    """Evaluate the order-n frame on an array of times."""
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    n = t.shape[0]
    if order == 0:
        half = 0.5 * config.omega0
        ket_e = np.zeros((n, 2), dtype=np.complex128)
        ket_g = np.zeros((n, 2), dtype=np.complex128)
        ket_e[:, 0] = 1.0
        ket_g[:, 1] = 1.0
        return FrameGrid(
            order=0,
            t=t,
            E_g=np.full(n, -half),
            E_e=np.full(n, half),
            omega01=np.full(n, config.omega0),
            ket_g=ket_g,
            ket_e=ket_e,
            w_ge=np.zeros(n, dtype=np.complex128),
            m1=np.zeros(n, dtype=np.complex128),
            m2=np.full(n, config.g, dtype=np.complex128),
            alpha=np.zeros(n),
        )
    if order == 1:
        _, _, s, cee, ceg, cgg, cge, E_g, E_e, w_ge, m1, m2 = _order1_arrays(config, t)
        ket_e = np.stack([cee + 0.0j, ceg + 0.0j], axis=-1)
        ket_g = np.stack([cge + 0.0j, cgg + 0.0j], axis=-1)
        alpha = np.sqrt(2.0) * np.abs(w_ge) / s
        return FrameGrid(1, t, E_g, E_e, s, ket_g, ket_e, w_ge, m1 + 0.0j, m2, alpha)
    if order == 2:
        E2, gap2, ke_e, ke_g, kg_e, kg_g, w_ge2, m1_2, m2_2 = _order2_arrays(config, t)
        ket_e = np.stack([ke_e, ke_g], axis=-1)
        ket_g = np.stack([kg_e, kg_g], axis=-1)
        alpha = np.sqrt(2.0) * np.abs(w_ge2) / gap2
        return FrameGrid(2, t, -E2, E2, gap2, ket_g, ket_e, w_ge2, m1_2 + 0.0j, m2_2, alpha)
    raise UnsupportedOrderError(f"unsupported renormalization order {order}; must be 0, 1 or 2")


def _frame_from_grid(grid: FrameGrid, i: int) -> Frame:
    return Frame(
        order=grid.order,
        t=float(grid.t[i]),
        E_g=float(grid.E_g[i]),
        E_e=float(grid.E_e[i]),
        omega01=float(grid.omega01[i]),
        ket_g=grid.ket_g[i].copy(),
        ket_e=grid.ket_e[i].copy(),
        w_ge=complex(grid.w_ge[i]),
        m1=complex(grid.m1[i]),
        m2=complex(grid.m2[i]),
        alpha=float(grid.alpha[i]),
    )


def frame0(config: SystemConfig, t: float = 0.0) -> Frame:
    """Static diabatic frame; independent of t apart from the stamp."""
    return _frame_from_grid(frame_grid(config, [t], 0), 0)


def frame1(config: SystemConfig, t: float) -> Frame:
    """Adiabatic frame: instantaneous eigenbasis of H(t)."""
    return _frame_from_grid(frame_grid(config, [t], 1), 0)


def frame2(config: SystemConfig, t: float) -> Frame:
    """First superadiabatic frame."""
    return _frame_from_grid(frame_grid(config, [t], 2), 0)


def frame_at(config: SystemConfig, t: float, order: int) -> Frame:
    """Dispatch to the order-n frame; rejects orders outside {0, 1, 2}."""
    if order not in (0, 1, 2):
        raise UnsupportedOrderError(f"unsupported renormalization order {order}; must be 0, 1 or 2")
    return _frame_from_grid(frame_grid(config, [t], order), 0)


def alphas_over_cycle(config: SystemConfig, n_samples: int = 2001):
    """Local adiabatic parameters alpha_1, alpha_2 over one drive period.

    Returns (t, alpha1, alpha2) with t spanning [0, t_drive].
    """
    t = np.linspace(0.0, config.t_drive, n_samples)
    a1 = frame_grid(config, t, 1).alpha
    a2 = frame_grid(config, t, 2).alpha
    return t, a1, a2
