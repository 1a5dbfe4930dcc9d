"""Precomputed per-step arrays for the propagation engines.

Frames, rates and update matrices depend on time but not on the stochastic
state, so a whole ensemble shares one set of tables.  `step_tables` builds
the left-endpoint tables consumed by the jump unraveling; `lindblad_ops`
builds generator tables on an arbitrary grid for the deterministic
master-equation integrators.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dissipation import spectral_density
from .frames import FrameGrid, frame_grid
from .model import SystemConfig, drive_at

__all__ = ["StepTables", "step_tables", "rate_arrays", "lindblad_ops", "bloch_tables"]


def _log_ratio(g_down: np.ndarray, g_up: np.ndarray) -> np.ndarray:
    """ln(Gamma_down/Gamma_up); zero where a channel is switched off (g = 0)."""
    ok = (g_down > 0.0) & (g_up > 0.0)
    with np.errstate(divide="ignore"):
        return np.where(ok, np.log(np.where(ok, g_down, 1.0)) - np.log(np.where(ok, g_up, 1.0)), 0.0)


def rate_arrays(grid: FrameGrid, config: SystemConfig):
    """Vectorized transition rates (Gamma_down, Gamma_up, Gamma_phi) on a grid."""
    m2_sq = np.abs(grid.m2) ** 2
    g_down = spectral_density(grid.omega01, config) * m2_sq
    g_up = spectral_density(-grid.omega01, config) * m2_sq
    g_phi = spectral_density(0.0, config) * np.abs(grid.m1) ** 2
    return g_down, g_up, g_phi


@dataclass
class StepTables:
    """Left-endpoint step tables for the stochastic unraveling.

    The no-jump update matrix M(t_k) = 1 - i*dt*H_eff(t_k) is stored
    element-wise; p* tables are the dt-multiplied channel weights with
    pa = dt*(Gamma_up + Gamma_phi) and pb = dt*(Gamma_down - Gamma_up) so
    that the total jump probability of a normalized state with excited-frame
    population a is pa + pb*a.  `lg` holds ln(Gamma_down/Gamma_up) used by
    the entropy-production accumulator, and gaps[n'] the order-n' energy gap
    at each step for work reassignment.  Boundary data (order-1 energies,
    kets and Gibbs weights at t_init and t_final) feed the two-measurement
    protocol.
    """

    order: int
    n_steps: int
    dt: float
    t: np.ndarray
    m00: np.ndarray
    m01: np.ndarray
    m10: np.ndarray
    m11: np.ndarray
    e0: np.ndarray
    e1: np.ndarray
    g0: np.ndarray
    g1: np.ndarray
    pa: np.ndarray
    pb: np.ndarray
    p0: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    lg: np.ndarray
    gaps: np.ndarray  # shape (3, n_steps): order-0/1/2 gap at each step
    gamma_down: np.ndarray
    gamma_up: np.ndarray
    gamma_phi: np.ndarray
    # boundary (two-measurement) data, order-1 frame
    p_exc_init: float
    E_init_e: float
    E_init_g: float
    E_fin_e: float
    E_fin_g: float
    ket_init_e: np.ndarray
    ket_init_g: np.ndarray
    ket_fin_e: np.ndarray
    ket_fin_g: np.ndarray
    ln_z_init: float
    ln_z_fin: float


def step_tables(config: SystemConfig, order: int | None = None) -> StepTables:
    """Build the per-step tables for the configured protocol."""
    if order is None:
        order = config.n_order
    n_steps = config.n_steps
    dt = config.dt
    t = np.arange(n_steps, dtype=np.float64) * dt

    grid = frame_grid(config, t, order)
    g_down, g_up, g_phi = rate_arrays(grid, config)

    lam, _, _ = drive_at(config, t)
    h = 0.5 * config.omega0
    ket_e, ket_g = grid.ket_e, grid.ket_g

    # H_eff = H - (i/2) (G_down |e_n><e_n| + G_up |g_n><g_n| + G_phi * 1)
    pe = np.einsum("ni,nj->nij", ket_e, np.conj(ket_e))
    pg = np.einsum("ni,nj->nij", ket_g, np.conj(ket_g))
    heff = np.zeros((n_steps, 2, 2), dtype=np.complex128)
    heff[:, 0, 0] = h
    heff[:, 1, 1] = -h
    heff[:, 0, 1] = lam
    heff[:, 1, 0] = lam
    heff -= 0.5j * (
        g_down[:, None, None] * pe
        + g_up[:, None, None] * pg
        + g_phi[:, None, None] * np.eye(2)[None, :, :]
    )
    m = np.eye(2, dtype=np.complex128)[None, :, :] - 1j * dt * heff

    gap1 = frame_grid(config, t, 1).omega01 if order != 1 else grid.omega01
    gap2 = frame_grid(config, t, 2).omega01 if order != 2 else grid.omega01
    gaps = np.stack([np.full(n_steps, config.omega0), gap1, gap2])

    # order-1 boundary data for the two projective energy measurements
    f_init = frame_grid(config, np.array([0.0]), 1)
    f_fin = frame_grid(config, np.array([config.t_final]), 1)
    beta = config.beta
    e_i, g_i = float(f_init.E_e[0]), float(f_init.E_g[0])
    e_f, g_f = float(f_fin.E_e[0]), float(f_fin.E_g[0])
    ln_z_init = float(np.logaddexp(-beta * e_i, -beta * g_i))
    ln_z_fin = float(np.logaddexp(-beta * e_f, -beta * g_f))
    p_exc_init = float(np.exp(-beta * e_i - ln_z_init))

    return StepTables(
        order=order,
        n_steps=n_steps,
        dt=dt,
        t=t,
        m00=np.ascontiguousarray(m[:, 0, 0]),
        m01=np.ascontiguousarray(m[:, 0, 1]),
        m10=np.ascontiguousarray(m[:, 1, 0]),
        m11=np.ascontiguousarray(m[:, 1, 1]),
        e0=np.ascontiguousarray(ket_e[:, 0]),
        e1=np.ascontiguousarray(ket_e[:, 1]),
        g0=np.ascontiguousarray(ket_g[:, 0]),
        g1=np.ascontiguousarray(ket_g[:, 1]),
        pa=dt * (g_up + g_phi),
        pb=dt * (g_down - g_up),
        p0=dt * g_down,
        p1=dt * g_up,
        p2=dt * g_phi,
        lg=_log_ratio(g_down, g_up),
        gaps=gaps,
        gamma_down=g_down,
        gamma_up=g_up,
        gamma_phi=g_phi,
        p_exc_init=p_exc_init,
        E_init_e=e_i,
        E_init_g=g_i,
        E_fin_e=e_f,
        E_fin_g=g_f,
        ket_init_e=f_init.ket_e[0].copy(),
        ket_init_g=f_init.ket_g[0].copy(),
        ket_fin_e=f_fin.ket_e[0].copy(),
        ket_fin_g=f_fin.ket_g[0].copy(),
        ln_z_init=ln_z_init,
        ln_z_fin=ln_z_fin,
    )


def lindblad_ops(config: SystemConfig, order: int, t: np.ndarray) -> np.ndarray:
    """Generator tables for the deterministic integrator on grid `t`.

    Returns a complex array of shape (16, len(t)) holding, per grid point,
    the elements (row-major 00, 01, 10, 11) of the drift
    A = -i*H - (1/2) sum_i L_i^dag L_i followed by those of L0, L1, L2, so
    that drho/dt = A rho + rho A^dag + sum_i L_i rho L_i^dag.
    """
    t = np.asarray(t, dtype=np.float64)
    grid = frame_grid(config, t, order)
    g_down, g_up, g_phi = rate_arrays(grid, config)
    lam, _, _ = drive_at(config, t)
    h = 0.5 * config.omega0

    ket_e, ket_g = grid.ket_e, grid.ket_g
    pe = np.einsum("ni,nj->nij", ket_e, np.conj(ket_e))
    pg = np.einsum("ni,nj->nij", ket_g, np.conj(ket_g))

    a = np.zeros((len(t), 2, 2), dtype=np.complex128)
    a[:, 0, 0] = -1j * h
    a[:, 1, 1] = 1j * h
    a[:, 0, 1] = -1j * lam
    a[:, 1, 0] = -1j * lam
    a -= 0.5 * (
        g_down[:, None, None] * pe
        + g_up[:, None, None] * pg
        + g_phi[:, None, None] * np.eye(2)[None, :, :]
    )

    l0 = np.sqrt(g_down)[:, None, None] * np.einsum("ni,nj->nij", ket_g, np.conj(ket_e))
    l1 = np.sqrt(g_up)[:, None, None] * np.einsum("ni,nj->nij", ket_e, np.conj(ket_g))
    l2 = np.sqrt(g_phi)[:, None, None] * (pe - pg)

    ops = np.empty((16, len(t)), dtype=np.complex128)
    for block, mat in enumerate((a, l0, l1, l2)):
        for i in range(2):
            for j in range(2):
                ops[4 * block + 2 * i + j] = mat[:, i, j]
    return ops


def bloch_tables(config: SystemConfig, order: int, t: np.ndarray):
    """Rotated-frame component tables: w_ge, gap and rates on grid `t`."""
    grid = frame_grid(config, np.asarray(t, dtype=np.float64), order)
    g_down, g_up, g_phi = rate_arrays(grid, config)
    return grid.w_ge, grid.omega01, g_down, g_up, g_phi, grid.ket_e, grid.ket_g
