"""Stochastic unraveling of the driven dissipative two-level dynamics.

A trajectory consists of a projective energy measurement in the
instantaneous eigenbasis of H(t_init) sampled from the Gibbs distribution,
first-order no-jump propagation under the non-Hermitian effective
Hamiltonian punctuated by instantaneous jumps (decay, excitation or frame
phase flip), and a final projective measurement in the eigenbasis of
H(t_final).  The two measured energies always refer to the order-1
(adiabatic) frame regardless of the dissipator order; only the jump
operators, the jump heats and the rates carry the renormalization order.

Heat bookkeeping: a decay jump at t_j transfers +gap_n(t_j) to the
environment, an excitation jump -gap_n(t_j), a dephasing jump nothing.
The trajectory work is W = (E_final - E_init) + sum_j Q(t_j).  Heats are
accumulated simultaneously for all three frame orders so that a recorded
trajectory can be re-scored with a work variable of any order without
re-simulation.

All randomness is keyed by (master seed, trajectory index, step, draw),
making every trajectory a pure function of the configuration; see `rng`.
`run_trajectory` is the transparent single-trajectory reference used by the
tests; `run_ensemble` drives the compiled block kernel over the same tables
and the same random stream.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numba
import numpy as np

from . import _kernel
from .dissipation import rates_at
from .frames import UnsupportedOrderError, frame_at
from .model import SystemConfig, hamiltonian_at
from .rng import trajectory_key, uniform
from .tables import StepTables, step_tables

__all__ = [
    "JumpEvent",
    "TrajectoryRecord",
    "EnsembleResult",
    "effective_hamiltonian",
    "no_jump_step",
    "jump_probabilities",
    "collapse",
    "initial_measurement",
    "final_measurement",
    "heat_of_jump",
    "run_trajectory",
    "reassign_work",
    "run_ensemble",
]

# ground/excited labels for the measurement outcomes
GROUND, EXCITED = 0, 1


@dataclass(frozen=True)
class JumpEvent:
    """One quantum jump: time, channel and the frame data at the jump."""

    t: float
    channel: int  # 0 decay, 1 excitation, 2 dephasing
    omega01: float  # gap of the dynamics order at the jump time
    gamma_forward: float
    gamma_reversed: float


@dataclass(frozen=True)
class TrajectoryRecord:
    """Two-measurement outcomes plus the ordered jump history."""

    traj_index: int
    order: int
    k_init: int  # 0 ground, 1 excited
    l_final: int
    E_init: float
    E_final: float
    events: tuple[JumpEvent, ...]
    q_tot: np.ndarray  # shape (3,), heat total under each frame order

    @property
    def heat(self) -> float:
        """Total heat of the dynamics order."""
        return float(self.q_tot[self.order])

    @property
    def work(self) -> float:
        """Trajectory work of the dynamics order: dE + Q_tot."""
        return (self.E_final - self.E_init) + self.heat


def effective_hamiltonian(t: float, order: int, config: SystemConfig) -> np.ndarray:
    """Non-Hermitian generator H(t) - (i/2) sum_i L_i^dag L_i of order n."""
    frame = frame_at(config, t, order)
    rates = rates_at(frame, config)
    h = hamiltonian_at(config, t).astype(np.complex128)
    for L in rates.operators:
        h -= 0.5j * (L.conj().T @ L)
    return h


def no_jump_step(psi: np.ndarray, t: float, dt: float, order: int, config: SystemConfig):
    """One first-order no-jump update: psi' = (1 - i dt H_eff) psi / N.

    Returns (normalized new state, no-jump probability N^2).  The update is
    first order in dt, so dt must resolve the fastest scale; warn when
    dt*omega0 is not small.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if dt * config.omega0 >= 1e-2:
        warnings.warn(
            f"dt*omega0 = {dt * config.omega0:.3g} is large for the first-order stepper",
            stacklevel=2,
        )
    h_eff = effective_hamiltonian(t, order, config)
    psi_next = psi - 1j * dt * (h_eff @ psi)
    norm_sq = float(np.real(np.vdot(psi_next, psi_next)))
    return psi_next / np.sqrt(norm_sq), norm_sq


def jump_probabilities(psi: np.ndarray, t: float, dt: float, order: int, config: SystemConfig):
    """Channel probabilities p_i = dt <psi|L_i^dag L_i|psi> for one step."""
    frame = frame_at(config, t, order)
    rates = rates_at(frame, config)
    a_e = abs(np.vdot(frame.ket_e, psi)) ** 2
    a_g = abs(np.vdot(frame.ket_g, psi)) ** 2
    return (
        dt * rates.gamma_down * a_e,
        dt * rates.gamma_up * a_g,
        dt * rates.gamma_phi * float(np.real(np.vdot(psi, psi))),
    )


def collapse(psi: np.ndarray, channel: int, t: float, order: int, config: SystemConfig) -> np.ndarray:
    """Post-jump state for the given channel (normalized).

    Raises ValueError when the requested collapse has zero probability.
    """
    frame = frame_at(config, t, order)
    rates = rates_at(frame, config)
    L = rates.operators[channel]
    phi = L @ psi
    norm = np.linalg.norm(phi)
    if norm == 0.0:
        raise ValueError(f"zero-probability collapse requested on channel {channel} at t={t}")
    return phi / norm


def initial_measurement(rng: np.random.Generator, config: SystemConfig, t_init: float = 0.0):
    """Gibbs-sampled projective energy measurement in the adiabatic basis.

    Returns (index, energy, eigenstate) with index 0 for ground, 1 for
    excited, drawn with weights exp(-beta E_m^(1)(t_init))/Z.
    """
    frame = frame_at(config, t_init, 1)
    p_exc = float(np.exp(-np.logaddexp(0.0, config.beta * (frame.E_e - frame.E_g))))
    if rng.random() < p_exc:
        return EXCITED, frame.E_e, frame.ket_e.copy()
    return GROUND, frame.E_g, frame.ket_g.copy()


def final_measurement(rng: np.random.Generator, psi: np.ndarray, t_final: float, config: SystemConfig):
    """Born-rule projective energy measurement in the adiabatic basis."""
    frame = frame_at(config, t_final, 1)
    p_exc = abs(np.vdot(frame.ket_e, psi)) ** 2 / float(np.real(np.vdot(psi, psi)))
    if rng.random() < p_exc:
        return EXCITED, frame.E_e
    return GROUND, frame.E_g


def heat_of_jump(event: JumpEvent) -> float:
    """Heat released to the environment by one jump."""
    if event.channel == 0:
        return event.omega01
    if event.channel == 1:
        return -event.omega01
    return 0.0


def run_trajectory(
    config: SystemConfig,
    traj_index: int,
    tables: StepTables | None = None,
) -> TrajectoryRecord:
    """Simulate one trajectory; deterministic in (config.seed, traj_index).

    This is the reference implementation: a plain Python loop over the same
    precomputed tables and random stream as the compiled ensemble kernel,
    additionally recording every jump event.
    """
    st = tables if tables is not None else step_tables(config)
    order = st.order
    n_steps = st.n_steps
    key = np.uint64(trajectory_key(np.uint64(config.seed), np.uint64(traj_index)))

    u_init = uniform(key, np.uint64(2 * n_steps))
    if u_init < st.p_exc_init:
        k_init, E_init = EXCITED, st.E_init_e
        c0, c1 = complex(st.ket_init_e[0]), complex(st.ket_init_e[1])
    else:
        k_init, E_init = GROUND, st.E_init_g
        c0, c1 = complex(st.ket_init_g[0]), complex(st.ket_init_g[1])

    n2 = 1.0
    q_tot = np.zeros(3)
    events: list[JumpEvent] = []
    gammas = (st.gamma_down, st.gamma_up, st.gamma_phi)
    rev_channel = (1, 0, 2)

    for k in range(n_steps):
        ov = np.conj(st.e0[k]) * c0 + np.conj(st.e1[k]) * c1
        ae2 = ov.real * ov.real + ov.imag * ov.imag
        u = uniform(key, np.uint64(2 * k))
        if u * n2 < st.pa[k] * n2 + st.pb[k] * ae2:
            aen = min(ae2 / n2, 1.0)
            pj0 = st.p0[k] * aen
            pj1 = st.p1[k] * (1.0 - aen)
            pt = pj0 + pj1 + st.p2[k]
            v = uniform(key, np.uint64(2 * k + 1)) * pt
            if v < pj0:
                channel = 0
                c0, c1 = complex(st.g0[k]), complex(st.g1[k])
                n2 = 1.0
                q_tot += st.gaps[:, k]
            elif v < pj0 + pj1:
                channel = 1
                c0, c1 = complex(st.e0[k]), complex(st.e1[k])
                n2 = 1.0
                q_tot -= st.gaps[:, k]
            else:
                channel = 2
                og = np.conj(st.g0[k]) * c0 + np.conj(st.g1[k]) * c1
                c0, c1 = ov * st.e0[k] - og * st.g0[k], ov * st.e1[k] - og * st.g1[k]
                n2 = c0.real * c0.real + c0.imag * c0.imag + c1.real * c1.real + c1.imag * c1.imag
            events.append(
                JumpEvent(
                    t=float(st.t[k]),
                    channel=channel,
                    omega01=float(st.gaps[order, k]),
                    gamma_forward=float(gammas[channel][k]),
                    gamma_reversed=float(gammas[rev_channel[channel]][k]),
                )
            )
        else:
            d0 = st.m00[k] * c0 + st.m01[k] * c1
            d1 = st.m10[k] * c0 + st.m11[k] * c1
            c0, c1 = d0, d1
            n2 = c0.real * c0.real + c0.imag * c0.imag + c1.real * c1.real + c1.imag * c1.imag

    ovf = np.conj(complex(st.ket_fin_e[0])) * c0 + np.conj(complex(st.ket_fin_e[1])) * c1
    p_exc_fin = (ovf.real * ovf.real + ovf.imag * ovf.imag) / n2
    u_fin = uniform(key, np.uint64(2 * n_steps + 1))
    if u_fin < p_exc_fin:
        l_final, E_final = EXCITED, st.E_fin_e
    else:
        l_final, E_final = GROUND, st.E_fin_g

    return TrajectoryRecord(
        traj_index=traj_index,
        order=order,
        k_init=k_init,
        l_final=l_final,
        E_init=E_init,
        E_final=E_final,
        events=tuple(events),
        q_tot=q_tot,
    )


def reassign_work(record: TrajectoryRecord, order: int, config: SystemConfig) -> float:
    """Re-score a recorded trajectory with the order-n' work variable.

    Uses the order-n' gap at every recorded jump time; no re-simulation.
    """
    if order not in (0, 1, 2):
        raise UnsupportedOrderError(f"unsupported renormalization order {order}; must be 0, 1 or 2")
    heat = 0.0
    for ev in record.events:
        if ev.channel == 2:
            continue
        gap = frame_at(config, ev.t, order).omega01
        heat += gap if ev.channel == 0 else -gap
    return (record.E_final - record.E_init) + heat


@dataclass
class EnsembleResult:
    """Per-trajectory outcomes of an ensemble run plus population averages.

    `q_tot[n']` is the heat total of each trajectory scored with the
    order-n' gap, so `work(n')` gives the ensemble of the order-n' work
    variable under the simulated dynamics order.
    """

    config: SystemConfig
    order: int
    t_out: np.ndarray
    dE: np.ndarray
    q_tot: np.ndarray  # shape (3, n_traj)
    R: np.ndarray
    n_jumps: np.ndarray
    k_init: np.ndarray
    l_final: np.ndarray
    rho_ee_mean: np.ndarray
    rho_ee_sem: np.ndarray

    @property
    def n_traj(self) -> int:
        return self.dE.shape[0]

    def work(self, order: int | None = None) -> np.ndarray:
        """Work samples W^(n') = dE + Q^(n')_tot (defaults to dynamics order)."""
        if order is None:
            order = self.order
        if order not in (0, 1, 2):
            raise UnsupportedOrderError(f"unsupported renormalization order {order}; must be 0, 1 or 2")
        return self.dE + self.q_tot[order]


def _largest_divisor_at_most(n: int, target: int) -> int:
    for d in range(min(target, n), 0, -1):
        if n % d == 0:
            return d
    return 1


def run_ensemble(
    config: SystemConfig,
    order: int | None = None,
    workers: int | None = None,
    n_out: int = 500,
    tables: StepTables | None = None,
) -> EnsembleResult:
    """Simulate config.n_traj trajectories with the compiled block kernel.

    Results are bitwise independent of `workers` (trajectories are keyed by
    index and reduced in fixed block order).  `n_out` is reduced to the
    largest divisor of n_steps so the population grid lands on exact step
    boundaries.
    """
    st = tables if tables is not None else step_tables(config, order)
    n_traj = config.n_traj
    n_steps = st.n_steps
    n_out_eff = _largest_divisor_at_most(n_steps, n_out)
    stride = n_steps // n_out_eff
    n_blocks = -(-n_traj // _kernel.BLOCK_SIZE)

    if workers is not None:
        if workers < 1:
            raise ValueError(f"workers must be >= 1, got {workers}")
        prev_threads = numba.get_num_threads()
        numba.set_num_threads(min(workers, numba.config.NUMBA_NUM_THREADS))
    try:
        dE = np.empty(n_traj)
        q0 = np.empty(n_traj)
        q1 = np.empty(n_traj)
        q2 = np.empty(n_traj)
        R = np.empty(n_traj)
        nj = np.zeros(n_traj, dtype=np.int64)
        kin = np.zeros(n_traj, dtype=np.int8)
        lfin = np.zeros(n_traj, dtype=np.int8)
        rho = np.zeros((n_blocks, n_out_eff + 1))
        rho2 = np.zeros((n_blocks, n_out_eff + 1))

        _kernel.simulate_blocks(
            np.uint64(config.seed),
            n_traj,
            n_steps,
            stride,
            st.m00, st.m01, st.m10, st.m11,
            st.e0, st.e1, st.g0, st.g1,
            st.pa, st.pb, st.p0, st.p1, st.p2,
            st.lg, st.gaps[0], st.gaps[1], st.gaps[2],
            st.p_exc_init,
            st.E_init_e, st.E_init_g, st.E_fin_e, st.E_fin_g,
            complex(st.ket_init_e[0]), complex(st.ket_init_e[1]),
            complex(st.ket_init_g[0]), complex(st.ket_init_g[1]),
            complex(st.ket_fin_e[0]), complex(st.ket_fin_e[1]),
            complex(st.ket_fin_g[0]), complex(st.ket_fin_g[1]),
            config.beta, st.ln_z_init, st.ln_z_fin,
            dE, q0, q1, q2, R, nj, kin, lfin, rho, rho2,
        )
    finally:
        if workers is not None:
            numba.set_num_threads(prev_threads)

    mean = rho.sum(axis=0) / n_traj
    if n_traj > 1:
        var = (rho2.sum(axis=0) - n_traj * mean**2) / (n_traj - 1)
        sem = np.sqrt(np.maximum(var, 0.0) / n_traj)
    else:
        sem = np.full_like(mean, np.nan)

    return EnsembleResult(
        config=config,
        order=st.order,
        t_out=np.arange(n_out_eff + 1) * (stride * st.dt),
        dE=dE,
        q_tot=np.stack([q0, q1, q2]),
        R=R,
        n_jumps=nj,
        k_init=kin,
        l_final=lfin,
        rho_ee_mean=mean,
        rho_ee_sem=sem,
    )
