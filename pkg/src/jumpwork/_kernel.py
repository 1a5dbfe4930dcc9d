"""Compiled trajectory ensemble kernel.

One call simulates a contiguous range of trajectory indices in fixed-size
blocks.  Blocks are independent (keyed counter RNG), so they may be executed
by any number of threads in any order; per-trajectory outputs land in slots
indexed by the global trajectory index and per-block partial sums land in
slots indexed by the block number.  All downstream reductions therefore give
bit-identical results for any worker count.

The no-jump fast path defers state normalization: the squared norm is
carried along and divided out only where probabilities or populations are
formed, which keeps the inner loop free of square roots and divisions.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange, uint64

from .rng import trajectory_key, uniform

__all__ = ["simulate_blocks", "BLOCK_SIZE"]

BLOCK_SIZE = 1024


@njit(cache=True, parallel=True, fastmath=True)
def simulate_blocks(
    seed,
    n_traj,
    n_steps,
    stride,
    m00,
    m01,
    m10,
    m11,
    e0,
    e1,
    g0,
    g1,
    pa,
    pb,
    p0,
    p1,
    p2,
    lg,
    gap0,
    gap1,
    gap2,
    p_exc_init,
    E_init_e,
    E_init_g,
    E_fin_e,
    E_fin_g,
    ike0,
    ike1,
    ikg0,
    ikg1,
    fke0,
    fke1,
    fkg0,
    fkg1,
    beta,
    ln_z_init,
    ln_z_fin,
    dE,
    Q0,
    Q1,
    Q2,
    R,
    NJ,
    KIN,
    LFIN,
    RHO,
    RHO2,
):
    n_blocks = RHO.shape[0]
    n_out = n_steps // stride
    for b in prange(n_blocks):
        i_lo = b * BLOCK_SIZE
        i_hi = min(i_lo + BLOCK_SIZE, n_traj)
        for i in range(i_lo, i_hi):
            key = trajectory_key(uint64(seed), uint64(i))

            u_init = uniform(key, uint64(2 * n_steps))
            if u_init < p_exc_init:
                kin = 1
                E_i = E_init_e
                c0 = ike0
                c1 = ike1
            else:
                kin = 0
                E_i = E_init_g
                c0 = ikg0
                c1 = ikg1

            n2 = 1.0
            q0 = 0.0
            q1 = 0.0
            q2 = 0.0
            lnr = 0.0
            nj = 0
            nxt = 0
            for k in range(n_steps):
                if k == nxt:
                    x = (c0.real * c0.real + c0.imag * c0.imag) / n2
                    j = k // stride
                    RHO[b, j] += x
                    RHO2[b, j] += x * x
                    nxt += stride
                ov = np.conj(e0[k]) * c0 + np.conj(e1[k]) * c1
                ae2 = ov.real * ov.real + ov.imag * ov.imag
                u = uniform(key, uint64(2 * k))
                if u * n2 < pa[k] * n2 + pb[k] * ae2:
                    aen = ae2 / n2
                    if aen > 1.0:
                        aen = 1.0
                    pj0 = p0[k] * aen
                    pj1 = p1[k] * (1.0 - aen)
                    pt = pj0 + pj1 + p2[k]
                    v = uniform(key, uint64(2 * k + 1)) * pt
                    if v < pj0:
                        # decay: collapse onto the frame ground state
                        c0 = g0[k]
                        c1 = g1[k]
                        n2 = 1.0
                        q0 += gap0[k]
                        q1 += gap1[k]
                        q2 += gap2[k]
                        lnr += lg[k]
                    elif v < pj0 + pj1:
                        # excitation: collapse onto the frame excited state
                        c0 = e0[k]
                        c1 = e1[k]
                        n2 = 1.0
                        q0 -= gap0[k]
                        q1 -= gap1[k]
                        q2 -= gap2[k]
                        lnr -= lg[k]
                    else:
                        # dephasing: frame phase flip, no heat
                        og = np.conj(g0[k]) * c0 + np.conj(g1[k]) * c1
                        c0 = ov * e0[k] - og * g0[k]
                        c1 = ov * e1[k] - og * g1[k]
                        n2 = c0.real * c0.real + c0.imag * c0.imag + c1.real * c1.real + c1.imag * c1.imag
                    nj += 1
                else:
                    d0 = m00[k] * c0 + m01[k] * c1
                    d1 = m10[k] * c0 + m11[k] * c1
                    c0 = d0
                    c1 = d1
                    n2 = c0.real * c0.real + c0.imag * c0.imag + c1.real * c1.real + c1.imag * c1.imag

            x = (c0.real * c0.real + c0.imag * c0.imag) / n2
            RHO[b, n_out] += x
            RHO2[b, n_out] += x * x

            ovf = np.conj(fke0) * c0 + np.conj(fke1) * c1
            p_exc_fin = (ovf.real * ovf.real + ovf.imag * ovf.imag) / n2
            u_fin = uniform(key, uint64(2 * n_steps + 1))
            if u_fin < p_exc_fin:
                lfin = 1
                E_f = E_fin_e
            else:
                lfin = 0
                E_f = E_fin_g

            dE[i] = E_f - E_i
            Q0[i] = q0
            Q1[i] = q1
            Q2[i] = q2
            R[i] = beta * (E_f - E_i) + (ln_z_fin - ln_z_init) + lnr
            NJ[i] = nj
            KIN[i] = kin
            LFIN[i] = lfin
