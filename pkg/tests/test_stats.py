import dataclasses
import math

import numpy as np
import pytest
from scipy.linalg import expm

import jumpwork as jw


@pytest.fixture(scope="module")
def small_ensembles():
    base = dataclasses.replace(jw.SystemConfig(), n_steps=20_000, n_traj=20_000)
    out = {}
    for order in (0, 1, 2):
        out[order] = jw.run_ensemble(dataclasses.replace(base, n_order=order), n_out=50)
    return base, out


def test_histogram_delta_case():
    ens = jw.WorkEnsemble(np.zeros(100), 0, 0)
    h = jw.histogram(ens, 0.01)
    assert h.centers.shape == (1,)
    assert h.centers[0] == 0.0
    assert h.density[0] == pytest.approx(100.0, rel=1e-12)  # 1/bin_width
    assert h.occupied_bins == 1


def test_histogram_normalization_and_centering():
    rng = np.random.default_rng(51)
    ens = jw.WorkEnsemble(rng.normal(0.3, 0.8, size=5000), 2, 2)
    h = jw.histogram(ens, 0.01)
    assert np.sum(h.density) * h.bin_width == pytest.approx(1.0, abs=1e-9)
    # centers sit on integer multiples of the width
    assert np.allclose(h.centers / h.bin_width, np.round(h.centers / h.bin_width), atol=1e-9)


def test_histogram_errors():
    with pytest.raises(ValueError):
        jw.histogram(jw.WorkEnsemble(np.array([]), 0, 0), 0.01)
    with pytest.raises(ValueError):
        jw.histogram(jw.WorkEnsemble(np.zeros(5), 0, 0), -1.0)
    with pytest.raises(ValueError):
        jw.WorkEnsemble(np.array([1.0, np.inf]), 0, 0)


def test_order0_histogram_discrete(small_ensembles):
    base, ensembles = small_ensembles
    h = jw.histogram(jw.WorkEnsemble(ensembles[0].work(), 0, 0), 0.01)
    occupied = h.centers[h.density > 0]
    assert np.allclose(occupied, np.round(occupied), atol=1e-9)


def test_order2_histogram_continuous(small_ensembles):
    _, ensembles = small_ensembles
    h = jw.histogram(jw.WorkEnsemble(ensembles[2].work(), 2, 2), 0.01)
    assert h.occupied_bins >= 100


def test_moments_arithmetic():
    ens = jw.WorkEnsemble(np.array([1.0, -1.0]), 0, 0)
    mean, second, sem_mean, sem_second = jw.moments(ens)
    assert mean == 0.0
    assert second == 1.0
    assert sem_mean == pytest.approx(math.sqrt(2) / math.sqrt(2), rel=1e-12)
    assert sem_second == 0.0


def test_jarzynski_degenerate():
    ens = jw.WorkEnsemble(np.zeros(10), 0, 0)
    mean, dev, sem = jw.jarzynski(ens, beta=2.0, delta_f=0.0)
    assert mean == 1.0 and dev == 0.0 and sem == 0.0


def test_free_energy_closed_loop(cfg):
    assert jw.free_energy_difference(cfg, 0.0, cfg.t_final) == pytest.approx(0.0, abs=1e-12)
    assert jw.free_energy_difference(cfg, 0.0, 2 * cfg.t_drive) == pytest.approx(0.0, abs=1e-12)


def test_free_energy_against_matrix_exponential_oracle(cfg):
    # brute-force partition functions from expm(-beta H)
    t_i, t_f = 0.0, cfg.t_drive / 4.0
    z = [np.trace(expm(-cfg.beta * jw.hamiltonian_at(cfg, t))).real for t in (t_i, t_f)]
    expected = -math.log(z[1] / z[0]) / cfg.beta
    assert jw.free_energy_difference(cfg, t_i, t_f) == pytest.approx(expected, rel=1e-12)


def test_free_energy_ground_state_limit(cfg):
    cfg_cold = dataclasses.replace(cfg, beta=5e3)
    t_f = cfg.t_drive / 4.0
    df = jw.free_energy_difference(cfg_cold, 0.0, t_f)
    e_g_shift = jw.frame_at(cfg, t_f, 1).E_g - jw.frame_at(cfg, 0.0, 1).E_g
    assert df == pytest.approx(e_g_shift, rel=1e-3)


def _record(events=(), k=0, l=0, e_init=-0.5, e_final=-0.5, order=1):
    q = np.zeros(3)
    for ev in events:
        sign = {0: 1.0, 1: -1.0, 2: 0.0}[ev.channel]
        q += sign * ev.omega01
    return jw.TrajectoryRecord(
        traj_index=0,
        order=order,
        k_init=k,
        l_final=l,
        E_init=e_init,
        E_final=e_final,
        events=tuple(events),
        q_tot=q,
    )


def test_entropy_production_zero_jump_symmetric(cfg):
    rec = _record()
    assert jw.entropy_production(rec, cfg) == pytest.approx(0.0, abs=1e-12)


def test_entropy_production_identity_on_real_records(small_cfg):
    from jumpwork.tables import step_tables

    tables = step_tables(small_cfg)
    dF = jw.free_energy_difference(small_cfg, 0.0, small_cfg.t_final)
    for i in range(30):
        rec = jw.run_trajectory(small_cfg, i, tables=tables)
        r = jw.entropy_production(rec, small_cfg)
        assert r == pytest.approx(small_cfg.beta * (rec.work - dF), abs=1e-12)


def test_entropy_production_dephasing_neutral(cfg):
    ev2 = jw.JumpEvent(t=3.0, channel=2, omega01=1.1, gamma_forward=0.02, gamma_reversed=0.02)
    assert jw.entropy_production(_record([ev2]), cfg) == pytest.approx(0.0, abs=1e-12)


def test_entropy_production_zero_rate_flag(cfg):
    ev = jw.JumpEvent(t=3.0, channel=0, omega01=1.0, gamma_forward=0.0, gamma_reversed=0.1)
    assert jw.entropy_production(_record([ev]), cfg) == math.inf


def test_ift_check_trivial(cfg):
    recs = [_record() for _ in range(5)]
    mean, sem = jw.ift_check(recs, cfg)
    assert mean == 1.0 and sem == 0.0


def test_ift_consistency_with_work(small_ensembles):
    base, ensembles = small_ensembles
    res = ensembles[1]
    dF = jw.free_energy_difference(base, 0.0, base.t_final)
    per_traj = np.exp(-res.R) - np.exp(-base.beta * (res.work() - dF))
    assert np.max(np.abs(per_traj)) < 1e-12


def test_positive_work_skew(small_ensembles):
    _, ensembles = small_ensembles
    for order in (0, 1, 2):
        w = ensembles[order].work()
        h = jw.histogram(jw.WorkEnsemble(w, order, order), 0.01)
        pos = h.density[h.centers > 0].sum() * h.bin_width
        neg = h.density[h.centers < 0].sum() * h.bin_width
        assert pos > neg


def test_mixed_order_moments_near_agreement(small_ensembles):
    # under order-2 dynamics the order-1 and order-2 work moments agree to <1%
    _, ensembles = small_ensembles
    res = ensembles[2]
    m1 = jw.moments(jw.WorkEnsemble(res.work(1), 2, 1))
    m2 = jw.moments(jw.WorkEnsemble(res.work(2), 2, 2))
    assert abs(m1[0] - m2[0]) / abs(m2[0]) < 0.01
    assert abs(m1[1] - m2[1]) / abs(m2[1]) < 0.01


def test_fluctuation_report_roundtrip(small_ensembles):
    base, ensembles = small_ensembles
    res = ensembles[2]
    ens = jw.WorkEnsemble(res.work(), 2, 2)
    report = jw.fluctuation_report(ens, base.beta, 0.0, entropy=res.R)
    d = report.to_dict()
    assert d["n_traj"] == base.n_traj
    assert d["exp_neg_beta_W"]["mean"] == pytest.approx(np.exp(-base.beta * res.work()).mean())
    assert d["exp_neg_R"]["mean"] == pytest.approx(np.exp(-res.R).mean())
    assert d["mean_W"]["ci95"] == pytest.approx(1.96 * d["mean_W"]["sem"])
