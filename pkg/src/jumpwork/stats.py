"""Work distributions, fluctuation functionals and entropy production.

All statistical errors are standard errors of the mean computed directly
from the (possibly nonlinearly transformed) samples, e.g. the uncertainty
of <exp(-beta W)> is std(exp(-beta W))/sqrt(N).  Confidence intervals are
quoted at 1.96 standard errors (95%).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .frames import frame_at
from .jump_engine import TrajectoryRecord, heat_of_jump
from .model import SystemConfig

__all__ = [
    "WorkEnsemble",
    "WorkHistogram",
    "FluctuationReport",
    "histogram",
    "moments",
    "jarzynski",
    "free_energy_difference",
    "entropy_production",
    "ift_check",
    "ift_statistics",
    "fluctuation_report",
]


@dataclass(frozen=True)
class WorkEnsemble:
    """Trajectory work samples with their dynamics and work orders."""

    samples: np.ndarray
    dynamics_order: int
    work_order: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if not np.all(np.isfinite(samples)):
            raise ValueError("work samples must be finite")
        object.__setattr__(self, "samples", samples)

    @property
    def n_traj(self) -> int:
        return self.samples.shape[0]


@dataclass(frozen=True)
class WorkHistogram:
    """Probability density on bins centered at integer multiples of the width."""

    bin_width: float
    centers: np.ndarray
    density: np.ndarray

    @property
    def occupied_bins(self) -> int:
        return int(np.count_nonzero(self.density))


@dataclass(frozen=True)
class FluctuationReport:
    """Exponentiated-work and moment summary of one work ensemble."""

    dynamics_order: int
    work_order: int
    n_traj: int
    jarzynski_mean: float
    jarzynski_sem: float
    jarzynski_deviation: float
    mean_work: float
    mean_work_sem: float
    second_moment: float
    second_moment_sem: float
    ift_mean: float | None = None
    ift_sem: float | None = None

    def to_dict(self) -> dict:
        out = {
            "dynamics_order": self.dynamics_order,
            "work_order": self.work_order,
            "n_traj": self.n_traj,
            "exp_neg_beta_W": {
                "mean": self.jarzynski_mean,
                "sem": self.jarzynski_sem,
                "ci95": 1.96 * self.jarzynski_sem,
                "deviation_from_unity": self.jarzynski_deviation,
            },
            "mean_W": {
                "mean": self.mean_work,
                "sem": self.mean_work_sem,
                "ci95": 1.96 * self.mean_work_sem,
            },
            "mean_W2": {
                "mean": self.second_moment,
                "sem": self.second_moment_sem,
                "ci95": 1.96 * self.second_moment_sem,
            },
        }
        if self.ift_mean is not None:
            out["exp_neg_R"] = {
                "mean": self.ift_mean,
                "sem": self.ift_sem,
                "ci95": 1.96 * (self.ift_sem or 0.0),
            }
        return out


def _sem(x: np.ndarray) -> float:
    n = x.shape[0]
    if n < 2:
        return float("nan")
    return float(np.std(x, ddof=1) / math.sqrt(n))


def histogram(ensemble: WorkEnsemble, bin_width: float) -> WorkHistogram:
    """Histogram with bins centered on integer multiples of bin_width.

    Centering keeps the discrete (order-0) work values, which sit at exact
    multiples of the bare gap, inside single bins.  The returned density is
    contiguous between the lowest and highest occupied bin and integrates
    to one: sum(density) * bin_width = 1.
    """
    if bin_width <= 0:
        raise ValueError(f"bin_width must be positive, got {bin_width}")
    if ensemble.n_traj == 0:
        raise ValueError("cannot histogram an empty ensemble")
    idx = np.rint(ensemble.samples / bin_width).astype(np.int64)
    lo, hi = int(idx.min()), int(idx.max())
    counts = np.bincount(idx - lo, minlength=hi - lo + 1)
    centers = np.arange(lo, hi + 1) * bin_width
    density = counts / (ensemble.n_traj * bin_width)
    return WorkHistogram(bin_width=bin_width, centers=centers, density=density)


def moments(ensemble: WorkEnsemble):
    """Sample mean of W and W^2 with their standard errors."""
    if ensemble.n_traj < 2:
        raise ValueError("need at least two samples for moments with errors")
    w = ensemble.samples
    w2 = w * w
    return float(w.mean()), float(w2.mean()), _sem(w), _sem(w2)


def jarzynski(ensemble: WorkEnsemble, beta: float, delta_f: float = 0.0):
    """<exp(-beta W)> against exp(-beta dF).

    Returns (mean, deviation, sem) where deviation =
    |1 - <exp(-beta W)> exp(beta dF)| and sem is the standard error of the
    exponentiated samples (scaled by exp(beta dF) to match the deviation).
    """
    x = np.exp(-beta * ensemble.samples)
    mean = float(x.mean())
    scale = math.exp(beta * delta_f)
    return mean, abs(1.0 - mean * scale), _sem(x) * scale


def _log_2cosh(x: float) -> float:
    """ln(2 cosh x), stable for large |x|."""
    ax = abs(x)
    return ax + math.log1p(math.exp(-2.0 * ax))


def free_energy_difference(config: SystemConfig, t_init: float, t_final: float) -> float:
    """Equilibrium free-energy difference -ln[Z(t_final)/Z(t_init)]/beta.

    Z(t) = 2 cosh(beta * gap1(t) / 2) is the partition function of the
    instantaneous adiabatic spectrum.
    """
    beta = config.beta
    gap_i = frame_at(config, t_init, 1).omega01
    gap_f = frame_at(config, t_final, 1).omega01
    return -(_log_2cosh(0.5 * beta * gap_f) - _log_2cosh(0.5 * beta * gap_i)) / beta


def entropy_production(record: TrajectoryRecord, config: SystemConfig) -> float:
    """Trajectory entropy production from boundary weights and rate ratios.

    R = ln[ P(E_init) / P_rev(E_final) * prod_j Gamma_fwd(t_j)/Gamma_rev(t_j) ]
    with Gibbs boundary weights taken at t_init (forward) and t_final
    (reversed).  A zero forward or reversed rate makes R infinite; that
    cannot occur for the ohmic spectrum at finite temperature.
    """
    beta = config.beta
    gap_i = frame_at(config, 0.0, 1).omega01  # boundary measurements are order-1
    gap_f = frame_at(config, config.t_final, 1).omega01
    ln_z_i = _log_2cosh(0.5 * beta * gap_i)
    ln_z_f = _log_2cosh(0.5 * beta * gap_f)
    r = beta * (record.E_final - record.E_init) + (ln_z_f - ln_z_i)
    for ev in record.events:
        if ev.gamma_forward == 0.0 or ev.gamma_reversed == 0.0:
            return math.inf
        if ev.channel != 2:
            r += math.log(ev.gamma_forward) - math.log(ev.gamma_reversed)
    return r


def ift_check(records, config: SystemConfig):
    """<exp(-R)> with standard error over a collection of trajectory records."""
    r = np.array([entropy_production(rec, config) for rec in records])
    return ift_statistics(r)


def ift_statistics(r: np.ndarray):
    """<exp(-R)> with standard error from an array of entropy productions."""
    x = np.exp(-np.asarray(r, dtype=np.float64))
    return float(x.mean()), _sem(x)


def fluctuation_report(
    ensemble: WorkEnsemble,
    beta: float,
    delta_f: float = 0.0,
    entropy: np.ndarray | None = None,
) -> FluctuationReport:
    """Bundle the Jarzynski functional and first two moments of one ensemble."""
    mean_exp, deviation, sem_exp = jarzynski(ensemble, beta, delta_f)
    mean_w, mean_w2, sem_w, sem_w2 = moments(ensemble)
    ift_mean = ift_sem = None
    if entropy is not None:
        ift_mean, ift_sem = ift_statistics(entropy)
    return FluctuationReport(
        dynamics_order=ensemble.dynamics_order,
        work_order=ensemble.work_order,
        n_traj=ensemble.n_traj,
        jarzynski_mean=mean_exp,
        jarzynski_sem=sem_exp,
        jarzynski_deviation=deviation,
        mean_work=mean_w,
        mean_work_sem=sem_w,
        second_moment=mean_w2,
        second_moment_sem=sem_w2,
        ift_mean=ift_mean,
        ift_sem=ift_sem,
    )
