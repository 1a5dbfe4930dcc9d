"""Quantum-jump work statistics for a driven dissipative two-level system.

The package unravels a drive-dressed Lindblad equation into quantum-jump
trajectories at renormalization orders n = 0, 1, 2 and collects the work,
heat and entropy-production statistics needed to test the Jarzynski
equality and the integral fluctuation theorem at ensemble sizes of
10^5 to 10^7 trajectories.
"""

from .model import SystemConfig, DriveProtocol, drive_at, hamiltonian_at
from .frames import (
    Frame,
    FrameGrid,
    UnsupportedOrderError,
    frame0,
    frame1,
    frame2,
    frame_at,
    frame_grid,
    alphas_over_cycle,
)
from .dissipation import RateSet, spectral_density, rates_at, reversed_rates
from .master_eq import PopulationSeries, lindblad_rhs, integrate_populations, bloch_crosscheck
from .jump_engine import (
    JumpEvent,
    TrajectoryRecord,
    EnsembleResult,
    effective_hamiltonian,
    no_jump_step,
    jump_probabilities,
    collapse,
    initial_measurement,
    final_measurement,
    heat_of_jump,
    run_trajectory,
    reassign_work,
    run_ensemble,
)
from .stats import (
    WorkEnsemble,
    WorkHistogram,
    FluctuationReport,
    histogram,
    moments,
    jarzynski,
    free_energy_difference,
    entropy_production,
    ift_check,
    ift_statistics,
    fluctuation_report,
)

__version__ = "0.1.0"
