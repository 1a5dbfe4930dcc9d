"""Command-line front end: config ingestion, run orchestration, file outputs.

A run is described by a flat key=value config file plus command-line flag
overrides (flags win).  Five modes are available:

  alphas             local adiabatic parameters over one drive cycle
  populations        master-equation excited populations for n = 0, 1, 2
  work-distribution  consistent work ensembles (order-n work, order-n dynamics)
  mixed-order        order-2 dynamics re-scored with order-0/1/2 work variables
  ift-check          entropy-production and Jarzynski functionals at one order

Outputs are written atomically into --out-dir: a mode-specific CSV
(alphas.csv, populations.csv or work_hist.csv), a deterministic
summary.json keyed by the configuration hash, and run_meta.json with
non-deterministic provenance (wall time).  Rerunning a manifest reproduces
summary.json byte-for-byte regardless of the worker count.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .frames import alphas_over_cycle
from .jump_engine import EnsembleResult, run_ensemble, run_trajectory
from .master_eq import integrate_populations
from .model import SystemConfig
from .stats import (
    WorkEnsemble,
    fluctuation_report,
    free_energy_difference,
    histogram,
    ift_statistics,
)
from .tables import step_tables

__all__ = ["RunManifest", "parse_config", "run", "main"]

MODES = ("populations", "alphas", "work-distribution", "mixed-order", "ift-check")

_MANIFEST_KEYS = ("mode", "out_dir", "workers", "bin_width", "log_trajectories", "me_steps_per_cycle")


@dataclass(frozen=True)
class RunManifest:
    """Fully resolved run description."""

    config: SystemConfig
    mode: str
    out_dir: Path
    workers: int
    bin_width: float
    log_trajectories: bool
    me_steps_per_cycle: int
    config_hash: str


def config_hash(config: SystemConfig) -> str:
    """Deterministic hash over every physical and numerical parameter."""
    payload = {}
    for f in dataclasses.fields(SystemConfig):
        value = getattr(config, f.name)
        if isinstance(value, complex):
            value = [value.real, value.imag]
        payload[f.name] = value
    blob = json.dumps(payload, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _coerce(name: str, kind, raw: str):
    try:
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        if kind is complex:
            return complex(raw.replace(" ", ""))
        if kind is bool:
            return raw.strip().lower() in ("1", "true", "yes", "on")
        return raw
    except ValueError as exc:
        raise ValueError(f"invalid value for '{name}': {raw!r}") from exc


def _read_config_file(path: str | Path) -> dict:
    values = {}
    text = Path(path).read_text()
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        values[key] = raw
    return values


def parse_config(path: str | Path | None = None, overrides: dict | None = None) -> RunManifest:
    """Resolve a manifest from an optional config file plus flag overrides.

    Unknown keys, malformed values and out-of-range orders raise ValueError
    with the offending field named; flags win over file entries; anything
    left unset falls back to the built-in defaults.
    """
    # field annotations are strings under deferred-annotation semantics
    kinds = {}
    for f in dataclasses.fields(SystemConfig):
        ann = str(f.type)
        if "complex" in ann:
            kinds[f.name] = complex
        elif "int" in ann:
            kinds[f.name] = int
        else:
            kinds[f.name] = float

    raw: dict = {}
    if path is not None:
        raw.update(_read_config_file(path))
    for key, value in (overrides or {}).items():
        if value is not None:
            raw[key] = value

    cfg_kwargs: dict = {}
    manifest_kwargs: dict = {
        "mode": "work-distribution",
        "out_dir": Path("runs"),
        "workers": 1,
        "bin_width": 0.01,
        "log_trajectories": False,
        "me_steps_per_cycle": 100_000,
    }
    for key, value in raw.items():
        if key in kinds:
            cfg_kwargs[key] = _coerce(key, kinds[key], value) if isinstance(value, str) else value
        elif key in _MANIFEST_KEYS:
            if key == "out_dir":
                manifest_kwargs[key] = Path(value)
            elif key == "mode":
                manifest_kwargs[key] = str(value)
            elif key == "bin_width":
                manifest_kwargs[key] = _coerce(key, float, value) if isinstance(value, str) else float(value)
            elif key == "log_trajectories":
                manifest_kwargs[key] = _coerce(key, bool, value) if isinstance(value, str) else bool(value)
            else:
                manifest_kwargs[key] = _coerce(key, int, value) if isinstance(value, str) else int(value)
        else:
            raise ValueError(f"unknown configuration field '{key}'")

    if manifest_kwargs["mode"] not in MODES:
        raise ValueError(f"unknown mode '{manifest_kwargs['mode']}'; choose from {', '.join(MODES)}")
    if manifest_kwargs["workers"] < 1:
        raise ValueError(f"workers must be >= 1, got {manifest_kwargs['workers']}")

    config = SystemConfig(**cfg_kwargs)
    return RunManifest(config=config, config_hash=config_hash(config), **manifest_kwargs)


def _write_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> None:
    data = np.column_stack(columns)
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in data:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _ensemble_section(result: EnsembleResult, work_order: int, beta: float, delta_f: float) -> dict:
    ens = WorkEnsemble(result.work(work_order), result.order, work_order)
    entropy = result.R if work_order == result.order else None
    report = fluctuation_report(ens, beta, delta_f, entropy=entropy)
    section = report.to_dict()
    section["mean_jumps"] = float(result.n_jumps.mean())
    return section


def _log_trajectories(path: Path, config: SystemConfig, order: int) -> None:
    """Reference-path jump log; practical only for small ensembles."""
    tables = step_tables(config, order)
    with open(path, "w") as fh:
        fh.write("# trajectory traj_index,k_init,l_final,E_init,E_final\n")
        fh.write("# jump traj_index,t_j,channel,omega01_n,gamma_fwd,gamma_rev\n")
        for i in range(config.n_traj):
            rec = run_trajectory(config, i, tables=tables)
            fh.write(
                f"trajectory,{i},{rec.k_init},{rec.l_final},{rec.E_init:.17g},{rec.E_final:.17g}\n"
            )
            for ev in rec.events:
                fh.write(
                    f"jump,{i},{ev.t:.17g},{ev.channel},{ev.omega01:.17g},"
                    f"{ev.gamma_forward:.17g},{ev.gamma_reversed:.17g}\n"
                )


def _common_histogram(works: dict[int, np.ndarray], orders, dynamics, bin_width: float):
    """Density columns for all orders on one shared bin grid."""
    hists = {n: histogram(WorkEnsemble(works[n], dynamics[n], n), bin_width) for n in orders}
    lo = min(int(round(h.centers[0] / bin_width)) for h in hists.values())
    hi = max(int(round(h.centers[-1] / bin_width)) for h in hists.values())
    centers = np.arange(lo, hi + 1) * bin_width
    columns = {}
    for n, h in hists.items():
        dens = np.zeros(hi - lo + 1)
        start = int(round(h.centers[0] / bin_width)) - lo
        dens[start : start + h.density.shape[0]] = h.density
        columns[n] = dens
    return centers, columns


def run(manifest: RunManifest) -> int:
    """Execute one mode; returns 0 on success.

    Output files are written to temporary names and renamed at the end, so
    a failed run leaves no partial outputs behind.
    """
    config = manifest.config
    out_dir = manifest.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    t_start = time.time()

    summary: dict = {
        "mode": manifest.mode,
        "config_hash": manifest.config_hash,
        "seed": config.seed,
        "n_traj": 0,
    }
    staged: dict[str, Path] = {}

    def stage(name: str) -> Path:
        tmp = out_dir / (name + ".tmp")
        staged[name] = tmp
        return tmp

    try:
        if manifest.mode == "alphas":
            t, a1, a2 = alphas_over_cycle(config)
            _write_csv(stage("alphas.csv"), ["t_over_Tdrive", "alpha1", "alpha2"], [t / config.t_drive, a1, a2])
            summary["alpha1_max"] = float(a1.max())
            summary["alpha2_max"] = float(a2.max())

        elif manifest.mode == "populations":
            series = integrate_populations(config, steps_per_cycle=manifest.me_steps_per_cycle)
            _write_csv(
                stage("populations.csv"),
                ["t_over_Tdrive", "rho_ee_n0", "rho_ee_n1", "rho_ee_n2"],
                [series.t / config.t_drive, series.series[0], series.series[1], series.series[2]],
            )
            summary["warnings"] = series.meta["warnings"]
            summary["rho_ee_final"] = {str(n): float(series.series[n][-1]) for n in (0, 1, 2)}

        elif manifest.mode == "work-distribution":
            delta_f = free_energy_difference(config, 0.0, config.t_final)
            works, dynamics = {}, {}
            for n in (0, 1, 2):
                cfg_n = dataclasses.replace(config, n_order=n)
                result = run_ensemble(cfg_n, workers=manifest.workers)
                works[n] = result.work(n)
                dynamics[n] = n
                summary[f"consistent_n{n}"] = _ensemble_section(result, n, config.beta, delta_f)
            centers, columns = _common_histogram(works, (0, 1, 2), dynamics, manifest.bin_width)
            _write_csv(
                stage("work_hist.csv"),
                ["W_over_hw0", "density_n0", "density_n1", "density_n2"],
                [centers, columns[0], columns[1], columns[2]],
            )
            summary["delta_F"] = delta_f
            summary["n_traj"] = config.n_traj

        elif manifest.mode == "mixed-order":
            delta_f = free_energy_difference(config, 0.0, config.t_final)
            cfg2 = dataclasses.replace(config, n_order=2)
            result = run_ensemble(cfg2, workers=manifest.workers)
            works = {n: result.work(n) for n in (0, 1, 2)}
            for n in (0, 1, 2):
                summary[f"mixed_n{n}"] = _ensemble_section(result, n, config.beta, delta_f)
            centers, columns = _common_histogram(works, (0, 1, 2), {n: 2 for n in (0, 1, 2)}, manifest.bin_width)
            _write_csv(
                stage("work_hist.csv"),
                ["W_over_hw0", "density_n0", "density_n1", "density_n2"],
                [centers, columns[0], columns[1], columns[2]],
            )
            summary["delta_F"] = delta_f
            summary["n_traj"] = config.n_traj

        elif manifest.mode == "ift-check":
            delta_f = free_energy_difference(config, 0.0, config.t_final)
            result = run_ensemble(config, workers=manifest.workers)
            summary[f"consistent_n{result.order}"] = _ensemble_section(
                result, result.order, config.beta, delta_f
            )
            ift_mean, ift_sem = ift_statistics(result.R)
            identity_residual = float(
                np.max(np.abs(result.R - config.beta * (result.work() - delta_f)))
            )
            summary["exp_neg_R"] = {"mean": ift_mean, "sem": ift_sem, "ci95": 1.96 * ift_sem}
            summary["max_R_identity_residual"] = identity_residual
            summary["delta_F"] = delta_f
            summary["n_traj"] = config.n_traj

        if manifest.log_trajectories and manifest.mode in ("work-distribution", "mixed-order", "ift-check"):
            _log_trajectories(stage("trajectories.log"), config, config.n_order)

        _write_json(stage("summary.json"), summary)
        meta = {
            "config_hash": manifest.config_hash,
            "seed": config.seed,
            "n_traj": summary["n_traj"],
            "wall_time_s": time.time() - t_start,
            "workers": manifest.workers,
            "mode": manifest.mode,
        }
        _write_json(stage("run_meta.json"), meta)
    except Exception:
        for tmp in staged.values():
            tmp.unlink(missing_ok=True)
        raise

    for name, tmp in staged.items():
        os.replace(tmp, out_dir / name)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="jumpwork",
        description="Quantum-jump work statistics of a driven dissipative two-level system",
    )
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--n-order", dest="n_order", type=int, help="renormalization order 0, 1 or 2")
    p.add_argument("--n-traj", dest="n_traj", type=int)
    p.add_argument("--n-steps", dest="n_steps", type=int)
    p.add_argument("--n-cycles", dest="n_cycles", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--workers", type=int)
    p.add_argument("--omega0", type=float)
    p.add_argument("--lambda0", type=float)
    p.add_argument("--omega-d", dest="omega_d", type=float)
    p.add_argument("--g", type=str, help="complex coupling, e.g. '0.1414' or '0.1+0.05j'")
    p.add_argument("--mu", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--T0", dest="T0", type=float)
    p.add_argument("--bin-width", dest="bin_width", type=float, help="work histogram bin width")
    p.add_argument(
        "--me-steps-per-cycle",
        dest="me_steps_per_cycle",
        type=int,
        help="master-equation integrator steps per drive cycle",
    )
    p.add_argument(
        "--log-trajectories",
        dest="log_trajectories",
        action="store_true",
        default=None,
        help="write a per-jump trajectory log (reference path; small runs only)",
    )
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    overrides = {
        key: value
        for key, value in vars(args).items()
        if key != "config" and value is not None
    }
    try:
        manifest = parse_config(args.config, overrides)
        return run(manifest)
    except (ValueError, OSError) as exc:
        print(f"jumpwork: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
