"""Benchmark command line: run convergence experiments, generate reference
solutions, validate configs, list presets.

``rotsplit run <config|preset> [--out DIR] [--threads N] [--snapshot-final]``
writes one ConvergenceRecord CSV row per (method, step count), comparing each
run against a fine-step reference.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import ExperimentConfig, load_config, parse_config_text, preset_names, resolve_config_path
from .decomp import SolverError
from .schemes import integrate
from .snapshots import read_snapshot, write_snapshot

CSV_HEADER = "method,n_steps,h,l2_error,final_norm,fft_count,wall_time_ms,note"

__all__ = ["ConvergenceRecord", "run_experiment", "make_reference", "fitted_slope",
           "CSV_HEADER", "main"]


@dataclass
class ConvergenceRecord:
    method: str
    n_steps: int
    h: float
    l2_error: float
    final_norm: float
    fft_count: int
    wall_time_ms: float
    note: str = ""

    def to_csv_row(self) -> str:
        return (f"{self.method},{self.n_steps},{self.h!r},{self.l2_error!r},"
                f"{self.final_norm!r},{self.fft_count},{self.wall_time_ms:.3f},"
                f"{self.note}")


def _reference_values(cfg: ExperimentConfig, config_dir: Path, log) -> np.ndarray:
    if cfg.reference_snapshot:
        path = (config_dir / cfg.reference_snapshot).resolve()
        psi, t_snap, comment = read_snapshot(path, grid=cfg.make_grid())
        log(f"[reference] loaded {path} ({comment or 'no comment'})")
        if abs(t_snap - cfg.final) > 1e-12:
            raise ValueError(f"reference snapshot is at t={t_snap}, config ends at {cfg.final}")
        return psi.values
    n_ref = cfg.reference_multiplier * max(cfg.steps)
    t0 = time.perf_counter()
    res = integrate(cfg.make_initial(cfg.make_grid()), cfg.reference_method,
                    cfg.make_hamiltonian(), cfg.make_term(), cfg.t0, cfg.final, n_ref)
    log(f"[reference] {cfg.reference_method} with {n_ref} steps "
        f"({time.perf_counter() - t0:.1f} s), final norm {res.norms[-1]:.12f}, "
        f"boundary mass {res.boundary_mass[-1]:.3e}")
    return res.psi.values


def _run_one(cfg: ExperimentConfig, method: str, n: int, ref_values: np.ndarray):
    grid = cfg.make_grid()
    psi0 = cfg.make_initial(grid)
    h = (cfg.final - cfg.t0) / n
    t0 = time.perf_counter()
    try:
        res = integrate(psi0, method, cfg.make_hamiltonian(), cfg.make_term(),
                        cfg.t0, cfg.final, n)
    except SolverError as exc:
        ms = 1e3 * (time.perf_counter() - t0)
        return ConvergenceRecord(method, n, h, float("nan"), float("nan"), 0, ms,
                                 note=f"solver failure at t={exc.t} h={exc.h} "
                                      f"residual={exc.residual:.2e}"), None
    ms = 1e3 * (time.perf_counter() - t0)
    err = float(np.sqrt(np.sum(np.abs(res.psi.values - ref_values) ** 2) * grid.weight))
    return ConvergenceRecord(method, n, h, err, float(res.norms[-1]), res.fft_count, ms), res


def fitted_slope(records: list[ConvergenceRecord], n_points: int = 3) -> float:
    """Least-squares slope of log(error) vs log(h) over the finest n_points rows."""
    rows = sorted((r for r in records if math.isfinite(r.l2_error) and r.l2_error > 0),
                  key=lambda r: r.n_steps)[-n_points:]
    if len(rows) < 2:
        return float("nan")
    x = np.log([r.h for r in rows])
    y = np.log([r.l2_error for r in rows])
    return float(np.polyfit(x, y, 1)[0])


def run_experiment(cfg: ExperimentConfig, out_dir: Path, threads: int = 1,
                   snapshot_final: bool = False, config_dir: Path | None = None,
                   log=print) -> Path:
    """Integrate every (method, n_steps) pair, compare to the reference, and
    write the ConvergenceRecord CSV.  Jobs may run in parallel; rows are
    written in deterministic sorted order afterwards."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    config_dir = Path(config_dir) if config_dir else Path.cwd()
    ref_values = _reference_values(cfg, config_dir, log)

    jobs = [(m, n) for m in cfg.methods for n in cfg.steps]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(lambda mn: _run_one(cfg, *mn, ref_values), jobs))
    else:
        outcomes = [_run_one(cfg, m, n, ref_values) for m, n in jobs]

    records = []
    for (method, n), (rec, res) in zip(jobs, outcomes):
        records.append(rec)
        if snapshot_final and res is not None:
            snap = out_dir / f"{Path(cfg.csv).stem}_{method}_{n}.snap"
            write_snapshot(snap, res.psi, cfg.final, comment=f"method={method};n_steps={n}")

    records.sort(key=lambda r: (r.method, r.n_steps))
    csv_path = out_dir / cfg.csv
    lines = [CSV_HEADER] + [r.to_csv_row() for r in records]
    csv_path.write_text("\n".join(lines) + "\n")
    log(f"[csv] {csv_path} ({len(records)} rows)")
    for m in cfg.methods:
        s = fitted_slope([r for r in records if r.method == m])
        log(f"[slope] {m} measured order {s:.2f} (three finest step counts)")
    return csv_path


def make_reference(cfg: ExperimentConfig, out_dir: Path, log=print) -> Path:
    """Integrate the reference method at reference_multiplier x the finest
    tested step count and write the snapshot."""
    if cfg.reference_multiplier < 16:
        raise ValueError("reference_multiplier must be >= 16 for a trusted reference")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    n_ref = cfg.reference_multiplier * max(cfg.steps)
    res = integrate(cfg.make_initial(cfg.make_grid()), cfg.reference_method,
                    cfg.make_hamiltonian(), cfg.make_term(), cfg.t0, cfg.final, n_ref)
    path = out_dir / f"{Path(cfg.csv).stem}_reference.snap"
    write_snapshot(path, res.psi, cfg.final,
                   comment=f"method={cfg.reference_method};n_steps={n_ref};t={cfg.final!r}")
    log(f"[reference] wrote {path} ({cfg.reference_method}, {n_ref} steps, "
        f"final norm {res.norms[-1]:.12f})")
    return path


def _cmd_run(args) -> int:
    path = resolve_config_path(args.config)
    cfg = load_config(path)
    run_experiment(cfg, Path(args.out), threads=args.threads,
                   snapshot_final=args.snapshot_final, config_dir=path.parent)
    return 0


def _cmd_reference(args) -> int:
    path = resolve_config_path(args.config)
    cfg = load_config(path)
    make_reference(cfg, Path(args.out))
    return 0


def _cmd_validate(args) -> int:
    path = Path(args.config)
    if not path.exists():
        try:
            path = resolve_config_path(args.config)
        except FileNotFoundError as exc:
            print(exc, file=sys.stderr)
            return 2
    cfg, errors = parse_config_text(path.read_text())
    if errors:
        for e in errors:
            print(e.render(path), file=sys.stderr)
        return 1
    print(f"{path}: OK ({len(cfg.methods)} methods x {len(cfg.steps)} step counts, "
          f"grid {cfg.nx}x{cfg.ny})")
    return 0


def _cmd_presets(_args) -> int:
    from importlib import resources
    for name in preset_names():
        text = resources.files("rotsplit").joinpath(f"presets/{name}.cfg").read_text()
        first = next((l[1:].strip() for l in text.splitlines() if l.startswith("#")), "")
        print(f"{name:8s} {first}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="rotsplit",
        description="Convergence benchmarks for Fourier-splitting propagators "
                    "of rotating condensates in time-dependent traps.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config or preset")
    p_run.add_argument("config", help="config file path or preset name")
    p_run.add_argument("--out", default=".", help="output directory")
    p_run.add_argument("--threads", type=int, default=1)
    p_run.add_argument("--snapshot-final", action="store_true",
                       help="write a snapshot of every final state")
    p_run.set_defaults(func=_cmd_run)

    p_ref = sub.add_parser("reference", help="write a fine-step reference snapshot")
    p_ref.add_argument("config")
    p_ref.add_argument("--out", default=".")
    p_ref.set_defaults(func=_cmd_reference)

    p_val = sub.add_parser("validate", help="statically validate a config file")
    p_val.add_argument("config")
    p_val.set_defaults(func=_cmd_validate)

    p_pre = sub.add_parser("presets", help="list shipped experiment presets")
    p_pre.set_defaults(func=_cmd_presets)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
