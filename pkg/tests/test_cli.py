import math

import numpy as np
import pytest

from rotsplit import cli
from rotsplit.cli import CSV_HEADER, fitted_slope, main, make_reference, run_experiment
from rotsplit.config import (
    load_config,
    parse_config_text,
    preset_names,
    resolve_config_path,
)
from rotsplit.decomp import SolverError
from rotsplit.snapshots import read_snapshot

TINY = """
[grid]
l = 8
nx = 32
ny = 32
[hamiltonian]
omega0_sq = 2.0
modulation = sin_half_t
rotation = 0.2
[nonlinearity]
g = 1.0
[time]
final = 0.5
[run]
methods = ROT2, STD2
steps = 4, 6, 8
reference_multiplier = 8
[output]
csv = tiny.csv
"""


def write_tiny(tmp_path, text=TINY):
    p = tmp_path / "tiny.cfg"
    p.write_text(text)
    return p


def test_presets_resolve_and_validate():
    assert preset_names() == ["fig1", "fig2", "fig3", "fig4"]
    for name in preset_names():
        cfg = load_config(resolve_config_path(name))
        assert cfg.steps == sorted(cfg.steps)


def test_validate_ok_exit_code(capsys):
    assert main(["validate", "fig1"]) == 0
    assert "OK" in capsys.readouterr().out


def test_validate_rejects_odd_grid(tmp_path, capsys):
    p = write_tiny(tmp_path, TINY.replace("nx = 32", "nx = 33"))
    assert main(["validate", str(p)]) == 1
    assert "must be even" in capsys.readouterr().err


def test_validate_unknown_method_suggests(tmp_path, capsys):
    p = write_tiny(tmp_path, TINY.replace("ROT2, STD2", "ROT2, SDT2"))
    assert main(["validate", str(p)]) == 1
    err = capsys.readouterr().err
    assert "unknown method 'SDT2'" in err and "STD2" in err


def test_validate_unknown_key_line_anchored(tmp_path, capsys):
    text = TINY.replace("g = 1.0", "gee = 1.0")
    p = write_tiny(tmp_path, text)
    assert main(["validate", str(p)]) == 1
    err = capsys.readouterr().err
    line_no = text.splitlines().index("gee = 1.0") + 1
    assert f"{p}:{line_no}" in err and "did you mean 'g'" in err


def test_run_experiment_csv_schema_and_determinism(tmp_path):
    cfg = load_config(write_tiny(tmp_path))
    out1 = tmp_path / "r1"
    out2 = tmp_path / "r2"
    csv1 = run_experiment(cfg, out1, log=lambda *a, **k: None)
    csv2 = run_experiment(cfg, out2, threads=2, log=lambda *a, **k: None)
    lines1 = csv1.read_text().splitlines()
    lines2 = csv2.read_text().splitlines()
    assert lines1[0] == CSV_HEADER
    assert len(lines1) == 1 + 2 * 3

    def errors(lines):
        return [row.split(",")[3] for row in lines[1:]]

    assert errors(lines1) == errors(lines2)  # bit-identical l2_error columns

    rows = [row.split(",") for row in lines1[1:]]
    assert [r[0] for r in rows] == sorted(r[0] for r in rows)
    for r in rows:
        method, n = r[0], int(r[1])
        assert int(r[5]) == 6 * n, f"fft count for {method}"
        assert float(r[3]) > 0 and math.isfinite(float(r[3]))
        assert abs(float(r[4]) - 1.0) < 1e-9


def test_run_experiment_slope_extraction(tmp_path):
    cfg = load_config(write_tiny(tmp_path))
    csv_path = run_experiment(cfg, tmp_path / "out", log=lambda *a, **k: None)
    rows = [line.split(",") for line in csv_path.read_text().splitlines()[1:]]
    recs = {}
    for r in rows:
        recs.setdefault(r[0], []).append(
            cli.ConvergenceRecord(r[0], int(r[1]), float(r[2]), float(r[3]),
                                  float(r[4]), int(r[5]), float(r[6])))
    assert abs(fitted_slope(recs["STD2"]) - 2.0) < 0.6  # coarse run, loose band


def test_run_uses_reference_snapshot(tmp_path):
    cfg = load_config(write_tiny(tmp_path))
    ref_dir = tmp_path / "ref"
    cfg2 = load_config(write_tiny(tmp_path, TINY.replace(
        "reference_multiplier = 8", "reference_multiplier = 16")))
    snap = make_reference(cfg2, ref_dir, log=lambda *a, **k: None)
    text = TINY.replace("reference_multiplier = 8",
                        f"reference_snapshot = {snap}")
    p = tmp_path / "with_snap.cfg"
    p.write_text(text)
    cfg3 = load_config(p)
    csv_path = run_experiment(cfg3, tmp_path / "out3", config_dir=p.parent,
                              log=lambda *a, **k: None)
    assert csv_path.exists()


def test_make_reference_snapshot_and_determinism(tmp_path):
    cfg = load_config(write_tiny(tmp_path, TINY.replace(
        "reference_multiplier = 8", "reference_multiplier = 16")))
    p1 = make_reference(cfg, tmp_path / "a", log=lambda *a, **k: None)
    p2 = make_reference(cfg, tmp_path / "b", log=lambda *a, **k: None)
    assert p1.read_bytes() == p2.read_bytes()
    psi, t_read, comment = read_snapshot(p1)
    assert t_read == cfg.final
    assert "method=BM4-ROT" in comment and "n_steps=128" in comment


def test_make_reference_rejects_small_multiplier(tmp_path):
    cfg = load_config(write_tiny(tmp_path))
    with pytest.raises(ValueError):
        make_reference(cfg, tmp_path / "x", log=lambda *a, **k: None)


def test_reference_self_consistency(tmp_path):
    """Doubling the reference resolution moves it by far less than the
    coarsest measured method error."""
    cfg = load_config(write_tiny(tmp_path))
    grid = cfg.make_grid()
    from rotsplit.schemes import integrate
    ref1 = integrate(cfg.make_initial(cfg.make_grid()), "BM4-ROT",
                     cfg.make_hamiltonian(), cfg.make_term(), cfg.t0, cfg.final,
                     8 * max(cfg.steps))
    ref2 = integrate(cfg.make_initial(cfg.make_grid()), "BM4-ROT",
                     cfg.make_hamiltonian(), cfg.make_term(), cfg.t0, cfg.final,
                     16 * max(cfg.steps))
    drift = np.linalg.norm(ref1.psi.values - ref2.psi.values) * np.sqrt(grid.weight)
    coarsest = integrate(cfg.make_initial(cfg.make_grid()), "ROT2",
                         cfg.make_hamiltonian(), cfg.make_term(), cfg.t0, cfg.final,
                         min(cfg.steps))
    err = np.linalg.norm(coarsest.psi.values - ref2.psi.values) * np.sqrt(grid.weight)
    assert drift < 0.01 * err


def test_reference_phase_matches_eigenstate(tmp_path):
    """Autonomous isotropic reference reproduces the analytic eigenstate phase."""
    text = TINY.replace("omega0_sq = 2.0", "omega0_sq = 1.0") \
               .replace("modulation = sin_half_t", "modulation = constant") \
               .replace("g = 1.0", "g = 0.0") \
               .replace("l = 8", "l = 10") \
               .replace("nx = 32", "nx = 64").replace("ny = 32", "ny = 64")
    cfg = load_config(write_tiny(tmp_path, text))
    from rotsplit.schemes import integrate
    res = integrate(cfg.make_initial(cfg.make_grid()), "BM4-ROT",
                    cfg.make_hamiltonian(), cfg.make_term(), cfg.t0, cfg.final,
                    16 * max(cfg.steps))
    psi0 = cfg.make_initial(cfg.make_grid())
    expected = np.exp(-1j * (2.0 + cfg.rotation) * cfg.final) * psi0.values
    err = np.linalg.norm(res.psi.values - expected) * np.sqrt(cfg.make_grid().weight)
    assert err <= 1e-8


def test_solver_failure_recorded_as_nan_row(tmp_path, monkeypatch):
    cfg = load_config(write_tiny(tmp_path))

    real_integrate = cli.integrate

    def failing(psi0, method, h_a, term, t0, T, n_steps):
        if method == "STD2":
            raise SolverError("forced", residual=1.0, t=t0, h=(T - t0) / n_steps)
        return real_integrate(psi0, method, h_a, term, t0, T, n_steps)

    monkeypatch.setattr(cli, "integrate", failing)
    csv_path = run_experiment(cfg, tmp_path / "out", log=lambda *a, **k: None)
    rows = [line.split(",") for line in csv_path.read_text().splitlines()[1:]]
    std_rows = [r for r in rows if r[0] == "STD2"]
    assert std_rows and all(r[3] == "nan" for r in std_rows)
    assert all("solver failure" in r[7] for r in std_rows)
    rot_rows = [r for r in rows if r[0] == "ROT2"]
    assert all(math.isfinite(float(r[3])) for r in rot_rows)


def test_cli_run_end_to_end(tmp_path, capsys):
    p = write_tiny(tmp_path)
    assert main(["run", str(p), "--out", str(tmp_path / "out"), "--snapshot-final"]) == 0
    out = capsys.readouterr().out
    assert "[csv]" in out and "[slope]" in out
    assert (tmp_path / "out" / "tiny.csv").exists()
    assert (tmp_path / "out" / "tiny_ROT2_8.snap").exists()


def test_cli_presets_listing(capsys):
    assert main(["presets"]) == 0
    out = capsys.readouterr().out
    for name in ("fig1", "fig2", "fig3", "fig4"):
        assert name in out


def test_cli_missing_config_error(capsys):
    assert main(["run", "does-not-exist"]) == 2
    assert "no config file" in capsys.readouterr().err
