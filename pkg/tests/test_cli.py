"""Config grammar, exit codes, manifest-first output discipline, determinism."""

import filecmp
import json
import os
import subprocess
import sys

import numpy as np
import pytest

from logchoquard import (
    ConfigError,
    Field,
    Grid,
    gaussian_field,
    load_field,
    make_kernel_table,
    padded_convolve,
    save_field,
)
from logchoquard.cli import (
    EXIT_CONFIG,
    EXIT_INVARIANT,
    EXIT_NO_CONVERGENCE,
    EXIT_OK,
    config_hash,
    main,
    parse_config,
    serialize_config,
)
from logchoquard.solver import TRACE_COLUMNS


def write_config(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return str(p)


# ------------------------------------------------------------- config parsing


def test_defaults_on_empty_config():
    grid, pot, action, cfg, extra = parse_config("")
    assert (grid.L, grid.n) == (6.0, 64)
    assert pot.ess_inf == pytest.approx(1.0)
    assert action.kind == "trivial"
    assert extra["k"] == 2
    assert cfg.max_iters == 1200
    assert cfg.cerami_tol == 1e-6
    assert cfg.seed == 0


def test_serialize_is_canonical_fixed_point():
    text = "n = 32\nbox = 4.0\nseed = 9\n"
    _, _, _, _, extra = parse_config(text)
    canon = serialize_config(extra["pairs"])
    # sorted, one key = value per line, and a fixed point of reparsing
    assert canon == serialize_config(parse_config(canon)[4]["pairs"])
    keys = [line.split(" = ")[0] for line in canon.strip().splitlines()]
    assert keys == sorted(keys)
    assert "n = 32" in canon and "box = 4.0" in canon and "seed = 9" in canon


def test_comments_and_blank_lines_ignored():
    _, _, _, _, extra = parse_config("# comment\n\n  \nn = 32\n")
    assert extra["pairs"]["n"] == "32"


def test_unknown_key_reports_line():
    with pytest.raises(ConfigError, match="line 3: unknown key 'bogus'"):
        parse_config("# header\nn = 32\nbogus = 1\n")


def test_missing_equals_reports_line():
    with pytest.raises(ConfigError, match="line 2: expected key = value"):
        parse_config("n = 32\njust words\n")


def test_empty_value_reports_line():
    with pytest.raises(ConfigError, match="line 1: empty value"):
        parse_config("n =\n")


def test_bad_grid_rejected():
    with pytest.raises(ConfigError, match="bad grid"):
        parse_config("n = 33\n")
    with pytest.raises(ConfigError, match="bad grid"):
        parse_config("box = -2\n")


def test_bad_solver_settings_rejected():
    with pytest.raises(ConfigError, match="bad solver settings"):
        parse_config("max_iters = many\n")
    with pytest.raises(ConfigError, match="bad solver settings"):
        parse_config("k = -1\n")


def test_potential_kinds(tmp_path):
    grid, pot, _, _, _ = parse_config("a = const:2.5\n")
    assert pot.ess_inf == pytest.approx(2.5)

    _, pot, _, _, _ = parse_config("a = cos2d:1,0.25,0.5,0.5\n")
    assert pot.ess_inf == pytest.approx(0.75)
    assert pot.sup_norm == pytest.approx(1.25)

    _, pot, _, _, _ = parse_config("a = radial-well:0.5,2\n")
    assert pot.a.values[grid.n // 2, grid.n // 2] == pytest.approx(0.5)

    a = Field(Grid(L=6.0, n=32), np.full((32, 32), 1.75))
    path = tmp_path / "a.chq"
    save_field(str(path), a)
    _, pot, _, _, _ = parse_config("n = 32\na = file:%s\n" % path)
    assert pot.ess_inf == pytest.approx(1.75)

    with pytest.raises(ConfigError, match="does not match"):
        parse_config("n = 64\na = file:%s\n" % path)
    with pytest.raises(ConfigError, match="unknown potential kind"):
        parse_config("a = sombrero:1\n")
    with pytest.raises(ConfigError, match="bad potential spec"):
        parse_config("a = cos2d:1,2\n")


def test_symmetry_kinds():
    specs = {
        "trivial": ("trivial", None),
        "radial": ("radial", None),
        "rot-zeta:3": ("rot-zeta", 3),
        "rot:4": ("rot-zeta", 4),
        "lattice:2,0;0,2": ("lattice", None),
        "glide:1.5": ("glide", None),
    }
    for spec, (kind, m) in specs.items():
        _, _, action, _, _ = parse_config("symmetry = %s\n" % spec)
        assert action.kind == kind
        if m is not None:
            assert action.m == m
    _, _, act_z, _, _ = parse_config("symmetry = rot-zeta:3\n")
    _, _, act_p, _, _ = parse_config("symmetry = rot:3\n")
    assert act_z.zeta_nontrivial and not act_p.zeta_nontrivial

    with pytest.raises(ConfigError, match="unknown symmetry kind"):
        parse_config("symmetry = moebius\n")
    with pytest.raises(ConfigError, match="bad symmetry spec"):
        parse_config("symmetry = rot-zeta:0\n")
    with pytest.raises(ConfigError, match="bad symmetry spec"):
        parse_config("symmetry = lattice:1,0\n")


def test_config_hash_deterministic_and_sensitive():
    pairs = parse_config("n = 32\n")[4]["pairs"]
    again = parse_config("# noise\nn = 32\n")[4]["pairs"]
    assert config_hash(pairs) == config_hash(again)
    other = dict(pairs, seed="1")
    assert config_hash(other) != config_hash(pairs)
    assert len(config_hash(pairs)) == 64  # sha256 hex


# --------------------------------------------------------------- exit codes


def test_main_missing_config_file_exits_2(capsys):
    rc = main(["info", "--config", "/no/such/file.cfg"])
    assert rc == EXIT_CONFIG
    assert "E-CONFIG" in capsys.readouterr().err


def test_main_bad_config_exits_2(tmp_path, capsys):
    cfg = write_config(tmp_path, "bogus = 1\n")
    rc = main(["info", "--config", cfg])
    assert rc == EXIT_CONFIG
    err = capsys.readouterr().err
    assert "E-CONFIG" in err and "line 1" in err


def test_ground_state_indefinite_exits_2(tmp_path, capsys):
    cfg = write_config(tmp_path, "n = 32\na = cos2d:0,0.5,0.25,0.25\n")
    rc = main(["ground-state", "--config", cfg, "--out", str(tmp_path / "o")])
    assert rc == EXIT_CONFIG
    assert "indefinite potential" in capsys.readouterr().err


def test_solve_budget_exhaustion_exits_3(tmp_path, capsys):
    cfg = write_config(tmp_path, "n = 32\nmax_iters = 2\n")
    out = tmp_path / "o"
    rc = main(["solve", "--config", cfg, "--out", str(out)])
    assert rc == EXIT_NO_CONVERGENCE
    # outputs still written for post-mortem inspection
    assert (out / "manifest.json").exists()
    assert (out / "solution.chq").exists()
    assert (out / "trace.csv").exists()
    assert "converged=False" in capsys.readouterr().out


# ------------------------------------------------------------------ battery


def test_check_battery_passes(capsys):
    rc = main(["check"])
    assert rc == EXIT_OK
    out = capsys.readouterr().out
    assert "all invariant checks passed" in out
    for name in ("B0-splitting", "riesz-identity", "nehari-projection", "metric-M4"):
        assert name in out
    assert "FAIL" not in out


def test_corrupted_kernel_fails_battery(monkeypatch, capsys):
    monkeypatch.setenv("LOGCHOQUARD_CORRUPT_KERNEL", "1")
    rc = main(["check", "--n", "16"])
    assert rc == EXIT_INVARIANT
    out = capsys.readouterr().out
    line = [l for l in out.splitlines() if l.startswith("B0-splitting")]
    assert line and "FAIL" in line[0]


# ---------------------------------------------------------- run commands


def test_crash_hook_leaves_manifest_only(monkeypatch, tmp_path):
    monkeypatch.setenv("LOGCHOQUARD_CRASH_AFTER_MANIFEST", "1")
    out = tmp_path / "o"
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--out", str(out), "--n", "32"])
    assert exc.value.code == 70
    assert (out / "manifest.json").exists()
    assert not (out / "solution.chq").exists()
    assert not (out / "trace.csv").exists()


def test_solve_writes_outputs(tmp_path, capsys):
    out = tmp_path / "o"
    rc = main(["solve", "--out", str(out), "--n", "32"])
    assert rc == EXIT_OK
    man = json.loads((out / "manifest.json").read_text())
    assert man["command"] == "solve"
    assert man["grid"] == {"L": 6.0, "n": 32}
    assert man["outputs"] == ["solution.chq", "trace.csv"]
    assert man["config_hash"] == config_hash(parse_config("n = 32\n")[4]["pairs"])
    u = load_field(str(out / "solution.chq"))
    assert (u.grid.L, u.grid.n) == (6.0, 32)
    lines = (out / "trace.csv").read_text().splitlines()
    assert lines[0] == ",".join(TRACE_COLUMNS)
    assert len(lines) >= 2
    assert "converged=True" in capsys.readouterr().out


def test_solve_deterministic_bitwise(tmp_path):
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    assert main(["solve", "--out", str(out1), "--n", "32"]) == EXIT_OK
    assert main(["solve", "--out", str(out2), "--n", "32"]) == EXIT_OK
    assert filecmp.cmp(out1 / "solution.chq", out2 / "solution.chq", shallow=False)
    assert filecmp.cmp(out1 / "trace.csv", out2 / "trace.csv", shallow=False)


def test_solve_start_field_grid_mismatch_exits_2(tmp_path, capsys):
    u = gaussian_field(Grid(L=6.0, n=16), width=0.6)
    start = tmp_path / "start.chq"
    save_field(str(start), u)
    rc = main(["solve", "--out", str(tmp_path / "o"), "--n", "32", "--start", str(start)])
    assert rc == EXIT_CONFIG
    assert "does not match" in capsys.readouterr().err


def test_multistart_writes_results_csv(tmp_path, capsys):
    out = tmp_path / "o"
    rc = main(["multistart", "--out", str(out), "--n", "32", "--k", "0"])
    assert rc == EXIT_OK
    lines = (out / "results.csv").read_text().splitlines()
    assert lines[0].startswith("index,converged,phi")
    assert len(lines) == 2  # one orbit survives dedup
    assert (out / "solution_00.chq").exists()
    assert (out / "trace_00.csv").exists()
    man = json.loads((out / "manifest.json").read_text())
    assert "results.csv" in man["outputs"] and "solution_00.chq" in man["outputs"]
    assert "[00]" in capsys.readouterr().out


def test_convolve_matches_library(tmp_path, capsys):
    grid = Grid(L=6.0, n=32)
    u = gaussian_field(grid, width=0.7, amplitude=1.2)
    src = tmp_path / "u.chq"
    save_field(str(src), u)
    out = tmp_path / "o"
    rc = main(["convolve", "--in", str(src), "--out", str(out), "--kernel", "k1", "--tau", "0.7"])
    assert rc == EXIT_OK
    w = load_field(str(out / "convolved.chq"))
    table = make_kernel_table(grid, 0.7)
    want = padded_convolve(grid, u.values, table.k1_hat)
    assert np.array_equal(w.values, want)
    man = json.loads((out / "manifest.json").read_text())
    assert man["command"] == "convolve"
    assert "convolved" in capsys.readouterr().out


def test_info_reports_config_and_field(tmp_path, capsys):
    grid = Grid(L=6.0, n=32)
    u = gaussian_field(grid, width=0.6, center=(0.75, 0.0))
    src = tmp_path / "u.chq"
    save_field(str(src), u)
    rc = main(["info", "--n", "32", "--in", str(src)])
    assert rc == EXIT_OK
    out = capsys.readouterr().out
    assert "grid: L=6 n=32" in out
    assert "ess_inf=1" in out
    assert "symmetry: trivial" in out and "admissible=" in out
    assert "config_hash: %s" % config_hash(parse_config("n = 32\n")[4]["pairs"]) in out
    assert "barycenter: (" in out
    assert "class=" in out


def test_cli_overrides_fold_into_hash(capsys):
    rc = main(["info", "--n", "32", "--seed", "7"])
    assert rc == EXIT_OK
    want = config_hash(parse_config("n = 32\nseed = 7\n")[4]["pairs"])
    assert "config_hash: %s" % want in capsys.readouterr().out


def test_module_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "logchoquard", "info", "--n", "16"],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 0
    assert "grid: L=6 n=16" in proc.stdout
