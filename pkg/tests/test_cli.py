import json
import subprocess
import sys

import numpy as np
import pytest

from billzeta.database import save_database
from billzeta.geometry import config_digest, save_config
from tests.conftest import equilateral_config


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "billzeta.cli", *map(str, args)],
        capture_output=True,
        text=True,
    )


@pytest.fixture(scope="module")
def cli_env(tmp_path_factory, db10, config):
    root = tmp_path_factory.mktemp("cli")
    cfg = root / "config.json"
    save_config(config, cfg)
    cache = root / "orbits.jsonl"
    save_database(db10, cache)
    other = root / "other_config.json"
    save_config(equilateral_config(radius=0.9), other)
    return {"root": root, "config": cfg, "cache": cache, "other": other}


def test_usage_errors_exit_one(cli_env):
    assert run_cli().returncode == 1
    assert run_cli("no-such-subcommand").returncode == 1
    assert run_cli("validate").returncode == 1
    assert run_cli("orbits").returncode == 1


def test_version_runs():
    out = run_cli("--version")
    assert out.returncode == 0
    assert "billzeta" in out.stdout


def test_validate_ok(cli_env):
    out = run_cli("validate", "--config", cli_env["config"])
    assert out.returncode == 0
    assert "ok" in out.stdout


def test_validate_malformed_config(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{", encoding="utf-8")
    out = run_cli("validate", "--config", bad)
    assert out.returncode == 1


def test_validate_eclipse_is_domain_error(tmp_path):
    from billzeta.geometry import Configuration, Disk

    cfg_path = tmp_path / "eclipse.json"
    save_config(
        Configuration(
            (Disk((0.0, 0.0), 1.0), Disk((8.0, 0.0), 1.0), Disk((4.0, 0.5), 1.0))
        ),
        cfg_path,
    )
    out = run_cli("validate", "--config", cfg_path)
    assert out.returncode == 2


def test_orbits_build_and_cache_hit(cli_env, tmp_path):
    cache = tmp_path / "c.jsonl"
    first = run_cli(
        "orbits", "--config", cli_env["config"], "--cache", cache, "--nmax", 6
    )
    assert first.returncode == 0
    assert "wrote" in first.stdout
    assert cache.exists()
    again = run_cli(
        "orbits", "--config", cli_env["config"], "--cache", cache, "--nmax", 6
    )
    assert again.returncode == 0
    assert "cache hit" in again.stdout
    assert "no re-solve" in again.stdout


def test_orbits_extends_shallow_cache(cli_env, tmp_path):
    cache = tmp_path / "c.jsonl"
    run_cli("orbits", "--config", cli_env["config"], "--cache", cache, "--nmax", 4)
    out = run_cli("orbits", "--cache", cache, "--nmax", 6)
    assert out.returncode == 0
    assert "re-solving" in out.stdout


def test_orbits_stale_cache_refused(cli_env):
    out = run_cli(
        "orbits", "--config", cli_env["other"], "--cache", cli_env["cache"], "--nmax", 6
    )
    assert out.returncode == 2
    assert "re-run" in out.stderr


def test_orbits_summary_lists_counts(cli_env):
    out = run_cli("orbits", "--cache", cli_env["cache"], "--nmax", 8)
    assert out.returncode == 0
    assert "2:3" in out.stdout
    assert "residuals: min" in out.stdout


def test_nmax_beyond_cache_is_domain_error(cli_env):
    out = run_cli("abscissas", "--cache", cli_env["cache"], "--nmax", 12)
    assert out.returncode == 2
    assert "extend" in out.stderr


def test_abscissas_outputs(cli_env, tmp_path):
    out_dir = tmp_path / "out"
    out = run_cli("abscissas", "--cache", cli_env["cache"], "--out", out_dir)
    assert out.returncode == 0
    assert "ordering b1 < a1 < h: ok" in out.stdout
    lines = (out_dir / "abscissas.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "quantity,method,order,value"
    assert len(lines) == 7
    h_transfer = float(lines[1].split(",")[3])
    assert abs(h_transfer - 0.16723) < 1e-3


def test_manifest_contract(cli_env, tmp_path):
    out_dir = tmp_path / "out"
    run_cli("abscissas", "--cache", cli_env["cache"], "--out", out_dir)
    manifest = json.loads((out_dir / "abscissas_manifest.json").read_text("utf-8"))
    assert manifest["subcommand"] == "abscissas"
    assert manifest["tool_version"]
    assert manifest["timestamp"]
    assert manifest["parameters"]["k"] == 6
    for name in manifest["outputs"]:
        assert (out_dir / name).exists()
    assert "abscissas.csv" in manifest["outputs"]
    from billzeta.geometry import load_config

    assert manifest["config_hash"] == config_digest(load_config(cli_env["config"]))


def test_zeta_outputs(cli_env, tmp_path):
    out_dir = tmp_path / "out"
    out = run_cli("zeta", "--cache", cli_env["cache"], "--out", out_dir)
    assert out.returncode == 0
    assert (out_dir / "zeta_estimates.csv").exists()
    assert (out_dir / "zeta_shells.csv").exists()


def test_poles_outputs(cli_env, tmp_path):
    out_dir = tmp_path / "out"
    out = run_cli("poles", "--cache", cli_env["cache"], "--out", out_dir)
    assert out.returncode == 0
    lines = (out_dir / "poles.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "re,im,multiplicity,residual,trust_margin"
    assert len(lines) >= 2
    re_val, im_val, mult = lines[1].split(",")[:3]
    assert abs(float(re_val) + 0.12156) < 1e-3
    assert float(im_val) == 0.0
    assert mult == "1"


def test_poles_explicit_rect_past_floor_is_numerical_error(cli_env):
    out = run_cli(
        "poles", "--cache", cli_env["cache"], "--rect", -2.0, -0.02, 0.2, 1.4
    )
    assert out.returncode == 3
    assert "trust floor" in out.stderr


def test_counting_outputs(cli_env, tmp_path):
    out_dir = tmp_path / "out"
    out = run_cli("counting", "--cache", cli_env["cache"], "--out", out_dir)
    assert out.returncode == 0
    lines = (out_dir / "counting.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "x,count,model,ratio"
    assert len(lines) > 10


def test_trace_outputs(cli_env, tmp_path):
    out_dir = tmp_path / "out"
    out = run_cli("trace", "--cache", cli_env["cache"], "--out", out_dir)
    assert out.returncode == 0
    for name in ("trace_windows.csv", "trace_gaussian.csv", "trace_shells.csv"):
        assert (out_dir / name).exists()
    assert not (out_dir / "trace_compare.csv").exists()
    manifest = json.loads((out_dir / "trace_manifest.json").read_text("utf-8"))
    assert sorted(manifest["outputs"]) == [
        "trace_gaussian.csv",
        "trace_shells.csv",
        "trace_windows.csv",
    ]


def test_trace_experimental_flag(cli_env, tmp_path):
    out_dir = tmp_path / "out"
    out = run_cli(
        "trace",
        "--cache",
        cli_env["cache"],
        "--out",
        out_dir,
        "--experimental-trace-compare",
    )
    assert out.returncode == 0
    assert "experimental" in out.stdout
    assert (out_dir / "trace_compare.csv").exists()


def test_csv_lf_line_endings(cli_env, tmp_path):
    out_dir = tmp_path / "out"
    run_cli("counting", "--cache", cli_env["cache"], "--out", out_dir)
    raw = (out_dir / "counting.csv").read_bytes()
    assert b"\r" not in raw
    assert raw.endswith(b"\n")
