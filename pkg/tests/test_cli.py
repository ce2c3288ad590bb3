import json

import numpy as np
import pytest

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from torusdnls.cli import main
from torusdnls.measure import load_ensemble
from torusdnls.spectral import SpectralState, load_state_json, save_state_json


def run(argv):
    return main(argv)


def test_no_subcommand_is_usage_error(capsys):
    assert run([]) == 2
    assert "usage" in capsys.readouterr().err


def test_unknown_subcommand_is_usage_error(capsys):
    assert run(["frobnicate"]) == 2


def test_help_exits_cleanly():
    assert run(["--help"]) == 0


# ---------------------------------------------------------------------------
# sample


def test_sample_writes_outputs_and_manifest(tmp_path, capsys):
    out = tmp_path / "run1"
    code = run(
        ["sample", "--n-modes", "4", "--samples", "200", "--seed", "5",
         "--out", str(out), "--out-exact"]
    )
    assert code == 0
    for name in ("ensemble.bin", "observables.csv", "moments.csv",
                 "config.resolved.toml", "manifest.json"):
        assert (out / name).exists(), name

    manifest = json.loads((out / "manifest.json").read_text())
    for key in ("git_hash", "config", "seed", "started_at", "finished_at",
                "effective_sample_size"):
        assert key in manifest, key
    assert manifest["seed"] == 5
    assert manifest["config"]["n_modes"] == 4
    # plain Gaussian ensemble: every sample carries unit weight
    assert manifest["effective_sample_size"] == pytest.approx(200.0)

    ens = load_ensemble(out / "ensemble.bin")
    assert ens.count == 200
    assert ens.bandwidth == 4
    out_text = capsys.readouterr().out
    assert "200 samples" in out_text


def test_sample_resolved_config_reproduces_run_exactly(tmp_path):
    first = tmp_path / "a"
    assert run(["sample", "--n-modes", "4", "--samples", "150", "--seed", "9",
                "--out", str(first), "--out-exact"]) == 0
    second = tmp_path / "b"
    assert run(["sample", "--config", str(first / "config.resolved.toml"),
                "--out", str(second), "--out-exact"]) == 0
    assert (first / "ensemble.bin").read_bytes() == (second / "ensemble.bin").read_bytes()
    assert (first / "moments.csv").read_bytes() == (second / "moments.csv").read_bytes()


def test_sample_with_cutoff_reweights(tmp_path):
    out = tmp_path / "cut"
    assert run(["sample", "--n-modes", "4", "--samples", "300", "--seed", "3",
                "--cutoff-b", "auto", "--out", str(out), "--out-exact"]) == 0
    resolved = tomllib.loads((out / "config.resolved.toml").read_text())
    assert isinstance(resolved["cutoff_b"], float)
    ens = load_ensemble(out / "ensemble.bin")
    assert ens.cutoff_B == pytest.approx(resolved["cutoff_b"])
    assert np.any(np.isneginf(ens.log_weights))
    assert np.any(np.isfinite(ens.log_weights))


def test_sample_rejects_bad_arguments(tmp_path, capsys):
    code = run(["sample", "--samples", "0", "--cutoff-b", "sideways",
                "--out", str(tmp_path), "--out-exact"])
    assert code == 2
    err = capsys.readouterr().err
    assert "samples must be >= 1" in err
    assert "cutoff_b" in err
    assert not (tmp_path / "ensemble.bin").exists()


def test_output_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("TORUSDNLS_OUTPUT_DIR", str(tmp_path / "env_base"))
    assert run(["sample", "--n-modes", "2", "--samples", "50", "--seed", "1"]) == 0
    assert (tmp_path / "env_base" / "sample" / "ensemble.bin").exists()


# ---------------------------------------------------------------------------
# evolve


@pytest.fixture()
def state_file(tmp_path):
    rng = np.random.default_rng(4)
    z = rng.standard_normal((9, 2))
    state = SpectralState(4, 0.2 * (z[:, 0] + 1j * z[:, 1]))
    path = tmp_path / "state.json"
    save_state_json(state, path)
    return path


def test_evolve_writes_trajectory(tmp_path, state_file, capsys):
    out = tmp_path / "evo"
    code = run(["evolve", "--input", str(state_file), "--t-final", "0.1",
                "--dt", "0.01", "--record-every", "2",
                "--out", str(out), "--out-exact"])
    assert code == 0
    assert (out / "trajectory.csv").exists()
    final = load_state_json(out / "final_state.json")
    assert final.bandwidth == 4
    lines = (out / "trajectory.csv").read_text().strip().splitlines()
    assert lines[0].startswith("t,m,")
    assert len(lines) == 7  # header + t=0 + five recorded rows
    assert "mass drift" in capsys.readouterr().out


def test_evolve_lists_every_usage_problem(tmp_path, capsys):
    code = run(["evolve", "--input", str(tmp_path / "missing.json"),
                "--dt", "-1", "--t-final", "-2",
                "--out", str(tmp_path), "--out-exact"])
    assert code == 2
    err = capsys.readouterr().err
    assert "dt must be > 0" in err
    assert "t_final must be >= 0" in err
    assert "input file not found" in err


def test_evolve_requires_input(tmp_path, capsys):
    assert run(["evolve", "--out", str(tmp_path), "--out-exact"]) == 2
    assert "requires --input" in capsys.readouterr().err


def test_evolve_rejects_unknown_kind(tmp_path, state_file):
    code = run(["evolve", "--input", str(state_file), "--kind", "bogus",
                "--out", str(tmp_path), "--out-exact"])
    assert code == 2  # argparse choices reject it before dispatch


# ---------------------------------------------------------------------------
# experiment


def test_experiment_runs_and_reports_pass(tmp_path, capsys):
    cfg = tmp_path / "xn.toml"
    cfg.write_text("[experiment]\nn_list = [2, 4]\ncount = 2000\n")
    out = tmp_path / "xn"
    code = run(["experiment", "xn-decay", "--seed", "5", "--config", str(cfg),
                "--out", str(out), "--out-exact"])
    assert code == 0
    assert (out / "xn_decay.result.json").exists()
    assert (out / "xn_decay.rows.csv").exists()
    text = capsys.readouterr().out
    assert "PASS" in text
    assert "l4_slope" in text
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["passed"] is True
    resolved = tomllib.loads((out / "config.resolved.toml").read_text())
    assert resolved["experiment"]["count"] == 2000


def test_experiment_failure_exits_one(tmp_path, capsys):
    cfg = tmp_path / "cf.toml"
    cfg.write_text('[experiment]\nn_list = [4, 8]\ncount = 500\nlam = 1e-6\n')
    code = run(["experiment", "cauchy-F", "--seed", "5", "--config", str(cfg),
                "--out", str(tmp_path / "cf"), "--out-exact"])
    assert code == 1
    assert "FAIL" in capsys.readouterr().out


def test_experiment_unknown_name(tmp_path, capsys):
    assert run(["experiment", "nonsense", "--out", str(tmp_path), "--out-exact"]) == 2
    err = capsys.readouterr().err
    assert "unknown experiment" in err
    assert "conservation" in err  # available names are listed


def test_experiment_rejects_unknown_parameter(tmp_path, capsys):
    cfg = tmp_path / "bad.toml"
    cfg.write_text("[experiment]\nwibble = 3\n")
    code = run(["experiment", "xn-decay", "--config", str(cfg),
                "--out", str(tmp_path / "o"), "--out-exact"])
    assert code == 2
    err = capsys.readouterr().err
    assert "wibble" in err
    assert "accepts" in err


# ---------------------------------------------------------------------------
# norms


def test_norms_prints_closed_forms(tmp_path, capsys):
    state = SpectralState.from_modes(4, {3: 2.0})
    path = tmp_path / "one_mode.json"
    save_state_json(state, path)
    assert run(["norms", "--input", str(path), "--s", "0.5", "--r", "2"]) == 0
    out = capsys.readouterr().out
    lines = dict(line.split(" = ") for line in out.strip().splitlines())
    assert float(lines["fl_norm(s=0.5, r=2)"]) == pytest.approx(2.0 * 10.0**0.25)
    assert float(lines["l2_norm"]) == pytest.approx(np.sqrt(8.0 * np.pi))
    assert float(lines["mass"]) == pytest.approx(4.0)


def test_norms_validates_r(tmp_path, state_file, capsys):
    assert run(["norms", "--input", str(state_file), "--r", "0.5"]) == 2
    assert "r must be >= 1" in capsys.readouterr().err
