"""Command-line entry point.

Four subcommands cover the library's surface:

    sample      draw a Gaussian or weighted ensemble, write it to disk
    evolve      integrate one saved state and record a trajectory
    experiment  run a named study and persist its result record
    norms       print norms of a saved state

Every run resolves its configuration in three layers (built-in
defaults, then a TOML config file, then explicit flags), echoes the
resolved configuration next to its outputs so the run can be repeated
byte-identically, and writes a manifest with the git revision, seed
and timestamps. Exit codes: 0 on success, 1 when an experiment's pass
criterion fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import datetime
import inspect
import json
import os
import subprocess
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # 3.10
    import tomli as tomllib

import numpy as np

from .dynamics import RHS_KINDS, record_trajectory
from .experiments import EXPERIMENTS
from .functionals import batch_fl_norm, batch_l2_norm, batch_mass
from .measure import (
    calibrate_cutoff,
    effective_sample_size,
    ensemble_observables_csv,
    reweight_to_mu,
    sample_rho,
    save_ensemble,
)
from .spectral import (
    load_state_binary,
    load_state_json,
    mode_numbers,
    save_state_json,
)

COMMANDS = ("sample", "evolve", "experiment", "norms")

DEFAULTS = {
    "sample": {
        "n_modes": 16,
        "samples": 1000,
        "seed": 0,
        "cutoff_b": "none",
        "workers": 0,
    },
    "evolve": {
        "t_final": 1.0,
        "dt": 1e-3,
        "kind": "fgdnls",
        "record_every": 100,
        "workers": 0,
    },
    "experiment": {"seed": None, "workers": 0},
    "norms": {"s": 2.0 / 3.0 - 0.01, "r": 3.0},
}


def _load_config(path) -> dict:
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _toml_scalar(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_toml_scalar(v) for v in value) + "]"
    return '"' + str(value).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _write_toml(config: dict, path) -> None:
    """Flat TOML emitter for the resolved-config echo (scalars plus one
    optional [experiment] table; round-trips through tomllib)."""
    lines = []
    tables = {}
    for key, value in sorted(config.items()):
        if value is None:
            continue
        if isinstance(value, dict):
            tables[key] = value
        else:
            lines.append(f"{key} = {_toml_scalar(value)}")
    for name, table in sorted(tables.items()):
        lines.append("")
        lines.append(f"[{name}]")
        for key, value in sorted(table.items()):
            lines.append(f"{key} = {_toml_scalar(value)}")
    Path(path).write_text("\n".join(lines) + "\n")


def _git_hash() -> str:
    try:
        out = subprocess.run(
            ["git", "rev-parse", "HEAD"],
            capture_output=True,
            text=True,
            timeout=10,
            cwd=Path(__file__).resolve().parent,
        )
    except OSError:
        return "unknown"
    return out.stdout.strip() if out.returncode == 0 else "unknown"


def _resolve(command: str, args: argparse.Namespace) -> dict:
    """Defaults, then config file, then explicit flags."""
    config = dict(DEFAULTS.get(command, {}))
    if args.config is not None:
        config.update(_load_config(args.config))
    for key, value in vars(args).items():
        if key in ("func", "config") or value is None:
            continue
        config[key] = value
    config["command"] = command
    return config


def _output_dir(config: dict, command: str) -> Path:
    base = config.get("output_dir") or os.environ.get("TORUSDNLS_OUTPUT_DIR", "runs")
    out = Path(base)
    if config.get("out_exact") is None:
        out = out / command
    out.mkdir(parents=True, exist_ok=True)
    config["output_dir"] = str(out)
    return out


def _manifest(out: Path, config: dict, started: str, extra: dict | None = None) -> None:
    record = {
        "git_hash": _git_hash(),
        "config": {k: v for k, v in config.items() if k != "out_exact"},
        "seed": config.get("seed"),
        "started_at": started,
        "finished_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    if extra:
        record.update(extra)
    with open(out / "manifest.json", "w") as fh:
        json.dump(record, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def _echo_config(out: Path, config: dict) -> None:
    _write_toml({k: v for k, v in config.items() if k != "out_exact"}, out / "config.resolved.toml")


def _fail_usage(problems) -> int:
    for p in problems:
        print(f"error: {p}", file=sys.stderr)
    return 2


def _now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def _load_state(path: str):
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(path)
    if p.suffix == ".bin":
        return load_state_binary(p)
    return load_state_json(p)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_sample(config: dict) -> int:
    problems = []
    if config["samples"] < 1:
        problems.append(f"samples must be >= 1, got {config['samples']}")
    if config["n_modes"] < 0:
        problems.append(f"n_modes must be >= 0, got {config['n_modes']}")
    cutoff = config["cutoff_b"]
    if isinstance(cutoff, str) and cutoff not in ("auto", "none"):
        problems.append(f'cutoff_b must be a number, "auto" or "none", got {cutoff!r}')
    if problems:
        return _fail_usage(problems)

    started = _now()
    out = _output_dir(config, "sample")
    ens = sample_rho(config["n_modes"], config["samples"], config["seed"])
    if cutoff == "auto":
        cutoff = calibrate_cutoff(config["n_modes"], config["seed"] + 1)
        config["cutoff_b"] = cutoff
    if cutoff != "none":
        ens = reweight_to_mu(ens, float(cutoff))

    save_ensemble(ens, out / "ensemble.bin")
    ensemble_observables_csv(ens, out / "observables.csv")

    # per-mode moment summary against the sampling law
    n = mode_numbers(ens.bandwidth)
    second = np.mean(np.abs(ens.coeffs) ** 2, axis=0)
    se = np.std(np.abs(ens.coeffs) ** 2, axis=0, ddof=1) / np.sqrt(ens.count)
    expected = 2.0 / (1.0 + n.astype(float) ** 2)
    with open(out / "moments.csv", "w") as fh:
        fh.write("n,mean_abs_sq,expected,std_error\n")
        for j in range(n.size):
            fh.write(f"{n[j]},{second[j]!r},{expected[j]!r},{se[j]!r}\n")

    _echo_config(out, config)
    ess = effective_sample_size(ens.log_weights)
    _manifest(out, config, started, {"effective_sample_size": ess})
    print(f"wrote {ens.count} samples at bandwidth {ens.bandwidth} to {out}")
    print(f"effective sample size {ess:.1f}")
    return 0


def _cmd_evolve(config: dict) -> int:
    problems = []
    if "input" not in config:
        problems.append("evolve requires --input")
    if config["dt"] <= 0:
        problems.append(f"dt must be > 0, got {config['dt']}")
    if config["t_final"] < 0:
        problems.append(f"t_final must be >= 0, got {config['t_final']}")
    if config["kind"] not in RHS_KINDS:
        problems.append(f"kind must be one of {RHS_KINDS}, got {config['kind']!r}")
    if config["record_every"] < 1:
        problems.append(f"record_every must be >= 1, got {config['record_every']}")
    if "input" in config and not Path(config["input"]).exists():
        problems.append(f"input file not found: {config['input']}")
    if problems:
        return _fail_usage(problems)

    started = _now()
    out = _output_dir(config, "evolve")
    state = _load_state(config["input"])
    traj = record_trajectory(
        state,
        config["t_final"],
        config["dt"],
        kind=config["kind"],
        record_every=config["record_every"],
    )
    traj.save_csv(out / "trajectory.csv")
    save_state_json(traj.final_state, out / "final_state.json")
    _echo_config(out, config)
    _manifest(out, config, started)
    m = traj.column("m")
    print(f"evolved bandwidth {state.bandwidth} to t={config['t_final']} ({config['kind']})")
    print(f"relative mass drift {abs(m[-1] - m[0]) / m[0]:.3e}")
    print(f"wrote trajectory.csv and final_state.json to {out}")
    return 0


def _cmd_experiment(config: dict) -> int:
    name = config.get("name")
    problems = []
    if name not in EXPERIMENTS:
        problems.append(
            f"unknown experiment {name!r}; choose from {', '.join(sorted(EXPERIMENTS))}"
        )
        return _fail_usage(problems)
    runner = EXPERIMENTS[name]
    allowed = set(inspect.signature(runner).parameters)
    kwargs = dict(config.get("experiment", {}))
    if config.get("seed") is not None:
        kwargs["seed"] = config["seed"]
    unknown = sorted(set(kwargs) - allowed)
    if unknown:
        problems.append(
            f"experiment {name} does not accept: {', '.join(unknown)} "
            f"(accepts {', '.join(sorted(allowed))})"
        )
        return _fail_usage(problems)
    kwargs = {k: (tuple(v) if isinstance(v, list) else v) for k, v in kwargs.items()}

    started = _now()
    out = _output_dir(config, "experiment")
    result = runner(**kwargs)
    json_path, csv_path = result.save(out)
    _echo_config(out, config)
    _manifest(out, config, started, {"passed": result.passed})
    for key, value in sorted(result.fitted.items()):
        print(f"{result.name}.{key} = {value}")
    print(f"wrote {json_path} and {csv_path}")
    print(f"{result.name}: {'PASS' if result.passed else 'FAIL'}")
    return 0 if result.passed else 1


def _cmd_norms(config: dict) -> int:
    problems = []
    if "input" not in config:
        problems.append("norms requires --input")
    if config["r"] < 1:
        problems.append(f"r must be >= 1, got {config['r']}")
    if "input" in config and not Path(config["input"]).exists():
        problems.append(f"input file not found: {config['input']}")
    if problems:
        return _fail_usage(problems)

    state = _load_state(config["input"])
    c = state.coeffs[None, :]
    fl = float(batch_fl_norm(c, state.bandwidth, config["s"], config["r"])[0])
    print(f"fl_norm(s={config['s']:g}, r={config['r']:g}) = {fl!r}")
    print(f"l2_norm = {float(batch_l2_norm(c)[0])!r}")
    print(f"mass = {float(batch_mass(c)[0])!r}")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="torusdnls",
        description="Pseudospectral simulation and measure sampling on the circle.",
    )
    sub = parser.add_subparsers(dest="command")

    def common(p):
        p.add_argument("--config", help="TOML config file; flags override its keys")
        p.add_argument("--out", dest="output_dir", help="output directory")
        p.add_argument(
            "--out-exact",
            dest="out_exact",
            action="store_const",
            const=True,
            help="use the output directory as given, no subcommand subdirectory",
        )
        p.add_argument("--workers", type=int, help="parallelism cap (results never depend on it)")

    p = sub.add_parser("sample", help="draw an ensemble")
    common(p)
    p.add_argument("--n-modes", dest="n_modes", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument(
        "--cutoff-b",
        dest="cutoff_b",
        help='cutoff radius, "auto" for pilot calibration, "none" for the plain Gaussian',
    )
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("evolve", help="integrate one state")
    common(p)
    p.add_argument("--input", help="state file (.json or .bin)")
    p.add_argument("--t-final", dest="t_final", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--kind", choices=RHS_KINDS)
    p.add_argument("--record-every", dest="record_every", type=int)
    p.set_defaults(func=_cmd_evolve)

    p = sub.add_parser("experiment", help="run a named study")
    common(p)
    p.add_argument("name", nargs="?", help=", ".join(sorted(EXPERIMENTS)))
    p.add_argument("--seed", type=int)
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("norms", help="print norms of a saved state")
    p.add_argument("--config", help="TOML config file; flags override its keys")
    p.add_argument("--input", help="state file (.json or .bin)")
    p.add_argument("--s", type=float)
    p.add_argument("--r", type=float)
    p.set_defaults(func=_cmd_norms)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        config = _resolve(args.command, args)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        return _fail_usage([f"cannot read config: {exc}"])
    if args.command == "sample" and isinstance(config.get("cutoff_b"), str):
        if config["cutoff_b"] not in ("auto", "none"):
            try:
                config["cutoff_b"] = float(config["cutoff_b"])
            except ValueError:
                pass
    try:
        return args.func(config)
    except FileNotFoundError as exc:
        return _fail_usage([f"file not found: {exc}"])


def console_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_entry()
