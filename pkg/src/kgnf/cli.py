"""Command-line entry point: config resolution, experiment dispatch, and
deterministic CSV/JSON report writing.

Identical config and seed produce byte-identical outputs.  Every file
starts with a header naming the schema version and the config hash, and
every JSON report embeds the fully resolved configuration.
"""

import argparse
import json
import sys
from dataclasses import fields

import numpy as np

from .config import RunConfig, config_dict, config_hash, parse_config
from .experiments import SweepReport, drift_observers, drift_sweep, lifespan_probe, \
    lipschitz_test, nf_verify, resolve_model, strichartz_tracker, trajectory_table
from .evolve import evolve
from .profiles import scaled_profile
from .spectral import make_grid

SCHEMA_VERSION = "kgnf-csv v1"

COMMANDS = ("nf-check", "evolve", "drift-sweep", "lifespan", "lipschitz", "strichartz")


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return "nan" if np.isnan(value) else repr(value)
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def write_csv(path: str, schema: str, hash_: str, columns: dict) -> None:
    names = list(columns)
    rows = len(next(iter(columns.values())))
    with open(path, "w") as fh:
        fh.write(f"# {SCHEMA_VERSION} schema={schema} config={hash_}\n")
        fh.write(",".join(names) + "\n")
        for i in range(rows):
            fh.write(",".join(_fmt(columns[name][i]) for name in names) + "\n")


def write_json(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _report_rows_to_columns(rows: list) -> dict:
    if not rows:
        return {"empty": []}
    names = list(rows[0])
    return {name: [row.get(name, "") for row in rows] for name in names}


def run_evolve(cfg: RunConfig) -> int:
    grid = make_grid(cfg.n, cfg.L)
    model = resolve_model(cfg)
    eps = cfg.eps[0]
    state0 = scaled_profile(grid, cfg.profile, eps, cfg.s, seed=cfg.seed,
                            k1=cfg.k1, k2=cfg.k2)
    nsteps = int(round(cfg.T / cfg.dt))
    traj = evolve(state0, model, cfg.T, cfg.dt,
                  observers=[drift_observers(model, cfg.s, cfg.skip_conjugation_nf)],
                  sample_every=max(1, nsteps // 200), dealias=cfg.dealias)
    cols = trajectory_table(traj)
    order = ["t", "E1", "E1para", "Es", "A0", "A2", "A3", "Hs_norm",
             "dE1_dt", "dE1para_dt"]
    write_csv(cfg.out + ".csv", "trajectory", config_hash(cfg),
              {k: list(cols[k]) for k in order})
    write_json(cfg.out + ".json", {
        "experiment": "evolve",
        "config": config_dict(cfg),
        "config_hash": config_hash(cfg),
        "blew_up": traj.blew_up,
        "final_time": float(traj.times[-1]),
    })
    return 1 if traj.blew_up else 0


def run_nf_check(cfg: RunConfig) -> int:
    report = nf_verify(cfg)
    report["config"] = config_dict(cfg)
    write_json(cfg.out + ".json", report)
    json.dump(report, sys.stdout, indent=2, sort_keys=True, default=_json_default)
    sys.stdout.write("\n")
    return 0 if report["passed"] else 1


def _run_sweep(cfg: RunConfig, driver, schema: str) -> int:
    report: SweepReport = driver(cfg)
    write_csv(cfg.out + ".csv", schema, report.config_hash,
              _report_rows_to_columns(report.rows))
    write_json(cfg.out + ".json", report.to_dict())
    if not report.passed():
        failing = sorted(k for k, v in report.gates.items() if not v)
        print(f"{schema}: failing gates: {', '.join(failing)}", file=sys.stderr)
        return 1
    return 0


def dispatch(cfg: RunConfig) -> int:
    # accept `--out traj.csv` as the stem for traj.csv / traj.json
    if cfg.out.endswith(".csv") or cfg.out.endswith(".json"):
        cfg.out = cfg.out.rsplit(".", 1)[0]
    if cfg.command == "evolve":
        return run_evolve(cfg)
    if cfg.command == "nf-check":
        return run_nf_check(cfg)
    if cfg.command == "drift-sweep":
        return _run_sweep(cfg, drift_sweep, "drift_sweep")
    if cfg.command == "lifespan":
        return _run_sweep(cfg, lifespan_probe, "lifespan")
    if cfg.command == "lipschitz":
        return _run_sweep(cfg, lipschitz_test, "lipschitz")
    if cfg.command == "strichartz":
        return _run_sweep(cfg, strichartz_tracker, "strichartz")
    raise ValueError(f"unknown command {cfg.command!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kgnf",
        description="Quasilinear Klein-Gordon normal-form laboratory",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="key = value config file")
    for f in fields(RunConfig):
        if f.name in ("command", "custom"):
            continue
        flag = "--" + f.name.replace("_", "-")
        parser.add_argument(flag, dest=f.name, default=None)
    parser.add_argument("--custom", action="append", default=[],
                        metavar="CHANNEL=COEFF",
                        help="custom model channel, e.g. g11.u=0.5")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {}
    for f in fields(RunConfig):
        if f.name in ("command", "custom"):
            continue
        val = getattr(args, f.name)
        if val is not None:
            overrides[f.name] = val
    for item in args.custom:
        key, _, val = item.partition("=")
        overrides[f"custom.{key}"] = val
    try:
        cfg = parse_config(args.config, overrides)
    except (ValueError, OSError) as exc:
        print(f"kgnf: {exc}", file=sys.stderr)
        return 2
    cfg.command = args.command
    return dispatch(cfg)


if __name__ == "__main__":
    sys.exit(main())
