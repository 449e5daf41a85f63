"""Command-line front end: simulate, identify, sweep.

Exit codes: 0 success, 2 config error, 3 simulation failure, 4 dataset
error, 5 optimization failure.  Set ESPM_LOG to control verbosity.  All
commands are deterministic given (config, inputs, seed); reports embed the
resolved config for provenance.
"""

import argparse
import csv
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .aging import classify_lam_regime
from .cell import TRACE_HEADER, run_constant_current
from .errors import (ConfigError, DatasetError, EspmError, OptimizationError,
                     SimulationError)
from .identification import (ExperimentalDataset, ParameterSpec, identify_aged,
                             identify_fresh, write_report)
from .parameters import load_parameters, mesh_from_dict
from .pso import PsoConfig
from .state import aged_state

log = logging.getLogger("espm.cli")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SIMULATION = 3
EXIT_DATASET = 4
EXIT_OPTIMIZATION = 5

ENVELOPE_HEADER = ["kprime_n_per_s", "betaprime_n_per_s", "capacity_Ah",
                   "final_R_film_ohm", "regime"]


def _setup_logging():
    level = os.environ.get("ESPM_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _load_config(path):
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path}: invalid JSON ({exc})") from exc
    params = load_parameters(path)
    return raw, params


def _dump_json(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _current_from_args(args, raw):
    nominal = float(raw.get("cell", {}).get("capacity_nominal_Ah", 12.4))
    if args.current is not None:
        return float(args.current)
    c_rate = args.c_rate if args.c_rate is not None else 1.0 / 3.0
    return float(c_rate) * nominal


def _sim_settings(raw):
    sim = raw.get("simulation", {})
    dt = float(sim.get("dt_s", 1.0))
    t_max = sim.get("max_time_s")
    soc0 = float(sim.get("soc0", 1.0))
    return dt, (None if t_max is None else float(t_max)), soc0


# ---------------------------------------------------------------------------
# verification of emitted artifacts
# ---------------------------------------------------------------------------

def _verify_trace_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != TRACE_HEADER:
            raise EspmError(f"{path}: bad trace header {header}")
        prev_t = -np.inf
        for row in reader:
            if len(row) != len(TRACE_HEADER):
                raise EspmError(f"{path}: ragged row {row}")
            t = float(row[0])
            if t < prev_t:
                raise EspmError(f"{path}: time column not nondecreasing")
            prev_t = t
    log.info("verified %s", path)


def _verify_json(path, required_keys):
    with open(path) as fh:
        obj = json.load(fh)
    missing = [k for k in required_keys if k not in obj]
    if missing:
        raise EspmError(f"{path}: missing keys {missing}")
    log.info("verified %s", path)
    return obj


def _verify_envelope_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ENVELOPE_HEADER:
            raise EspmError(f"{path}: bad envelope header {header}")
        n = sum(1 for _ in reader)
    if n < 1:
        raise EspmError(f"{path}: empty envelope")
    log.info("verified %s", path)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_simulate(args):
    raw, params = _load_config(args.config)
    mesh = mesh_from_dict(raw)
    current = _current_from_args(args, raw)
    dt, t_max, soc0 = _sim_settings(raw)
    cutoff = args.cutoff
    if cutoff is None:
        key = "cutoff_discharge_V" if current >= 0.0 else "cutoff_charge_V"
        cutoff = raw.get("cell", {}).get(key)
    init_sec = raw.get("initial_state", {})
    init = None
    film = float(init_sec.get("L_SEI_m", 0.0))
    film_li = float(init_sec.get("L_Li_m", 0.0))
    if film or film_li:
        from .state import initial_state
        init = initial_state(params, mesh, soc0, L_SEI0=film, L_Li0=film_li)

    trace = run_constant_current(
        params, mesh, current,
        V_cutoff=None if cutoff is None else float(cutoff),
        soc0=soc0, dt=dt, t_max=t_max, initial=init)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    trace_path = out / "trace.csv"
    summary_path = out / "summary.json"
    trace.to_csv(trace_path)
    summary = trace.summary()
    summary["current_A"] = current
    summary["cutoff_V"] = cutoff
    summary["resolved_config"] = raw
    _dump_json(summary, summary_path)
    print(f"wrote {trace_path} ({trace.t_s.size} rows) and {summary_path}; "
          f"termination={trace.termination}, "
          f"capacity={summary['end_capacity_Ah']:.4f} Ah")
    if args.verify:
        _verify_trace_csv(trace_path)
        _verify_json(summary_path, ["end_capacity_Ah", "end_voltage_V",
                                    "peak_R_film_ohm", "termination"])
    return EXIT_OK


def _phase_specs(raw, phase):
    ident = raw.get("identification", {})
    phases = ident.get("phases", {})
    if phase not in phases:
        raise ConfigError(f"config has no identification.phases.{phase} block")
    specs = [ParameterSpec(name=p["name"], lower=float(p["lower"]),
                           upper=float(p["upper"]), guess=float(p["guess"]))
             for p in phases[phase]["parameters"]]
    return specs


def cmd_identify(args):
    raw, params = _load_config(args.config)
    mesh = mesh_from_dict(raw)
    ident = raw.get("identification", {})
    weights_cfg = ident.get("weights", {})
    weights = (float(weights_cfg.get("w1", 1.0)),
               float(weights_cfg.get("w2", 1.0)),
               float(weights_cfg.get("w3", 1.0)))
    pso_cfg = ident.get("pso", {})
    config = PsoConfig(
        swarm_size=int(pso_cfg.get("swarm_size", 30)),
        iterations=int(pso_cfg.get("iterations", 150)),
        inertia=float(pso_cfg.get("inertia", 0.729)),
        cognitive=float(pso_cfg.get("cognitive", 1.494)),
        social=float(pso_cfg.get("social", 1.494)),
        seed=int(args.seed if args.seed is not None else pso_cfg.get("seed", 0)))
    specs = _phase_specs(raw, args.phase)
    dt, _, _ = _sim_settings(raw)
    current = _current_from_args(args, raw)
    dataset = ExperimentalDataset.from_csv(args.data, current_A=current,
                                           temperature_K=params.T,
                                           cycle_label=args.phase)
    if args.phase == "fresh":
        result = identify_fresh(dataset, params, mesh, specs, config,
                                weights=weights, dt_s=dt, jobs=args.jobs)
    else:
        label = "1000" if args.phase == "aged1000" else "3300"
        result = identify_aged(dataset, params, label, mesh, specs, config,
                               weights=weights, dt_s=dt, jobs=args.jobs)
    reference = ident.get("reference_values", {}).get(args.phase)
    report = result.report(reference=reference, resolved_config=raw)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report_path = out / f"identify_{args.phase}.json"
    write_report(report, report_path)
    print(f"wrote {report_path}; final cost {result.final_cost:.6g}")
    for name, value in result.values.items():
        ref = "" if not reference or name not in reference \
            else f" (reference {reference[name]:g})"
        print(f"  {name} = {value:.6g}{ref}")
    if args.verify:
        _verify_json(report_path, ["phase", "final_cost", "identified",
                                   "parameters", "cost_history", "pso"])
    return EXIT_OK


def _sweep_point(params, mesh, point, current, cutoff, dt, t_horizon, film):
    kprime_n, betaprime_n = point
    from .parameters import substituted
    # cathode areas held constant over the sweep
    p = substituted(params, kprime_n=kprime_n, betaprime_n=betaprime_n,
                    kprime_p=0.0, betaprime_p=0.0)
    init = aged_state(p, mesh, 1.0, t_horizon, L_SEI0=film * p.kappa_SEI)
    trace = run_constant_current(p, mesh, current, V_cutoff=cutoff,
                                 dt=dt, initial=init)
    return trace


def cmd_sweep(args):
    raw, params = _load_config(args.config)
    mesh = mesh_from_dict(raw)
    sweep_cfg = raw.get("sweep", {})
    param = args.param or sweep_cfg.get("param", "betaprime_n")
    if param not in ("betaprime_n", "kprime_n", "both-grid"):
        raise ConfigError(f"unknown sweep parameter {param!r}")
    lo = float(args.min if args.min is not None else sweep_cfg["min"])
    hi = float(args.max if args.max is not None else sweep_cfg["max"])
    count = int(args.count if args.count is not None else sweep_cfg.get("count", 8))
    if not lo < hi:
        raise ConfigError("sweep needs min < max")
    if count < 2:
        raise ConfigError("sweep needs at least 2 points")
    cycles = float(args.cycles if args.cycles is not None
                   else sweep_cfg.get("cycles", 3300))
    t_cycle = float(args.t_cycle if args.t_cycle is not None
                    else sweep_cfg.get("T_cycle_s", 5400.0))
    film = float(args.film_ratio if args.film_ratio is not None
                 else sweep_cfg.get("film_ratio_ohm_m2", 0.05))
    kprime_fixed = float(sweep_cfg.get("kprime_n_fixed", params.kprime_n))
    betaprime_fixed = float(sweep_cfg.get("betaprime_n_fixed",
                                          params.betaprime_n))
    t_horizon = cycles * t_cycle

    values = np.linspace(lo, hi, count)
    if param == "betaprime_n":
        points = [(kprime_fixed, float(v)) for v in values]
    elif param == "kprime_n":
        points = [(float(v), betaprime_fixed) for v in values]
    else:
        points = [(float(k), float(b)) for k in values for b in values]

    current = _current_from_args(args, raw)
    dt, _, _ = _sim_settings(raw)
    cutoff = args.cutoff
    if cutoff is None:
        cutoff = raw.get("cell", {}).get("cutoff_discharge_V")
    cutoff = None if cutoff is None else float(cutoff)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    def run_point(idx_point):
        idx, point = idx_point
        trace = _sweep_point(params, mesh, point, current, cutoff, dt,
                             t_horizon, film)
        return idx, point, trace

    tasks = list(enumerate(points))
    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(run_point, tasks))
    else:
        results = [run_point(t) for t in tasks]
    results.sort(key=lambda r: r[0])

    rows = []
    for idx, (kp, bp), trace in results:
        trace_path = out / f"point_{idx:03d}.csv"
        trace.to_csv(trace_path)
        regime = classify_lam_regime(kp, bp).regime.name if bp > 0.0 else "NONE"
        rows.append((kp, bp, float(trace.capacity_Ah[-1]),
                     float(trace.R_film_ohm[-1]), regime))

    env_path = out / "envelope.csv"
    with open(env_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(ENVELOPE_HEADER)
        for kp, bp, cap, rf, regime in rows:
            w.writerow([repr(kp), repr(bp), repr(cap), repr(rf), regime])

    caps = [r[2] for r in rows]
    films = [r[3] for r in rows]
    verdicts = {
        "swept": param,
        "capacity_strictly_decreasing": all(
            b < a for a, b in zip(caps, caps[1:])) if param == "betaprime_n" else None,
        "r_film_strictly_increasing": all(
            b > a for a, b in zip(films, films[1:])) if param == "betaprime_n" else None,
    }
    summary = {
        "param": param, "min": lo, "max": hi, "count": count,
        "cycles": cycles, "T_cycle_s": t_cycle, "film_ratio_ohm_m2": film,
        "kprime_n_fixed": kprime_fixed, "t_horizon_s": t_horizon,
        "current_A": current, "cutoff_V": cutoff,
        "monotonicity": verdicts, "resolved_config": raw,
    }
    summary_path = out / "sweep_summary.json"
    _dump_json(summary, summary_path)
    print(f"wrote {env_path} ({len(rows)} points) and {summary_path}")
    if verdicts["capacity_strictly_decreasing"] is not None:
        print(f"  capacity strictly decreasing in betaprime_n: "
              f"{verdicts['capacity_strictly_decreasing']}")
        print(f"  R_film strictly increasing in betaprime_n: "
              f"{verdicts['r_film_strictly_increasing']}")
    if args.verify:
        _verify_envelope_csv(env_path)
        _verify_json(summary_path, ["param", "monotonicity"])
        for idx in range(len(rows)):
            _verify_trace_csv(out / f"point_{idx:03d}.csv")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser / entry point
# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="espm",
        description="Single-particle cell simulator with degradation "
                    "dynamics and swarm-based parameter identification.")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one constant-current experiment")
    sim.add_argument("--config", required=True)
    group = sim.add_mutually_exclusive_group()
    group.add_argument("--c-rate", type=float, default=None,
                       help="current as a multiple of nominal capacity "
                            "(default 1/3)")
    group.add_argument("--current", type=float, default=None,
                       help="applied current in A (positive = discharge)")
    sim.add_argument("--cutoff", type=float, default=None,
                     help="terminal voltage (default from config)")
    sim.add_argument("--out", required=True)
    sim.add_argument("--verify", action="store_true",
                     help="re-read and validate emitted artifacts")
    sim.set_defaults(func=cmd_simulate)

    ident = sub.add_parser("identify", help="run one identification phase")
    ident.add_argument("--config", required=True)
    ident.add_argument("--data", required=True)
    ident.add_argument("--phase", required=True,
                       choices=["fresh", "aged1000", "aged3300"])
    ident.add_argument("--seed", type=int, default=None)
    ident.add_argument("--c-rate", type=float, default=None)
    ident.add_argument("--current", type=float, default=None)
    ident.add_argument("--jobs", type=int, default=1)
    ident.add_argument("--out", required=True)
    ident.add_argument("--verify", action="store_true")
    ident.set_defaults(func=cmd_identify)

    sweep = sub.add_parser("sweep",
                           help="aging-coefficient sensitivity sweep")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--param", default=None,
                       choices=["betaprime_n", "kprime_n", "both-grid"])
    sweep.add_argument("--min", type=float, default=None)
    sweep.add_argument("--max", type=float, default=None)
    sweep.add_argument("--count", type=int, default=None)
    sweep.add_argument("--cycles", type=float, default=None,
                       help="aging horizon in equivalent cycles")
    sweep.add_argument("--t-cycle", type=float, default=None,
                       help="seconds per cycle for the horizon remap")
    sweep.add_argument("--film-ratio", type=float, default=None,
                       help="initial L_SEI/kappa_SEI in Ohm*m^2")
    sweep.add_argument("--c-rate", type=float, default=None)
    sweep.add_argument("--current", type=float, default=None)
    sweep.add_argument("--cutoff", type=float, default=None)
    sweep.add_argument("--jobs", type=int, default=1)
    sweep.add_argument("--out", required=True)
    sweep.add_argument("--verify", action="store_true")
    sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DatasetError as exc:
        print(f"dataset error: {exc}", file=sys.stderr)
        return EXIT_DATASET
    except OptimizationError as exc:
        print(f"optimization error: {exc}", file=sys.stderr)
        return EXIT_OPTIMIZATION
    except SimulationError as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return EXIT_SIMULATION
    except EspmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIMULATION


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
