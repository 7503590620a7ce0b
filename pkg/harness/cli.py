"""
Command-line entry point: titrate, tune, run, exp1|exp2|exp3, compare, openloop, valve-sweep
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import ValidationError

from controller.fuzzy_controller import FuzzyController, load_fuzzy_tables
from controller.pid_controller import find_ultimate, p_only_probe, zn_tune
from events.event_bus import EventBus, log_subscriber
from harness.acceptance import Check, check_comparison, check_step_timing, check_tracking, report
from harness.config import ExperimentConfig, OpenLoopConfig, TuningConfig, ValveSweepConfig, load_config, save_config
from harness.experiments import experiment_1, experiment_2, experiment_3
from harness.metrics import Metrics, compute_metrics
from harness.open_loop import open_loop_response, valve_sweep
from harness.plotting import plot, plot_comparison, plot_valve_characteristic
from harness.runner import run_experiment
from harness.trace import SimTrace
from harness.trace_io import write_csv
from model.chemistry import default_constants, titration_curve
from utility.errors import ConfigError, PhSimError, StateDiverged
from utility.settings import configure_logging, get_settings

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_DIVERGED = 3


def _fuzzy(args) -> Optional[FuzzyController]:
    path = getattr(args, "fuzzy_tables", None)
    return load_fuzzy_tables(path) if path else None


def _out_dir(args) -> Path:
    out = Path(args.out_dir or get_settings().output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_metrics(path: Path, metrics: Dict[str, Metrics], checks: Sequence[Check] = ()) -> None:
    doc = {name: m.model_dump() for name, m in metrics.items()}
    if checks:
        doc["checks"] = [c.model_dump() for c in checks]
    path.write_text(json.dumps(doc, indent=2) + "\n")


def _print_metrics(name: str, metrics: Metrics) -> None:
    print(f"== {name} ==")
    print(metrics.table())


def _simulate(cfg: ExperimentConfig, name: str, bus: EventBus, fuzzy: Optional[FuzzyController]) -> SimTrace:
    return run_experiment(cfg, bus=bus, fuzzy=fuzzy, name=name)


def cmd_titrate(args, bus: EventBus) -> int:
    k = default_constants()
    betas = np.linspace(0.0, args.beta_max, args.steps)
    curve = titration_curve(args.alpha, list(betas), k)
    frame = pd.DataFrame(curve, columns=["beta_mol_per_l", "ph"])
    if args.out:
        frame.to_csv(args.out, index=False, float_format="%.17g", lineterminator="\n")
        logger.info("titration curve written to %s", args.out)
    else:
        print(frame.to_string(index=False))
    return EXIT_OK


def cmd_tune(args, bus: EventBus) -> int:
    cfg = load_config(args.config, TuningConfig) if args.config else TuningConfig()
    ultimate = find_ultimate(p_only_probe(cfg.flow_loop), cfg.g_start, cfg.g_max, cfg.rel_tol)
    gains = zn_tune(ultimate, cfg.kind)
    print(f"ultimate gain G={ultimate.g:.4f}  period P={ultimate.p:.4f} s")
    print(f"{cfg.kind} gains kp={gains.kp:.4f}  ki={gains.ki:.4f}  kd={gains.kd:.4f}")
    return EXIT_OK


def cmd_run(args, bus: EventBus) -> int:
    cfg = load_config(args.config)
    trace = _simulate(cfg, Path(args.config).stem, bus, _fuzzy(args))
    write_csv(trace, args.out)
    if args.plot:
        plot(trace, cfg.schedule, args.plot)
    metrics = compute_metrics(trace, cfg.schedule)
    _print_metrics(Path(args.config).stem, metrics)
    _write_metrics(Path(args.out).parent / "metrics.json", {"run": metrics})
    return EXIT_OK


def _single_preset(name: str, cfg: ExperimentConfig, args, bus: EventBus, checker) -> int:
    out = _out_dir(args)
    save_config(cfg, out / f"{name}.json")
    trace = _simulate(cfg, name, bus, _fuzzy(args))
    write_csv(trace, out / f"{name}.csv")
    plot(trace, cfg.schedule, out / f"{name}.svg", title=name)
    metrics = compute_metrics(trace, cfg.schedule)
    checks = checker(trace, cfg.schedule)
    _print_metrics(name, metrics)
    print(report(checks))
    _write_metrics(out / "metrics.json", {name: metrics}, checks)
    return EXIT_OK


def cmd_exp1(args, bus: EventBus) -> int:
    return _single_preset("exp1", experiment_1(), args, bus, check_step_timing)


def cmd_exp2(args, bus: EventBus) -> int:
    return _single_preset("exp2", experiment_2(), args, bus, check_tracking)


def _compare(
    name_a: str, cfg_a: ExperimentConfig, name_b: str, cfg_b: ExperimentConfig, args, bus: EventBus
) -> List[Check]:
    out = _out_dir(args)
    fuzzy = _fuzzy(args)
    traces = {}
    metrics = {}
    for name, cfg in ((name_a, cfg_a), (name_b, cfg_b)):
        save_config(cfg, out / f"{name}.json")
        traces[name] = _simulate(cfg, name, bus, fuzzy)
        write_csv(traces[name], out / f"{name}.csv")
        metrics[name] = compute_metrics(traces[name], cfg.schedule)
        _print_metrics(name, metrics[name])
    plot_comparison(list(traces.values()), list(traces), out / "comparison.svg", schedule=cfg_a.schedule)
    checks = check_comparison(metrics[name_a], metrics[name_b])
    _write_metrics(out / "metrics.json", metrics, checks)
    return checks


def cmd_exp3(args, bus: EventBus) -> int:
    hybrid, fuzzy_only = experiment_3()
    print(report(_compare("hybrid", hybrid, "fuzzy_only", fuzzy_only, args, bus)))
    return EXIT_OK


def cmd_compare(args, bus: EventBus) -> int:
    cfg_a = load_config(args.config_a)
    cfg_b = load_config(args.config_b)
    name_a, name_b = Path(args.config_a).stem, Path(args.config_b).stem
    if name_a == name_b:
        name_a, name_b = f"{name_a}_a", f"{name_b}_b"
    checks = _compare(name_a, cfg_a, name_b, cfg_b, args, bus)
    print(report(checks))
    return EXIT_OK


def cmd_openloop(args, bus: EventBus) -> int:
    cfg = load_config(args.config, OpenLoopConfig) if args.config else OpenLoopConfig()
    out = _out_dir(args)
    save_config(cfg, out / "openloop.json")
    trace = open_loop_response(cfg, bus)
    write_csv(trace, out / "openloop.csv")
    plot(trace, None, out / "openloop.svg", title="open-loop response")
    print(f"pH {trace.ph[0]:.3f} -> {trace.ph[-1]:.3f} after {cfg.duration:g} s")
    return EXIT_OK


def cmd_valve_sweep(args, bus: EventBus) -> int:
    cfg = load_config(args.config, ValveSweepConfig) if args.config else ValveSweepConfig()
    out = _out_dir(args)
    frame = valve_sweep(cfg)
    frame.to_csv(out / "valve_sweep.csv", index=False, float_format="%.17g", lineterminator="\n")
    plot_valve_characteristic(frame, out / "valve_sweep.svg", title="valve characteristic")
    print(frame.to_string(index=False))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phsim", description="pH neutralization plant and hybrid fuzzy-PID control")
    parser.add_argument("--log-level", default=None, help="overrides PHSIM_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("titrate", help="steady titration curve at fixed alpha")
    p.add_argument("--alpha", type=float, required=True, help="mol/L")
    p.add_argument("--beta-max", type=float, required=True, help="mol/L")
    p.add_argument("--steps", type=int, default=101)
    p.add_argument("--out", default=None, help="CSV path; printed when omitted")
    p.set_defaults(func=cmd_titrate)

    p = sub.add_parser("tune", help="ultimate gain and Ziegler-Nichols gains of a flow loop")
    p.add_argument("--config", default=None, help="TuningConfig JSON")
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("run", help="simulate one experiment config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="trace CSV")
    p.add_argument("--plot", default=None, help="SVG path")
    p.add_argument("--fuzzy-tables", default=None)
    p.set_defaults(func=cmd_run)

    for name, func in (("exp1", cmd_exp1), ("exp2", cmd_exp2), ("exp3", cmd_exp3)):
        p = sub.add_parser(name, help=f"preset {name} with acceptance checks")
        p.add_argument("--out-dir", default=None)
        p.add_argument("--fuzzy-tables", default=None)
        p.set_defaults(func=func)

    p = sub.add_parser("compare", help="two configs over one plot and metrics table")
    p.add_argument("--config-a", required=True)
    p.add_argument("--config-b", required=True)
    p.add_argument("--out-dir", default=None)
    p.add_argument("--fuzzy-tables", default=None)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("openloop", help="tank response to a step in the valve commands, no controller")
    p.add_argument("--config", default=None, help="OpenLoopConfig JSON")
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=cmd_openloop)

    p = sub.add_parser("valve-sweep", help="opening and closing characteristic of both valves")
    p.add_argument("--config", default=None, help="ValveSweepConfig JSON")
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=cmd_valve_sweep)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    bus = log_subscriber(EventBus())
    try:
        return args.func(args, bus)
    except (ConfigError, ValidationError) as exc:
        logger.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except StateDiverged as exc:
        logger.error("simulation diverged: %s", exc)
        return EXIT_DIVERGED
    except (PhSimError, OSError, ValueError) as exc:
        logger.error("%s", exc)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
