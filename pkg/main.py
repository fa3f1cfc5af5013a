#!/usr/bin/env python3
"""
Muscle Fatigue Toolkit - command-line entry point.

Subcommands:
    met              MET of the dynamic model and/or static models
    simulate         capacity / fatigue-index trajectory for a load profile
    validate-static  r / ICC of the dynamic model against all static models
    compare-dynamic  dynamic model vs. the Liu or Freund-Takala model
    list-models      static MET model catalog
    curves           MET curves of a model group on an f_MVC grid

Exit codes: 0 success, 2 input/domain error, 3 I/O error.
"""

import argparse
import logging
import os
import sys
from typing import Dict, List, Optional, Sequence

# Add project root to path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import pandas as pd

from fatigue_config import RunConfig, load_run_config
from fatigue_core import LoadProfile, MuscleParams, met, trajectory
from fatigue_errors import FatigueModelError
from met_bank import (
    GROUPS,
    catalog_frame,
    export_catalog_csv,
    get_model,
    list_models,
    met_curves,
    model_ids,
    monotonicity_audit,
    static_met,
)
from reference_models import (
    FreundTakalaParams,
    LiuParams,
    compare_capacity_curves,
    dynamic_capacity_curve,
    dynamic_capacity_under_profile,
    freund_takala_curve,
    liu_curve,
)
from report_io import (
    comparison_csv,
    frame_csv,
    met_frame,
    parse_load_profile,
    render,
    trajectory_csv,
    write_text,
)
from validation_stats import FmvcGrid, run_static_validation

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_IO = 3

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logging(level: str, log_file: Optional[str] = None) -> None:
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(level=getattr(logging, level), format=LOG_FORMAT, handlers=handlers, force=True)


# === Subcommands ===
def cmd_met(args: argparse.Namespace, config: RunConfig) -> int:
    params = config.muscle_params(args.muscle)
    if args.fmvc:
        values = list(args.fmvc)
    else:
        values = list(FmvcGrid.from_spec(args.grid or config.grid).values)

    selector = args.model
    if selector == "all":
        targets = ["dynamic"] + model_ids()
    else:
        targets = [selector]
    models = {t: get_model(t, config.huijgens_as_printed) for t in targets if t != "dynamic"}
    if config.huijgens_as_printed:
        monotonicity_audit(models.values())

    rows = []
    for target in targets:
        for f in values:
            value = met(params, f) if target == "dynamic" else static_met(models[target], f)
            rows.append((target, f, value))
    sys.stdout.write(render(met_frame(rows), config.output_format))
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace, config: RunConfig) -> int:
    profile = parse_load_profile(args.profile)
    params = config.muscle_params(args.muscle)
    traj = trajectory(profile, params, config.sample_step)
    text = trajectory_csv(traj)
    if args.output:
        write_text(args.output, text)
    else:
        sys.stdout.write(text)
    sys.stderr.write(f"overload_samples={len(traj.overloads)}\n")
    crossing = traj.first_crossing()
    if crossing is not None:
        logger.info("Capacity reached the load at t=%.6f min", crossing)
    return EXIT_OK


def _output_dir(args: argparse.Namespace, config: RunConfig) -> str:
    path = getattr(args, "output_dir", None) or config.resolved_output_dir()
    os.makedirs(path, exist_ok=True)
    return path


def cmd_validate_static(args: argparse.Namespace, config: RunConfig) -> int:
    report = run_static_validation(
        grid=config.fmvc_grid(),
        params=config.muscle_params(args.muscle),
        huijgens_as_printed=config.huijgens_as_printed,
        max_workers=config.max_workers,
    )
    out_dir = _output_dir(args, config)
    csv_path = os.path.join(out_dir, "validation.csv")
    report.to_csv(csv_path)
    if config.output_format == "text":
        write_text(os.path.join(out_dir, "validation.txt"), report.to_text() + "\n")
    sys.stdout.write(report.to_text() + "\n")
    failed = [r.model_id for r in report.rows if r.error]
    if failed:
        logger.warning("Models without a comparison: %s", ", ".join(failed))
    return EXIT_OK


def cmd_compare_dynamic(args: argparse.Namespace, config: RunConfig) -> int:
    step = args.step or config.ode_step
    if args.which == "liu":
        params = LiuParams.from_ratios(f_rate=args.f_rate, beta=args.beta, gamma=args.gamma, m0=args.m0)
        reference = liu_curve(params, args.horizon, step, args.method)
        dynamic = dynamic_capacity_curve(reference.times, params.f_rate)
    else:
        params = FreundTakalaParams(
            s_limit=args.s_limit, beta_decay=args.beta_decay, beta_recovery=args.beta_recovery
        )
        s0_init = params.s_limit if args.s0_init is None else args.s0_init
        reference = freund_takala_curve(params, args.load, s0_init, args.horizon, step)
        muscle = MuscleParams(mvc=params.s_limit, k=config.k)
        dynamic = dynamic_capacity_under_profile(
            reference.times, muscle, LoadProfile.constant(args.horizon, args.load)
        )

    comparison = compare_capacity_curves(reference, dynamic)
    frame = pd.DataFrame(
        {
            f"t_{reference.time_unit}": reference.times,
            "reference": reference.values,
            "dynamic": dynamic.values,
        }
    )
    out_path = os.path.join(_output_dir(args, config), f"compare_{args.which}.csv")
    write_text(out_path, comparison_csv(frame, comparison.max_abs_diff, comparison.pearson_r))
    sys.stdout.write(f"max_abs_diff={comparison.max_abs_diff:.6f} pearson_r={comparison.pearson_r:.6f}\n")
    return EXIT_OK


def cmd_list_models(args: argparse.Namespace, config: RunConfig) -> int:
    models = list_models(args.group, config.huijgens_as_printed)
    if config.huijgens_as_printed:
        monotonicity_audit(models)
    if args.output:
        export_catalog_csv(args.output, models)
        logger.info("Wrote %s", args.output)
    frame = catalog_frame(models)
    sys.stdout.write(render(frame, config.output_format))
    return EXIT_OK


def cmd_curves(args: argparse.Namespace, config: RunConfig) -> int:
    models = list_models(args.group, config.huijgens_as_printed)
    if config.huijgens_as_printed:
        monotonicity_audit(models)
    frame = met_curves(models, config.fmvc_grid().values, config.muscle_params(args.muscle))
    name = f"met_curves_{args.group}.csv" if args.group else "met_curves.csv"
    write_text(os.path.join(_output_dir(args, config), name), frame_csv(frame))
    sys.stdout.write(render(frame, config.output_format))
    return EXIT_OK


COMMANDS = {
    "met": cmd_met,
    "simulate": cmd_simulate,
    "validate-static": cmd_validate_static,
    "compare-dynamic": cmd_compare_dynamic,
    "list-models": cmd_list_models,
    "curves": cmd_curves,
}


# === Argument parsing ===
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="muscle-fatigue", description="Dynamic muscle fatigue model toolkit")
    parser.add_argument("--config", help="JSON run configuration (default: ./config.json if present)")
    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"])
    parser.add_argument("--format", dest="output_format", choices=["csv", "text"])
    parser.add_argument("--mvc", type=float, help="maximum voluntary contraction in N")
    parser.add_argument("--k", type=float, help="fatigue rate in 1/min")
    parser.add_argument("--muscle", help="named muscle from the config's muscle_overrides")
    parser.add_argument("--huijgens-as-printed", action="store_true", default=None,
                        help="use the Huijgens exponent exactly as published (-2.4)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("met", help="maximum endurance time")
    p.add_argument("--model", default="dynamic", help="'dynamic', a model id, or 'all'")
    p.add_argument("--fmvc", type=float, nargs="+", help="relative load(s) in (0, 1]")
    p.add_argument("--grid", help="'default' or 'start:stop:step' (used when --fmvc is absent)")

    p = sub.add_parser("simulate", help="trajectory for a load profile CSV")
    p.add_argument("profile", help="CSV with header duration_min,load_N")
    p.add_argument("--step", dest="sample_step", type=float, help="sample step in minutes")
    p.add_argument("--output", help="trajectory CSV path (default: stdout)")

    p = sub.add_parser("validate-static", help="r / ICC against the static MET models")
    p.add_argument("--grid", help="'default' or 'start:stop:step'")
    p.add_argument("--output-dir")

    p = sub.add_parser("compare-dynamic", help="compare with a reference dynamic model")
    p.add_argument("which", choices=["liu", "freund"])
    p.add_argument("--horizon", type=float, default=3.0, help="seconds (liu) or minutes (freund)")
    p.add_argument("--step", type=float, help="integration/sample step in the model's time unit")
    p.add_argument("--output-dir")
    p.add_argument("--f-rate", type=float, default=1.0, help="Liu fatigue factor F in 1/s")
    p.add_argument("--beta", type=float, default=1000.0, help="Liu B/F")
    p.add_argument("--gamma", type=float, default=0.0, help="Liu R/F")
    p.add_argument("--m0", type=float, default=1.0, help="Liu total motor units")
    p.add_argument("--method", choices=["closed-form", "ode"], default="closed-form")
    p.add_argument("--s-limit", type=float, default=1.0, help="Freund-Takala force limit")
    p.add_argument("--beta-decay", type=float, default=1.0)
    p.add_argument("--beta-recovery", type=float, default=1.0)
    p.add_argument("--load", type=float, default=0.0, help="Freund-Takala constant force S")
    p.add_argument("--s0-init", type=float, help="initial capacity (default: s-limit)")

    p = sub.add_parser("list-models", help="static MET model catalog")
    p.add_argument("--group", choices=list(GROUPS))
    p.add_argument("--output", help="also export the catalog as CSV")

    p = sub.add_parser("curves", help="MET curves for a model group")
    p.add_argument("--group", choices=list(GROUPS))
    p.add_argument("--grid", help="'default' or 'start:stop:step'")
    p.add_argument("--output-dir")
    return parser


def _config_overrides(args: argparse.Namespace) -> Dict[str, object]:
    keys = ["log_level", "output_format", "mvc", "k", "huijgens_as_printed", "grid", "sample_step", "output_dir"]
    return {key: getattr(args, key, None) for key in keys}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_INPUT

    try:
        config = load_run_config(args.config, _config_overrides(args))
    except OSError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_IO
    except ValueError as e:
        sys.stderr.write(f"error: invalid configuration: {e}\n")
        return EXIT_INPUT

    setup_logging(config.log_level, config.log_file)
    try:
        return COMMANDS[args.command](args, config)
    except (FatigueModelError, ValueError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INPUT
    except OSError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_IO
    except Exception as e:
        logger.exception("Unexpected error in %s", args.command)
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
