"""Command line interface.

Subcommands:
    simulate    one synchronization cycle -> timestamp CSV plus truth sidecar
    estimate    timestamp CSV -> parameter estimates (optionally denoised first)
    experiment  full Monte Carlo sweep -> results.csv / results.json / curves.svg
    crlb        variance bounds for a given configuration -> JSON on stdout

Every config is a single JSON document; experiment configs mirror
ExperimentConfig field names, simulate/crlb configs use point-valued
parameters with the same spelling.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .clock_model import ClockParams
from .crlb import CrlbInputs, crlb_offset, crlb_skew
from .denoise import DenoiseConfig, lrma_denoise, svd_truncate
from .estimator import EstimateReport, mle_estimate
from .exchange_sim import DelayModel, SchedulePlan, simulate_cycle, write_exchange_csv
from .harness import ExperimentConfig, emit_outputs, run_experiment
from .matrix_forms import build_stacked, read_matrix_csv

_CYCLE_DEFAULTS = {
    "alpha": 1.0,
    "beta": 0.0,
    "d": 1.0,
    "sigma2": 1.0,
    "n_rounds": 10,
    "start_time": 0.0,
    "inter_round_interval": 1.0,
    "processing_delay": 0.2,
    "distribution": "gaussian",
    "seed": 0,
}


def _load_cycle_config(path) -> dict:
    data = json.loads(Path(path).read_text())
    unknown = set(data) - set(_CYCLE_DEFAULTS)
    if unknown:
        raise ValueError(f"unknown config fields: {sorted(unknown)}")
    merged = dict(_CYCLE_DEFAULTS)
    merged.update(data)
    return merged


def _cmd_simulate(args) -> int:
    cfg = _load_cycle_config(args.config)
    log = simulate_cycle(
        ClockParams(skew=cfg["alpha"], offset=cfg["beta"]),
        DelayModel(
            fixed_delay=cfg["d"],
            processing_delay=cfg["processing_delay"],
            noise_std=float(np.sqrt(cfg["sigma2"])),
            distribution=cfg["distribution"],
        ),
        SchedulePlan(
            rounds=cfg["n_rounds"],
            start_time=cfg["start_time"],
            inter_round_interval=cfg["inter_round_interval"],
        ),
        seed=cfg["seed"],
    )
    write_exchange_csv(log, args.out)
    print(f"wrote {args.out} and {args.out}.json ({log.rounds} rounds)", file=sys.stderr)
    return 0


def _cmd_estimate(args) -> int:
    matrix = read_matrix_csv(args.infile)
    if args.method == "raw":
        method = "MLE_RAW"
    elif args.method == "svd":
        matrix = svd_truncate(matrix, args.rank)
        method = "MLE_SVD"
    else:
        if args.tau is not None:
            config = DenoiseConfig(rank_k=args.rank, threshold_policy="fixed", tau=args.tau)
        else:
            config = DenoiseConfig(rank_k=args.rank)
        matrix = lrma_denoise(matrix, config)
        method = "MLE_LRMA"
    report = mle_estimate(build_stacked(matrix), method=method)
    print(EstimateReport.csv_header())
    print(report.csv_row())
    return 0


def _cmd_experiment(args) -> int:
    config = ExperimentConfig.from_json_file(args.config)
    if args.fixed_params is not None:
        config = ExperimentConfig.from_json_dict(
            {**config.to_json_dict(), "fixed_params": args.fixed_params}
        )
    table = run_experiment(config)
    paths = emit_outputs(table, args.out_dir)
    failed = sum(table.meta["failed_trials"].values())
    total_ms = sum(table.meta["measured_wall_time_ms"].values())
    print(
        f"experiment done: {len(table.rows)} result rows, {failed} failed trials, "
        f"{total_ms:.0f} ms compute on backend {table.meta['backend']}",
        file=sys.stderr,
    )
    for name in sorted(paths):
        print(f"  {paths[name]}", file=sys.stderr)
    return 0


def _cmd_crlb(args) -> int:
    cfg = _load_cycle_config(args.config)
    n = int(cfg["n_rounds"])
    t1 = cfg["start_time"] + np.arange(n, dtype=np.float64) * cfg["inter_round_interval"]
    t3 = cfg["alpha"] * (t1 + cfg["d"]) + cfg["beta"] + cfg["processing_delay"]
    inputs = CrlbInputs(
        alpha=cfg["alpha"], beta=cfg["beta"], d=cfg["d"], sigma2=cfg["sigma2"], t1=t1, t3=t3
    )
    print(json.dumps({"crlb_skew": crlb_skew(inputs), "crlb_offset": crlb_offset(inputs)}, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clocksync",
        description="Two-node clock synchronization: simulation, denoising, estimation, bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="simulate one cycle to a timestamp CSV")
    p_sim.add_argument("--config", required=True, help="JSON cycle configuration")
    p_sim.add_argument("--out", required=True, help="output CSV path")
    p_sim.set_defaults(func=_cmd_simulate)

    p_est = sub.add_parser("estimate", help="estimate parameters from a timestamp CSV")
    p_est.add_argument("--in", dest="infile", required=True, help="input timestamp CSV")
    p_est.add_argument("--method", choices=("raw", "svd", "lrma"), required=True)
    p_est.add_argument("--rank", type=int, default=2, help="truncation rank (default 2)")
    p_est.add_argument("--tau", type=float, default=None, help="fixed soft threshold for lrma")
    p_est.set_defaults(func=_cmd_estimate)

    p_exp = sub.add_parser("experiment", help="run the Monte Carlo sweep")
    p_exp.add_argument("--config", required=True, help="JSON experiment configuration")
    p_exp.add_argument("--out-dir", required=True, help="output directory")
    p_exp.add_argument(
        "--fixed-params",
        nargs=3,
        type=float,
        metavar=("ALPHA", "BETA", "D"),
        default=None,
        help="freeze the clock parameters instead of redrawing per trial",
    )
    p_exp.set_defaults(func=_cmd_experiment)

    p_crlb = sub.add_parser("crlb", help="print the skew/offset variance bounds as JSON")
    p_crlb.add_argument("--config", required=True, help="JSON cycle configuration")
    p_crlb.set_defaults(func=_cmd_crlb)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
