#!/usr/bin/env python3
"""
Parameter Sweep

Evaluates a grid over (N, chi, theta) in parallel. With --t-end auto each
point reports its optimal time and the state there:

    N, chi, theta, t_opt, boundary_flag, peak_var, peak_var_normalized,
    survival_at_topt, cat_fidelity_at_topt, t_c, initial_var,
    initial_var_normalized, t_eval, error

With a numeric --t-end every point is evaluated at that fixed time:

    N, chi, theta, t_end, var_sz, var_sz_normalized, survival, cat_fidelity, error

Rows are sorted by N, chi, theta. Points that fail carry a message in `error`
and the run exits with code 3.

Usage:
    python -m scripts.run_sweep --N 10:200:2 --chi 0:1.5707963267948966:0.015707963267948967
    python -m scripts.run_sweep --N 100 --chi 0.1,0.2,0.3 --t-end 0.0102 --stdout
"""

import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

from config.run_config import RunConfig
from config.settings import Paths, Sweep
from scripts.arguments import (
    EXIT_CONFIG_ERROR, EXIT_OK, EXIT_PARTIAL_FAILURE, USER_ERRORS,
    RunArgumentParser, add_run_arguments, config_from_args, output_destination,
)
from utils.logging_setup import (
    get_sweep_logger, log_data_summary, log_file_operation, log_script_end, log_script_start,
)
from utils.output_helpers import file_size_mb, write_table
from utils.sweep import GridPoint, SweepResult, run_sweep

SCRIPT_NAME = "Parameter Sweep"

SWEEP_DEFAULTS = {
    "n_atoms": {"start": Sweep.N_START, "stop": Sweep.N_STOP, "step": Sweep.N_STEP},
    "chi": {"start": Sweep.CHI_START, "stop": Sweep.CHI_STOP, "step": Sweep.CHI_STEP},
}


def parse_args(argv=None):
    parser = RunArgumentParser(prog="sweep", description='Sweep t_opt, peak variance and survival over a grid')
    add_run_arguments(parser)
    return parser.parse_args(argv)


def grid_points(config: RunConfig) -> list[GridPoint]:
    t_end = config.t_end if config.fixed_time else None
    return [
        GridPoint(n_atoms=n, chi=chi, theta=theta, gamma=config.gamma, t_end=t_end, order=config.order)
        for n in config.n_atoms
        for chi in config.chi
        for theta in config.theta
    ]


def sweep(config: RunConfig, logger=None) -> SweepResult:
    """Run the configured grid on config.worker_count processes."""
    points = grid_points(config)
    odd = sorted({p.n_atoms for p in points if p.n_atoms % 2 and p.theta == 0})
    if logger and odd:
        logger.warning(f"Odd N without rotation ({odd[:5]}{'...' if len(odd) > 5 else ''}): "
                       "the ground state stays empty and t_opt may be boundary-flagged")
    if logger:
        logger.info(f"Evaluating {len(points):,} grid points on {config.worker_count} workers")
    return run_sweep(points, workers=config.worker_count)


def main(argv=None) -> int:
    args = parse_args(argv)
    logger = get_sweep_logger(__name__, args.log_level)

    try:
        config = config_from_args(args, SWEEP_DEFAULTS)
    except USER_ERRORS as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG_ERROR

    mode = f"fixed t_end={config.t_end}" if config.fixed_time else "t_opt"
    log_script_start(logger, SCRIPT_NAME, f"{len(config.n_atoms)} N x {len(config.chi)} chi x "
                                          f"{len(config.theta)} theta, evaluated at {mode}")

    result = sweep(config, logger)
    log_data_summary(logger, result.rows, "sweep rows")

    suffix = "fixed" if result.fixed_time else "topt"
    default_path = Paths.SWEEPS / f"sweep_{suffix}"
    path = write_table(result.rows, output_destination(config, default_path, args.stdout),
                       config.output_format, args.stdout)
    if path:
        log_file_operation(logger, "saved", path, True, file_size_mb(path))

    if result.n_failed:
        logger.warning(f"{result.n_failed:,} grid points failed; see the error column")
        log_script_end(logger, SCRIPT_NAME, False)
        return EXIT_PARTIAL_FAILURE

    log_script_end(logger, SCRIPT_NAME, True)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
