#!/usr/bin/env python3
"""
No-Click Trajectory

Evolves one seeded initial state (N, chi, theta) under the non-Hermitian
no-click Hamiltonian and writes the trajectory table:

    t, var_sz, var_sz_normalized, survival, cat_fidelity, cat_phase

With --t-end auto the window is the t_opt search horizon. --target-variance
additionally reports the earliest time a normalized variance is reached.

Usage:
    python -m scripts.run_noclick --N 100 --chi 0.2
    python -m scripts.run_noclick --N 100 --chi 0.1 --t-end 0.1 --stdout
"""

import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

import pandas as pd

from config.run_config import RunConfig
from config.settings import Paths
from scripts.arguments import (
    EXIT_CHECK_FAILED, EXIT_CONFIG_ERROR, EXIT_OK, USER_ERRORS,
    RunArgumentParser, add_run_arguments, config_from_args, output_destination,
)
from utils.errors import SuperradianceError
from utils.logging_setup import (
    get_noclick_logger, log_data_summary, log_file_operation, log_script_end, log_script_start,
)
from utils.noclick import (
    decay_spectrum, default_t_max, earliest_time_for_variance, noclick_trajectory,
)
from utils.oat import PrepSpec, prepare
from utils.output_helpers import file_size_mb, write_table

SCRIPT_NAME = "No-Click Trajectory"

TRAJECTORY_COLUMNS = ["t", "var_sz", "var_sz_normalized", "survival", "cat_fidelity", "cat_phase"]


def parse_args(argv=None):
    parser = RunArgumentParser(prog="noclick", description='Evolve one state along the no-click trajectory')
    add_run_arguments(parser)
    parser.add_argument('--n-samples', dest='n_samples', type=int, help='Number of output times (default 201)')
    parser.add_argument('--t-max', dest='t_max', type=float, help='t_opt search horizon')
    parser.add_argument('--target-variance', dest='target_variance', type=float,
                        help='Report the earliest time Var S_z / (N^2/4) reaches this value')
    return parser.parse_args(argv)


def trajectory_table(config: RunConfig, logger=None) -> tuple[pd.DataFrame, dict]:
    """
    Evaluate the no-click trajectory of the configured point.

    Returns:
        (table, summary): Trajectory table and a dict of t_opt diagnostics
    """
    n_atoms, chi, theta = config.single_point()
    state0 = prepare(PrepSpec(n_atoms, chi, theta, config.order))
    spectrum = decay_spectrum(n_atoms, config.gamma)

    t_end = config.t_end if config.fixed_time else default_t_max(state0, spectrum)
    trajectory = noclick_trajectory(state0, spectrum, t_end, config.n_samples, t_max=config.t_max)

    table = pd.DataFrame({
        "t": trajectory.times,
        "var_sz": trajectory.var_sz,
        "var_sz_normalized": trajectory.var_sz_normalized,
        "survival": trajectory.survival_probability,
        "cat_fidelity": trajectory.cat_fidelity,
        "cat_phase": trajectory.cat_phase,
    })[TRAJECTORY_COLUMNS]

    summary = {
        "t_opt": trajectory.t_opt,
        "peak_var": trajectory.peak_var,
        "t_opt_is_boundary": trajectory.t_opt_is_boundary,
    }
    if config.target_variance is not None:
        hit = earliest_time_for_variance(state0, spectrum, config.target_variance, t_max=t_end)
        summary["target_time"] = None if hit is None else hit[0]
        summary["target_survival"] = None if hit is None else hit[1]

    if logger and n_atoms % 2 and theta == 0:
        logger.warning(f"Odd N={n_atoms} with theta=0: the ground state stays empty and t_opt may sit on the boundary")
    return table, summary


def main(argv=None) -> int:
    args = parse_args(argv)
    logger = get_noclick_logger(__name__, args.log_level)

    try:
        config = config_from_args(args)
        n_atoms, chi, theta = config.single_point()
    except USER_ERRORS as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG_ERROR

    log_script_start(logger, SCRIPT_NAME, f"N={n_atoms}, chi={chi}, theta={theta}, gamma={config.gamma}")

    try:
        table, summary = trajectory_table(config, logger)
    except USER_ERRORS as e:
        logger.error(f"Invalid parameters: {e}")
        log_script_end(logger, SCRIPT_NAME, False)
        return EXIT_CONFIG_ERROR
    except (SuperradianceError, ArithmeticError) as e:
        logger.error(f"Numerical failure: {e}")
        log_script_end(logger, SCRIPT_NAME, False)
        return EXIT_CHECK_FAILED

    boundary = " (boundary)" if summary["t_opt_is_boundary"] else ""
    logger.info(f"t_opt = {summary['t_opt']:.6g}{boundary}, peak Var S_z = {summary['peak_var']:.6g}")
    if "target_time" in summary:
        if summary["target_time"] is None:
            logger.info(f"Target variance {config.target_variance} not reached on the window")
        else:
            logger.info(f"Target variance {config.target_variance} reached at t = {summary['target_time']:.6g} "
                        f"with survival {summary['target_survival']:.4g}")
    log_data_summary(logger, table, "no-click trajectory")

    default_path = Paths.TRAJECTORIES / f"noclick_N{n_atoms}_chi{chi:g}_theta{theta:g}"
    path = write_table(table, output_destination(config, default_path, args.stdout),
                       config.output_format, args.stdout)
    if path:
        log_file_operation(logger, "saved", path, True, file_size_mb(path))

    log_script_end(logger, SCRIPT_NAME, True)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
