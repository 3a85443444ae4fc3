#!/usr/bin/env python3
"""
Figure Data

Writes the data grids behind each figure; plotting is left to external tools.
Each figure produces one or more tables named <figure>_<part>.<format>:

    fig2   noclick (chi, t, var_sz, var_sz_normalized, survival, cat_fidelity)
           paths   (trajectory, t, var_sz, mean_sz, n_jumps) - ten MCWF trajectories at chi = 0.2
    fig3a  topt    (N, chi, t_opt, t_c) for chi in {0.1, 0.2}
    fig3b  topt    (N, chi, t_opt, boundary_flag) over the default (N, chi) grid
    fig4   scan    full sweep rows over the default (N, chi) grid
           cut     (chi, peak_var_normalized, survival_at_topt, initial_var_normalized,
                    cat_fidelity_at_topt) at N = 100
    s1     parity  (N, theta, t, var_sz_normalized, survival) for N in {100, 101}, theta in {0, 0.1}
    s2     a, b, c, d, uncertainty - variance and cat fidelity panels, t_end fixed at the operating-point t_opt except panel a
    s3     histogram (n, p_n, stderr) and precision (eta, precision) at N = 100, chi = 0.2

Tables built from sweeps also carry the per-point `error` column.

Usage:
    python -m scripts.make_figure fig3a
    python -m scripts.make_figure s3 --seed-base 7 --workers 8
"""

import math
import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

import numpy as np
import pandas as pd

from config.run_config import RunConfig
from config.settings import Sweep, get_figure_file_path
from scripts.arguments import (
    EXIT_CHECK_FAILED, EXIT_CONFIG_ERROR, EXIT_OK, EXIT_PARTIAL_FAILURE, USER_ERRORS,
    RunArgumentParser, add_run_arguments, config_from_args,
)
from scripts.run_mcwf import precision_table
from utils.errors import SuperradianceError, UnknownFigureError
from utils.logging_setup import (
    get_figure_logger, log_data_summary, log_file_operation, log_script_end, log_script_start,
)
from utils.mcwf import jump_histogram, sample_observable_paths
from utils.noclick import decay_spectrum, find_t_opt, noclick_trajectory
from utils.oat import PrepOrder, PrepSpec, prepare
from utils.output_helpers import file_size_mb, write_table
from utils.sweep import GridPoint, grid_values, run_sweep

SCRIPT_NAME = "Figure Data"

OPERATING_N = 100
OPERATING_CHI = 0.2
TRAJECTORY_T_END = 0.1
TRAJECTORY_SAMPLES = 401
FIG2_CHIS = (0.1, 0.2, 0.3)
FIG2_PATHS = 10
FIG3A_CHIS = (0.1, 0.2)
S1_ATOMS = (100, 101)
S1_THETAS = (0.0, 0.1)

EVEN_N = grid_values(Sweep.N_START, Sweep.N_STOP, Sweep.N_STEP)
ALL_N = grid_values(Sweep.N_START, Sweep.N_STOP, 1)
CHI_GRID = grid_values(Sweep.CHI_START, Sweep.CHI_STOP, Sweep.CHI_STEP)
CHI_FINE = grid_values(Sweep.CHI_START, Sweep.CHI_STOP, Sweep.CHI_STEP / 2)
THETA_GRID = grid_values(0.0, math.pi / 4, math.pi / 200)
UNCERTAIN_N = grid_values(90, 110, 1)
UNCERTAIN_CHI = grid_values(0.15, 0.25, 0.0025)


def parse_args(argv=None):
    parser = RunArgumentParser(prog="figure", description='Write the data behind a figure')
    parser.add_argument('name', help=f"Figure name: {', '.join(FIGURES)}")
    add_run_arguments(parser, stochastic=True)
    parser.add_argument('--output-dir', dest='output_dir', type=str, help='Directory for the tables')
    return parser.parse_args(argv)


def _points(config: RunConfig, n_values, chi_values, theta_values, t_end=None) -> list[GridPoint]:
    return [GridPoint(int(n), chi, theta, config.gamma, t_end, config.order)
            for n in n_values for chi in chi_values for theta in theta_values]


def _operating_t_opt(config: RunConfig) -> float:
    state0 = prepare(PrepSpec(OPERATING_N, OPERATING_CHI, 0.0, config.order))
    return find_t_opt(state0, decay_spectrum(OPERATING_N, config.gamma)).t_opt


def _fixed_t_end(config: RunConfig) -> float:
    """Explicit --t-end, else t_opt of the operating point (N = 100, chi = 0.2, theta = 0)."""
    return config.t_end if config.fixed_time else _operating_t_opt(config)


def _trajectory_frame(config: RunConfig, n_atoms: int, chi: float, theta: float, order=None) -> pd.DataFrame:
    state0 = prepare(PrepSpec(n_atoms, chi, theta, order or config.order))
    spectrum = decay_spectrum(n_atoms, config.gamma)
    trajectory = noclick_trajectory(state0, spectrum, TRAJECTORY_T_END / config.gamma, TRAJECTORY_SAMPLES)
    return pd.DataFrame({
        "N": n_atoms,
        "chi": chi,
        "theta": theta,
        "t": trajectory.times,
        "var_sz": trajectory.var_sz,
        "var_sz_normalized": trajectory.var_sz_normalized,
        "survival": trajectory.survival_probability,
        "cat_fidelity": trajectory.cat_fidelity,
    })


def figure_fig2(config: RunConfig) -> dict[str, pd.DataFrame]:
    noclick = pd.concat([_trajectory_frame(config, OPERATING_N, chi, 0.0) for chi in FIG2_CHIS],
                        ignore_index=True)
    state0 = prepare(PrepSpec(OPERATING_N, OPERATING_CHI, 0.0, config.order))
    grid = np.linspace(0.0, TRAJECTORY_T_END / config.gamma, TRAJECTORY_SAMPLES)
    paths = sample_observable_paths(state0, decay_spectrum(OPERATING_N, config.gamma), grid, FIG2_PATHS,
                                    config.require_seed(), workers=config.worker_count)
    return {
        "noclick": noclick[["chi", "t", "var_sz", "var_sz_normalized", "survival", "cat_fidelity"]],
        "paths": paths,
    }


def figure_fig3a(config: RunConfig) -> dict[str, pd.DataFrame]:
    rows = run_sweep(_points(config, EVEN_N, FIG3A_CHIS, [0.0]), config.worker_count).rows
    return {"topt": rows[["N", "chi", "t_opt", "t_c", "error"]]}


def figure_fig3b(config: RunConfig) -> dict[str, pd.DataFrame]:
    rows = run_sweep(_points(config, EVEN_N, CHI_GRID, [0.0]), config.worker_count).rows
    return {"topt": rows[["N", "chi", "t_opt", "boundary_flag", "error"]]}


def figure_fig4(config: RunConfig) -> dict[str, pd.DataFrame]:
    scan = run_sweep(_points(config, EVEN_N, CHI_GRID, [0.0]), config.worker_count).rows
    cut = run_sweep(_points(config, [OPERATING_N], CHI_FINE, [0.0]), config.worker_count).rows
    columns = ["chi", "peak_var_normalized", "survival_at_topt", "initial_var_normalized", "cat_fidelity_at_topt",
               "error"]
    return {"scan": scan, "cut": cut[columns]}


def figure_s1(config: RunConfig) -> dict[str, pd.DataFrame]:
    # the rotated curves are built twist-then-rotate, the order under which N = 101 tracks N = 100
    frames = [_trajectory_frame(config, n, OPERATING_CHI, theta, PrepOrder.TWIST_THEN_ROTATE)
              for n in S1_ATOMS for theta in S1_THETAS]
    parity = pd.concat(frames, ignore_index=True)
    return {"parity": parity[["N", "theta", "t", "var_sz_normalized", "survival"]]}


def figure_s2(config: RunConfig) -> dict[str, pd.DataFrame]:
    t_end = _fixed_t_end(config)
    workers = config.worker_count
    fixed_columns = ["N", "chi", "theta", "var_sz_normalized", "cat_fidelity", "error"]
    panel_a = run_sweep(_points(config, EVEN_N, CHI_GRID, [0.0]), workers).rows
    panel_b = run_sweep(_points(config, [OPERATING_N + 1], CHI_GRID, THETA_GRID, t_end), workers).rows
    panel_c = run_sweep(_points(config, ALL_N, CHI_GRID, [0.1], t_end), workers).rows
    panel_d = run_sweep(_points(config, ALL_N, [OPERATING_CHI], THETA_GRID, t_end), workers).rows
    uncertainty = run_sweep(_points(config, UNCERTAIN_N, UNCERTAIN_CHI, [0.0], t_end), workers).rows
    return {
        "a": panel_a[["N", "chi", "theta", "peak_var_normalized", "cat_fidelity_at_topt", "error"]],
        "b": panel_b[fixed_columns],
        "c": panel_c[fixed_columns],
        "d": panel_d[fixed_columns],
        "uncertainty": uncertainty[["N", "chi", "var_sz", "var_sz_normalized", "survival", "error"]],
    }


def figure_s3(config: RunConfig) -> dict[str, pd.DataFrame]:
    state0 = prepare(PrepSpec(OPERATING_N, OPERATING_CHI, 0.0, config.order))
    spectrum = decay_spectrum(OPERATING_N, config.gamma)
    t_end = _fixed_t_end(config)
    hist = jump_histogram(state0, spectrum, t_end, config.n_trajectories, config.require_seed(),
                          workers=config.worker_count)
    return {"histogram": hist.to_frame(), "precision": precision_table(hist, config.eta)}


FIGURES = {
    "fig2": figure_fig2,
    "fig3a": figure_fig3a,
    "fig3b": figure_fig3b,
    "fig4": figure_fig4,
    "s1": figure_s1,
    "s2": figure_s2,
    "s3": figure_s3,
}


def figure_tables(name: str, config: RunConfig) -> dict[str, pd.DataFrame]:
    """
    Compute every table of a figure.

    Raises:
        UnknownFigureError: If the name is not a known figure
    """
    if name not in FIGURES:
        raise UnknownFigureError(f"unknown figure '{name}', expected one of {sorted(FIGURES)}")
    return {part: table.reset_index(drop=True) for part, table in FIGURES[name](config).items()}


def main(argv=None) -> int:
    args = parse_args(argv)
    logger = get_figure_logger(__name__, args.log_level)

    try:
        config = config_from_args(args)
        if args.name not in FIGURES:
            raise UnknownFigureError(f"unknown figure '{args.name}', expected one of {sorted(FIGURES)}")
    except USER_ERRORS as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG_ERROR

    log_script_start(logger, SCRIPT_NAME, f"figure {args.name} on {config.worker_count} workers")

    try:
        tables = figure_tables(args.name, config)
    except USER_ERRORS as e:
        logger.error(f"Invalid parameters: {e}")
        log_script_end(logger, SCRIPT_NAME, False)
        return EXIT_CONFIG_ERROR
    except (SuperradianceError, ArithmeticError) as e:
        logger.error(f"Numerical failure: {e}")
        log_script_end(logger, SCRIPT_NAME, False)
        return EXIT_CHECK_FAILED

    n_failed = 0
    for part, table in tables.items():
        log_data_summary(logger, table, f"{args.name} {part}")
        path = get_figure_file_path(args.name, part, config.output_format)
        if args.output_dir:
            path = Path(args.output_dir) / path.name
        write_table(table, path, config.output_format, args.stdout)
        log_file_operation(logger, "saved", path, True, file_size_mb(path))
        if "error" in table.columns:
            n_failed += int(table["error"].notna().sum())

    if n_failed:
        logger.warning(f"{n_failed:,} grid points failed; see the error columns")
        log_script_end(logger, SCRIPT_NAME, False)
        return EXIT_PARTIAL_FAILURE

    log_script_end(logger, SCRIPT_NAME, True)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
