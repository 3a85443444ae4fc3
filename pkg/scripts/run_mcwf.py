#!/usr/bin/env python3
"""
Quantum-Jump Statistics

Samples Monte-Carlo wavefunction trajectories for one (N, chi, theta) and
writes the jump-count histogram at t_end (default: t_opt of the no-click
trajectory) together with the detector precision for each efficiency:

    <output>            n, p_n, stderr
    <output>_precision  eta, precision

With --stdout only the histogram is printed; the precision table is written
next to an explicit --output and is always logged. Every trajectory seeds its
own generator from (seed_base, index), so the tables do not depend on --workers.

Usage:
    python -m scripts.run_mcwf --N 100 --chi 0.2 --eta 0.8,0.9,1.0 --seed-base 7
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
from utils.errors import InvalidParameterError, SuperradianceError
from utils.logging_setup import (
    get_mcwf_logger, log_data_summary, log_file_operation, log_script_end, log_script_start,
)
from utils.mcwf import JumpHistogram, detector_precision, jump_histogram
from utils.noclick import decay_spectrum, find_t_opt, survival_probability
from utils.oat import PrepSpec, prepare
from utils.output_helpers import file_size_mb, write_table

SCRIPT_NAME = "Quantum-Jump Statistics"


def parse_args(argv=None):
    parser = RunArgumentParser(prog="mcwf", description='Jump-count histogram and detector precision')
    add_run_arguments(parser, stochastic=True)
    return parser.parse_args(argv)


def precision_table(hist: JumpHistogram, etas) -> pd.DataFrame:
    return pd.DataFrame({
        "eta": list(etas),
        "precision": [detector_precision(hist, eta) for eta in etas],
    })


def jump_statistics(config: RunConfig, logger=None) -> tuple[JumpHistogram, pd.DataFrame, float]:
    """
    Histogram, precision table and the no-click survival at t_end.

    The survival is the value the zero-jump fraction p_0 estimates.
    """
    n_atoms, chi, theta = config.single_point()
    seed_base = config.require_seed()
    state0 = prepare(PrepSpec(n_atoms, chi, theta, config.order))
    spectrum = decay_spectrum(n_atoms, config.gamma)

    t_end = config.t_end if config.fixed_time else find_t_opt(state0, spectrum).t_opt
    if t_end <= 0:
        raise InvalidParameterError("t_opt is 0 for this state; pass an explicit --t-end")
    if logger:
        logger.info(f"Sampling {config.n_trajectories:,} trajectories to t_end = {t_end:.6g} "
                    f"on {config.worker_count} workers")

    hist = jump_histogram(state0, spectrum, t_end, config.n_trajectories, seed_base,
                          workers=config.worker_count)
    return hist, precision_table(hist, config.eta), survival_probability(state0, spectrum, t_end)


def main(argv=None) -> int:
    args = parse_args(argv)
    logger = get_mcwf_logger(__name__, args.log_level)

    try:
        config = config_from_args(args)
        n_atoms, chi, theta = config.single_point()
        config.require_seed()
    except USER_ERRORS as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG_ERROR

    log_script_start(logger, SCRIPT_NAME, f"N={n_atoms}, chi={chi}, theta={theta}, "
                                          f"seed_base={config.seed_base}")

    try:
        hist, precision, survival = jump_statistics(config, logger)
    except USER_ERRORS as e:
        logger.error(f"Invalid parameters: {e}")
        log_script_end(logger, SCRIPT_NAME, False)
        return EXIT_CONFIG_ERROR
    except (SuperradianceError, ArithmeticError) as e:
        logger.error(f"Numerical failure: {e}")
        log_script_end(logger, SCRIPT_NAME, False)
        return EXIT_CHECK_FAILED

    p0, p0_err = hist.probabilities[0], hist.stderr[0]
    logger.info(f"Zero-jump fraction {p0:.4f} +/- {p0_err:.4f}, no-click survival {survival:.4f}")
    for row in precision.itertuples():
        logger.info(f"   eta = {row.eta:.3g}: precision {row.precision:.4f}")

    histogram = hist.to_frame()
    log_data_summary(logger, histogram, "jump histogram")

    default_path = Paths.TRAJECTORIES / f"mcwf_N{n_atoms}_chi{chi:g}_theta{theta:g}"
    hist_path = output_destination(config, default_path, args.stdout)
    precision_path = None
    if hist_path is not None:
        precision_path = hist_path.with_name(f"{hist_path.stem}_precision{hist_path.suffix}")

    # stdout carries a single table; the precision table only goes to a file
    written = [write_table(histogram, hist_path, config.output_format, args.stdout)]
    if precision_path is not None:
        written.append(write_table(precision, precision_path, config.output_format))
    for path in filter(None, written):
        log_file_operation(logger, "saved", path, True, file_size_mb(path))

    log_script_end(logger, SCRIPT_NAME, True)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
