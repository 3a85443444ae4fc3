"""
Shared command-line plumbing for the run scripts: common flags, grid
parsing from the command line, exit codes and the flag -> RunConfig merge.
"""

import argparse
import sys
from pathlib import Path
from typing import Optional

from config.run_config import RunConfig, resolve_config
from config.settings import Output
from utils.errors import ConfigError, InvalidParameterError, SizingError

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_CHECK_FAILED = 2
EXIT_PARTIAL_FAILURE = 3

# Raised by the numerical core for bad user input rather than numerical trouble
USER_ERRORS = (ConfigError, InvalidParameterError, SizingError)


class RunArgumentParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with the config-error code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG_ERROR, f"{self.prog}: error: {message}\n")


def parse_grid_arg(text: str):
    """
    Parse a command-line grid: "100", "0.1,0.2,0.3" or a closed range "10:200:2".

    Raises:
        argparse.ArgumentTypeError: On malformed input
    """
    try:
        if ":" in text:
            parts = [float(p) for p in text.split(":")]
            if len(parts) != 3:
                raise ValueError("range needs start:stop:step")
            return {"start": parts[0], "stop": parts[1], "step": parts[2]}
        values = [float(p) for p in text.split(",") if p.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid grid '{text}': {e}")
    if not values:
        raise argparse.ArgumentTypeError(f"empty grid '{text}'")
    return values[0] if len(values) == 1 else values


def parse_t_end(text: str):
    return text if text == "auto" else float(text)


def add_run_arguments(parser: argparse.ArgumentParser, stochastic: bool = False):
    """Flags shared by every command; all default to None so the config file can supply them."""
    parser.add_argument('--config', type=str, help='JSON run configuration file')
    parser.add_argument('--N', dest='n_atoms', type=parse_grid_arg,
                        help='Atom number(s): 100, 10,20,30 or 10:200:2')
    parser.add_argument('--chi', type=parse_grid_arg, help='Twisting strength(s)')
    parser.add_argument('--theta', type=parse_grid_arg, help='Rotation angle(s) about y')
    parser.add_argument('--gamma', type=float, help='Collective emission rate')
    parser.add_argument('--t-end', dest='t_end', type=parse_t_end,
                        help="Evolution time in 1/gamma, or 'auto': t_opt for sweep and mcwf, "
                             "the t_opt search horizon for noclick")
    parser.add_argument('--order', choices=['rotate_then_twist', 'twist_then_rotate'],
                        help='Order of rotation and twisting')
    parser.add_argument('--output', dest='output_path', type=str, help='Output file path')
    parser.add_argument('--format', dest='output_format', choices=Output.FORMATS, help='Output format')
    parser.add_argument('--stdout', action='store_true', help='Write the table to stdout')
    parser.add_argument('--workers', type=int, help='Worker processes (0 = all cores)')
    parser.add_argument('--log-level', type=str, default=None, help='DEBUG, INFO, WARNING or ERROR')
    if stochastic:
        parser.add_argument('--seed-base', dest='seed_base', type=int, help='Base seed of the trajectory RNGs')
        parser.add_argument('--n-trajectories', dest='n_trajectories', type=int, help='Number of trajectories')
        parser.add_argument('--eta', type=parse_grid_arg, help='Detector efficiencies')


CONFIG_FLAGS = ('n_atoms', 'chi', 'theta', 'gamma', 't_end', 'order', 'output_path', 'output_format',
                'workers', 'seed_base', 'n_trajectories', 'eta', 't_max', 'n_samples', 'target_variance')


def config_from_args(args: argparse.Namespace, defaults: Optional[dict] = None) -> RunConfig:
    """Merge defaults, the --config file and explicit flags into a RunConfig."""
    overrides = {name: getattr(args, name, None) for name in CONFIG_FLAGS}
    return resolve_config(args.config, overrides, defaults)


def output_destination(config: RunConfig, default_path: Path, to_stdout: bool) -> Optional[Path]:
    """Explicit output path, else the default path unless only stdout was asked for."""
    if config.output_path:
        return Path(config.output_path)
    if to_stdout:
        return None
    # names like noclick_N100_chi0.2 contain dots, so append rather than with_suffix
    return default_path.with_name(f"{default_path.name}.{config.output_format}")
