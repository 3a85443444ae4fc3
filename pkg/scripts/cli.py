#!/usr/bin/env python3
"""
Command-line front end.

    python -m scripts.cli noclick      --N 100 --chi 0.2
    python -m scripts.cli sweep        --N 10:200:2 --chi 0.1,0.2 --workers 8
    python -m scripts.cli mcwf         --N 100 --chi 0.2 --seed-base 7
    python -m scripts.cli oracle-check
    python -m scripts.cli figure fig3a

Each subcommand is also runnable on its own (python -m scripts.run_sweep ...).
Exit codes: 0 success, 1 config error, 2 numerical-check failure,
3 partial sweep failure.
"""

import argparse
import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

from scripts import make_figure, oracle_check, run_mcwf, run_noclick, run_sweep
from scripts.arguments import RunArgumentParser

COMMANDS = {
    "noclick": run_noclick.main,
    "sweep": run_sweep.main,
    "mcwf": run_mcwf.main,
    "oracle-check": oracle_check.main,
    "figure": make_figure.main,
}


def parse_args(argv=None):
    parser = RunArgumentParser(prog="cli", description='Superradiant cat-state amplification simulator')
    parser.add_argument('command', choices=sorted(COMMANDS), help='Subcommand to run')
    parser.add_argument('args', nargs=argparse.REMAINDER, help='Arguments passed to the subcommand')
    return parser.parse_args(argv)


def main(argv=None) -> int:
    args = parse_args(argv)
    return COMMANDS[args.command](args.args)


if __name__ == "__main__":
    sys.exit(main())
