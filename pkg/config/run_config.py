"""
Run configuration for the command-line scripts.

A run is described by an optional JSON file whose keys are the RunConfig
field names, overridden by command-line flags. The worker count resolves as
flag, then the SUPERRADIANCE_WORKERS environment variable, then the file,
then all cores.

Grid-valued keys (n_atoms, chi, theta, eta) accept a scalar, a list, or a
closed range {"start": ..., "stop": ..., "step": ...}.
"""

import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Optional, Union

from config.settings import Output, Sweep
from utils.errors import ConfigError
from utils.sweep import grid_values

GridSpec = Union[float, int, list, dict]

AUTO = "auto"


def parse_grid(value: GridSpec, name: str) -> list[float]:
    """
    Expand a grid spec into a non-empty list of values.

    Raises:
        ConfigError: For empty lists, malformed ranges or non-numeric entries
    """
    if isinstance(value, bool):
        raise ConfigError(f"{name}: expected a number, list or range, got {value!r}")
    if isinstance(value, (int, float)):
        return [value]
    if isinstance(value, dict):
        missing = {"start", "stop", "step"} - set(value)
        if missing:
            raise ConfigError(f"{name}: range is missing {sorted(missing)}")
        try:
            values = grid_values(float(value["start"]), float(value["stop"]), float(value["step"]))
        except (TypeError, ValueError) as e:
            raise ConfigError(f"{name}: invalid range {value}: {e}") from e
    elif isinstance(value, (list, tuple)):
        values = list(value)
    else:
        raise ConfigError(f"{name}: expected a number, list or range, got {type(value).__name__}")

    if not values:
        raise ConfigError(f"{name}: grid is empty")
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{name}: non-numeric grid entry {v!r}")
    return values


@dataclass
class RunConfig:
    """Fully resolved parameters of one command invocation."""

    n_atoms: list = field(default_factory=lambda: [100])
    chi: list = field(default_factory=lambda: [0.2])
    theta: list = field(default_factory=lambda: [0.0])
    gamma: float = Sweep.GAMMA
    t_end: Union[float, str, None] = AUTO
    t_max: Optional[float] = None
    n_samples: int = 201
    order: str = "rotate_then_twist"
    n_trajectories: int = Sweep.N_TRAJECTORIES
    seed_base: Optional[int] = Sweep.SEED_BASE
    eta: list = field(default_factory=lambda: [0.9, 1.0])
    target_variance: Optional[float] = None
    output_path: Optional[str] = None
    output_format: str = "csv"
    workers: int = 0

    def __post_init__(self):
        self.n_atoms = [self._atom_count(n) for n in parse_grid(self.n_atoms, "n_atoms")]
        self.chi = [float(v) for v in parse_grid(self.chi, "chi")]
        self.theta = [float(v) for v in parse_grid(self.theta, "theta")]
        self.eta = [float(v) for v in parse_grid(self.eta, "eta")]

        if self.output_format not in Output.FORMATS:
            raise ConfigError(f"output_format must be one of {Output.FORMATS}, got {self.output_format!r}")
        if not self.gamma or self.gamma <= 0:
            raise ConfigError(f"gamma must be positive, got {self.gamma}")
        if isinstance(self.t_end, str):
            if self.t_end != AUTO:
                raise ConfigError(f"t_end must be a number or '{AUTO}', got {self.t_end!r}")
        elif self.t_end is not None:
            self.t_end = float(self.t_end)
            if self.t_end <= 0:
                raise ConfigError(f"t_end must be positive, got {self.t_end}")
        if self.n_samples < 2:
            raise ConfigError(f"n_samples must be >= 2, got {self.n_samples}")
        if self.n_trajectories < 1:
            raise ConfigError(f"n_trajectories must be >= 1, got {self.n_trajectories}")
        if any(not 0.0 <= e <= 1.0 for e in self.eta):
            raise ConfigError(f"eta values must lie in [0, 1], got {self.eta}")
        if self.workers is None or self.workers < 0:
            raise ConfigError(f"workers must be >= 0, got {self.workers}")

    @staticmethod
    def _atom_count(value) -> int:
        if float(value) != int(value) or int(value) < 1:
            raise ConfigError(f"n_atoms entries must be positive integers, got {value}")
        return int(value)

    @property
    def fixed_time(self) -> bool:
        return self.t_end not in (None, AUTO)

    @property
    def worker_count(self) -> int:
        """Resolved process count; 0 means all cores."""
        return self.workers if self.workers > 0 else (os.cpu_count() or 1)

    def single_point(self) -> tuple[int, float, float]:
        """(N, chi, theta) for commands that take exactly one parameter point."""
        if len(self.n_atoms) != 1 or len(self.chi) != 1 or len(self.theta) != 1:
            raise ConfigError("this command needs a single (N, chi, theta) point, got grids")
        return self.n_atoms[0], self.chi[0], self.theta[0]

    def require_seed(self) -> int:
        if self.seed_base is None:
            raise ConfigError("seed_base is required for stochastic commands")
        if int(self.seed_base) < 0:
            raise ConfigError(f"seed_base must be non-negative, got {self.seed_base}")
        return int(self.seed_base)


def load_config_file(path: Union[str, Path]) -> dict:
    """Read a JSON config file and reject unknown keys."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise ConfigError(f"config file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")

    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown config keys in {path}: {unknown}")
    return data


def resolve_config(config_path: Optional[Union[str, Path]] = None,
                   overrides: Optional[dict[str, Any]] = None,
                   defaults: Optional[dict[str, Any]] = None) -> RunConfig:
    """
    Build a RunConfig from defaults, an optional file and flag overrides.

    Args:
        config_path: Optional JSON config file
        overrides: Flag values; None entries are treated as "not given"
        defaults: Command-specific defaults applied below the file

    Returns:
        RunConfig: Validated configuration
    """
    values = dict(defaults or {})
    if config_path:
        values.update(load_config_file(config_path))

    flags = {k: v for k, v in (overrides or {}).items() if v is not None}
    env_workers = os.getenv(Sweep.WORKERS_ENV)
    if "workers" not in flags and env_workers:
        try:
            values["workers"] = int(env_workers)
        except ValueError as e:
            raise ConfigError(f"{Sweep.WORKERS_ENV} must be an integer, got {env_workers!r}") from e
    values.update(flags)

    try:
        return RunConfig(**values)
    except TypeError as e:
        raise ConfigError(f"invalid configuration: {e}") from e
