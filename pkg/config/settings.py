"""
Central configuration for the superradiant cat-state pipeline.

This module contains all configurable settings, paths, numerical caps,
tolerances and sweep defaults used across the library and the command-line
scripts. Modify values here (or through the environment / a .env file)
instead of hardcoding them in individual modules.
"""

import math
import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Project root directory
PROJECT_ROOT = Path(__file__).parent.parent

# =============================================================================
# DIRECTORY PATHS
# =============================================================================

class Paths:
    """All file and directory paths used by the scripts."""

    # Base directories
    OUTPUT = Path(os.getenv("SUPERRADIANCE_OUTPUT", str(PROJECT_ROOT / "data")))
    FIGURES = OUTPUT / "figures"
    SWEEPS = OUTPUT / "sweeps"
    TRAJECTORIES = OUTPUT / "trajectories"
    LOGS = PROJECT_ROOT / "logs"

# =============================================================================
# NUMERICAL CONFIGURATION
# =============================================================================

class Numerics:
    """Caps, tolerances and search parameters of the numerical core."""

    # Largest ensemble accepted by build_operators (dense (N+1)x(N+1) algebra)
    MAX_ATOMS = int(os.getenv("MAX_ATOMS", "400"))

    # Tolerances
    NORM_TOL = 1e-10
    ZERO_NORM = 1e-300
    # Populations below this are parity-forbidden leakage from the eigendecompositions
    ZERO_POPULATION = 1e-24

    # Optimal-time search
    TOPT_GRID_POINTS = int(os.getenv("TOPT_GRID_POINTS", "512"))
    TOPT_MIN_GRID_POINTS = 16
    TOPT_REL_TOL = float(os.getenv("TOPT_REL_TOL", "1e-6"))
    TOPT_HORIZON_FACTOR = 4.0  # t_max = 4 ln(N) / (gamma N)

    # MCWF waiting-time inversion
    BISECTION_REL_TOL = 1e-12

    # Oracle caps and step control
    EXPM_MAX_DIM = 512
    LINDBLAD_MAX_DIM = 64
    TC_MAX_DIM = 256
    LINDBLAD_TOL = float(os.getenv("LINDBLAD_TOL", "1e-8"))
    RK4_STEP_SCALE = 0.25  # initial dt * (generator norm bound)
    MAX_STEP_HALVINGS = int(os.getenv("MAX_STEP_HALVINGS", "8"))
    PHOTON_CUTOFF = int(os.getenv("PHOTON_CUTOFF", "6"))
    CUTOFF_TOL = 1e-6

# =============================================================================
# SWEEP CONFIGURATION
# =============================================================================

class Sweep:
    """Default grids, seeding and worker pool sizing."""

    N_START = 10
    N_STOP = 200
    N_STEP = 2
    CHI_START = 0.0
    CHI_STOP = math.pi / 2
    CHI_STEP = math.pi / 200

    GAMMA = 1.0
    SEED_BASE = int(os.getenv("SEED_BASE", "20250101"))
    N_TRAJECTORIES = int(os.getenv("N_TRAJECTORIES", "10000"))

    # 0 means "all cores"
    WORKERS_ENV = "SUPERRADIANCE_WORKERS"

# =============================================================================
# OUTPUT CONFIGURATION
# =============================================================================

class Output:
    """Serialization settings shared by every command."""

    FLOAT_FORMAT = "%.17g"
    CSV_ENCODING = os.getenv("CSV_ENCODING", "utf-8")
    FORMATS = ("csv", "json")

# =============================================================================
# LOGGING CONFIGURATION
# =============================================================================

class Logging:
    """Logging configuration and patterns."""

    # Log levels
    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")

    # Log file patterns
    LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"
    LOG_TO_FILE = os.getenv("LOG_TO_FILE", "False").lower() == "true"

    # Log file naming patterns
    NOCLICK_LOG = "noclick_{date}.log"
    SWEEP_LOG = "sweep_{date}.log"
    MCWF_LOG = "mcwf_{date}.log"
    ORACLE_LOG = "oracle_check_{date}.log"
    FIGURE_LOG = "figure_{date}.log"

    # Log retention
    LOG_RETENTION_DAYS = int(os.getenv("LOG_RETENTION_DAYS", "30"))

# =============================================================================
# DERIVED SETTINGS
# =============================================================================

def get_log_file_path(log_pattern: str, date_str: str = None) -> Path:
    """
    Generate log file path based on pattern and date.

    Args:
        log_pattern: Log filename pattern from Logging class
        date_str: Date string (defaults to today)

    Returns:
        Path: Complete log file path
    """
    from datetime import datetime

    if date_str is None:
        date_str = datetime.now().strftime('%Y%m%d')

    filename = log_pattern.format(date=date_str)
    return Paths.LOGS / filename


def get_figure_file_path(name: str, suffix: str = "", fmt: str = "csv") -> Path:
    """Generate path for a figure data file, e.g. fig3a.csv or s2_panel_b.csv."""
    stem = f"{name}_{suffix}" if suffix else name
    return Paths.FIGURES / f"{stem}.{fmt}"
