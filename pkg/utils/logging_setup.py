"""
Centralized logging setup for the superradiance scripts.

Console output goes to stderr so that `--stdout` tables stay clean on stdout.
File logging is opt-in through LOG_TO_FILE.
"""

import logging
import sys
from pathlib import Path
from datetime import datetime
from typing import Optional

# Add project root to Python path for imports
sys.path.append(str(Path(__file__).parent.parent))

from config.settings import Logging, Paths, get_log_file_path

PACKAGE_LOGGERS = ("utils", "config", "scripts")


def setup_logger(
    name: str,
    log_pattern: str,
    level: str = None,
    console: bool = True,
    file_logging: bool = None,
    date_str: Optional[str] = None
) -> logging.Logger:
    """
    Set up a logger with consistent configuration.

    The same handlers are attached to the library loggers (utils.*), so
    warnings raised deep in a sweep reach the same destinations.

    Args:
        name: Logger name (usually __name__)
        log_pattern: Log filename pattern from config.settings.Logging
        level: Log level (DEBUG, INFO, WARNING, ERROR)
        console: Enable stderr output
        file_logging: Enable file output (defaults to Logging.LOG_TO_FILE)
        date_str: Date string for log filename (defaults to today)

    Returns:
        logging.Logger: Configured logger instance
    """
    level_value = getattr(logging, (level or Logging.LOG_LEVEL).upper())
    file_logging = Logging.LOG_TO_FILE if file_logging is None else file_logging
    formatter = logging.Formatter(Logging.LOG_FORMAT)

    handlers = []
    if console:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(level_value)
        console_handler.setFormatter(formatter)
        handlers.append(console_handler)

    log_file_path = None
    if file_logging:
        log_file_path = get_log_file_path(log_pattern, date_str)
        log_file_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file_path, encoding='utf-8')
        file_handler.setLevel(level_value)
        file_handler.setFormatter(formatter)
        handlers.append(file_handler)

    logger = logging.getLogger(name)
    for target in [logger] + [logging.getLogger(pkg) for pkg in PACKAGE_LOGGERS if pkg != name]:
        target.setLevel(level_value)
        target.handlers.clear()
        for handler in handlers:
            target.addHandler(handler)
        target.propagate = False

    if log_file_path:
        logger.info(f"Logging to: {log_file_path}")
        removed = cleanup_old_logs()
        if removed:
            logger.info(f"Removed {removed} log files older than {Logging.LOG_RETENTION_DAYS} days")
    return logger


def log_script_start(logger: logging.Logger, script_name: str, description: str = ""):
    """Log standardized command start banner."""
    logger.info("=" * 60)
    logger.info(f"STARTING: {script_name}")
    if description:
        logger.info(f"INFO: {description}")
    logger.info("=" * 60)


def log_script_end(logger: logging.Logger, script_name: str, success: bool = True):
    """Log standardized command end banner."""
    status = "COMPLETED" if success else "FAILED"
    logger.info("=" * 60)
    logger.info(f"{status}: {script_name}")
    logger.info("=" * 60)


def log_data_summary(logger: logging.Logger, df, data_type: str = "data"):
    """
    Log standardized table summary.

    Args:
        logger: Logger instance
        df: pandas DataFrame
        data_type: Type of data being summarized
    """
    if df is None or df.empty:
        logger.warning(f"WARNING: No {data_type} to summarize")
        return

    logger.info(f"SUMMARY: {data_type.title()}:")
    logger.info(f"   Records: {len(df):,}")
    logger.info(f"   Columns: {len(df.columns)}")
    if "error" in df.columns:
        logger.info(f"   Failed rows: {int(df['error'].notna().sum()):,}")


def log_file_operation(logger: logging.Logger, operation: str, file_path: Path,
                       success: bool = True, size_mb: float = None):
    """Log standardized file operation."""
    status = "SUCCESS" if success else "FAILED"
    size_info = f" ({size_mb:.2f} MB)" if size_mb else ""
    logger.info(f"{status}: {operation.title()}: {file_path}{size_info}")


def log_validation_results(logger: logging.Logger, results: dict):
    """
    Log standardized validation results.

    Args:
        logger: Logger instance
        results: Mapping of check name to value (floats shown in %.3e)
    """
    logger.info("VALIDATION RESULTS:")
    for key, value in results.items():
        label = key.replace('_', ' ').title()
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            logger.info(f"   {label}: {value}")
        elif isinstance(value, int):
            logger.info(f"   {label}: {value:,}")
        else:
            logger.info(f"   {label}: {value:.3e}")


def cleanup_old_logs(retention_days: int = None) -> int:
    """
    Delete log files older than the retention window.

    Args:
        retention_days: Number of days to retain logs (from config if not provided)

    Returns:
        int: Number of files removed
    """
    retention_days = retention_days or Logging.LOG_RETENTION_DAYS
    cutoff_date = datetime.now().timestamp() - (retention_days * 24 * 60 * 60)

    if not Paths.LOGS.exists():
        return 0

    deleted_count = 0
    for log_file in Paths.LOGS.glob("*.log"):
        if log_file.stat().st_mtime < cutoff_date:
            log_file.unlink()
            deleted_count += 1
    return deleted_count


# =============================================================================
# PRE-CONFIGURED LOGGERS FOR EACH COMMAND
# =============================================================================

def get_noclick_logger(name: str = __name__, level: str = None) -> logging.Logger:
    """Get logger for single no-click trajectories."""
    return setup_logger(name, Logging.NOCLICK_LOG, level)


def get_sweep_logger(name: str = __name__, level: str = None) -> logging.Logger:
    """Get logger for parameter sweeps."""
    return setup_logger(name, Logging.SWEEP_LOG, level)


def get_mcwf_logger(name: str = __name__, level: str = None) -> logging.Logger:
    """Get logger for quantum-jump ensembles."""
    return setup_logger(name, Logging.MCWF_LOG, level)


def get_oracle_logger(name: str = __name__, level: str = None) -> logging.Logger:
    """Get logger for oracle cross-checks."""
    return setup_logger(name, Logging.ORACLE_LOG, level)


def get_figure_logger(name: str = __name__, level: str = None) -> logging.Logger:
    """Get logger for figure data generation."""
    return setup_logger(name, Logging.FIGURE_LOG, level)
