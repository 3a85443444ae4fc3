"""
Parameter Sweep Utilities

Worker-pool fan-out over (N, chi, theta) grid points and MCWF trajectory
chunks. Results are always reassembled in submission order and rows are
sorted at serialization time, so output never depends on scheduling.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np
import pandas as pd

from utils.dicke import cat_fidelity, variance_sz
from utils.errors import CatTimeError, SuperradianceError
from utils.noclick import cat_time, decay_spectrum, evolve_noclick, find_t_opt, survival_probability
from utils.oat import PrepSpec, prepare

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = [
    "N", "chi", "theta", "t_opt", "boundary_flag", "peak_var", "peak_var_normalized",
    "survival_at_topt", "cat_fidelity_at_topt", "t_c", "initial_var", "initial_var_normalized",
    "t_eval", "error",
]

FIXED_TIME_COLUMNS = [
    "N", "chi", "theta", "t_end", "var_sz", "var_sz_normalized", "survival", "cat_fidelity", "error",
]


def parallel_map(func: Callable, items: Iterable, workers: int = 1) -> list:
    """Ordered map over a process pool; runs in-process for a single worker."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    workers = min(workers, len(items))
    chunksize = max(1, len(items) // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items, chunksize=chunksize))


def chunk_indices(n_items: int, workers: int, per_worker: int = 4) -> list[range]:
    """Split 0..n_items-1 into contiguous ranges, a few per worker."""
    n_chunks = max(1, min(n_items, max(workers, 1) * per_worker)) if workers > 1 else 1
    bounds = np.linspace(0, n_items, n_chunks + 1).astype(int)
    return [range(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]


@dataclass(frozen=True)
class GridPoint:
    n_atoms: int
    chi: float
    theta: float = 0.0
    gamma: float = 1.0
    t_end: Optional[float] = None  # None -> evaluate at t_opt
    order: str = "rotate_then_twist"


@dataclass(frozen=True, eq=False)
class SweepResult:
    """Grid of per-point records; `rows` is sorted by (N, chi, theta)."""

    rows: pd.DataFrame
    fixed_time: bool

    @property
    def n_failed(self) -> int:
        return int(self.rows["error"].notna().sum())


def evaluate_point(point: GridPoint) -> dict:
    """
    Evaluate one grid point; numerical failures are recorded in the `error` field.

    With point.t_end None the row reports t_opt, peak variance, survival and cat
    fidelity at t_opt, plus the closed-form cat time. Otherwise every quantity
    is evaluated at the fixed time t_end.
    """
    n = point.n_atoms
    scale = n * n / 4
    base = {"N": n, "chi": point.chi, "theta": point.theta}
    try:
        state0 = prepare(PrepSpec(n, point.chi, point.theta, point.order))
        spectrum = decay_spectrum(n, point.gamma)

        if point.t_end is not None:
            state = evolve_noclick(state0, spectrum, point.t_end)
            var = variance_sz(state)
            return {**base, "t_end": point.t_end, "var_sz": var, "var_sz_normalized": var / scale,
                    "survival": survival_probability(state0, spectrum, point.t_end),
                    "cat_fidelity": cat_fidelity(state), "error": None}

        t_opt = find_t_opt(state0, spectrum)
        state = evolve_noclick(state0, spectrum, t_opt.t_opt)
        try:
            t_c = cat_time(state0, spectrum)
        except CatTimeError:
            t_c = None
        initial_var = variance_sz(state0)
        return {
            **base,
            "t_opt": t_opt.t_opt,
            "boundary_flag": t_opt.boundary,
            "peak_var": t_opt.peak_var,
            "peak_var_normalized": t_opt.peak_var / scale,
            "survival_at_topt": survival_probability(state0, spectrum, t_opt.t_opt),
            "cat_fidelity_at_topt": cat_fidelity(state),
            "t_c": t_c,
            "initial_var": initial_var,
            "initial_var_normalized": initial_var / scale,
            "t_eval": t_opt.t_opt,
            "error": None,
        }
    except (SuperradianceError, ArithmeticError, np.linalg.LinAlgError) as e:
        logger.warning(f"Grid point N={n}, chi={point.chi}, theta={point.theta} failed: {e}")
        return {**base, "error": f"{type(e).__name__}: {e}"}


def run_sweep(points: Iterable[GridPoint], workers: int = 1) -> SweepResult:
    """Evaluate all grid points on the worker pool and return rows sorted by N, chi, theta."""
    points = list(points)
    fixed_time = any(p.t_end is not None for p in points)
    columns = FIXED_TIME_COLUMNS if fixed_time else SWEEP_COLUMNS
    records = parallel_map(evaluate_point, points, workers)
    rows = (pd.DataFrame.from_records(records)
            .reindex(columns=columns)
            .sort_values(["N", "chi", "theta"], kind="mergesort")
            .reset_index(drop=True))
    rows["error"] = rows["error"].astype(object).where(rows["error"].notna(), None)
    logger.info(f"Sweep finished: {len(rows):,} points, {rows['error'].notna().sum():,} failed")
    return SweepResult(rows=rows, fixed_time=fixed_time)


def grid_values(start: float, stop: float, step: float) -> list[float]:
    """Closed range start..stop in increments of step (stop included within 1e-9 step)."""
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(max(count, 0))]
