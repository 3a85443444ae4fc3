"""
Monte-Carlo Wavefunction Sampling

Event-driven unraveling of collective decay with jump operator sqrt(gamma) S_-.
Between jumps the state follows the diagonal no-click propagator, so the
waiting-time distribution is closed form: the jump happens when the squared
norm sum_m p_m exp(-2 |eps_m| tau) falls to a uniform draw r. The root is
bracketed on [0, t_end - t] and found to relative tolerance 1e-12, so there is
no time-step error.

Every trajectory draws from its own counter-based generator seeded from
(seed_base, index); results do not depend on the worker count.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import pandas as pd
from scipy import optimize

from config.settings import Numerics
from utils.dicke import DickeState, ladder_coefficients, m_values, variance_from_populations
from utils.errors import EmptyHistogramError, InvalidParameterError
from utils.noclick import DecaySpectrum, evolve_noclick
from utils.sweep import chunk_indices, parallel_map

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class McwfRecord:
    """One trajectory: jump times, jump count and the normalized state at t_end."""

    jump_times: np.ndarray
    n_jumps: int
    final_state: DickeState
    seed: int


@dataclass(frozen=True, eq=False)
class JumpHistogram:
    """Distribution of the number of jumps up to t_end, with binomial standard errors."""

    t_end: float
    probabilities: np.ndarray
    stderr: np.ndarray
    n_trajectories: int

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "n": np.arange(self.probabilities.size),
            "p_n": self.probabilities,
            "stderr": self.stderr,
        })


def trajectory_seed(seed_base: int, index: int) -> int:
    """64-bit seed of trajectory `index`, a pure function of (seed_base, index)."""
    if seed_base is None or seed_base < 0:
        raise InvalidParameterError(f"seed_base must be a non-negative integer, got {seed_base}")
    state = np.random.SeedSequence([int(seed_base), int(index)]).generate_state(1, np.uint64)
    return int(state[0])


def _generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def _apply_lowering(amplitudes: np.ndarray, coefficients: np.ndarray) -> np.ndarray:
    lowered = np.zeros_like(amplitudes)
    lowered[:-1] = coefficients * amplitudes[1:]
    return lowered / np.linalg.norm(lowered)


def _grid_observables(amplitudes, spectrum, taus):
    """Var S_z and <S_z> of the normalized no-click continuation at elapsed times taus."""
    pops0 = np.abs(amplitudes) ** 2
    with np.errstate(divide="ignore"):
        log_w = np.log(pops0)[None, :] - 2 * np.outer(taus, spectrum.rates)
    log_w -= log_w.max(axis=1, keepdims=True)
    pops = np.exp(log_w)
    pops /= pops.sum(axis=1, keepdims=True)
    return variance_from_populations(pops, spectrum.n_atoms), pops @ m_values(spectrum.n_atoms)


def _run(state0: DickeState, spectrum: DecaySpectrum, t_end: float, rng: np.random.Generator,
         grid: Optional[np.ndarray] = None):
    """
    Core sampler. Returns (jump_times, final_amplitudes, grid_var, grid_mean, grid_jumps).

    Grid arrays are None when no grid is requested.
    """
    coefficients = ladder_coefficients(spectrum.n_atoms)
    amplitudes = state0.normalized().amplitudes
    rates = spectrum.rates
    t = 0.0
    jump_times = []

    record = grid is not None
    if record:
        grid_var = np.empty(grid.size)
        grid_mean = np.empty(grid.size)
        grid_jumps = np.empty(grid.size, dtype=int)
        next_point = 0

    while True:
        pops = np.abs(amplitudes) ** 2
        remaining = t_end - t
        r = rng.random()
        norm_at_end = float(pops @ np.exp(-2 * rates * remaining))

        if r <= norm_at_end:
            segment_end, tau = t_end, remaining
        else:
            tau = optimize.brentq(
                lambda x: float(pops @ np.exp(-2 * rates * x)) - r,
                0.0,
                remaining,
                xtol=1e-300,
                rtol=Numerics.BISECTION_REL_TOL,
            )
            segment_end = t + tau

        if record:
            stop = np.searchsorted(grid, segment_end, side="right" if segment_end >= t_end else "left")
            if stop > next_point:
                var, mean = _grid_observables(amplitudes, spectrum, grid[next_point:stop] - t)
                grid_var[next_point:stop] = var
                grid_mean[next_point:stop] = mean
                grid_jumps[next_point:stop] = len(jump_times)
                next_point = stop

        amplitudes = evolve_noclick(DickeState(spectrum.n_atoms, amplitudes), spectrum, tau).amplitudes
        if segment_end >= t_end:
            amplitudes = amplitudes / np.linalg.norm(amplitudes)
            break

        t = segment_end
        jump_times.append(t)
        amplitudes = _apply_lowering(amplitudes, coefficients)

    if record:
        return np.array(jump_times), amplitudes, grid_var, grid_mean, grid_jumps
    return np.array(jump_times), amplitudes, None, None, None


def sample_trajectory(state0: DickeState, spectrum: DecaySpectrum, t_end: float, seed: int) -> McwfRecord:
    """
    Sample one quantum-jump trajectory on [0, t_end].

    Args:
        state0: Normalized initial state
        spectrum: Decay spectrum of the same N
        t_end: Final time (> 0)
        seed: 64-bit seed of the trajectory's generator

    Returns:
        McwfRecord: Jump times, jump count, normalized final state and seed
    """
    if t_end <= 0:
        raise InvalidParameterError(f"t_end must be positive, got {t_end}")
    jump_times, amplitudes, *_ = _run(state0, spectrum, t_end, _generator(seed))
    return McwfRecord(
        jump_times=jump_times,
        n_jumps=int(jump_times.size),
        final_state=DickeState(spectrum.n_atoms, amplitudes),
        seed=int(seed),
    )


# =============================================================================
# ENSEMBLES
# =============================================================================

def _run_chunk(args):
    """Worker entry point: run the trajectories of one index chunk."""
    state0, spectrum, t_end, seed_base, indices, grid = args
    results = []
    for index in indices:
        rng = _generator(trajectory_seed(seed_base, index))
        jump_times, _, grid_var, grid_mean, grid_jumps = _run(state0, spectrum, t_end, rng, grid)
        results.append((jump_times, grid_var, grid_mean, grid_jumps))
    return results


def run_ensemble(state0, spectrum, t_end, n_trajectories, seed_base, grid=None, workers=1):
    """Run n_trajectories in index order; returns a list of per-trajectory tuples."""
    if n_trajectories < 1:
        raise InvalidParameterError(f"n_trajectories must be >= 1, got {n_trajectories}")
    if t_end <= 0:
        raise InvalidParameterError(f"t_end must be positive, got {t_end}")
    chunks = chunk_indices(n_trajectories, workers)
    logger.debug(f"MCWF ensemble: {n_trajectories} trajectories in {len(chunks)} chunks")
    tasks = [(state0, spectrum, t_end, seed_base, chunk, grid) for chunk in chunks]
    return [item for chunk in parallel_map(_run_chunk, tasks, workers) for item in chunk]


def jump_histogram(state0: DickeState, spectrum: DecaySpectrum, t_end: float, n_trajectories: int,
                   seed_base: int, workers: int = 1) -> JumpHistogram:
    """Histogram of jump counts at t_end over n_trajectories seeded from seed_base."""
    results = run_ensemble(state0, spectrum, t_end, n_trajectories, seed_base, workers=workers)
    counts = np.bincount([r[0].size for r in results], minlength=spectrum.n_atoms + 1)
    probabilities = counts / n_trajectories
    stderr = np.sqrt(probabilities * (1 - probabilities) / n_trajectories)
    return JumpHistogram(t_end=float(t_end), probabilities=probabilities, stderr=stderr,
                         n_trajectories=n_trajectories)


def detector_precision(hist: JumpHistogram, eta: float) -> float:
    """
    Probability that a declared no-click run had no jump, p_0 / sum_n p_n (1 - eta)^n.

    Raises:
        InvalidParameterError: If eta lies outside [0, 1]
        EmptyHistogramError: If the histogram carries no probability mass
    """
    if not 0.0 <= eta <= 1.0:
        raise InvalidParameterError(f"eta must lie in [0, 1], got {eta}")
    p = np.asarray(hist.probabilities, dtype=float)
    if hist.n_trajectories < 1 or p.size == 0 or p.sum() <= 0:
        raise EmptyHistogramError("detector precision needs a non-empty histogram")
    missed = np.power(1.0 - eta, np.arange(p.size))
    return float(p[0] / (p @ missed)) if p[0] > 0 else 0.0


def ensemble_mean_sz(state0: DickeState, spectrum: DecaySpectrum, time_grid: Sequence[float],
                     n_trajectories: int, seed_base: int, workers: int = 1) -> pd.DataFrame:
    """
    Trajectory-averaged <S_z>(t) with its standard error.

    Returns:
        DataFrame with columns t, mean_sz, stderr
    """
    grid = np.sort(np.asarray(time_grid, dtype=float))
    results = run_ensemble(state0, spectrum, float(grid[-1]), n_trajectories, seed_base, grid, workers)
    means = np.stack([r[2] for r in results])
    spread = means.std(axis=0, ddof=1) if n_trajectories > 1 else np.zeros(grid.size)
    return pd.DataFrame({
        "t": grid,
        "mean_sz": means.mean(axis=0),
        "stderr": spread / np.sqrt(n_trajectories),
    })


def sample_observable_paths(state0: DickeState, spectrum: DecaySpectrum, time_grid: Sequence[float],
                            n_trajectories: int, seed_base: int, workers: int = 1) -> pd.DataFrame:
    """
    Var S_z, <S_z> and jumps so far for individual trajectories on a time grid.

    Returns:
        Long-format DataFrame with columns trajectory, t, var_sz, mean_sz, n_jumps
    """
    grid = np.sort(np.asarray(time_grid, dtype=float))
    results = run_ensemble(state0, spectrum, float(grid[-1]), n_trajectories, seed_base, grid, workers)
    frames = [
        pd.DataFrame({"trajectory": index, "t": grid, "var_sz": var, "mean_sz": mean, "n_jumps": jumps})
        for index, (_, var, mean, jumps) in enumerate(results)
    ]
    return pd.concat(frames, ignore_index=True)
