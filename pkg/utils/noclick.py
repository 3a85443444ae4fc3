"""
No-Click Dynamics

Exact propagation under H_nh = -i (gamma/2) S_+ S_-, which is diagonal in the
Dicke basis. Amplitudes decay at |eps_m|, populations at 2 |eps_m|; the squared
norm of the propagated state is the probability that no photon was emitted.

Times are in units of 1/gamma when gamma = 1.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import optimize

from config.settings import Numerics
from utils.dicke import (
    DickeState,
    cat_phase,
    m_values,
    variance_from_populations,
)
from utils.errors import (
    DimensionMismatchError,
    InvalidParameterError,
    NegativeCatTimeError,
    UndefinedCatTimeError,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DecaySpectrum:
    """Amplitude decay rates |eps_m|, ordered like DickeState amplitudes."""

    n_atoms: int
    gamma: float
    rates: np.ndarray

    @property
    def min_bright_rate(self) -> float:
        """Smallest non-zero rate, gamma N / 2."""
        return float(self.rates[1:].min())


@dataclass(frozen=True)
class TOptResult:
    t_opt: float
    peak_var: float
    boundary: bool


@dataclass(frozen=True, eq=False)
class NoClickTrajectory:
    """Observables of the normalized no-click state on a uniform time grid."""

    times: np.ndarray
    var_sz: np.ndarray
    survival_probability: np.ndarray
    cat_fidelity: np.ndarray
    cat_phase: float
    populations: np.ndarray
    t_opt: float
    peak_var: float
    t_opt_is_boundary: bool

    @property
    def n_atoms(self) -> int:
        return self.populations.shape[1] - 1

    @property
    def var_sz_normalized(self) -> np.ndarray:
        return self.var_sz / (self.n_atoms ** 2 / 4)


def decay_spectrum(n_atoms: int, gamma: float = 1.0) -> DecaySpectrum:
    """
    Decay rates of the Dicke states under collective emission.

    Args:
        n_atoms: Atom number N >= 1
        gamma: Collective emission rate (> 0)

    Returns:
        DecaySpectrum: (gamma/2)(N(N+2)/4 - m^2 + m) for every m

    Raises:
        InvalidParameterError: If gamma is not positive or N < 1
    """
    if gamma <= 0 or not math.isfinite(gamma):
        raise InvalidParameterError(f"gamma must be positive, got {gamma}")
    if n_atoms < 1:
        raise InvalidParameterError(f"n_atoms must be >= 1, got {n_atoms}")
    s = n_atoms / 2
    m = m_values(n_atoms)
    # (S + m)(S - m + 1) == N(N+2)/4 - m^2 + m, exactly zero at m = -S
    rates = 0.5 * gamma * (s + m) * (s - m + 1)
    rates.setflags(write=False)
    return DecaySpectrum(n_atoms=n_atoms, gamma=float(gamma), rates=rates)


def _check(state: DickeState, spectrum: DecaySpectrum):
    if state.n_atoms != spectrum.n_atoms:
        raise DimensionMismatchError(f"state has N={state.n_atoms}, spectrum has N={spectrum.n_atoms}")


def evolve_noclick(state: DickeState, spectrum: DecaySpectrum, dt: float) -> DickeState:
    """c_m -> c_m exp(-|eps_m| dt); the result keeps its (shrinking) norm."""
    _check(state, spectrum)
    if dt < 0:
        raise InvalidParameterError(f"dt must be >= 0, got {dt}")
    return DickeState(state.n_atoms, state.amplitudes * np.exp(-spectrum.rates * dt))


def survival_probability(state0: DickeState, spectrum: DecaySpectrum, t):
    """
    No-click probability sum_m |c_m(0)|^2 exp(-2 |eps_m| t).

    Accepts a scalar time or an array of times.
    """
    _check(state0, spectrum)
    times = np.asarray(t, dtype=float)
    if np.any(times < 0):
        raise InvalidParameterError("survival probability requires t >= 0")
    pops0 = np.abs(state0.amplitudes) ** 2
    values = np.exp(-2 * np.multiply.outer(times, spectrum.rates)) @ pops0
    return float(values) if values.ndim == 0 else values


def cat_time(state0: DickeState, spectrum: DecaySpectrum) -> float:
    """
    Time at which the two extreme populations equalize under no-click decay.

    Raises:
        UndefinedCatTimeError: If the ground state |-N/2> is unpopulated
        NegativeCatTimeError: If the ground state outweighs |N/2>
    """
    _check(state0, spectrum)
    top = abs(state0.amplitudes[-1]) ** 2
    bottom = abs(state0.amplitudes[0]) ** 2
    if bottom <= Numerics.ZERO_POPULATION * (top + bottom):
        raise UndefinedCatTimeError("ground-state population is zero; the cat time needs it nonzero")
    if top < bottom:
        raise NegativeCatTimeError(
            f"ground-state population {bottom:.3e} exceeds the inverted one {top:.3e}; "
            "no-click decay only depletes |N/2>, so the populations never equalize"
        )
    return math.log(top / bottom) / (spectrum.gamma * spectrum.n_atoms)


def normalized_populations(state0: DickeState, spectrum: DecaySpectrum, times) -> np.ndarray:
    """Normalized populations at each time, shape (len(times), N+1); stable for long times."""
    pops0 = np.abs(state0.amplitudes) ** 2
    with np.errstate(divide="ignore"):
        log_w = np.log(pops0)[None, :] - 2 * np.outer(np.atleast_1d(times), spectrum.rates)
    log_w -= log_w.max(axis=1, keepdims=True)
    weights = np.exp(log_w)
    return weights / weights.sum(axis=1, keepdims=True)


def variance_along(state0: DickeState, spectrum: DecaySpectrum, times) -> np.ndarray:
    """Var S_z of the normalized no-click state at each time."""
    return variance_from_populations(normalized_populations(state0, spectrum, times), spectrum.n_atoms)


def default_t_max(state0: DickeState, spectrum: DecaySpectrum) -> float:
    """4 ln(N) / (gamma N), stretched to 1.5 t_c when the cat time lies beyond it."""
    n = spectrum.n_atoms
    horizon = Numerics.TOPT_HORIZON_FACTOR * max(math.log(n), 1.0) / (spectrum.gamma * n)
    try:
        return max(horizon, 1.5 * cat_time(state0, spectrum))
    except (UndefinedCatTimeError, NegativeCatTimeError):
        return horizon


def find_t_opt(
    state0: DickeState,
    spectrum: DecaySpectrum,
    t_max: Optional[float] = None,
    grid_points: Optional[int] = None,
) -> TOptResult:
    """
    Locate the time of peak Var S_z along the no-click trajectory.

    Coarse scan on a uniform grid, then golden-section refinement around the
    best interior grid point.

    Args:
        state0: Initial state
        spectrum: Decay spectrum
        t_max: Search horizon (defaults to default_t_max)
        grid_points: Coarse grid size, >= 16

    Returns:
        TOptResult: (t_opt, peak_var, boundary) where boundary marks a maximizer
        at 0 or t_max, i.e. no interior maximum on the window
    """
    _check(state0, spectrum)
    t_max = default_t_max(state0, spectrum) if t_max is None else float(t_max)
    grid_points = Numerics.TOPT_GRID_POINTS if grid_points is None else grid_points
    if t_max <= 0:
        raise InvalidParameterError(f"t_max must be positive, got {t_max}")
    if grid_points < Numerics.TOPT_MIN_GRID_POINTS:
        raise InvalidParameterError(f"grid_points must be >= {Numerics.TOPT_MIN_GRID_POINTS}, got {grid_points}")

    times = np.linspace(0.0, t_max, grid_points)
    variance = variance_along(state0, spectrum, times)
    scale = max(spectrum.n_atoms ** 2 / 4, 1.0)

    if variance.max() - variance.min() <= 1e-12 * scale:
        return TOptResult(0.0, float(variance[0]), True)

    best = int(np.argmax(variance))
    if best == 0 or best == grid_points - 1:
        return TOptResult(float(times[best]), float(variance[best]), True)

    t_best, peak = float(times[best]), float(variance[best])
    left, right = times[best - 1], times[best + 1]
    if variance[best] > variance[best - 1] and variance[best] > variance[best + 1]:
        result = optimize.minimize_scalar(
            lambda t: -float(variance_along(state0, spectrum, [t])[0]),
            bracket=(left, t_best, right),
            method="golden",
            tol=Numerics.TOPT_REL_TOL,
        )
        if left <= result.x <= right and -result.fun >= peak:
            t_best, peak = float(result.x), float(-result.fun)

    tol = Numerics.TOPT_REL_TOL * t_max
    boundary = t_best <= tol or t_best >= t_max - tol
    return TOptResult(t_best, peak, boundary)


def earliest_time_for_variance(
    state0: DickeState,
    spectrum: DecaySpectrum,
    target_normalized: float,
    t_max: Optional[float] = None,
    grid_points: Optional[int] = None,
) -> Optional[tuple[float, float]]:
    """
    Earliest time where Var S_z / (N^2/4) reaches a target, with the survival there.

    Stopping before t_opt trades entanglement for a higher no-click probability.

    Returns:
        (t, survival) or None when the target is never reached on [0, t_max]
    """
    _check(state0, spectrum)
    t_max = default_t_max(state0, spectrum) if t_max is None else float(t_max)
    grid_points = Numerics.TOPT_GRID_POINTS if grid_points is None else grid_points
    if grid_points < 2:
        raise InvalidParameterError(f"grid_points must be >= 2, got {grid_points}")
    times = np.linspace(0.0, t_max, grid_points)
    scale = spectrum.n_atoms ** 2 / 4
    excess = variance_along(state0, spectrum, times) / scale - target_normalized

    reached = np.flatnonzero(excess >= 0)
    if reached.size == 0:
        return None
    first = int(reached[0])
    if first == 0:
        return 0.0, 1.0
    t_hit = optimize.brentq(
        lambda t: float(variance_along(state0, spectrum, [t])[0]) / scale - target_normalized,
        times[first - 1],
        times[first],
        rtol=Numerics.TOPT_REL_TOL,
    )
    return float(t_hit), survival_probability(state0, spectrum, t_hit)


def noclick_trajectory(
    state0: DickeState,
    spectrum: DecaySpectrum,
    t_end: float,
    n_samples: int,
    t_max: Optional[float] = None,
) -> NoClickTrajectory:
    """
    Sample the no-click trajectory uniformly on [0, t_end].

    Observables are evaluated on the normalized state; survival on the
    unnormalized one. The t_opt fields search [0, t_max] (default t_end).
    """
    _check(state0, spectrum)
    if t_end <= 0:
        raise InvalidParameterError(f"t_end must be positive, got {t_end}")
    if n_samples < 2:
        raise InvalidParameterError(f"n_samples must be >= 2, got {n_samples}")

    times = np.linspace(0.0, t_end, n_samples)
    pops = normalized_populations(state0, spectrum, times)
    fidelity = np.minimum((np.sqrt(pops[:, -1]) + np.sqrt(pops[:, 0])) ** 2 / 2, 1.0)
    t_opt = find_t_opt(state0, spectrum, t_max=t_max or t_end)
    logger.debug(f"No-click trajectory N={spectrum.n_atoms}: t_opt={t_opt.t_opt:.6g}")

    return NoClickTrajectory(
        times=times,
        var_sz=variance_from_populations(pops, spectrum.n_atoms),
        survival_probability=survival_probability(state0, spectrum, times),
        cat_fidelity=fidelity,
        cat_phase=cat_phase(state0),
        populations=pops,
        t_opt=t_opt.t_opt,
        peak_var=t_opt.peak_var,
        t_opt_is_boundary=t_opt.boundary,
    )
