"""
Collective Spin Utilities

Symmetric Dicke ladder |m>, m = -N/2 ... N/2, stored ascending in m so that
index k corresponds to m = k - N/2 and the dark state |-N/2> is always index 0.
Operators are dense matrices; functions of S_x and S_y go through cached
Hermitian eigendecompositions.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from config.settings import Numerics
from utils.errors import DegenerateStateError, DimensionMismatchError, SizingError

logger = logging.getLogger(__name__)


def m_values(n_atoms: int) -> np.ndarray:
    """Magnetic quantum numbers -N/2 ... N/2 in storage order."""
    return np.arange(n_atoms + 1, dtype=float) - n_atoms / 2


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class DickeState:
    """
    Complex amplitudes over the Dicke ladder.

    The state is allowed to be sub-normalized: during no-click evolution the
    squared norm is the survival probability and is never renormalized away.
    """

    n_atoms: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if self.n_atoms < 1:
            raise SizingError(f"n_atoms must be >= 1, got {self.n_atoms}")
        if amplitudes.size != self.n_atoms + 1:
            raise DimensionMismatchError(
                f"expected {self.n_atoms + 1} amplitudes for N={self.n_atoms}, got {amplitudes.size}"
            )
        if not np.all(np.isfinite(amplitudes)):
            raise ValueError("amplitudes must be finite")
        object.__setattr__(self, "amplitudes", _frozen(amplitudes))

    @property
    def squared_norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def normalized(self) -> DickeState:
        """Return the normalized copy; raises DegenerateStateError on zero norm."""
        norm_sq = self.squared_norm
        if norm_sq <= Numerics.ZERO_NORM:
            raise DegenerateStateError("cannot normalize a state with zero norm")
        return DickeState(self.n_atoms, self.amplitudes / np.sqrt(norm_sq))

    def amplitude(self, m: float) -> complex:
        """Amplitude c_m for m in -N/2 ... N/2."""
        return complex(self.amplitudes[int(round(m + self.n_atoms / 2))])


def basis_state(n_atoms: int, m: float) -> DickeState:
    """Dicke state |m>."""
    amplitudes = np.zeros(n_atoms + 1, dtype=complex)
    amplitudes[int(round(m + n_atoms / 2))] = 1.0
    return DickeState(n_atoms, amplitudes)


def cat_state(n_atoms: int, phi: float = 0.0) -> DickeState:
    """(|N/2> + e^{i phi} |-N/2>) / sqrt(2)."""
    amplitudes = np.zeros(n_atoms + 1, dtype=complex)
    amplitudes[-1] = 1 / np.sqrt(2)
    amplitudes[0] = np.exp(1j * phi) / np.sqrt(2)
    return DickeState(n_atoms, amplitudes)


# =============================================================================
# OPERATORS
# =============================================================================

@dataclass(frozen=True, eq=False)
class SpinOperators:
    """Dense collective spin matrices for one atom number, read-only after construction."""

    n_atoms: int
    sz: np.ndarray
    s_plus: np.ndarray
    s_minus: np.ndarray
    sx: np.ndarray
    sy: np.ndarray
    eig_sx: tuple[np.ndarray, np.ndarray]
    eig_sy: tuple[np.ndarray, np.ndarray]

    @property
    def dim(self) -> int:
        return self.n_atoms + 1

    @property
    def spin(self) -> float:
        return self.n_atoms / 2


def ladder_coefficients(n_atoms: int) -> np.ndarray:
    """sqrt(S(S+1) - m(m+1)) for m = -N/2 ... N/2 - 1."""
    s = n_atoms / 2
    m = m_values(n_atoms)[:-1]
    return np.sqrt((s - m) * (s + m + 1))


def _hermitian_eig(matrix: np.ndarray, n_atoms: int, label: str) -> tuple[np.ndarray, np.ndarray]:
    eigvals, eigvecs = scipy.linalg.eigh(matrix)
    exact = m_values(n_atoms)
    drift = np.max(np.abs(eigvals - exact))
    if drift > 1e-9:
        logger.warning(f"{label} spectrum deviates from -N/2..N/2 by {drift:.3e} (N={n_atoms})")
        return _frozen(eigvals), _frozen(eigvecs)
    # spectrum is known exactly; snapping keeps phases like exp(-i chi m^2) exact
    return _frozen(exact.copy()), _frozen(eigvecs)


@lru_cache(maxsize=32)
def build_operators(n_atoms: int) -> SpinOperators:
    """
    Build the collective spin operators of N two-level atoms.

    Args:
        n_atoms: Atom number N, 1 <= N <= Numerics.MAX_ATOMS

    Returns:
        SpinOperators: Shared, read-only operator set (cached per N)

    Raises:
        SizingError: If N is zero, negative or above the cap
    """
    if not isinstance(n_atoms, (int, np.integer)) or n_atoms < 1 or n_atoms > Numerics.MAX_ATOMS:
        raise SizingError(f"n_atoms must be an integer in [1, {Numerics.MAX_ATOMS}], got {n_atoms}")
    n_atoms = int(n_atoms)

    sz = np.diag(m_values(n_atoms))
    s_plus = np.diag(ladder_coefficients(n_atoms), -1)
    s_minus = s_plus.T.copy()
    sx = 0.5 * (s_plus + s_minus)
    sy = -0.5j * (s_plus - s_minus)

    logger.debug(f"Built spin operators for N={n_atoms}")
    return SpinOperators(
        n_atoms=n_atoms,
        sz=_frozen(sz),
        s_plus=_frozen(s_plus),
        s_minus=_frozen(s_minus),
        sx=_frozen(sx),
        sy=_frozen(sy),
        eig_sx=_hermitian_eig(sx, n_atoms, "S_x"),
        eig_sy=_hermitian_eig(sy, n_atoms, "S_y"),
    )


def apply_function_of(eig: tuple[np.ndarray, np.ndarray], phases: np.ndarray, state: DickeState) -> DickeState:
    """Apply V diag(phases) V^dagger, V the eigenvectors of eig, to a state."""
    eigvecs = eig[1]
    amplitudes = eigvecs @ (phases * (eigvecs.conj().T @ state.amplitudes))
    return DickeState(state.n_atoms, amplitudes)


def apply_rotation_y(state: DickeState, theta: float, ops: SpinOperators = None) -> DickeState:
    """Return exp(-i theta S_y) |state>."""
    ops = ops or build_operators(state.n_atoms)
    check_dims(state, ops.n_atoms)
    if theta == 0:
        return state
    return apply_function_of(ops.eig_sy, np.exp(-1j * theta * ops.eig_sy[0]), state)


def check_dims(state: DickeState, n_atoms: int):
    if state.n_atoms != n_atoms:
        raise DimensionMismatchError(f"state has N={state.n_atoms}, expected N={n_atoms}")


# =============================================================================
# OBSERVABLES
# =============================================================================

@dataclass(frozen=True, eq=False)
class Observables:
    """Entanglement observables of one (normalized) state."""

    var_sz: float
    mean_sz: float
    cat_fidelity: float
    cat_phase: float
    populations: np.ndarray


def populations(state: DickeState) -> np.ndarray:
    """Populations of the normalized state, ascending in m."""
    weights = np.abs(state.amplitudes) ** 2
    total = weights.sum()
    if total <= Numerics.ZERO_NORM:
        raise DegenerateStateError("populations of a zero-norm state are undefined")
    return weights / total


def mean_sz(state: DickeState) -> float:
    return float(populations(state) @ m_values(state.n_atoms))


def variance_from_populations(pops: np.ndarray, n_atoms: int) -> np.ndarray:
    """Var S_z for one or many (normalized) population vectors along the last axis."""
    m = m_values(n_atoms)
    mean = pops @ m
    return np.clip(pops @ (m * m) - mean * mean, 0.0, None)


def variance_sz(state: DickeState) -> float:
    """<S_z^2> - <S_z>^2 of the normalized state."""
    return float(variance_from_populations(populations(state), state.n_atoms))


def cat_fidelity(state: DickeState) -> float:
    """max_phi |<cat(phi)|state>|^2 = (|c_top| + |c_bottom|)^2 / 2 on the normalized state."""
    norm_sq = state.squared_norm
    if norm_sq <= Numerics.ZERO_NORM:
        raise DegenerateStateError("cat fidelity of a zero-norm state is undefined")
    top, bottom = np.abs(state.amplitudes[-1]), np.abs(state.amplitudes[0])
    return float(min((top + bottom) ** 2 / (2 * norm_sq), 1.0))


def cat_phase(state: DickeState) -> float:
    """arg(c_{N/2} conj(c_{-N/2})); diagnostic only, 0 when either amplitude vanishes."""
    return float(np.angle(state.amplitudes[-1] * np.conj(state.amplitudes[0])))


def observables(state: DickeState) -> Observables:
    pops = populations(state)
    m = m_values(state.n_atoms)
    mean = float(pops @ m)
    return Observables(
        var_sz=float(variance_from_populations(pops, state.n_atoms)),
        mean_sz=mean,
        cat_fidelity=cat_fidelity(state),
        cat_phase=cat_phase(state),
        populations=pops,
    )
