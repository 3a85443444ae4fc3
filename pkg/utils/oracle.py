"""
Brute-Force Validators

Independent dense references for the fast paths:
- expm_apply: dense matrix exponential of a (possibly non-Hermitian) generator
- lindblad_collective: collective-decay master equation, RK4 with step doubling
- tavis_cummings_lindblad: atoms + lossy cavity, reduced to atomic populations

Validator scale only; every propagator refuses dimensions above its cap.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from config.settings import Numerics
from utils.dicke import DickeState, build_operators
from utils.errors import ConvergenceError, InvalidParameterError, SizingError
from utils.oat import fully_inverted

logger = logging.getLogger(__name__)

# Cavity dissipator 4*kappa*D[a]: adiabatic elimination then gives exactly gamma = g^2 / kappa
CAVITY_DISSIPATOR_SCALE = 4.0

# Liouvillians up to this dimension are exponentiated densely, larger ones via expm_multiply
DENSE_LIOUVILLIAN_MAX = 2048


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def populations(self) -> np.ndarray:
        return np.diag(self.matrix).real.copy()

    def expectation(self, operator: np.ndarray) -> float:
        return float(np.trace(self.matrix @ operator).real)

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T)).min())


@dataclass(frozen=True)
class TcParams:
    """Tavis-Cummings parameters; kappa enters the dissipator as 4 kappa D[a]."""

    n_atoms: int
    g: float
    kappa: float
    delta: float = 0.0
    photon_cutoff: int = Numerics.PHOTON_CUTOFF

    def __post_init__(self):
        if self.kappa <= 0:
            raise InvalidParameterError(f"kappa must be positive, got {self.kappa}")
        if self.photon_cutoff < 2:
            raise InvalidParameterError(f"photon_cutoff must be >= 2, got {self.photon_cutoff}")
        if self.delta != 0:
            raise InvalidParameterError("only resonant coupling (delta = 0) is supported")

    @property
    def effective_gamma(self) -> float:
        return self.g ** 2 / self.kappa

    @property
    def coupling_ratio(self) -> float:
        """kappa / (sqrt(N) g); large values mean the bad-cavity regime."""
        return math.inf if self.g == 0 else self.kappa / (math.sqrt(self.n_atoms) * self.g)


# =============================================================================
# DENSE PROPAGATION
# =============================================================================

def expm_apply(hamiltonian_matrix: np.ndarray, state_vector: np.ndarray, t: float) -> np.ndarray:
    """
    Return exp(-i H t) psi by dense scaling-and-squaring Pade exponentiation.

    Raises:
        SizingError: If the dimension exceeds Numerics.EXPM_MAX_DIM
    """
    h = np.asarray(hamiltonian_matrix)
    if h.shape[0] > Numerics.EXPM_MAX_DIM:
        raise SizingError(f"expm_apply is capped at dimension {Numerics.EXPM_MAX_DIM}, got {h.shape[0]}")
    return scipy.linalg.expm(-1j * t * h) @ np.asarray(state_vector, dtype=complex)


def nonhermitian_hamiltonian(n_atoms: int, gamma: float) -> np.ndarray:
    """H_nh = -i (gamma/2) S_+ S_- as a dense matrix."""
    ops = build_operators(n_atoms)
    return -0.5j * gamma * (ops.s_plus @ ops.s_minus)


def _as_density(initial: Union[DickeState, np.ndarray]) -> np.ndarray:
    if isinstance(initial, DickeState):
        psi = initial.normalized().amplitudes
        return np.outer(psi, psi.conj())
    rho = np.asarray(initial, dtype=complex)
    if rho.ndim == 1:
        return np.outer(rho, rho.conj()) / np.vdot(rho, rho).real
    return rho


def _lindblad_rhs(rho: np.ndarray, hamiltonian: np.ndarray, jumps: list) -> np.ndarray:
    drho = -1j * (hamiltonian @ rho - rho @ hamiltonian)
    for c, c_dag, c_dag_c in jumps:
        drho += c @ rho @ c_dag - 0.5 * (c_dag_c @ rho + rho @ c_dag_c)
    return drho


def _rk4(rho: np.ndarray, dt: float, steps: int, hamiltonian: np.ndarray, jumps: list) -> np.ndarray:
    for _ in range(steps):
        k1 = _lindblad_rhs(rho, hamiltonian, jumps)
        k2 = _lindblad_rhs(rho + 0.5 * dt * k1, hamiltonian, jumps)
        k3 = _lindblad_rhs(rho + 0.5 * dt * k2, hamiltonian, jumps)
        k4 = _lindblad_rhs(rho + dt * k3, hamiltonian, jumps)
        rho = rho + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return rho


def lindblad_collective(initial: Union[DickeState, np.ndarray], gamma: float,
                        time_grid: Sequence[float]) -> list[DensityMatrix]:
    """
    Integrate d(rho)/dt = gamma (S_- rho S_+ - {S_+ S_-, rho}/2) on a time grid.

    Each interval is integrated with n and 2n RK4 steps; n doubles until the
    populations of the two runs differ by less than Numerics.LINDBLAD_TOL.

    Args:
        initial: DickeState, state vector or density matrix of dimension <= 64
        gamma: Collective emission rate
        time_grid: Ascending output times, starting at or after 0

    Returns:
        list[DensityMatrix]: One density matrix per grid time

    Raises:
        SizingError: If the dimension exceeds Numerics.LINDBLAD_MAX_DIM
        ConvergenceError: If step doubling does not meet the tolerance
    """
    rho = _as_density(initial)
    dim = rho.shape[0]
    if dim > Numerics.LINDBLAD_MAX_DIM:
        raise SizingError(f"lindblad_collective is capped at dimension {Numerics.LINDBLAD_MAX_DIM}, got {dim}")
    if gamma < 0:
        raise InvalidParameterError(f"gamma must be >= 0, got {gamma}")

    ops = build_operators(dim - 1)
    c = math.sqrt(gamma) * ops.s_minus
    jumps = [(c, c.conj().T, c.conj().T @ c)]
    hamiltonian = np.zeros((dim, dim), dtype=complex)
    rate_bound = max(float(np.linalg.norm(jumps[0][2], 2)), 1e-12)

    times = np.asarray(time_grid, dtype=float)
    if np.any(np.diff(times) < 0) or times[0] < 0:
        raise InvalidParameterError("time_grid must be ascending and non-negative")

    out = []
    t_prev = 0.0
    for t in times:
        interval = t - t_prev
        if interval > 0:
            steps = max(1, math.ceil(interval * rate_bound / Numerics.RK4_STEP_SCALE))
            coarse = _rk4(rho, interval / steps, steps, hamiltonian, jumps)
            for _ in range(Numerics.MAX_STEP_HALVINGS):
                steps *= 2
                fine = _rk4(rho, interval / steps, steps, hamiltonian, jumps)
                change = np.max(np.abs(np.diag(fine) - np.diag(coarse)))
                coarse = fine
                if change < Numerics.LINDBLAD_TOL:
                    break
            else:
                raise ConvergenceError(
                    f"RK4 did not converge on [{t_prev:.4g}, {t:.4g}] after "
                    f"{Numerics.MAX_STEP_HALVINGS} halvings (last change {change:.3e})"
                )
            rho = 0.5 * (coarse + coarse.conj().T)
        out.append(DensityMatrix(rho.copy()))
        t_prev = t
    return out


# =============================================================================
# JUMP COUNTING
# =============================================================================

def jump_count_distribution(state0: DickeState, gamma: float, t: float) -> np.ndarray:
    """
    Exact probability of n photon emissions on [0, t], n = 0..N.

    Every jump lowers m by one and the no-jump propagator is diagonal, so the
    counting statistics follow the populations alone: a pure-death chain with
    rates gamma |<m-1|S_-|m>|^2, started from |c_m(0)|^2.

    Raises:
        SizingError: If N + 1 exceeds Numerics.EXPM_MAX_DIM
    """
    dim = state0.n_atoms + 1
    if dim > Numerics.EXPM_MAX_DIM:
        raise SizingError(f"jump_count_distribution is capped at dimension {Numerics.EXPM_MAX_DIM}, got {dim}")
    if gamma < 0 or t < 0:
        raise InvalidParameterError(f"gamma and t must be >= 0, got gamma={gamma}, t={t}")

    ops = build_operators(state0.n_atoms)
    rates = gamma * np.sum(np.abs(ops.s_minus) ** 2, axis=0)
    generator = np.diag(-rates) + np.diag(rates[1:], k=1)
    transfer = scipy.linalg.expm(generator * t)
    pops0 = np.abs(state0.normalized().amplitudes) ** 2
    # transfer[s - n, s] is the probability of n jumps starting from level s
    counts = np.array([np.diagonal(transfer, offset=n) @ pops0[n:] for n in range(dim)])
    return np.clip(counts, 0.0, None)


# =============================================================================
# TAVIS-CUMMINGS
# =============================================================================

def _liouvillian(hamiltonian: sp.spmatrix, collapse: sp.spmatrix) -> sp.csr_matrix:
    """Column-stacking Liouvillian of -i[H, rho] + D[C] rho."""
    dim = hamiltonian.shape[0]
    eye = sp.identity(dim, format="csr", dtype=complex)
    c_dag_c = (collapse.conj().T @ collapse).tocsr()
    generator = -1j * (sp.kron(eye, hamiltonian) - sp.kron(hamiltonian.T, eye))
    generator = generator + sp.kron(collapse.conj(), collapse)
    generator = generator - 0.5 * sp.kron(eye, c_dag_c) - 0.5 * sp.kron(c_dag_c.T, eye)
    return generator.tocsr()


def _tc_reduced_populations(tc: TcParams, atomic_state0: DickeState, times: np.ndarray) -> np.ndarray:
    n_atomic = tc.n_atoms + 1
    n_cavity = tc.photon_cutoff + 1
    dim = n_atomic * n_cavity
    if dim > Numerics.TC_MAX_DIM:
        raise SizingError(f"Tavis-Cummings space {n_atomic}x{n_cavity} exceeds cap {Numerics.TC_MAX_DIM}")

    ops = build_operators(tc.n_atoms)
    destroy = sp.diags(np.sqrt(np.arange(1, n_cavity)), 1, format="csr", dtype=complex)
    eye_a = sp.identity(n_atomic, format="csr")
    eye_c = sp.identity(n_cavity, format="csr")
    a = sp.kron(eye_a, destroy, format="csr")
    s_plus = sp.kron(sp.csr_matrix(ops.s_plus), eye_c, format="csr")
    s_minus = sp.kron(sp.csr_matrix(ops.s_minus), eye_c, format="csr")
    s_z = sp.kron(sp.csr_matrix(ops.sz), eye_c, format="csr")

    hamiltonian = -tc.delta * s_z + tc.g * (a @ s_plus + a.conj().T @ s_minus)
    collapse = math.sqrt(CAVITY_DISSIPATOR_SCALE * tc.kappa) * a
    generator = _liouvillian(hamiltonian.tocsr(), collapse.tocsr())

    psi_a = atomic_state0.normalized().amplitudes
    vacuum = np.zeros(n_cavity)
    vacuum[0] = 1.0
    psi = np.kron(psi_a, vacuum)
    vec = np.outer(psi, psi.conj()).reshape(-1, order="F")

    dense = generator.shape[0] <= DENSE_LIOUVILLIAN_MAX
    generator_dense = generator.toarray() if dense else None
    propagators = {}

    pops = np.empty((times.size, n_atomic))
    t_prev = 0.0
    for i, t in enumerate(times):
        dt = t - t_prev
        if dt > 0:
            if dense:
                key = round(dt, 15)
                if key not in propagators:
                    propagators[key] = scipy.linalg.expm(generator_dense * dt)
                vec = propagators[key] @ vec
            else:
                vec = expm_multiply(generator * dt, vec)
        rho = vec.reshape(dim, dim, order="F").reshape(n_atomic, n_cavity, n_atomic, n_cavity)
        pops[i] = np.einsum("mnkn->mk", rho).diagonal().real
        t_prev = t
    return pops


def tavis_cummings_lindblad(tc: TcParams, atomic_state0: DickeState, time_grid: Sequence[float]) -> np.ndarray:
    """
    Reduced atomic populations of the lossy Tavis-Cummings model, cavity starting in vacuum.

    The photon cutoff is checked by re-running at cutoff + 1.

    Returns:
        ndarray of shape (len(time_grid), N+1)

    Raises:
        ConvergenceError: If raising the cutoff changes populations by >= Numerics.CUTOFF_TOL
        SizingError: If the joint space exceeds Numerics.TC_MAX_DIM
    """
    times = np.asarray(time_grid, dtype=float)
    if np.any(np.diff(times) < 0) or times[0] < 0:
        raise InvalidParameterError("time_grid must be ascending and non-negative")
    pops = _tc_reduced_populations(tc, atomic_state0, times)
    check = TcParams(tc.n_atoms, tc.g, tc.kappa, tc.delta, tc.photon_cutoff + 1)
    change = float(np.max(np.abs(_tc_reduced_populations(check, atomic_state0, times) - pops)))
    if change >= Numerics.CUTOFF_TOL:
        raise ConvergenceError(
            f"photon cutoff {tc.photon_cutoff} inadequate: populations change by {change:.3e} at cutoff+1"
        )
    logger.debug(f"Tavis-Cummings N={tc.n_atoms}: cutoff check change {change:.3e}")
    return pops


def adiabatic_elimination_deviation(n_atoms: int, ratio: float, gamma: float = 1.0, t_max: float = None,
                                    n_times: int = 41, photon_cutoff: int = Numerics.PHOTON_CUTOFF) -> float:
    """
    Max-over-time L1 distance between Tavis-Cummings and effective collective-decay populations.

    At fixed gamma = g^2/kappa the coupling is g = gamma * ratio * sqrt(N) and
    kappa = gamma * ratio^2 * N, so kappa / (sqrt(N) g) = ratio. Starts from |N/2>.
    """
    if ratio < 5:
        raise InvalidParameterError(f"kappa/(sqrt(N) g) must be >= 5 for validation runs, got {ratio}")
    t_max = 2.0 / gamma if t_max is None else t_max
    times = np.linspace(0.0, t_max, n_times)
    tc = TcParams(n_atoms, g=gamma * ratio * math.sqrt(n_atoms), kappa=gamma * ratio ** 2 * n_atoms,
                  photon_cutoff=photon_cutoff)
    state0 = fully_inverted(n_atoms)
    reduced = tavis_cummings_lindblad(tc, state0, times)
    effective = np.array([rho.populations() for rho in lindblad_collective(state0, tc.effective_gamma, times)])
    return float(np.max(np.sum(np.abs(reduced - effective), axis=1)))
