import numpy as np
import pytest

from utils.dicke import DickeState, basis_state, build_operators
from utils.errors import InvalidParameterError, SizingError
from utils.mcwf import JumpHistogram, detector_precision
from utils.noclick import decay_spectrum, evolve_noclick, survival_probability
from utils.oat import PrepSpec, fully_inverted, prepare
from utils.oracle import (
    TcParams,
    adiabatic_elimination_deviation,
    expm_apply,
    jump_count_distribution,
    lindblad_collective,
    nonhermitian_hamiltonian,
    tavis_cummings_lindblad,
)


def _random_state(n, rng):
    psi = rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1)
    return DickeState(n, psi / np.linalg.norm(psi))


class TestExpm:
    def test_zero_generator_is_identity(self):
        psi = np.array([0.6, 0.8j])
        np.testing.assert_allclose(expm_apply(np.zeros((2, 2)), psi, 3.0), psi)

    def test_diagonal_generator(self):
        h = np.diag([0.5, -1.0, 2.0])
        psi = np.ones(3) / np.sqrt(3)
        np.testing.assert_allclose(expm_apply(h, psi, 0.7), np.exp(-0.7j * np.diag(h)) * psi, atol=1e-14)

    def test_hermitian_generator_preserves_norm(self):
        ops = build_operators(30)
        psi = _random_state(30, np.random.default_rng(0)).amplitudes
        assert np.linalg.norm(expm_apply(ops.sx @ ops.sx, psi, 0.9)) == pytest.approx(1.0, abs=1e-11)

    @pytest.mark.parametrize("n", [1, 6, 8, 12])
    def test_matches_diagonal_propagator(self, n):
        rng = np.random.default_rng(n)
        spectrum = decay_spectrum(n)
        h = nonhermitian_hamiltonian(n, 1.0)
        for _ in range(100):
            state = _random_state(n, rng)
            t = rng.uniform(0, 0.5)
            np.testing.assert_allclose(expm_apply(h, state.amplitudes, t),
                                       evolve_noclick(state, spectrum, t).amplitudes, atol=1e-10)

    def test_dimension_cap(self):
        with pytest.raises(SizingError):
            expm_apply(np.zeros((513, 513)), np.zeros(513), 1.0)


class TestLindblad:
    def test_dark_state_is_stationary(self):
        times = [0.0, 1.0, 5.0]
        for rho in lindblad_collective(basis_state(4, -2), 1.0, times):
            np.testing.assert_allclose(rho.populations(), [1, 0, 0, 0, 0], atol=1e-12)

    def test_single_atom_damping(self):
        times = np.linspace(0, 3, 13)
        sz = build_operators(1).sz
        result = [rho.expectation(sz) for rho in lindblad_collective(fully_inverted(1), 1.0, times)]
        np.testing.assert_allclose(result, np.exp(-times) - 0.5, atol=1e-7)

    def test_density_matrix_properties(self):
        psi = _random_state(5, np.random.default_rng(3))
        for rho in lindblad_collective(psi, 0.7, np.linspace(0, 2, 9)):
            assert rho.trace == pytest.approx(1.0, abs=1e-8)
            assert rho.hermiticity_error() <= 1e-10
            assert rho.min_eigenvalue() >= -1e-7

    def test_accepts_vectors_and_matrices(self):
        psi = fully_inverted(2).amplitudes
        from_vector = lindblad_collective(psi, 1.0, [0.4])[0].matrix
        from_matrix = lindblad_collective(np.outer(psi, psi.conj()), 1.0, [0.4])[0].matrix
        np.testing.assert_allclose(from_vector, from_matrix)

    def test_dimension_cap(self):
        with pytest.raises(SizingError):
            lindblad_collective(fully_inverted(64), 1.0, [0.1])

    def test_times_must_ascend(self):
        with pytest.raises(InvalidParameterError):
            lindblad_collective(fully_inverted(2), 1.0, [0.5, 0.1])


class TestJumpCounting:
    def test_dark_state_never_emits(self):
        counts = jump_count_distribution(basis_state(8, -4), 1.0, 5.0)
        np.testing.assert_allclose(counts, np.eye(9)[0], atol=1e-14)

    def test_zero_jumps_is_the_survival_probability(self):
        state0 = prepare(PrepSpec(20, 0.3))
        for t in (0.0, 0.02, 0.3):
            counts = jump_count_distribution(state0, 1.0, t)
            assert counts.sum() == pytest.approx(1.0, abs=1e-10)
            assert counts[0] == pytest.approx(survival_probability(state0, decay_spectrum(20), t), abs=1e-10)

    def test_mean_count_is_the_drop_in_sz(self):
        state0 = prepare(PrepSpec(6, 0.3))
        sz = build_operators(6).sz
        rho0, rho_t = lindblad_collective(state0, 0.8, [0.0, 0.4])
        counts = jump_count_distribution(state0, 0.8, 0.4)
        mean = counts @ np.arange(7)
        assert mean == pytest.approx(rho0.expectation(sz) - rho_t.expectation(sz), abs=1e-6)

    def test_inverted_single_atom(self):
        counts = jump_count_distribution(fully_inverted(1), 2.0, 0.5)
        np.testing.assert_allclose(counts, [np.exp(-1.0), 1 - np.exp(-1.0)], atol=1e-14)

    def test_operating_point_statistics(self, operating_point):
        state0, spectrum, result = operating_point
        counts = jump_count_distribution(state0, 1.0, result.t_opt)
        assert int(np.argmax(counts)) == 0
        hist = JumpHistogram(result.t_opt, counts, np.zeros_like(counts), n_trajectories=1)
        assert detector_precision(hist, 0.9) == pytest.approx(0.93, abs=0.01)

    def test_dimension_cap(self):
        with pytest.raises(SizingError):
            jump_count_distribution(DickeState(600, np.eye(601)[600]), 1.0, 0.1)

    def test_negative_time_rejected(self):
        with pytest.raises(InvalidParameterError):
            jump_count_distribution(fully_inverted(3), 1.0, -0.1)


class TestTavisCummings:
    def test_params_validated(self):
        with pytest.raises(InvalidParameterError):
            TcParams(2, g=1.0, kappa=0.0)
        with pytest.raises(InvalidParameterError):
            TcParams(2, g=1.0, kappa=10.0, photon_cutoff=1)
        with pytest.raises(InvalidParameterError):
            TcParams(2, g=1.0, kappa=10.0, delta=0.5)

    def test_effective_rate_and_ratio(self):
        tc = TcParams(4, g=2.0, kappa=80.0)
        assert tc.effective_gamma == pytest.approx(0.05)
        assert tc.coupling_ratio == pytest.approx(20.0)

    def test_uncoupled_atoms_are_frozen(self):
        state0 = fully_inverted(3)
        pops = tavis_cummings_lindblad(TcParams(3, g=0.0, kappa=5.0, photon_cutoff=3), state0, [0.0, 1.0, 2.0])
        np.testing.assert_allclose(pops, np.tile([0, 0, 0, 1], (3, 1)), atol=1e-12)

    def test_populations_stay_normalized(self):
        pops = tavis_cummings_lindblad(TcParams(2, g=1.0, kappa=20.0, photon_cutoff=4), fully_inverted(2),
                                       np.linspace(0, 5, 6))
        np.testing.assert_allclose(pops.sum(axis=1), 1.0, atol=1e-9)

    def test_bad_cavity_limit_matches_collective_decay(self):
        tc = TcParams(2, g=1.0, kappa=50.0, photon_cutoff=4)
        times = np.linspace(0, 2 / tc.effective_gamma, 21)
        reduced = tavis_cummings_lindblad(tc, fully_inverted(2), times)
        effective = lindblad_collective(fully_inverted(2), tc.effective_gamma, times)
        m = np.array([-1.0, 0.0, 1.0])
        sz_reduced = reduced @ m
        sz_effective = np.array([rho.populations() @ m for rho in effective])
        assert np.max(np.abs(sz_reduced - sz_effective)) <= 0.05 * np.max(np.abs(sz_effective))

    def test_dimension_cap(self):
        with pytest.raises(SizingError):
            tavis_cummings_lindblad(TcParams(63, g=1.0, kappa=100.0, photon_cutoff=6), fully_inverted(63), [0.1])


class TestAdiabaticElimination:
    @pytest.mark.parametrize("n", [2, 4])
    def test_ratio_twenty_within_five_percent(self, n):
        assert adiabatic_elimination_deviation(n, 20.0, photon_cutoff=4) <= 0.05

    @pytest.mark.slow
    def test_deviation_shrinks_with_the_ratio(self):
        deviations = [adiabatic_elimination_deviation(4, ratio, photon_cutoff=4) for ratio in (5, 10, 20, 40)]
        assert all(later < earlier for earlier, later in zip(deviations, deviations[1:]))

    def test_strong_coupling_rejected(self):
        with pytest.raises(InvalidParameterError):
            adiabatic_elimination_deviation(2, 2.0)
