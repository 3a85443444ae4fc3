import math

import numpy as np
import pytest
from scipy import optimize

from utils.dicke import (
    DickeState,
    apply_rotation_y,
    basis_state,
    build_operators,
    cat_fidelity,
    cat_phase,
    cat_state,
    ladder_coefficients,
    mean_sz,
    observables,
    populations,
    variance_sz,
)
from utils.errors import DegenerateStateError, DimensionMismatchError, SizingError


def _random_state(n, rng):
    psi = rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1)
    return DickeState(n, psi / np.linalg.norm(psi))


class TestOperators:
    def test_single_atom(self):
        ops = build_operators(1)
        np.testing.assert_allclose(ops.sz, np.diag([-0.5, 0.5]))
        assert np.count_nonzero(ops.s_plus) == 1
        assert ops.s_plus[1, 0] == pytest.approx(1.0)

    def test_two_atom_ladder(self):
        np.testing.assert_allclose(ladder_coefficients(2), [math.sqrt(2), math.sqrt(2)])

    @pytest.mark.parametrize("n", [1, 2, 3, 7, 10, 30, 51, 100])
    def test_algebra(self, n):
        ops = build_operators(n)
        s = n / 2
        np.testing.assert_allclose(ops.sx + 1j * ops.sy, ops.s_plus, atol=1e-12)
        np.testing.assert_allclose(ops.sx - 1j * ops.sy, ops.s_minus, atol=1e-12)
        commutator = ops.sx @ ops.sy - ops.sy @ ops.sx
        np.testing.assert_allclose(commutator, 1j * ops.sz, atol=1e-10 * n)
        casimir = ops.sx @ ops.sx + ops.sy @ ops.sy + ops.sz @ ops.sz
        np.testing.assert_allclose(casimir, s * (s + 1) * np.eye(n + 1), atol=1e-9 * n * n)

    def test_sx_spectrum_is_exact(self):
        ops = build_operators(100)
        np.testing.assert_array_equal(ops.eig_sx[0], np.arange(-50, 51))
        np.testing.assert_array_equal(ops.eig_sy[0], np.arange(-50, 51))

    def test_operators_are_read_only_and_cached(self):
        ops = build_operators(5)
        assert build_operators(5) is ops
        with pytest.raises(ValueError):
            ops.sz[0, 0] = 1.0

    @pytest.mark.parametrize("n", [0, -3, 10_000])
    def test_sizing_errors(self, n):
        with pytest.raises(SizingError):
            build_operators(n)


class TestState:
    def test_length_is_checked(self):
        with pytest.raises(DimensionMismatchError):
            DickeState(3, np.ones(3))

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            DickeState(1, [np.nan, 1.0])

    def test_normalize_zero_state(self):
        with pytest.raises(DegenerateStateError):
            DickeState(2, np.zeros(3)).normalized()

    def test_amplitude_lookup(self):
        state = basis_state(4, 1)
        assert state.amplitude(1) == 1
        assert state.amplitude(-2) == 0


class TestObservables:
    def test_inverted_state(self):
        state = basis_state(100, 50)
        assert variance_sz(state) == 0.0
        assert cat_fidelity(state) == pytest.approx(0.5)
        assert mean_sz(state) == 50

    @pytest.mark.parametrize("phi", [0.0, 0.7, math.pi])
    def test_cat_state(self, phi):
        cat = cat_state(100, phi)
        assert variance_sz(cat) == pytest.approx(2500.0)
        assert cat_fidelity(cat) == pytest.approx(1.0)
        assert np.exp(1j * cat_phase(cat)) == pytest.approx(np.exp(-1j * phi), abs=1e-12)
        np.testing.assert_allclose(populations(cat)[[0, -1]], [0.5, 0.5])

    def test_coherent_state_along_x(self):
        state = apply_rotation_y(basis_state(100, 50), math.pi / 2)
        assert variance_sz(state) == pytest.approx(25.0, rel=1e-9)

    def test_uniform_superposition_fidelity(self):
        state = DickeState(100, np.full(101, 1 / math.sqrt(101)))
        assert cat_fidelity(state) == pytest.approx((2 / math.sqrt(101)) ** 2 / 2)

    def test_dark_state_populations(self):
        pops = populations(basis_state(6, -3))
        np.testing.assert_array_equal(pops, [1, 0, 0, 0, 0, 0, 0])

    def test_observables_use_normalized_state(self):
        scaled = DickeState(100, 0.1 * cat_state(100).amplitudes)
        obs = observables(scaled)
        assert obs.var_sz == pytest.approx(2500.0)
        assert obs.cat_fidelity == pytest.approx(1.0)
        assert obs.populations.sum() == pytest.approx(1.0)

    def test_global_phase_changes_nothing(self):
        state = _random_state(40, np.random.default_rng(11))
        shifted = DickeState(40, np.exp(1.3j) * state.amplitudes)
        assert variance_sz(shifted) == pytest.approx(variance_sz(state), rel=1e-12)
        assert mean_sz(shifted) == pytest.approx(mean_sz(state), abs=1e-12)
        assert cat_fidelity(shifted) == pytest.approx(cat_fidelity(state), rel=1e-12)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_fidelity_is_the_best_overlap_over_phases(self, seed):
        state = _random_state(20, np.random.default_rng(seed))

        def overlap(phi):
            return abs(np.vdot(cat_state(20, phi).amplitudes, state.amplitudes)) ** 2

        grid = np.linspace(0.0, 2 * math.pi, 2001)
        best = grid[np.argmax([overlap(phi) for phi in grid])]
        step = grid[1] - grid[0]
        refined = optimize.minimize_scalar(lambda phi: -overlap(phi), bounds=(best - step, best + step),
                                           method="bounded", options={"xatol": 1e-10})
        assert cat_fidelity(state) == pytest.approx(-refined.fun, abs=1e-9)
        assert cat_fidelity(state) >= max(overlap(phi) for phi in grid) - 1e-12

    def test_zero_state_is_degenerate(self):
        with pytest.raises(DegenerateStateError):
            variance_sz(DickeState(2, np.zeros(3)))


class TestRotation:
    def test_zero_angle_is_identity(self):
        state = basis_state(5, 0.5)
        assert apply_rotation_y(state, 0.0) is state

    def test_pi_rotation_flips_the_ladder(self):
        flipped = apply_rotation_y(basis_state(10, 5), math.pi)
        assert abs(flipped.amplitude(-5)) == pytest.approx(1.0, abs=1e-12)

    def test_norm_preserved(self):
        state = apply_rotation_y(basis_state(101, 50.5), 0.1)
        assert state.squared_norm == pytest.approx(1.0, abs=1e-12)

    def test_composition(self):
        state = _random_state(30, np.random.default_rng(5))
        for theta1, theta2 in [(0.1, 0.25), (1.2, -0.4), (math.pi, 0.5)]:
            twice = apply_rotation_y(apply_rotation_y(state, theta1), theta2)
            once = apply_rotation_y(state, theta1 + theta2)
            np.testing.assert_allclose(twice.amplitudes, once.amplitudes, atol=1e-9)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            apply_rotation_y(basis_state(4, 2), 0.3, build_operators(5))
