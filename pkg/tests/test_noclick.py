import math

import numpy as np
import pytest

from utils.dicke import DickeState, basis_state, build_operators, cat_fidelity, cat_state
from utils.errors import (
    DimensionMismatchError,
    InvalidParameterError,
    NegativeCatTimeError,
    UndefinedCatTimeError,
)
from utils.noclick import (
    cat_time,
    decay_spectrum,
    default_t_max,
    earliest_time_for_variance,
    evolve_noclick,
    find_t_opt,
    noclick_trajectory,
    survival_probability,
    variance_along,
)
from utils.oat import PrepOrder, PrepSpec, fully_inverted, prepare


class TestSpectrum:
    @pytest.mark.parametrize("n", [2, 10, 100, 101])
    def test_matches_dense_operator(self, n):
        ops = build_operators(n)
        dense = np.sort(np.linalg.eigvalsh(0.5 * ops.s_plus @ ops.s_minus))
        np.testing.assert_allclose(np.sort(decay_spectrum(n).rates), dense, atol=1e-10)

    @pytest.mark.parametrize("n", [2, 10, 100, 101])
    def test_dark_state_and_minimum_bright_rate(self, n):
        spectrum = decay_spectrum(n)
        assert spectrum.rates[0] == 0.0
        assert spectrum.min_bright_rate == pytest.approx(n / 2)
        assert spectrum.rates[1] == pytest.approx(n / 2)
        assert spectrum.rates[-1] == pytest.approx(n / 2)
        assert np.all(spectrum.rates >= 0)

    def test_single_values(self):
        assert decay_spectrum(100).rates[100] == 50.0
        assert decay_spectrum(4).rates[3] == 3.0

    @pytest.mark.parametrize("gamma", [0.0, -1.0, math.inf])
    def test_rejects_bad_gamma(self, gamma):
        with pytest.raises(InvalidParameterError):
            decay_spectrum(10, gamma)


class TestEvolution:
    def test_dark_state_is_unchanged(self):
        dark = basis_state(20, -10)
        out = evolve_noclick(dark, decay_spectrum(20), 3.7)
        np.testing.assert_array_equal(out.amplitudes, dark.amplitudes)

    def test_inverted_state_norm(self):
        out = evolve_noclick(fully_inverted(100), decay_spectrum(100), 0.01)
        assert out.squared_norm == pytest.approx(math.exp(-1), rel=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            evolve_noclick(fully_inverted(4), decay_spectrum(5), 0.1)

    def test_negative_time(self):
        with pytest.raises(InvalidParameterError):
            evolve_noclick(fully_inverted(4), decay_spectrum(4), -0.1)

    def test_semigroup(self):
        state0 = prepare(PrepSpec(60, 0.25))
        spectrum = decay_spectrum(60)
        for dt1, dt2 in [(0.001, 0.004), (0.01, 0.02), (0.0, 0.3)]:
            twice = evolve_noclick(evolve_noclick(state0, spectrum, dt1), spectrum, dt2)
            once = evolve_noclick(state0, spectrum, dt1 + dt2)
            np.testing.assert_allclose(twice.amplitudes, once.amplitudes, atol=1e-12)


class TestSurvival:
    def test_initial_and_dark(self):
        spectrum = decay_spectrum(30)
        assert survival_probability(prepare(PrepSpec(30, 0.4)), spectrum, 0.0) == pytest.approx(1.0)
        assert survival_probability(basis_state(30, -15), spectrum, 12.0) == pytest.approx(1.0)

    def test_vectorized_matches_evolution(self):
        state0 = prepare(PrepSpec(40, 0.25))
        spectrum = decay_spectrum(40)
        times = np.linspace(0, 0.2, 9)
        expected = [evolve_noclick(state0, spectrum, t).squared_norm for t in times]
        np.testing.assert_allclose(survival_probability(state0, spectrum, times), expected, rtol=1e-12)

    def test_rejects_negative_time(self):
        with pytest.raises(InvalidParameterError):
            survival_probability(fully_inverted(3), decay_spectrum(3), [0.1, -0.2])

    def test_converges_to_the_dark_population(self, operating_point):
        state0, spectrum, _ = operating_point
        dark = abs(state0.amplitudes[0]) ** 2
        assert survival_probability(state0, spectrum, 50.0) == pytest.approx(dark, abs=1e-12)
        assert survival_probability(state0, spectrum, 0.2) > dark

    def test_decreasing(self):
        state0 = prepare(PrepSpec(60, 0.2))
        values = survival_probability(state0, decay_spectrum(60), np.linspace(0, 0.3, 50))
        assert np.all(np.diff(values) <= 0)


class TestCatTime:
    def test_equal_extremes(self):
        assert cat_time(cat_state(10), decay_spectrum(10)) == 0.0

    def test_ratio_e(self):
        amplitudes = np.zeros(101)
        amplitudes[-1] = math.sqrt(math.e)
        amplitudes[0] = 1.0
        state = DickeState(100, amplitudes).normalized()
        assert cat_time(state, decay_spectrum(100)) == pytest.approx(0.01, rel=1e-12)

    @pytest.mark.parametrize("n, chi", [(20, 0.3), (60, 0.15), (100, 0.1), (100, 0.2)])
    def test_extreme_populations_meet_at_the_cat_time(self, n, chi):
        state0 = prepare(PrepSpec(n, chi))
        spectrum = decay_spectrum(n)
        state = evolve_noclick(state0, spectrum, cat_time(state0, spectrum))
        top, bottom = np.abs(state.amplitudes[[-1, 0]]) ** 2
        assert top == pytest.approx(bottom, rel=1e-10)

    def test_undefined_without_ground_population(self):
        with pytest.raises(UndefinedCatTimeError):
            cat_time(prepare(PrepSpec(101, 0.2)), decay_spectrum(101))

    def test_negative_when_ground_dominates(self):
        amplitudes = np.zeros(11)
        amplitudes[0] = 0.9
        amplitudes[-1] = 0.1
        with pytest.raises(NegativeCatTimeError, match="never equalize"):
            cat_time(DickeState(10, amplitudes), decay_spectrum(10))


class TestOptimalTime:
    def test_operating_point(self, operating_point):
        state0, spectrum, result = operating_point
        assert result.t_opt == pytest.approx(0.0102, abs=3e-4)
        assert not result.boundary
        assert result.peak_var / 2500 == pytest.approx(0.989, abs=0.005)

    def test_operating_point_survival_and_fidelity(self, operating_point):
        state0, spectrum, result = operating_point
        assert survival_probability(state0, spectrum, result.t_opt) == pytest.approx(0.0795, abs=0.002)
        state = evolve_noclick(state0, spectrum, result.t_opt)
        assert cat_fidelity(state) == pytest.approx(0.891, abs=0.01)

    def test_cat_peaks_at_zero(self):
        result = find_t_opt(cat_state(20), decay_spectrum(20))
        assert result.t_opt == 0.0
        assert result.peak_var == pytest.approx(100.0)
        assert result.boundary

    def test_flat_variance(self):
        result = find_t_opt(fully_inverted(30), decay_spectrum(30))
        assert (result.t_opt, result.peak_var, result.boundary) == (0.0, 0.0, True)

    def test_odd_atoms_hit_the_window_edge(self):
        result = find_t_opt(prepare(PrepSpec(101, 0.2)), decay_spectrum(101), t_max=0.06)
        assert result.boundary

    def test_rotation_restores_an_interior_peak(self, operating_point):
        even = operating_point[2]
        state0 = prepare(PrepSpec(101, 0.2, theta=0.1, order=PrepOrder.TWIST_THEN_ROTATE))
        spectrum = decay_spectrum(101)
        result = find_t_opt(state0, spectrum)
        assert not result.boundary
        assert result.t_opt == pytest.approx(even.t_opt, rel=0.05)
        scale = 101 ** 2 / 4
        assert result.peak_var / scale == pytest.approx(even.peak_var / 2500, abs=0.02)
        later = variance_along(state0, spectrum, [1.5 * even.t_opt])[0]
        assert later < result.peak_var - 0.02 * scale

    def test_refinement_beats_the_grid(self):
        state0 = prepare(PrepSpec(50, 0.3))
        spectrum = decay_spectrum(50)
        result = find_t_opt(state0, spectrum)
        grid = np.linspace(0, default_t_max(state0, spectrum), 512)
        assert result.peak_var >= variance_along(state0, spectrum, grid).max()

    @pytest.mark.parametrize("points", [0, 1, 4])
    def test_grid_points_validated(self, points):
        with pytest.raises(InvalidParameterError, match="grid_points"):
            find_t_opt(fully_inverted(4), decay_spectrum(4), grid_points=points)

    def test_horizon_stretches_to_the_cat_time(self):
        state0 = prepare(PrepSpec(100, 0.1))
        spectrum = decay_spectrum(100)
        assert default_t_max(state0, spectrum) >= 1.5 * cat_time(state0, spectrum) - 1e-15


@pytest.mark.slow
class TestCatTimeAgreement:
    @pytest.mark.parametrize("n", [20, 40, 60, 80, 100])
    def test_weak_squeezing_tracks_the_cat_time(self, n):
        state0 = prepare(PrepSpec(n, 0.1))
        spectrum = decay_spectrum(n)
        t_c = cat_time(state0, spectrum)
        assert abs(find_t_opt(state0, spectrum).t_opt - t_c) / t_c <= 0.05

    @pytest.mark.parametrize("n", [180, 200])
    def test_over_squeezing_decouples_the_cat_time(self, n):
        state0 = prepare(PrepSpec(n, 0.2))
        spectrum = decay_spectrum(n)
        assert cat_time(state0, spectrum) < find_t_opt(state0, spectrum).t_opt / 2

    def test_cat_time_falls_behind_with_atom_number(self):
        ratios = []
        for n in (100, 140, 180):
            state0 = prepare(PrepSpec(n, 0.2))
            spectrum = decay_spectrum(n)
            ratios.append(cat_time(state0, spectrum) / find_t_opt(state0, spectrum).t_opt)
        assert ratios[0] == pytest.approx(1.0, abs=0.05)
        assert ratios[0] > ratios[1] > ratios[2]


class TestParity:
    def test_odd_variance_keeps_growing_after_the_even_peak(self, operating_point):
        t_even = operating_point[2].t_opt
        state0 = prepare(PrepSpec(101, 0.2))
        times = np.linspace(t_even, 1.5 * t_even, 60)
        variance = variance_along(state0, decay_spectrum(101), times)
        assert np.all(np.diff(variance) >= -1e-9 * variance.max())


class TestTrajectory:
    def test_weak_twist_dips_first(self):
        traj = noclick_trajectory(prepare(PrepSpec(100, 0.1)), decay_spectrum(100), 0.01, 21)
        assert traj.var_sz[1] < traj.var_sz[0]

    def test_operating_point_reaches_the_maximum(self):
        traj = noclick_trajectory(prepare(PrepSpec(100, 0.2)), decay_spectrum(100), 0.05, 501)
        assert traj.var_sz_normalized.max() == pytest.approx(0.989, abs=0.005)
        assert traj.times[np.argmax(traj.var_sz)] == pytest.approx(0.0102, abs=3e-4)
        assert traj.t_opt == pytest.approx(0.0102, abs=3e-4)

    def test_survival_column_matches(self):
        state0 = prepare(PrepSpec(40, 0.3))
        spectrum = decay_spectrum(40)
        traj = noclick_trajectory(state0, spectrum, 0.2, 33)
        np.testing.assert_allclose(traj.survival_probability,
                                   survival_probability(state0, spectrum, traj.times), atol=1e-12)
        np.testing.assert_allclose(traj.populations.sum(axis=1), 1.0)

    def test_single_atom_has_no_variance(self):
        traj = noclick_trajectory(fully_inverted(1), decay_spectrum(1), 2.0, 11)
        np.testing.assert_array_equal(traj.var_sz, 0.0)

    def test_long_times_do_not_underflow(self):
        traj = noclick_trajectory(prepare(PrepSpec(200, 0.3)), decay_spectrum(200), 50.0, 5)
        assert np.all(np.isfinite(traj.var_sz))
        assert traj.populations[-1, 0] == pytest.approx(1.0)

    def test_invalid_sampling(self):
        with pytest.raises(InvalidParameterError):
            noclick_trajectory(fully_inverted(2), decay_spectrum(2), 1.0, 1)


class TestEarliestTime:
    def test_stopping_early_trades_variance_for_survival(self, operating_point):
        state0, spectrum, result = operating_point
        t_hit, survival = earliest_time_for_variance(state0, spectrum, 0.8)
        assert 0 < t_hit < result.t_opt
        assert variance_along(state0, spectrum, [t_hit])[0] / 2500 == pytest.approx(0.8, abs=1e-4)
        assert survival > survival_probability(state0, spectrum, result.t_opt)

    @pytest.mark.parametrize("points", [0, 1])
    def test_grid_points_validated(self, operating_point, points):
        state0, spectrum, _ = operating_point
        with pytest.raises(InvalidParameterError, match="grid_points"):
            earliest_time_for_variance(state0, spectrum, 0.8, grid_points=points)

    def test_unreachable_target(self):
        assert earliest_time_for_variance(fully_inverted(10), decay_spectrum(10), 0.5) is None

    def test_already_reached(self):
        assert earliest_time_for_variance(cat_state(10), decay_spectrum(10), 0.5) == (0.0, 1.0)
