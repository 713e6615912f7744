"""
Unit Tests for Stabiliser Effectiveness Module

Covers the point relations, the logistic base of action, effectiveness paths,
the optimum search and the closed-form optimality conditions.
"""

import math

import pytest
import numpy as np

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(__file__))))

from src.analytics.effectiveness import (
    EffectivenessPath,
    LogisticSolution,
    base_logistic_analytic,
    base_logistic_numeric,
    coupled_rate_samples,
    effectiveness,
    effectiveness_logistic_rhs,
    effectiveness_trajectory,
    integral_rate_condition,
    marginal_rate_substitution,
    optimality_condition_check,
    optimum_search,
    rate_from_base,
    sampling_grid,
)
from src.utils.errors import FiscalDomainError, SingularityError

WAGE_BASE_B0 = 172055.3


class TestPointRelations:
    """Tests for E = -K B and the indifference curve."""

    def test_effectiveness_sign(self):
        assert effectiveness(2.0, 3.0) == -6.0

    def test_marginal_rate_of_substitution(self):
        assert marginal_rate_substitution(2.0, 4.0) == -0.5

    def test_rate_from_base_keeps_product(self):
        for b in (0.5, 1.0, 7.0):
            assert rate_from_base(3.0, b) * b == pytest.approx(3.0, rel=1e-15)

    def test_rate_from_zero_base_rejected(self):
        with pytest.raises(FiscalDomainError):
            rate_from_base(1.0, 0.0)

    def test_coupled_samples_reject_zero_constant(self):
        with pytest.raises(FiscalDomainError):
            coupled_rate_samples(0.0, np.array([1.0, 2.0]))

    def test_logistic_rhs_vertex(self):
        grid = np.linspace(-1.0, 2.0, 30_001)
        values = [effectiveness_logistic_rhs(e) for e in grid]
        vertex = grid[int(np.argmax(values))]
        assert abs(vertex - 0.5) <= grid[1] - grid[0]


class TestLogisticSolution:
    """Tests for the initial condition and its constant."""

    def test_constant(self):
        assert LogisticSolution(t0=0.0, x0=0.5).c_const == 1.0

    def test_constant_above_target_is_negative(self):
        c = LogisticSolution(t0=2014.0, x0=WAGE_BASE_B0).c_const
        assert -1.0 < c < 0.0

    def test_zero_solution_has_no_constant(self):
        with pytest.raises(FiscalDomainError):
            _ = LogisticSolution(t0=0.0, x0=0.0).c_const

    def test_negative_initial_value_rejected(self):
        with pytest.raises(ValueError):
            LogisticSolution(t0=0.0, x0=-0.1)


class TestBaseLogistic:
    """Tests for the analytic and numeric logistic solutions."""

    @pytest.mark.parametrize("x0", [0.0, 1.0])
    def test_fixed_points_preserved_exactly(self, x0):
        init = LogisticSolution(t0=0.0, x0=x0)
        times = np.linspace(0.0, 10.0, 11)
        assert np.all(base_logistic_analytic(init, times) == x0)
        assert np.all(base_logistic_numeric(x0, 0.0, 10.0, 1.0).values == x0)

    def test_scalar_input_returns_float(self):
        value = base_logistic_analytic(LogisticSolution(t0=0.0, x0=0.5), 0.0)
        assert isinstance(value, float)
        assert value == 0.5

    def test_large_calendar_times_do_not_overflow(self):
        init = LogisticSolution(t0=2014.0, x0=0.3)
        value = base_logistic_analytic(init, 2100.0)
        assert value == pytest.approx(1.0, rel=1e-12)

    @pytest.mark.parametrize("x0", [0.1, 0.5, 0.9, 1.0, 2.0])
    def test_analytic_numeric_agreement(self, x0):
        trajectory = base_logistic_numeric(x0, 0.0, 10.0, 0.5)
        exact = base_logistic_analytic(LogisticSolution(t0=0.0, x0=x0), trajectory.times)
        scale = np.maximum(np.abs(exact), 1e-300)
        assert np.max(np.abs(trajectory.values - exact) / scale) <= 1e-8

    def test_blow_up_before_pole(self):
        init = LogisticSolution(t0=0.0, x0=2.0)
        with pytest.raises(SingularityError) as exc_info:
            base_logistic_analytic(init, np.array([-1.0, 0.0]))
        assert exc_info.value.blow_up_time == pytest.approx(math.log(0.5))

    def test_numeric_rejects_huge_initial_value(self):
        with pytest.raises(SingularityError):
            base_logistic_numeric(2e12, 0.0, 1.0, 0.1)

    def test_numeric_rejects_bad_horizon(self):
        with pytest.raises(FiscalDomainError):
            base_logistic_numeric(0.5, 1.0, 1.0, 0.1)


class TestWageBaseScenario:
    """Base of action starting at 172055.3 in 2014."""

    @pytest.fixture
    def trajectory(self):
        return base_logistic_numeric(WAGE_BASE_B0, 2014.0, 2020.0, 1.0)

    def test_grid(self, trajectory):
        assert list(trajectory.times) == [2014.0, 2015.0, 2016.0, 2017.0, 2018.0, 2019.0, 2020.0]

    def test_strictly_decreasing_above_target(self, trajectory):
        assert np.all(np.diff(trajectory.values) < 0)
        assert np.all(trajectory.values > 1.0)

    def test_converges_to_analytic_solution(self, trajectory):
        exact = base_logistic_analytic(LogisticSolution(t0=2014.0, x0=WAGE_BASE_B0), trajectory.times)
        assert abs(trajectory.values[-1] - exact[-1]) <= 1e-6
        assert np.max(np.abs(trajectory.values - exact) / exact) <= 1e-6
        assert exact[-1] - 1.0 < 0.01


class TestSamplingGrid:
    """Tests for sampling_grid."""

    def test_uneven_last_interval(self):
        assert list(sampling_grid(0.0, 1.0, 0.4)) == pytest.approx([0.0, 0.4, 0.8, 1.0])

    def test_non_positive_step_rejected(self):
        with pytest.raises(FiscalDomainError):
            sampling_grid(0.0, 1.0, 0.0)


class TestEffectivenessPath:
    """Tests for effectiveness trajectories."""

    def test_coupling_conserves_effectiveness(self):
        c = 2.5
        init = LogisticSolution(t0=2014.0, x0=WAGE_BASE_B0)
        path = effectiveness_trajectory(
            lambda times, base: coupled_rate_samples(c, base),
            init,
            sampling_grid(2014.0, 2020.0, 0.25),
        )
        assert np.all(np.abs(path.rate * path.base - c) <= 1e-12 * c)
        assert np.all(np.abs(path.effectiveness + c) <= 1e-12 * c)
        assert optimum_search(path).degenerate

    def test_constant_rate(self):
        init = LogisticSolution(t0=0.0, x0=0.5)
        path = effectiveness_trajectory(2.0, init, sampling_grid(0.0, 2.0, 0.5))
        np.testing.assert_allclose(path.effectiveness, -2.0 * path.base)

    def test_rate_length_mismatch(self):
        init = LogisticSolution(t0=0.0, x0=0.5)
        with pytest.raises(FiscalDomainError):
            effectiveness_trajectory(np.ones(3), init, sampling_grid(0.0, 2.0, 0.5))

    def test_rows(self):
        init = LogisticSolution(t0=0.0, x0=0.5)
        rows = effectiveness_trajectory(1.0, init, np.array([0.0, 1.0])).rows()
        assert list(rows[0]) == ["t", "B", "K", "E"]
        assert rows[0]["B"] == 0.5
        assert rows[0]["E"] == -0.5

    def test_path_rejects_inconsistent_effectiveness(self):
        with pytest.raises(FiscalDomainError):
            EffectivenessPath(
                times=np.array([0.0, 1.0]),
                base=np.array([1.0, 1.0]),
                rate=np.array([1.0, 1.0]),
                effectiveness=np.array([-1.0, -2.0]),
            )

    def test_path_rejects_non_increasing_times(self):
        with pytest.raises(FiscalDomainError):
            EffectivenessPath(
                times=np.array([1.0, 0.0]),
                base=np.array([1.0, 1.0]),
                rate=np.array([1.0, 1.0]),
                effectiveness=np.array([-1.0, -1.0]),
            )


class TestOptimumSearch:
    """Tests for locating optima of E(t)."""

    @pytest.fixture
    def init(self):
        return LogisticSolution(t0=0.0, x0=0.5)

    def test_interior_maximum(self, init):
        path = effectiveness_trajectory(
            lambda times, base: ((times - 5.0) ** 2 + 1.0) / base,
            init,
            sampling_grid(0.0, 10.0, 0.1),
        )
        search = optimum_search(path)
        assert not search.degenerate
        assert len(search.optima) == 1
        optimum = search.optima[0]
        assert optimum.classification == "maximum"
        assert optimum.time == pytest.approx(5.0, abs=1e-6)
        assert optimum.value == pytest.approx(-1.0, abs=1e-6)

    def test_interior_minimum(self, init):
        path = effectiveness_trajectory(
            lambda times, base: (1.0 - (times - 3.0) ** 2) / base,
            init,
            sampling_grid(0.0, 10.0, 0.1),
        )
        search = optimum_search(path)
        assert [o.classification for o in search.optima] == ["minimum"]
        assert search.optima[0].time == pytest.approx(3.0, abs=1e-6)

    def test_monotone_path_has_no_optima(self, init):
        path = effectiveness_trajectory(1.0, init, sampling_grid(0.0, 5.0, 0.5))
        search = optimum_search(path)
        assert search.optima == []
        assert search.to_dict() == {"degenerate": False, "optima": []}

    def test_needs_five_samples(self, init):
        path = effectiveness_trajectory(1.0, init, sampling_grid(0.0, 1.0, 0.5))
        with pytest.raises(FiscalDomainError):
            optimum_search(path)


class TestOptimalityConditions:
    """Tests for the integral rate condition and second-derivative check."""

    def test_integral_rate_condition_closed_form(self):
        c = 1.0
        grid = sampling_grid(0.0, 4.0, 0.5)
        expected = (c * np.exp(-grid) + 1.0) / (c + 1.0)
        np.testing.assert_allclose(integral_rate_condition(c, grid), expected, rtol=1e-8)

    def test_integral_rate_condition_wage_base_constant(self):
        c = LogisticSolution(t0=2014.0, x0=WAGE_BASE_B0).c_const
        grid = sampling_grid(2014.0, 2020.0, 1.0)
        tau = grid - grid[0]
        expected = (c * np.exp(-tau) + 1.0) / (c + 1.0)
        np.testing.assert_allclose(integral_rate_condition(c, grid), expected, rtol=1e-6)

    def test_condition_samples_hold(self):
        c = 1.0
        grid = sampling_grid(0.0, 4.0, 0.5)
        report = optimality_condition_check(integral_rate_condition(c, grid), c, grid)
        assert np.all(report.rate_condition_holds)

    def test_other_rate_does_not_hold(self):
        grid = sampling_grid(0.0, 4.0, 0.5)
        report = optimality_condition_check(np.full(grid.shape, 2.0), 1.0, grid)
        assert not np.any(report.rate_condition_holds[1:])

    def test_second_derivative_matches_finite_differences(self):
        c = 1.0
        grid = sampling_grid(0.0, 3.0, 0.01)
        k = 1.0 + 0.1 * grid
        report = optimality_condition_check(k, c, grid)
        np.testing.assert_allclose(
            report.second_derivative[3:-3], report.fd_second_derivative[3:-3], rtol=1e-3, atol=1e-4
        )

    def test_rows_carry_signs(self):
        grid = sampling_grid(0.0, 2.0, 0.5)
        rows = optimality_condition_check(np.ones(grid.shape), 1.0, grid).rows()
        assert len(rows) == len(grid)
        assert set(rows[0]) >= {"t", "K", "K_condition", "d2E", "d2E_negative", "d2E_fd"}

    def test_too_few_samples(self):
        with pytest.raises(FiscalDomainError):
            optimality_condition_check(np.ones(2), 1.0, np.array([0.0, 1.0]))


class TestLongHorizons:
    """Optimality conditions stay finite far from t0."""

    def test_condition_finite_over_eight_hundred_years(self):
        grid = sampling_grid(0.0, 800.0, 100.0)
        report = optimality_condition_check(np.ones(grid.shape), 1.0, grid)
        assert np.all(np.isfinite(report.second_derivative))
        assert np.all(np.isfinite(report.fd_second_derivative))
        expected = (np.exp(-grid) + 1.0) / 2.0
        np.testing.assert_allclose(report.rate_condition, expected, rtol=1e-8)

    def test_second_derivative_vanishes_at_saturation(self):
        grid = sampling_grid(0.0, 300.0, 50.0)
        report = optimality_condition_check(np.ones(grid.shape), 1.0, grid)
        assert np.all(np.isfinite(report.second_derivative))
        assert report.second_derivative[-1] == pytest.approx(0.0, abs=1e-12)


class TestDynamicsProperties:
    """Invariants of the indifference curve, the logistic base and the optimum search."""

    @pytest.mark.parametrize("db", [1e-1, 1e-2, 1e-3])
    def test_tangent_step_keeps_effectiveness_to_second_order(self, db):
        k, b = 2.0, 5.0
        moved_k = k + marginal_rate_substitution(k, b) * db
        drift = effectiveness(moved_k, b + db) - effectiveness(k, b)
        assert drift == pytest.approx(k * db * db / b, rel=1e-6)

    @pytest.mark.parametrize("x0", [0.01, 0.2, 0.5, 0.9])
    def test_analytic_base_rises_towards_one(self, x0):
        values = base_logistic_analytic(LogisticSolution(t0=0.0, x0=x0), sampling_grid(0.0, 20.0, 0.5))
        assert np.all(np.diff(values) > 0)
        assert np.all(values < 1.0)

    @pytest.mark.parametrize("x0", [0.01, 0.2, 0.5, 0.9])
    def test_numeric_base_rises_towards_one(self, x0):
        values = base_logistic_numeric(x0, 0.0, 10.0, 0.5).values
        assert np.all(np.diff(values) > 0)
        assert np.all(values < 1.0)

    @pytest.mark.parametrize("scale", [0.1, 1.0, 7.5])
    def test_scaled_logistic_rate_peaks_at_half(self, scale):
        grid = np.linspace(-1.0, 2.0, 3001)
        rates = scale * np.array([effectiveness_logistic_rhs(float(e)) for e in grid])
        assert grid[int(np.argmax(rates))] == pytest.approx(0.5, abs=1e-3)

    def test_reported_maxima_change_slope_sign(self):
        rng = np.random.default_rng(5)
        init = LogisticSolution(t0=0.0, x0=0.5)
        grid = sampling_grid(0.0, 10.0, 0.01)
        for _ in range(10):
            omega = float(rng.uniform(0.8, 2.0))
            phase = float(rng.uniform(0.0, 2.0 * math.pi))
            path = effectiveness_trajectory(
                lambda times, base: (2.0 + np.sin(omega * times + phase)) / base, init, grid
            )
            maxima = [o for o in optimum_search(path).optima if o.classification == "maximum"]
            assert maxima
            for optimum in maxima:
                slope_before = -omega * math.cos(omega * (optimum.time - 0.05) + phase)
                slope_after = -omega * math.cos(omega * (optimum.time + 0.05) + phase)
                assert slope_before > 0 > slope_after

    def test_inverted_parabola_single_maximum(self):
        path = effectiveness_trajectory(
            lambda times, base: ((times - 3.0) ** 2 - 1.0) / base,
            LogisticSolution(t0=0.0, x0=0.5),
            sampling_grid(0.0, 6.0, 0.1),
        )
        search = optimum_search(path)
        assert [o.classification for o in search.optima] == ["maximum"]
        assert search.optima[0].time == pytest.approx(3.0, abs=1e-6)
        assert search.optima[0].value == pytest.approx(1.0, abs=1e-6)
