import numpy as np
import pytest

from subsystem_codes.metrics import NoCrossingError, binomial_std, crossing_point, fit_power_law


class TestPowerLaw:
    def test_exact_cubic(self):
        p = np.geomspace(1e-3, 1e-2, 4)
        fit = fit_power_law(list(zip(p, 5 * p**3)))
        assert fit.D == pytest.approx(3.0, rel=1e-9)
        assert fit.A == pytest.approx(5.0, rel=1e-6)
        assert fit.residual == pytest.approx(0.0, abs=1e-12)
        assert fit.predict(2e-3) == pytest.approx(5 * 8e-9, rel=1e-6)

    def test_two_points(self):
        fit = fit_power_law([(0.01, 1e-4), (0.02, 4e-4)])
        assert fit.D == pytest.approx(2.0)
        assert fit.residual == 0.0
        assert fit.points == 2

    def test_zero_rates_are_skipped(self):
        fit = fit_power_law([(0.001, 0.0), (0.01, 1e-4), (0.02, 4e-4)])
        assert fit.points == 2

    def test_not_enough_points(self):
        with pytest.raises(ValueError):
            fit_power_law([(0.001, 0.0), (0.01, 1e-4)])


class TestCrossing:
    def test_quadratic_curve(self):
        p = np.geomspace(1e-3, 1e-1, 5)
        assert crossing_point(p, 100 * p**2) == pytest.approx(0.01, rel=1e-6)

    def test_unsorted_grid(self):
        p = np.array([0.05, 0.001, 0.02, 0.005])
        assert crossing_point(p, 100 * p**2) == pytest.approx(0.01, rel=1e-6)

    def test_curve_below_the_diagonal(self):
        p = np.geomspace(1e-3, 1e-2, 4)
        with pytest.raises(NoCrossingError):
            crossing_point(p, 0.1 * p**2)

    def test_single_point(self):
        with pytest.raises(ValueError):
            crossing_point([0.01], [0.02])


def test_binomial_std():
    assert binomial_std(0, 100) == 0.0
    assert binomial_std(50, 100) == pytest.approx(0.05)
    assert np.allclose(binomial_std(np.array([25, 0]), np.array([100, 0])), [np.sqrt(0.1875 / 100), 0.0])
