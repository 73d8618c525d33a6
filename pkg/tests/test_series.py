"""Tests for series summation module."""

import math

import numpy as np
import pytest
from scipy.special import gammaln

from src.exceptions import InvalidArgument, NonConvergence
from src.series import EvalResult, PowerSeries, Truncation


def exponential_series():
    return PowerSeries(lambda n: -gammaln(np.arange(n) + 1), name="exp")


def geometric_series():
    return PowerSeries(lambda n: np.zeros(n), ratio_scale=1.0, name="geometric")


class TestTruncation:
    """Test truncation policy."""

    def test_defaults(self):
        """Test library defaults."""
        trunc = Truncation()
        assert trunc.abs_tol == 1e-14
        assert trunc.rel_tol == 1e-14
        assert trunc.max_terms == 10000

    @pytest.mark.parametrize("kwargs", [
        {"abs_tol": 0.0},
        {"rel_tol": -1e-3},
        {"max_terms": 0},
        {"max_terms": 2.5},
    ])
    def test_rejects_invalid(self, kwargs):
        """Test validation of tolerances and budget."""
        with pytest.raises(InvalidArgument):
            Truncation(**kwargs)

    def test_tolerance_is_mixed(self):
        """Absolute below magnitude one, relative above."""
        trunc = Truncation(abs_tol=1e-10, rel_tol=1e-8)
        assert trunc.tolerance(0.0) == pytest.approx(1e-10)
        assert trunc.tolerance(100.0) == pytest.approx(1e-6)


class TestEvalResult:
    """Test evaluation result records."""

    def test_to_dict(self):
        """Test flat record."""
        record = EvalResult(1 + 2j, 5, 1e-15, True).to_dict()
        assert record == {
            "value_re": 1.0,
            "value_im": 2.0,
            "terms_used": 5,
            "tail_estimate": 1e-15,
            "converged": True,
        }

    def test_rejects_negative_tail(self):
        """Test validation of diagnostics."""
        with pytest.raises(InvalidArgument):
            EvalResult(1.0, 1, -1.0, True)


class TestPowerSeries:
    """Test power series evaluation."""

    def test_exponential(self):
        """Test summation of the exponential series."""
        result = exponential_series().evaluate(1.0)
        assert result.value.real == pytest.approx(math.e, rel=1e-14)
        assert result.converged
        assert result.tail_estimate <= 1e-13

    def test_complex_argument(self):
        """Test summation at a complex point."""
        u = 0.5 + 1.5j
        result = exponential_series().evaluate(u)
        assert abs(result.value - np.exp(u)) < 1e-13

    def test_geometric_tail_uses_ratio_floor(self):
        """Test the geometric series and its term count."""
        result = geometric_series().evaluate(0.5)
        assert result.value.real == pytest.approx(2.0, rel=1e-13)
        assert 40 < result.terms_used < 60

    def test_origin_returns_constant_term(self):
        """Test evaluation at zero."""
        result = exponential_series().evaluate(0.0)
        assert result.value == 1.0
        assert result.terms_used == 1

    def test_budget_exhausted(self):
        """Test non-convergence within a small budget."""
        with pytest.raises(NonConvergence) as excinfo:
            geometric_series().evaluate(0.9, Truncation(max_terms=10))
        assert excinfo.value.terms_used == 10

    def test_min_terms(self):
        """Leading zero terms do not stop the summation."""
        series = PowerSeries(
            lambda n: np.where(np.arange(n) < 2, -np.inf, -gammaln(np.arange(n) + 1)),
            min_terms=3,
        )
        result = series.evaluate(1.0)
        assert result.value.real == pytest.approx(math.e - 2, rel=1e-13)

    def test_coefficients(self):
        """Test coefficient access."""
        assert np.allclose(exponential_series().coefficients(4), [1, 1, 0.5, 1 / 6])


class TestRealization:
    """Test frozen polynomial realizations."""

    def test_realization_matches_series(self):
        """A realization reproduces the series inside its radius."""
        series = exponential_series()
        realization = series.realize(2.0)
        for w in (0.0, 1.5, -2.0, 1j):
            assert abs(realization(w) - np.exp(w)) < 1e-12

    def test_degree(self):
        """The degree covers the converged term count."""
        series = exponential_series()
        needed = series.evaluate(3.0).terms_used
        assert series.realize(3.0).degree >= needed


class TestRealTerms:
    """Test that real series at real points stay real."""

    def test_negative_point_has_no_imaginary_part(self):
        """Alternating terms of exp(-2) carry an exact zero imaginary part."""
        result = exponential_series().evaluate(-2.0)
        assert result.value.imag == 0.0
        assert result.value.real == pytest.approx(math.exp(-2.0), rel=1e-13)

    def test_negative_coefficients_keep_sign(self):
        """Log-coefficients with phase pi give negative real terms."""
        series = PowerSeries(lambda n: np.zeros(n) + 1j * np.pi, ratio_scale=1.0)
        terms = series.terms(-0.5, 4)
        assert np.all(terms.imag == 0.0)
        assert terms.real.tolist() == pytest.approx([-1.0, 0.5, -0.25, 0.125])

    def test_complex_coefficients_unchanged(self):
        """Genuinely complex coefficients still produce complex terms."""
        series = PowerSeries(lambda n: np.zeros(n) + 0.5j, ratio_scale=1.0)
        terms = series.terms(-0.5, 3)
        assert abs(terms[0] - np.exp(0.5j)) < 1e-15
        assert abs(terms[1] + 0.5 * np.exp(0.5j)) < 1e-15
