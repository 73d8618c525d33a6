"""Tests for q-calculus core module."""

import math

import pytest
from hypothesis import given, settings, strategies as st

from src.exceptions import DomainError, InvalidArgument, NonConvergence, PoleError
from src.qcore import (
    INFINITY,
    QBase,
    basic_hypergeometric_1phi0,
    is_nonpositive_integer,
    q_beta,
    q_binomial,
    q_exponential,
    q_factorial,
    q_gamma,
    q_gamma_reciprocal,
    q_number,
    q_pochhammer,
    q_power_difference,
)
from src.series import Truncation

bases = st.floats(min_value=0.1, max_value=0.9).map(QBase)


class TestQBase:
    """Test the deformation parameter."""

    @pytest.mark.parametrize("value", [0.0, 1.0, -0.5, 1.5, "q"])
    def test_rejects_out_of_range(self, value):
        """Test 0 < q < 1."""
        with pytest.raises(InvalidArgument):
            QBase(value)

    def test_power(self, q):
        """Test q**z."""
        assert q.power(2) == pytest.approx(0.25)
        assert abs(q.power(1j) - complex(math.cos(q.log), math.sin(q.log))) < 1e-15


class TestQNumber:
    """Test q-numbers."""

    def test_integer(self, q):
        """[3]_q = 1 + q + q**2."""
        assert q_number(3, q) == pytest.approx(1.75)

    def test_classical_limit(self):
        """[u]_q tends to u as q -> 1."""
        assert q_number(2.5, QBase(0.999999)).real == pytest.approx(2.5, rel=1e-5)

    def test_real_input_gives_real_value(self, q):
        """Test that no imaginary noise is kept for real input."""
        assert q_number(0.3, q).imag == 0.0

    @given(q=bases, u=st.floats(min_value=-5, max_value=5))
    def test_shift(self, q, u):
        """[u + 1]_q = 1 + q [u]_q."""
        upper = q_number(u + 1, q)
        assert abs(upper - (1 + q.q * q_number(u, q))) < 1e-9 * max(1.0, abs(upper))


class TestQPochhammer:
    """Test q-shifted factorials."""

    def test_finite_order(self, q):
        """Test the finite product."""
        result = q_pochhammer(0.5, q, 3)
        assert result.value.real == pytest.approx(0.5 * 0.75 * 0.875)
        assert result.terms_used == 3
        assert result.tail_estimate == 0.0

    def test_order_zero(self, q):
        """The empty product is one."""
        assert q_pochhammer(7.0, q, 0).value == 1.0

    def test_infinite_order(self, q):
        """(q;q)_inf at q = 1/2."""
        result = q_pochhammer(0.5, q, INFINITY)
        assert result.value.real == pytest.approx(0.2887880950866024, rel=1e-13)
        assert result.converged

    def test_complex_order_matches_integer(self, q):
        """The ratio form agrees with the finite product at integer orders."""
        ratio = q_pochhammer(0.3 + 0.2j, q, complex(4)).value
        product = q_pochhammer(0.3 + 0.2j, q, 4).value
        assert abs(ratio - product) < 1e-13

    @given(
        q=bases,
        re=st.floats(min_value=-0.6, max_value=0.6),
        im=st.floats(min_value=-0.6, max_value=0.6),
        m=st.integers(min_value=0, max_value=10),
        n=st.integers(min_value=0, max_value=10),
    )
    def test_split(self, q, re, im, m, n):
        """(lam;q)_{m+n} = (lam;q)_m (lam q**m;q)_n."""
        lam = complex(re, im)
        whole = q_pochhammer(lam, q, m + n).value
        split = q_pochhammer(lam, q, m).value * q_pochhammer(lam * q.power(m), q, n).value
        assert abs(whole - split) <= 1e-12 * max(1.0, abs(whole))

    @given(
        q=bases,
        radius=st.floats(min_value=0.0, max_value=0.9),
        angle=st.floats(min_value=0.0, max_value=2 * math.pi),
        m=st.integers(min_value=0, max_value=12),
    )
    def test_finite_matches_ratio_of_infinite(self, q, radius, angle, m):
        """(lam;q)_m = (lam;q)_inf / (lam q**m;q)_inf for |lam| < 1."""
        lam = radius * complex(math.cos(angle), math.sin(angle))
        product = q_pochhammer(lam, q, m).value
        ratio = q_pochhammer(lam, q, complex(m)).value
        assert abs(product - ratio) <= 1e-11 * max(1.0, abs(product))

    def test_negative_integer_order(self, q):
        """Test validation of integer orders."""
        with pytest.raises(InvalidArgument):
            q_pochhammer(0.5, q, -1)

    def test_budget(self):
        """Products near q = 1 need more factors than a small budget allows."""
        with pytest.raises(NonConvergence):
            q_pochhammer(0.5, QBase(0.999), trunc=Truncation(max_terms=100))


class TestPowerDifference:
    """Test q-power differences."""

    def test_integer_order(self, q):
        """(s - t)^(2) = (s - t)(s - tq)."""
        assert q_power_difference(2.0, 1.0, q, 2).real == pytest.approx(1.0 * 1.5)

    def test_non_integer_order_at_integer_value(self, q):
        """The general form reduces to the product at integer orders."""
        general = q_power_difference(2.0, 1.0, q, complex(2))
        assert abs(general - 1.5) < 1e-13

    def test_zero_s(self, q):
        """Test non-integer order with s = 0."""
        with pytest.raises(InvalidArgument):
            q_power_difference(0.0, 1.0, q, 0.5)


class TestBinomialAndFactorial:
    """Test q-binomials and q-factorials."""

    def test_gaussian_binomial(self, q):
        """[4 choose 2]_q = 1 + q + 2q**2 + q**3 + q**4."""
        assert q_binomial(4, 2, q).real == pytest.approx(2.1875, rel=1e-13)

    @pytest.mark.parametrize("base", [0.3, 0.5, 0.9])
    def test_binomial_symmetry(self, base):
        """[s choose t]_q = [s choose s-t]_q for 0 <= t <= s <= 15."""
        q = QBase(base)
        for s in range(16):
            for t in range(s + 1):
                left, right = q_binomial(s, t, q), q_binomial(s, s - t, q)
                assert abs(left - right) <= 1e-10 * abs(right)

    def test_binomial_rejects_negative_m(self, q):
        """Test validation of m."""
        with pytest.raises(InvalidArgument):
            q_binomial(2.0, -1, q)

    def test_factorial(self, q):
        """[3]_q! = [1]_q [2]_q [3]_q."""
        assert q_factorial(3, q).real == pytest.approx(2.625)


class TestQGamma:
    """Test the q-gamma function."""

    @pytest.mark.parametrize("u", [1, 2])
    def test_unit_values(self, q, u):
        """Gamma_q(1) = Gamma_q(2) = 1."""
        assert q_gamma(u, q).real == pytest.approx(1.0, rel=1e-13)

    def test_integer_is_factorial(self, q):
        """Gamma_q(n + 1) = [n]_q!."""
        assert q_gamma(4, q).real == pytest.approx(q_factorial(3, q).real, rel=1e-13)

    @pytest.mark.parametrize("u", [0, -1, -2.0])
    def test_poles(self, q, u):
        """Test poles at nonpositive integers."""
        with pytest.raises(PoleError):
            q_gamma(u, q)

    def test_reciprocal_vanishes_at_poles(self, q):
        """1/Gamma_q is zero at the poles."""
        assert q_gamma_reciprocal(-3, q) == 0

    def test_pole_mask(self):
        """Test elementwise pole detection."""
        assert list(is_nonpositive_integer([0, -1, 1, -0.5, -2 + 1j])) == [True, True, False, False, False]

    def test_classical_limit(self):
        """Gamma_q tends to Gamma as q -> 1."""
        trunc = Truncation(max_terms=60000)
        assert q_gamma(2.5, QBase(0.999), trunc).real == pytest.approx(math.gamma(2.5), rel=1e-2)

    @given(q=bases, u=st.floats(min_value=0.1, max_value=5.0))
    @settings(max_examples=50, deadline=None)
    def test_functional_equation(self, q, u):
        """Gamma_q(u + 1) = [u]_q Gamma_q(u)."""
        upper = q_gamma(u + 1, q)
        assert abs(upper - q_number(u, q) * q_gamma(u, q)) <= 1e-11 * abs(upper)


class TestQBeta:
    """Test the q-beta function."""

    def test_values(self, q):
        """B_q(1, 1) = 1 and B_q(2, 1) = 1 / (1 + q)."""
        assert q_beta(1, 1, q).real == pytest.approx(1.0, rel=1e-13)
        assert q_beta(2, 1, q).real == pytest.approx(2 / 3, rel=1e-13)

    def test_symmetry(self, q):
        """B_q is symmetric."""
        assert abs(q_beta(0.7, 2.3, q) - q_beta(2.3, 0.7, q)) < 1e-13

    def test_requires_positive_real_parts(self, q):
        """Test validation."""
        with pytest.raises(InvalidArgument):
            q_beta(0, 1, q)


class TestQExponential:
    """Test the q-exponentials."""

    def test_big_is_infinite_product(self, q):
        """E_q^u = (-u;q)_inf."""
        u = 0.8 - 0.4j
        assert abs(q_exponential(u, q, "big").value - q_pochhammer(-u, q).value) < 1e-13

    def test_small_is_reciprocal_product(self, q):
        """e_q^u = 1 / (u;q)_inf."""
        u = 0.6
        assert q_exponential(u, q, "small").value.real == pytest.approx(
            1 / q_pochhammer(u, q).value.real, rel=1e-12
        )

    def test_product_of_both_is_one(self, q):
        """e_q^u E_q^-u = 1."""
        u = 0.3 + 0.2j
        product = q_exponential(u, q, "small").value * q_exponential(-u, q, "big").value
        assert abs(product - 1) < 1e-13

    def test_small_outside_disk(self, q):
        """Test |u| >= 1 for the small q-exponential."""
        with pytest.raises(DomainError):
            q_exponential(1.0, q, "small")

    def test_unknown_kind(self, q):
        """Test validation of kind."""
        with pytest.raises(InvalidArgument):
            q_exponential(0.1, q, "medium")


class TestBasicHypergeometric:
    """Test the 1phi0 series."""

    def test_q_binomial_theorem(self, q):
        """1phi0(a;-;q,z) = (az;q)_inf / (z;q)_inf."""
        a, z = 0.3, 0.4 + 0.1j
        closed = q_pochhammer(a * z, q).value / q_pochhammer(z, q).value
        assert abs(basic_hypergeometric_1phi0(a, z, q).value - closed) < 1e-12

    def test_outside_disk(self, q):
        """Test |z| >= 1."""
        with pytest.raises(DomainError):
            basic_hypergeometric_1phi0(0.3, 1.2, q)
