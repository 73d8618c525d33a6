"""Tests for Kober operators module."""

import pytest

from src.exceptions import InvalidArgument, PoleError
from src.kober import (
    KoberParams,
    apply_power_images,
    kober_D_extended,
    kober_I_extended,
    kober_image_power,
    kober_integral_direct,
    kober_integral_extended_direct,
)
from src.qcore import q_gamma
from src.qml import ExtendedMLParams, extended_series, q_ml_extended, q_ml_prabhakar


class TestPowerImages:
    """Test the images of power functions."""

    def test_integral_image(self, q):
        """nu = 0, mu = 1: u**m maps to u**m / [m + 1]_q."""
        k = KoberParams(nu=0, mu=1)
        assert kober_image_power(0, k, q).real == pytest.approx(1.0, rel=1e-13)
        assert kober_image_power(1, k, q).real == pytest.approx(1 / 1.5, rel=1e-13)

    def test_derivative_image_is_reciprocal(self, q, kober_params):
        """The derivative image inverts the integral image."""
        for m in (0, 2, 5):
            forward = kober_image_power(m, kober_params, q, "integral")
            backward = kober_image_power(m, kober_params, q, "derivative")
            assert abs(forward * backward - 1) < 1e-13

    def test_pole(self, q):
        """Test a gamma pole in the image."""
        with pytest.raises(PoleError):
            kober_image_power(0, KoberParams(nu=-1, mu=0.5), q)
        with pytest.raises(PoleError):
            KoberParams(nu=-2, mu=0.5).check_poles()

    def test_unknown_kind(self, q, kober_params):
        """Test validation of kind."""
        with pytest.raises(InvalidArgument):
            kober_image_power(1, kober_params, q, "transform")

    def test_quadrature_matches_image(self, q, kober_params, tight):
        """Jackson quadrature of the operator on u**m gives the gamma ratio."""
        u, m = 1.3, 2
        direct = kober_integral_direct(lambda t: t ** m, u, kober_params, q, tight).value / u ** m
        assert abs(direct - kober_image_power(m, kober_params, q)) < 1e-8


class TestDirectOperator:
    """Test the quadrature form of the Kober q-integral."""

    def test_requires_positive_mu(self, q):
        """Test Re(mu) > 0."""
        with pytest.raises(InvalidArgument):
            kober_integral_direct(lambda t: 1.0, 1.0, KoberParams(nu=0.5, mu=-0.5), q)

    @pytest.mark.parametrize("u", [0.0, -1.0, 1 + 1j])
    def test_requires_positive_point(self, q, kober_params, u):
        """Test u real and positive."""
        with pytest.raises(InvalidArgument):
            kober_integral_direct(lambda t: 1.0, u, kober_params, q)


class TestExtendedImages:
    """Test the operators on the extended q-Mittag-Leffler function."""

    def test_termwise_matches_quadrature(self, q, params, kober_params, tight):
        """Termwise and quadrature forms agree."""
        u = 0.7
        termwise = kober_I_extended(u, params, kober_params, q, tight).value
        direct = kober_integral_extended_direct(u, params, kober_params, q, tight).value
        assert abs(termwise - direct) < 1e-6

    def test_special_integral(self, q):
        """sigma = nu + mu + 1 with c = 1 maps onto sigma = nu + 1."""
        k = KoberParams(nu=-0.6, mu=0.2)
        base = ExtendedMLParams(eta=1.2, kappa=0.9, sigma=0.5, c=1.0)
        u = 0.8 + 0.3j
        image = kober_I_extended(u, base.replace(sigma=k.nu + k.mu + 1), k, q).value
        factor = q_gamma(k.nu + 1, q) / q_gamma(k.nu + k.mu + 1, q)
        target = q_ml_extended(u, base.replace(sigma=k.nu + 1), q).value
        assert abs(image - factor * target) < 1e-10

    def test_special_derivative(self, q):
        """sigma = nu + 1 with c = 1 maps onto the q-Prabhakar function."""
        k = KoberParams(nu=-0.6, mu=0.2)
        base = ExtendedMLParams(eta=1.2, kappa=0.9, sigma=0.5, c=1.0)
        u = 0.8 + 0.3j
        image = kober_D_extended(u, base.replace(sigma=k.nu + 1), k, q).value
        factor = q_gamma(k.nu + k.mu + 1, q) / q_gamma(k.nu + 1, q)
        target = q_ml_prabhakar(u, 1.2, 0.9, k.nu + k.mu + 1, q).value
        assert abs(image - factor * target) < 1e-10

    def test_inversion(self, q, params, kober_params):
        """The derivative undoes the integral termwise."""
        u = 1.1 - 0.5j
        integral = apply_power_images(extended_series(params, q), kober_params, q, "integral")
        composed = apply_power_images(integral, kober_params, q, "derivative")
        assert abs(composed.evaluate(u).value - q_ml_extended(u, params, q).value) < 1e-9
