"""
Mittag-Leffler Module
Classical and q-deformed Mittag-Leffler functions, the extended function
with beta-ratio weights, and numerical forms of its integral, derivative
and transform identities.
"""

import logging
import math
from dataclasses import dataclass
from numbers import Integral
from typing import Optional, Tuple

import numpy as np
from scipy.special import gammaln, loggamma

from .exceptions import DomainError, InvalidArgument, NumericalError
from .qcore import (
    QBase,
    is_nonpositive_integer,
    log_q_gamma_reciprocal,
    log_q_shifted_factorial,
    q_beta,
    q_pochhammer,
    q_power_difference,
)
from .qops import jackson_integral, q_derivative, q_laplace
from .series import EvalResult, PowerSeries, Truncation, resolve_truncation

logger = logging.getLogger(__name__)


def _real_positive(value, name: str) -> float:
    """Coerce a parameter that must be a positive real number."""
    if isinstance(value, complex):
        if value.imag != 0:
            raise InvalidArgument(f"{name} must be real, got {value}")
        value = value.real
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise InvalidArgument(f"{name} must be a real number, got {value!r}") from None
    if not value > 0 or not math.isfinite(value):
        raise InvalidArgument(f"{name} must be positive and finite, got {value}")
    return value


def _nonnegative_integer(m, name: str = "m") -> int:
    if not isinstance(m, Integral) or isinstance(m, bool) or m < 0:
        raise InvalidArgument(f"{name} must be a nonnegative integer, got {m!r}")
    return int(m)


@dataclass(frozen=True)
class ExtendedMLParams:
    """Parameters (eta, kappa, sigma, c) of the extended q-Mittag-Leffler function."""

    eta: float
    kappa: complex
    sigma: complex
    c: complex

    def __post_init__(self):
        object.__setattr__(self, "eta", _real_positive(self.eta, "eta"))
        for name in ("kappa", "sigma", "c"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if self.kappa.real <= 0:
            raise InvalidArgument(f"Re(kappa) must be positive, got {self.kappa}")
        if not self.c.real > self.sigma.real > 0:
            raise InvalidArgument(
                f"Parameters need Re(c) > Re(sigma) > 0, got sigma={self.sigma}, c={self.c}"
            )

    def replace(self, **changes) -> "ExtendedMLParams":
        """Copy with some parameters changed; the copy is validated again."""
        fields = {"eta": self.eta, "kappa": self.kappa, "sigma": self.sigma, "c": self.c}
        fields.update(changes)
        return ExtendedMLParams(**fields)


@dataclass(frozen=True)
class ClassicalMLParams:
    """Parameters of the classical three-parameter Mittag-Leffler function."""

    eta: complex
    kappa: complex
    sigma: complex = 1

    def __post_init__(self):
        for name in ("eta", "kappa", "sigma"):
            value = complex(getattr(self, name))
            if value.real <= 0:
                raise InvalidArgument(f"Re({name}) must be positive, got {value}")
            object.__setattr__(self, name, value)


def convergence_radius(eta: float, q: QBase) -> float:
    """Radius (1 - q)**(-eta) of the disk where the q-series converge absolutely."""
    return (1 - q.q) ** (-_real_positive(eta, "eta"))


def check_disk(u: complex, eta: float, q: QBase, label: str = "u"):
    radius = convergence_radius(eta, q)
    if abs(complex(u)) >= radius:
        raise DomainError(
            f"|{label}|={abs(complex(u)):.6g} lies outside the convergence disk of radius {radius:.6g}"
        )


def _log_abs(value) -> float:
    """ln|value|, -inf at zero."""
    magnitude = abs(complex(value))
    return math.log(magnitude) if magnitude > 0 else -math.inf


def check_log_disk(log_modulus: float, eta: float, q: QBase, label: str = "u") -> float:
    """
    check_disk for a point known through ln|point|, so huge or tiny factors never overflow.

    Returns:
        |point|, finite once the check has passed
    """
    log_radius = -_real_positive(eta, "eta") * math.log1p(-q.q)
    if not log_modulus < log_radius:
        raise DomainError(
            f"ln|{label}|={log_modulus:.6g} lies outside the convergence disk of log-radius {log_radius:.6g}"
        )
    return math.exp(log_modulus)


def _scaled_power(x: complex, base: complex, power: complex) -> complex:
    """x * base**power as a single exponential, finite whenever the product is."""
    x, base = complex(x), complex(base)
    if x == 0 or base == 0:
        return 0j
    with np.errstate(over="ignore", under="ignore"):
        return complex(np.exp(np.log(x) + power * np.log(base)))


def _leading_zero_terms(eta: float, kappa: complex) -> int:
    """Terms to sum before stopping: all indices m with Re(eta m + kappa) <= 0, plus one."""
    if kappa.real > 0:
        return 1
    return int(math.floor(-kappa.real / eta)) + 2


def _log_reciprocal_gamma_grid(
    eta: float, kappa: complex, n: int, q: QBase, trunc: Optional[Truncation]
) -> np.ndarray:
    return log_q_gamma_reciprocal(eta * np.arange(n) + kappa, q, trunc)


def _log_beta_ratio(
    sigma: complex, c: complex, n: int, q: QBase, trunc: Optional[Truncation] = None
) -> np.ndarray:
    """log B_q(sigma + m, c - sigma) / B_q(sigma, c - sigma) for m = 0..n-1."""
    m = np.arange(n)
    logs = log_q_gamma_reciprocal(np.concatenate([sigma + m, c + m, [sigma, c]]), q, trunc)
    return -logs[:n] + logs[n : 2 * n] + logs[-2] - logs[-1]


def _extended_series(
    eta: float,
    kappa: complex,
    sigma: complex,
    c: complex,
    q: QBase,
    trunc: Optional[Truncation] = None,
    name: str = "q_ml_extended",
) -> PowerSeries:
    """Extended series without parameter validation; kappa may have Re(kappa) <= 0."""
    qc = q.power(c)

    def log_coefficients(n: int) -> np.ndarray:
        return (
            _log_beta_ratio(sigma, c, n, q, trunc)
            + log_q_shifted_factorial(qc, n, q)
            - log_q_shifted_factorial(q.q, n, q)
            + _log_reciprocal_gamma_grid(eta, kappa, n, q, trunc)
        )

    return PowerSeries(
        log_coefficients,
        ratio_scale=(1 - q.q) ** eta,
        min_terms=_leading_zero_terms(eta, kappa),
        name=name,
    )


def extended_series(
    p: ExtendedMLParams, q: QBase, trunc: Optional[Truncation] = None
) -> PowerSeries:
    """Power series of the extended q-Mittag-Leffler function in u."""
    return _extended_series(p.eta, p.kappa, p.sigma, p.c, q, trunc)


def prabhakar_series(
    eta: float, kappa: complex, sigma: complex, q: QBase, trunc: Optional[Truncation] = None
) -> PowerSeries:
    """Power series sum (q**sigma;q)_m u**m / ((q;q)_m Gamma_q(eta m + kappa))."""
    eta = _real_positive(eta, "eta")
    kappa, qs = complex(kappa), q.power(sigma)

    def log_coefficients(n: int) -> np.ndarray:
        return (
            log_q_shifted_factorial(qs, n, q)
            - log_q_shifted_factorial(q.q, n, q)
            + _log_reciprocal_gamma_grid(eta, kappa, n, q, trunc)
        )

    return PowerSeries(
        log_coefficients,
        ratio_scale=(1 - q.q) ** eta,
        min_terms=_leading_zero_terms(eta, kappa),
        name="q_ml_prabhakar",
    )


def ml_classical(u: complex, p: ClassicalMLParams, trunc: Optional[Truncation] = None) -> EvalResult:
    """
    Classical Mittag-Leffler function sum (sigma)_m u**m / (Gamma(eta m + kappa) m!).

    sigma = 1 gives the two-parameter function sum u**m / Gamma(eta m + kappa).
    """

    def log_coefficients(n: int) -> np.ndarray:
        m = np.arange(n)
        return (
            loggamma(p.sigma + m)
            - loggamma(p.sigma)
            - gammaln(m + 1)
            - loggamma(p.eta * m + p.kappa)
        )

    return PowerSeries(log_coefficients, name="ml_classical").evaluate(u, trunc)


def q_mittag_leffler(
    u: complex, eta: float, kappa: complex, q: QBase, trunc: Optional[Truncation] = None
) -> EvalResult:
    """
    q-Mittag-Leffler function sum u**m / Gamma_q(eta m + kappa).

    Raises:
        DomainError: If |u| >= (1 - q)**(-eta)
    """
    eta = _real_positive(eta, "eta")
    kappa = complex(kappa)
    if kappa.real <= 0:
        raise InvalidArgument(f"Re(kappa) must be positive, got {kappa}")
    check_disk(u, eta, q)

    def log_coefficients(n: int) -> np.ndarray:
        return _log_reciprocal_gamma_grid(eta, kappa, n, q, trunc)

    series = PowerSeries(log_coefficients, ratio_scale=(1 - q.q) ** eta, name="q_mittag_leffler")
    return series.evaluate(u, trunc)


def q_ml_prabhakar(
    u: complex,
    eta: float,
    kappa: complex,
    sigma: complex,
    q: QBase,
    trunc: Optional[Truncation] = None,
) -> EvalResult:
    """q-analogue of the three-parameter Mittag-Leffler function."""
    eta = _real_positive(eta, "eta")
    if complex(kappa).real <= 0 or complex(sigma).real <= 0:
        raise InvalidArgument(f"Re(kappa) and Re(sigma) must be positive, got {kappa}, {sigma}")
    check_disk(u, eta, q)
    return prabhakar_series(eta, kappa, sigma, q, trunc).evaluate(u, trunc)


def q_ml_extended(
    u: complex, p: ExtendedMLParams, q: QBase, trunc: Optional[Truncation] = None
) -> EvalResult:
    """
    Extended q-Mittag-Leffler function E^(sigma;c)_{eta,kappa}(u;q).

    Coefficients are B_q(sigma+m, c-sigma)/B_q(sigma, c-sigma) (q**c;q)_m / ((q;q)_m Gamma_q(eta m + kappa)).

    Raises:
        DomainError: If |u| >= (1 - q)**(-eta)
        NonConvergence: If the term budget runs out
    """
    check_disk(u, p.eta, q)
    return extended_series(p, q, trunc).evaluate(u, trunc)


def beta_ratio(sigma: complex, c: complex, m: int, q: QBase) -> complex:
    """B_q(sigma + m, c - sigma) / B_q(sigma, c - sigma) from the q-gamma form."""
    m = _nonnegative_integer(m)
    sigma, c = complex(sigma), complex(c)
    if not c.real > sigma.real > 0:
        raise InvalidArgument(f"beta_ratio needs Re(c) > Re(sigma) > 0, got {sigma}, {c}")
    value = complex(np.exp(_log_beta_ratio(sigma, c, m + 1, q)[m]))
    return complex(value.real) if sigma.imag == 0 and c.imag == 0 else value


def pochhammer_ratio(sigma: complex, c: complex, m: int, q: QBase) -> complex:
    """(q**sigma;q)_m / (q**c;q)_m from finite products."""
    m = _nonnegative_integer(m)
    numerator = q_pochhammer(q.power(sigma), q, m).value
    denominator = q_pochhammer(q.power(c), q, m).value
    return numerator / denominator


def term_ratio(u: complex, p: ExtendedMLParams, q: QBase, m: int) -> float:
    """Modulus of the ratio between terms m + 1 and m of the extended series at u."""
    m = _nonnegative_integer(m)
    logs = extended_series(p, q).log_coefficients(m + 2)
    return float(abs(complex(u)) * math.exp((logs[m + 1] - logs[m]).real))


def _combine(value: complex, *parts: Tuple[EvalResult, complex]) -> EvalResult:
    """Result for a linear combination of evaluations with the given weights."""
    return EvalResult(
        value,
        max(result.terms_used for result, _ in parts),
        sum(abs(weight) * result.tail_estimate for result, weight in parts),
        all(result.converged for result, _ in parts),
    )


def recurrence_rhs(
    u: complex, p: ExtendedMLParams, q: QBase, trunc: Optional[Truncation] = None
) -> EvalResult:
    """
    E^(sigma+1;c+1)_{eta,kappa}(u) - u q**sigma E^(sigma+1;c+1)_{eta,eta+kappa}(u).

    Equals q_ml_extended(u, p) for every admissible parameter set.
    """
    shifted = p.replace(sigma=p.sigma + 1, c=p.c + 1)
    first = q_ml_extended(u, shifted, q, trunc)
    second = q_ml_extended(u, shifted.replace(kappa=p.eta + p.kappa), q, trunc)
    weight = complex(u) * q.power(p.sigma)
    return _combine(first.value - weight * second.value, (first, 1), (second, weight))


def integral_representation(
    u: complex, p: ExtendedMLParams, q: QBase, trunc: Optional[Truncation] = None
) -> EvalResult:
    """
    Jackson-integral form of the extended function.

    (1/B_q(sigma, c-sigma)) int_0^1 t**(sigma-1) (tq;q)_{c-sigma-1} E^c_{eta,kappa}(tu) d_q t,
    where E^c is the q-Prabhakar function with upper parameter c.
    """
    trunc = resolve_truncation(trunc)
    check_disk(u, p.eta, q)
    u = complex(u)
    inner = prabhakar_series(p.eta, p.kappa, p.c, q, trunc).realize(abs(u), trunc)
    order = p.c - p.sigma - 1

    def integrand(t: complex) -> complex:
        kernel = q_pochhammer(t * q.q, q, order, trunc).value
        return t ** (p.sigma - 1) * kernel * inner(t * u)

    quadrature = jackson_integral(integrand, 1.0, q, trunc)
    scale = 1 / q_beta(p.sigma, p.c - p.sigma, q, trunc)
    return EvalResult(
        quadrature.value * scale,
        quadrature.terms_used,
        quadrature.tail_estimate * abs(scale),
        quadrature.converged,
    )


def derivative_closed_form(
    u: complex,
    lam: complex,
    p: ExtendedMLParams,
    m: int,
    q: QBase,
    trunc: Optional[Truncation] = None,
) -> EvalResult:
    """
    Closed form u**(kappa-m-1) E^(sigma;c)_{eta,kappa-m}(lam u**eta) of the m-fold
    q-derivative of u**(kappa-1) E^(sigma;c)_{eta,kappa}(lam u**eta).

    Coefficients with 1/Gamma_q at a pole are zero.
    """
    if int(m) != m or m < 1:
        raise InvalidArgument(f"m must be a positive integer, got {m!r}")
    u = complex(u)
    if u == 0:
        raise InvalidArgument("The derivative formula needs u != 0")
    check_log_disk(_log_abs(lam) + p.eta * math.log(abs(u)), p.eta, q, label="lam*u^eta")
    argument = _scaled_power(lam, u, p.eta)
    series = _extended_series(
        p.eta, p.kappa - m, p.sigma, p.c, q, trunc, name="derivative_closed_form"
    )
    result = series.evaluate(argument, trunc)
    factor = _scaled_power(1.0, u, p.kappa - m - 1)
    if not np.isfinite(factor):
        raise NumericalError(f"u**(kappa-m-1) overflows at u={u}")
    return EvalResult(
        result.value * factor, result.terms_used, result.tail_estimate * abs(factor), result.converged
    )


def derivative_direct(
    u: complex,
    lam: complex,
    p: ExtendedMLParams,
    m: int,
    q: QBase,
    trunc: Optional[Truncation] = None,
) -> complex:
    """m-fold q_derivative of x -> x**(kappa-1) E^(sigma;c)_{eta,kappa}(lam x**eta) at u."""
    u, lam = complex(u), complex(lam)
    reach = check_log_disk(_log_abs(lam) + p.eta * _log_abs(u), p.eta, q, label="lam*u^eta")
    function = extended_series(p, q, trunc).realize(reach, trunc)

    def product(x: complex) -> complex:
        return x ** (p.kappa - 1) * function(_scaled_power(lam, x, p.eta))

    return q_derivative(product, u, q, m)


def _check_weight_parameters(xi: complex, zeta: complex, rho: float) -> Tuple[complex, complex, float]:
    xi, zeta = complex(xi), complex(zeta)
    if xi.real <= 0 or zeta.real <= 0:
        raise InvalidArgument(f"Re(xi) and Re(zeta) must be positive, got {xi}, {zeta}")
    if is_nonpositive_integer(zeta):
        raise InvalidArgument(f"zeta must avoid nonpositive integers, got {zeta}")
    return xi, zeta, _real_positive(rho, "rho")


def beta_weighted_integral(
    x: complex,
    xi: complex,
    zeta: complex,
    rho: float,
    p: ExtendedMLParams,
    q: QBase,
    trunc: Optional[Truncation] = None,
) -> EvalResult:
    """
    Series value of int_0^1 u**(xi-1) (1 - qu)_(zeta-1) E^(sigma;c)_{eta,kappa}(x u**rho) d_q u.

    Term m carries Gamma_q(xi + rho m) Gamma_q(zeta) / Gamma_q(xi + zeta + rho m).
    """
    xi, zeta, rho = _check_weight_parameters(xi, zeta, rho)
    check_disk(x, p.eta, q, label="x")
    base = extended_series(p, q, trunc)

    def log_coefficients(n: int) -> np.ndarray:
        steps = rho * np.arange(n)
        arguments = np.concatenate([xi + steps, xi + zeta + steps, [zeta]])
        gammas = log_q_gamma_reciprocal(arguments, q, trunc)
        return base.log_coefficients(n) - gammas[:n] + gammas[n : 2 * n] - gammas[-1]

    series = PowerSeries(log_coefficients, ratio_scale=base.ratio_scale, name="beta_weighted_integral")
    return series.evaluate(x, trunc)


def beta_weighted_integral_direct(
    x: complex,
    xi: complex,
    zeta: complex,
    rho: float,
    p: ExtendedMLParams,
    q: QBase,
    trunc: Optional[Truncation] = None,
) -> EvalResult:
    """Jackson quadrature of the beta-weighted integral."""
    trunc = resolve_truncation(trunc)
    xi, zeta, rho = _check_weight_parameters(xi, zeta, rho)
    check_disk(x, p.eta, q, label="x")
    x = complex(x)
    function = extended_series(p, q, trunc).realize(abs(x), trunc)

    def integrand(t: complex) -> complex:
        weight = q_power_difference(1.0, q.q * t.real, q, zeta - 1, trunc)
        return t ** (xi - 1) * weight * function(x * t.real ** rho)

    return jackson_integral(integrand, 1.0, q, trunc)


def _check_transform_point(
    x: complex, rho: float, s: complex, eta: float, q: QBase
) -> Tuple[complex, float]:
    """Validate s and the disk condition on |x| / |s|**rho; returns s and that modulus."""
    s = complex(s)
    if s.real <= 0:
        raise InvalidArgument(f"q-Laplace transform needs Re(s) > 0, got s={s}")
    reach = check_log_disk(_log_abs(x) - rho * math.log(abs(s)), eta, q, label="x/s^rho")
    return s, reach


def laplace_closed_form(
    x: complex,
    rho: float,
    s: complex,
    p: ExtendedMLParams,
    q: QBase,
    trunc: Optional[Truncation] = None,
) -> EvalResult:
    """
    q-Laplace transform of u -> E^(sigma;c)_{eta,kappa}(x u**rho) as a series.

    (1/s) sum_m C_m Gamma_q(1 + rho m) ((1-q)**rho x / s**rho)**m, C_m the extended coefficients.

    Raises:
        DomainError: If |x| / |s|**rho >= (1 - q)**(-eta)
    """
    rho = _real_positive(rho, "rho")
    s, _ = _check_transform_point(x, rho, s, p.eta, q)
    base = extended_series(p, q, trunc)

    def log_coefficients(n: int) -> np.ndarray:
        return base.log_coefficients(n) - log_q_gamma_reciprocal(1 + rho * np.arange(n), q, trunc)

    series = PowerSeries(
        log_coefficients,
        ratio_scale=(1 - q.q) ** (p.eta - rho),
        name="laplace_closed_form",
    )
    argument = _scaled_power(x, (1 - q.q) / s, rho)
    result = series.evaluate(argument, trunc)
    return EvalResult(
        result.value / s, result.terms_used, result.tail_estimate / abs(s), result.converged
    )


def laplace_direct(
    x: complex,
    rho: float,
    s: complex,
    p: ExtendedMLParams,
    q: QBase,
    trunc: Optional[Truncation] = None,
) -> EvalResult:
    """q_laplace applied to the realized function u -> E^(sigma;c)_{eta,kappa}(x u**rho)."""
    rho = _real_positive(rho, "rho")
    s, reach = _check_transform_point(x, rho, s, p.eta, q)
    x = complex(x)
    function = extended_series(p, q, trunc).realize(reach, trunc)
    return q_laplace(lambda u: function(_scaled_power(x, u, rho)), s, q, trunc)
