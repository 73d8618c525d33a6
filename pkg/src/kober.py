"""
Kober Operators Module
Kober-type fractional q-integral and q-derivative operators, applied by
quadrature and termwise through their power-function images.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import InvalidArgument, PoleError
from .qcore import QBase, is_nonpositive_integer, log_q_gamma_reciprocal, q_gamma, q_power_difference
from .qml import ExtendedMLParams, check_disk, extended_series
from .qops import ScalarFunction, jackson_integral
from .series import EvalResult, PowerSeries, Truncation, resolve_truncation

logger = logging.getLogger(__name__)

KINDS = ("integral", "derivative")


@dataclass(frozen=True)
class KoberParams:
    """Operator pair (nu, mu)."""

    nu: complex
    mu: complex

    def __post_init__(self):
        object.__setattr__(self, "nu", complex(self.nu))
        object.__setattr__(self, "mu", complex(self.mu))

    def check_poles(self):
        """Reject pairs whose image gamma arguments nu+m+1 or nu+mu+m+1 reach a pole."""
        for label, value in (("nu+1", self.nu + 1), ("nu+mu+1", self.nu + self.mu + 1)):
            if is_nonpositive_integer(value):
                raise PoleError(f"Gamma_q pole in the power images: {label}={value}")


def _check_kind(kind: str):
    if kind not in KINDS:
        raise InvalidArgument(f"kind must be one of {KINDS}, got {kind!r}")


def _log_images(
    m: np.ndarray, k: KoberParams, q: QBase, kind: str, trunc: Optional[Truncation] = None
) -> np.ndarray:
    """log of the image coefficients for the exponents m."""
    n = len(m)
    logs = log_q_gamma_reciprocal(np.concatenate([k.nu + m + 1, k.nu + k.mu + m + 1]), q, trunc)
    ratio = logs[n:] - logs[:n]
    return ratio if kind == "integral" else -ratio


def kober_image_power(m: int, k: KoberParams, q: QBase, kind: str = "integral") -> complex:
    """
    Coefficient of u**m in the image of u**m.

    kind="integral":   Gamma_q(nu+m+1) / Gamma_q(nu+mu+m+1)
    kind="derivative": Gamma_q(nu+mu+m+1) / Gamma_q(nu+m+1)

    Raises:
        PoleError: If a gamma argument is a nonpositive integer
    """
    _check_kind(kind)
    if isinstance(m, bool) or int(m) != m or m < 0:
        raise InvalidArgument(f"m must be a nonnegative integer, got {m!r}")
    for value in (k.nu + m + 1, k.nu + k.mu + m + 1):
        if is_nonpositive_integer(value):
            raise PoleError(f"Gamma_q pole at {value} in the power image")
    value = complex(np.exp(_log_images(np.array([int(m)]), k, q, kind)[0]))
    return complex(value.real) if k.nu.imag == 0 and k.mu.imag == 0 else value


def apply_power_images(
    series: PowerSeries,
    k: KoberParams,
    q: QBase,
    kind: str,
    trunc: Optional[Truncation] = None,
) -> PowerSeries:
    """Termwise image of a power series under the integral or derivative operator."""
    _check_kind(kind)
    k.check_poles()

    def log_coefficients(n: int) -> np.ndarray:
        return series.log_coefficients(n) + _log_images(np.arange(n), k, q, kind, trunc)

    return PowerSeries(
        log_coefficients,
        ratio_scale=series.ratio_scale,
        min_terms=series.min_terms,
        name=f"kober_{kind}[{series.name}]",
    )


def kober_integral_direct(
    f: ScalarFunction,
    u: float,
    k: KoberParams,
    q: QBase,
    trunc: Optional[Truncation] = None,
) -> EvalResult:
    """
    Kober q-integral by Jackson quadrature.

    (u**(-nu-mu) / Gamma_q(mu)) int_0^u (u - tq)^(mu-1) t**nu f(t) d_q t

    Args:
        f: Function evaluable on the grid u q**j
        u: Real positive evaluation point
        k: Operator parameters, Re(mu) > 0
        q: Deformation parameter
        trunc: Truncation policy
    """
    trunc = resolve_truncation(trunc)
    if k.mu.real <= 0:
        raise InvalidArgument(f"The Kober q-integral needs Re(mu) > 0, got mu={k.mu}")
    if isinstance(u, complex) or not u > 0:
        raise InvalidArgument(f"u must be real and positive, got {u!r}")
    u = float(u)
    order = k.mu - 1

    def integrand(t: float) -> complex:
        kernel = q_power_difference(u, q.q * t, q, order, trunc)
        return kernel * t ** k.nu * complex(f(t))

    quadrature = jackson_integral(integrand, u, q, trunc)
    prefactor = u ** (-k.nu - k.mu) / q_gamma(k.mu, q, trunc)
    return EvalResult(
        quadrature.value * prefactor,
        quadrature.terms_used,
        quadrature.tail_estimate * abs(prefactor),
        quadrature.converged,
    )


def _kober_extended(
    u: complex, p: ExtendedMLParams, k: KoberParams, q: QBase, kind: str, trunc: Optional[Truncation]
) -> EvalResult:
    check_disk(u, p.eta, q)
    series = apply_power_images(extended_series(p, q, trunc), k, q, kind, trunc)
    return series.evaluate(u, trunc)


def kober_I_extended(
    u: complex,
    p: ExtendedMLParams,
    k: KoberParams,
    q: QBase,
    trunc: Optional[Truncation] = None,
) -> EvalResult:
    """Termwise Kober q-integral of the extended q-Mittag-Leffler function."""
    return _kober_extended(u, p, k, q, "integral", trunc)


def kober_D_extended(
    u: complex,
    p: ExtendedMLParams,
    k: KoberParams,
    q: QBase,
    trunc: Optional[Truncation] = None,
) -> EvalResult:
    """Termwise Kober q-derivative of the extended q-Mittag-Leffler function."""
    return _kober_extended(u, p, k, q, "derivative", trunc)


def kober_integral_extended_direct(
    u: float,
    p: ExtendedMLParams,
    k: KoberParams,
    q: QBase,
    trunc: Optional[Truncation] = None,
) -> EvalResult:
    """kober_integral_direct applied to the realized extended function."""
    check_disk(u, p.eta, q)
    function = extended_series(p, q, trunc).realize(abs(u), trunc)
    return kober_integral_direct(function, u, k, q, trunc)
