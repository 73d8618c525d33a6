"""
q-Calculus Core Module
Scalar q-calculus primitives: q-numbers, q-shifted factorials, q-power
differences, q-binomials, q-gamma, q-beta and the q-exponentials.
"""

import logging
import math
from dataclasses import dataclass
from numbers import Integral, Real
from typing import Optional, Tuple, Union

import numpy as np

from .exceptions import DivisionByZero, DomainError, InvalidArgument, NonConvergence, PoleError
from .series import (
    DEFAULT_TRUNCATION,
    EvalResult,
    PowerSeries,
    Truncation,
    resolve_truncation,
)

logger = logging.getLogger(__name__)

__all__ = [
    "QBase",
    "Truncation",
    "EvalResult",
    "DEFAULT_TRUNCATION",
    "INFINITY",
    "q_number",
    "q_pochhammer",
    "q_power_difference",
    "q_binomial",
    "q_factorial",
    "q_gamma",
    "q_gamma_reciprocal",
    "log_q_gamma_reciprocal",
    "log_q_shifted_factorial",
    "log_q_pochhammer_inf",
    "q_beta",
    "q_exponential",
    "basic_hypergeometric_1phi0",
    "is_nonpositive_integer",
]

Scalar = Union[int, float, complex]
INFINITY = math.inf

# Distance below which an argument counts as sitting on a gamma pole
POLE_TOLERANCE = 1e-12
# Largest matrix (rows x factors) formed at once by the product kernel
_CHUNK_ENTRIES = 1 << 20


@dataclass(frozen=True)
class QBase:
    """The deformation parameter q, valid on the open interval (0, 1)."""

    q: float

    def __post_init__(self):
        try:
            value = float(self.q)
        except (TypeError, ValueError):
            raise InvalidArgument(f"q must be a real number, got {self.q!r}") from None
        if not 0.0 < value < 1.0:
            raise InvalidArgument(f"q must satisfy 0 < q < 1, got {value}")
        object.__setattr__(self, "q", value)

    @property
    def log(self) -> float:
        """Real logarithm ln q."""
        return math.log(self.q)

    def power(self, z):
        """Principal value of q**z, computed as exp(z ln q)."""
        result = np.exp(np.asarray(z, dtype=complex) * self.log)
        return complex(result) if result.ndim == 0 else result


def _is_real(*values) -> bool:
    return all(isinstance(v, Real) for v in values)


def _real_if_real(value: complex, *inputs) -> complex:
    """Drop rounding noise in the imaginary part when every input is real."""
    return complex(value.real) if _is_real(*inputs) else value


def is_nonpositive_integer(z):
    """Elementwise test for the poles 0, -1, -2, ... of the gamma family."""
    z = np.asarray(z, dtype=complex)
    nearest = np.round(z.real)
    mask = (
        (np.abs(z.real - nearest) < POLE_TOLERANCE)
        & (np.abs(z.imag) < POLE_TOLERANCE)
        & (nearest <= 0)
    )
    return bool(mask) if mask.ndim == 0 else mask


def _factors_needed(scale: float, q: QBase, trunc: Truncation) -> int:
    """Factors kept for bases of modulus <= scale: up to the first i with scale*q**i < abs_tol."""
    if not math.isfinite(scale):
        raise NonConvergence(f"Infinite product base overflows at q={q.q}")
    if scale < trunc.abs_tol:
        return 1
    index = max(0, int(math.ceil(math.log(trunc.abs_tol / scale) / q.log)))
    while scale * q.q ** index >= trunc.abs_tol:
        index += 1
    count = index + 1
    if count > trunc.max_terms:
        raise NonConvergence(
            f"Infinite product needs {count} factors at q={q.q}, budget is {trunc.max_terms}",
            terms_used=trunc.max_terms,
            tail_estimate=scale * q.q ** trunc.max_terms / (1 - q.q),
        )
    return count


def log_q_pochhammer_inf(
    x, q: QBase, trunc: Optional[Truncation] = None
) -> Tuple[np.ndarray, int, float]:
    """
    Elementwise log (x;q)_inf as a sum of principal logarithms.

    A vanishing factor yields -inf. The common factor count is set by the
    largest |x| so that |x| q**i < abs_tol holds for the last kept factor.

    Returns:
        Tuple of (logs, factors used, tail estimate |x|max q**count / (1 - q))
    """
    trunc = resolve_truncation(trunc)
    x = np.atleast_1d(np.asarray(x, dtype=complex)).ravel()
    scale = float(np.max(np.abs(x))) if x.size else 0.0
    count = _factors_needed(scale, q, trunc)
    powers = q.q ** np.arange(count, dtype=float)
    logs = np.empty(x.shape, dtype=complex)
    rows = max(1, _CHUNK_ENTRIES // count)
    with np.errstate(divide="ignore", invalid="ignore"):
        for start in range(0, x.size, rows):
            block = x[start : start + rows]
            logs[start : start + rows] = np.log1p(-np.multiply.outer(block, powers)).sum(axis=1)
    tail = scale * q.q ** count / (1 - q.q)
    return logs, count, tail


def log_q_shifted_factorial(base: Scalar, n: int, q: QBase) -> np.ndarray:
    """log (base;q)_m for m = 0..n-1, from exact finite products."""
    factors = np.log1p(-complex(base) * q.q ** np.arange(max(n - 1, 0), dtype=float))
    return np.concatenate([[0j], np.cumsum(factors)])[:n]


def log_q_gamma_reciprocal(z, q: QBase, trunc: Optional[Truncation] = None) -> np.ndarray:
    """
    Elementwise log(1 / Gamma_q(z)) with -inf at the poles.

    Uses 1/Gamma_q(z) = (q**z;q)_inf (1 - q)**(z - 1) / (q;q)_inf.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    poles = np.atleast_1d(is_nonpositive_integer(z))
    safe = np.where(poles, 1.0, z)
    bases = np.concatenate([np.atleast_1d(q.power(safe)), [q.q]])
    logs, _, _ = log_q_pochhammer_inf(bases, q, trunc)
    result = logs[:-1] - logs[-1] + (safe - 1) * math.log1p(-q.q)
    result[poles] = -np.inf
    return result


def q_gamma_reciprocal(z, q: QBase, trunc: Optional[Truncation] = None):
    """1 / Gamma_q(z), defined as 0 at nonpositive integers."""
    with np.errstate(under="ignore"):
        values = np.exp(log_q_gamma_reciprocal(z, q, trunc))
    if np.ndim(z) == 0:
        return _real_if_real(complex(values[0]), z)
    return values


def q_number(u: Scalar, q: QBase) -> complex:
    """
    The q-number [u]_q = (1 - q**u) / (1 - q).

    Args:
        u: Any complex scalar
        q: Deformation parameter

    Returns:
        [u]_q, with zero imaginary part for real u
    """
    return _real_if_real((1 - q.power(u)) / (1 - q.q), u)


def q_pochhammer(
    lam: Scalar,
    q: QBase,
    order: Union[int, float, complex] = INFINITY,
    trunc: Optional[Truncation] = None,
) -> EvalResult:
    """
    The q-shifted factorial (lam;q)_order.

    Args:
        lam: Base of the factorial
        q: Deformation parameter
        order: Nonnegative integer (finite product), INFINITY, or a complex
            order evaluated as (lam;q)_inf / (lam q**order;q)_inf
        trunc: Truncation policy for the infinite products

    Raises:
        NonConvergence: If the factor budget is exhausted
        DivisionByZero: If the denominator product of the complex-order form vanishes
    """
    trunc = resolve_truncation(trunc)
    lam = complex(lam)

    if isinstance(order, Integral) and not isinstance(order, bool):
        if order < 0:
            raise InvalidArgument(f"Integer order must be nonnegative, got {order}")
        factors = 1 - lam * q.q ** np.arange(int(order), dtype=float)
        return EvalResult(complex(np.prod(factors)), int(order), 0.0, True)

    if isinstance(order, Real) and math.isinf(order):
        if order < 0:
            raise InvalidArgument("Order must not be -inf")
        logs, count, tail = log_q_pochhammer_inf([lam], q, trunc)
        return EvalResult(complex(np.exp(logs[0])), count, tail, True)

    eta = complex(order)
    logs, count, tail = log_q_pochhammer_inf([lam, lam * q.power(eta)], q, trunc)
    if not np.isfinite(logs[1].real):
        raise DivisionByZero(f"(lam q^eta;q)_inf vanishes for lam={lam}, eta={eta}")
    return EvalResult(complex(np.exp(logs[0] - logs[1])), count, 2 * tail, True)


def q_power_difference(
    s: float,
    t: float,
    q: QBase,
    order: Union[int, float, complex],
    trunc: Optional[Truncation] = None,
) -> complex:
    """
    The q-analogue (s - t)^(order) of the power (s - t)**order.

    Integer orders use the finite product; other orders use s**order (t/s;q)_order.
    """
    if isinstance(order, Integral) and not isinstance(order, bool):
        if order < 0:
            raise InvalidArgument(f"Integer order must be nonnegative, got {order}")
        factors = complex(s) - complex(t) * q.q ** np.arange(int(order), dtype=float)
        return complex(np.prod(factors))
    if s == 0:
        raise InvalidArgument("s must be nonzero for a non-integer order")
    order = complex(order)
    return complex(s) ** order * q_pochhammer(complex(t) / complex(s), q, order, trunc).value


def q_binomial(tau: Scalar, m: int, q: QBase) -> complex:
    """
    The general q-binomial coefficient for complex tau.

    (q**-tau;q)_m / (q;q)_m * (-1)**m * q**(tau m - m(m-1)/2)
    """
    if not isinstance(m, Integral) or isinstance(m, bool) or m < 0:
        raise InvalidArgument(f"m must be a nonnegative integer, got {m!r}")
    m = int(m)
    numerator = q_pochhammer(q.power(-complex(tau)), q, m).value
    denominator = q_pochhammer(q.q, q, m).value
    exponent = complex(tau) * m - m * (m - 1) / 2
    value = numerator / denominator * (-1) ** m * q.power(exponent)
    return _real_if_real(value, tau)


def q_factorial(m: int, q: QBase) -> complex:
    """[m]_q! = (q;q)_m / (1 - q)**m."""
    if not isinstance(m, Integral) or m < 0:
        raise InvalidArgument(f"m must be a nonnegative integer, got {m!r}")
    return complex(q_pochhammer(q.q, q, int(m)).value.real / (1 - q.q) ** int(m))


def q_gamma(u: Scalar, q: QBase, trunc: Optional[Truncation] = None) -> complex:
    """
    The q-gamma function (q;q)_inf / (q**u;q)_inf * (1 - q)**(1 - u).

    Raises:
        PoleError: At u = 0, -1, -2, ...
    """
    if is_nonpositive_integer(u):
        raise PoleError(f"q-gamma has a pole at u={u}")
    value = complex(np.exp(-log_q_gamma_reciprocal(u, q, trunc)[0]))
    return _real_if_real(value, u)


def q_beta(eta: Scalar, kappa: Scalar, q: QBase, trunc: Optional[Truncation] = None) -> complex:
    """
    The q-beta function Gamma_q(eta) Gamma_q(kappa) / Gamma_q(eta + kappa).

    Raises:
        InvalidArgument: Unless Re(eta) > 0 and Re(kappa) > 0
    """
    if complex(eta).real <= 0 or complex(kappa).real <= 0:
        raise InvalidArgument(f"q-beta needs Re(eta), Re(kappa) > 0, got {eta}, {kappa}")
    logs = log_q_gamma_reciprocal([eta, kappa, complex(eta) + complex(kappa)], q, trunc)
    value = complex(np.exp(logs[2] - logs[0] - logs[1]))
    return _real_if_real(value, eta, kappa)


def q_exponential(
    u: Scalar, q: QBase, kind: str = "big", trunc: Optional[Truncation] = None
) -> EvalResult:
    """
    The q-exponentials as power series.

    kind="big":   E_q^u = sum q**(m(m-1)/2) u**m / (q;q)_m = (-u;q)_inf, entire.
    kind="small": e_q^u = sum u**m / (q;q)_m = 1 / (u;q)_inf, for |u| < 1.
    """
    if kind not in ("big", "small"):
        raise InvalidArgument(f"kind must be 'big' or 'small', got {kind!r}")
    u = complex(u)
    if kind == "small" and abs(u) >= 1:
        raise DomainError(f"The small q-exponential needs |u| < 1, got |u|={abs(u)}")

    def log_coefficients(n: int) -> np.ndarray:
        logs = -log_q_shifted_factorial(q.q, n, q)
        if kind == "big":
            m = np.arange(n)
            logs = logs + (m * (m - 1) / 2) * q.log
        return logs

    series = PowerSeries(
        log_coefficients,
        ratio_scale=1.0 if kind == "small" else 0.0,
        name=f"q_exponential[{kind}]",
    )
    return series.evaluate(u, trunc)


def basic_hypergeometric_1phi0(
    a: Scalar, z: Scalar, q: QBase, trunc: Optional[Truncation] = None
) -> EvalResult:
    """
    The series 1phi0(a;-;q,z) = sum (a;q)_m z**m / (q;q)_m for |z| < 1.

    By the q-binomial theorem it equals (az;q)_inf / (z;q)_inf.
    """
    z = complex(z)
    if abs(z) >= 1:
        raise DomainError(f"1phi0 needs |z| < 1, got |z|={abs(z)}")

    def log_coefficients(n: int) -> np.ndarray:
        return log_q_shifted_factorial(a, n, q) - log_q_shifted_factorial(q.q, n, q)

    return PowerSeries(log_coefficients, ratio_scale=1.0, name="1phi0").evaluate(z, trunc)
