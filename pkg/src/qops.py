"""
q-Operators Module
The q-difference operator, the Jackson q-integral on [0, a] and the
q-Laplace transform, acting on caller-supplied scalar functions.
"""

import logging
from typing import Callable, Iterator, Optional

from .exceptions import InvalidArgument, NonConvergence
from .qcore import QBase, q_pochhammer
from .series import EvalResult, Truncation, resolve_truncation

logger = logging.getLogger(__name__)

ScalarFunction = Callable[[complex], complex]

# Step used to approach u = 0 in the limit definition of D_q
ORIGIN_STEP = 1e-6
# Consecutive sub-tolerance terms required before a q-integral stops
SMALL_TERM_RUN = 3


def _difference_quotient(f: ScalarFunction, u: complex, q: QBase, m: int) -> complex:
    """m-fold D_q at u != 0 from the samples f(u q**k), k = 0..m."""
    values = [complex(f(u * q.q ** k)) for k in range(m + 1)]
    for order in range(m):
        values = [
            (values[k] - values[k + 1]) / (u * q.q ** k * (1 - q.q))
            for k in range(m - order)
        ]
    return values[0]


def q_derivative(f: ScalarFunction, u: complex, q: QBase, m: int = 1) -> complex:
    """
    m-fold q-derivative D_q^m f(u), with D_q f(u) = (f(u) - f(uq)) / (u (1 - q)).

    At u = 0 the limit is taken from the points h and hq (h = 1e-6) with one
    Richardson step, which removes the term linear in h.

    Args:
        f: Function evaluable on the geometric grid u q**k
        u: Evaluation point
        q: Deformation parameter
        m: Number of iterations, at least 1

    Returns:
        The value D_q^m f(u)
    """
    if int(m) != m or m < 1:
        raise InvalidArgument(f"m must be a positive integer, got {m!r}")
    m = int(m)
    u = complex(u)
    if u != 0:
        return _difference_quotient(f, u, q, m)

    near = _difference_quotient(f, complex(ORIGIN_STEP), q, m)
    nearer = _difference_quotient(f, complex(ORIGIN_STEP * q.q), q, m)
    return (nearer - q.q * near) / (1 - q.q)


def _sum_geometric_terms(
    terms: Iterator[complex], q: QBase, trunc: Truncation, name: str
) -> EvalResult:
    """
    Sum scaled terms that decay at least like q**m.

    Stops once the bound |t| q / (1 - q) on the remainder has met the
    tolerance for SMALL_TERM_RUN consecutive terms.
    """
    total = 0j
    run = 0
    tail = float("inf")
    factor = q.q / (1 - q.q)
    for index, term in enumerate(terms):
        if index >= trunc.max_terms:
            raise NonConvergence(
                f"{name} did not converge within {trunc.max_terms} terms",
                terms_used=trunc.max_terms,
                tail_estimate=tail,
            )
        total += term
        tail = abs(term) * factor
        if tail <= trunc.tolerance(abs(total)):
            run += 1
            if run >= SMALL_TERM_RUN:
                logger.debug(f"{name}: {index + 1} terms, tail {tail:.3e}")
                return EvalResult(total, index + 1, tail, True)
        else:
            run = 0
    raise NonConvergence(f"{name} ran out of terms")


def jackson_integral(
    f: ScalarFunction, a: float, q: QBase, trunc: Optional[Truncation] = None
) -> EvalResult:
    """
    Jackson q-integral of f over [0, a]: a (1 - q) sum q**m f(a q**m).

    Args:
        f: Function evaluable on the grid a q**m
        a: Upper limit, real and positive
        q: Deformation parameter
        trunc: Truncation policy

    Raises:
        NonConvergence: If the budget runs out before the terms settle
    """
    trunc = resolve_truncation(trunc)
    if isinstance(a, complex) or not a > 0:
        raise InvalidArgument(f"Upper limit must be real and positive, got {a!r}")
    a = float(a)
    width = a * (1 - q.q)

    def terms() -> Iterator[complex]:
        weight = 1.0
        while True:
            yield width * weight * complex(f(a * weight))
            weight *= q.q

    return _sum_geometric_terms(terms(), q, trunc, "jackson_integral")


def q_laplace(
    f: ScalarFunction, s: complex, q: QBase, trunc: Optional[Truncation] = None
) -> EvalResult:
    """
    q-Laplace transform in series form.

    ((q;q)_inf / s) sum_j q**j f(q**j / s) / (q;q)_j

    Raises:
        InvalidArgument: If Re(s) <= 0
    """
    trunc = resolve_truncation(trunc)
    s = complex(s)
    if s.real <= 0:
        raise InvalidArgument(f"q-Laplace transform needs Re(s) > 0, got s={s}")
    prefactor = q_pochhammer(q.q, q, trunc=trunc).value / s

    def terms() -> Iterator[complex]:
        weight = 1.0
        point = 1 / s
        j = 0
        while True:
            yield prefactor * weight * complex(f(point))
            j += 1
            weight *= q.q / (1 - q.q ** j)
            point *= q.q

    return _sum_geometric_terms(terms(), q, trunc, "q_laplace")
