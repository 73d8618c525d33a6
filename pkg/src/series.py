"""
Series Summation Module
Truncation policy, evaluation results and power series summed with
ratio-based tail bounds.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from .exceptions import InvalidArgument, NonConvergence

logger = logging.getLogger(__name__)

# First block of terms; later blocks double until the budget is reached
_INITIAL_BLOCK = 64
# Terms kept by a realization beyond the point where its series converged
_REALIZATION_MARGIN = 8
# |sin(phase)| below which a log-coefficient counts as a real number
_REAL_PHASE = 1e-12

LogCoefficients = Callable[[int], np.ndarray]


@dataclass(frozen=True)
class Truncation:
    """Tolerance and term budget governing every infinite series, product and q-integral."""

    abs_tol: float = 1e-14
    rel_tol: float = 1e-14
    max_terms: int = 10000

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise InvalidArgument(
                f"Tolerances must be positive, got abs_tol={self.abs_tol}, rel_tol={self.rel_tol}"
            )
        if int(self.max_terms) != self.max_terms or self.max_terms < 1:
            raise InvalidArgument(f"max_terms must be a positive integer, got {self.max_terms}")
        object.__setattr__(self, "max_terms", int(self.max_terms))

    def tolerance(self, magnitude):
        """Effective tail tolerance for a partial value of the given magnitude."""
        return np.maximum(self.abs_tol, self.rel_tol * np.asarray(magnitude, dtype=float))


DEFAULT_TRUNCATION = Truncation()


@dataclass(frozen=True)
class EvalResult:
    """Value of a truncated evaluation together with its convergence diagnostics."""

    value: complex
    terms_used: int
    tail_estimate: float
    converged: bool

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))
        if self.terms_used < 0:
            raise InvalidArgument(f"terms_used must be nonnegative, got {self.terms_used}")
        if not self.tail_estimate >= 0:
            raise InvalidArgument(f"tail_estimate must be nonnegative, got {self.tail_estimate}")

    def to_dict(self) -> Dict[str, object]:
        """Flat record used by the command line renderers."""
        return {
            "value_re": self.value.real,
            "value_im": self.value.imag,
            "terms_used": self.terms_used,
            "tail_estimate": self.tail_estimate,
            "converged": self.converged,
        }


def resolve_truncation(trunc: Optional[Truncation]) -> Truncation:
    """Return the given policy or the library default."""
    return DEFAULT_TRUNCATION if trunc is None else trunc


class SeriesRealization:
    """
    A converged power series frozen into a polynomial.

    Coefficients are stored for the scaled variable w / scale, so the
    polynomial stays representable when the raw coefficients underflow.
    """

    def __init__(self, scaled_coefficients: np.ndarray, scale: float):
        """
        Initialize realization.

        Args:
            scaled_coefficients: c_m * scale**m for m = 0..degree
            scale: Largest argument magnitude the realization was built for
        """
        self.scale = scale
        self._descending = np.asarray(scaled_coefficients, dtype=complex)[::-1].copy()

    @property
    def degree(self) -> int:
        return len(self._descending) - 1

    def __call__(self, w) -> complex:
        return complex(np.polyval(self._descending, complex(w) / self.scale))


class PowerSeries:
    """Power series sum of exp(L_m) * u**m described by its log-coefficients L_m."""

    def __init__(
        self,
        log_coefficients: LogCoefficients,
        ratio_scale: float = 0.0,
        min_terms: int = 1,
        name: str = "series",
    ):
        """
        Initialize power series.

        Args:
            log_coefficients: Callable returning L_0..L_{n-1} for a requested n
            ratio_scale: Limit of |t_{m+1} / t_m| divided by |u|; floors the tail ratio
            min_terms: Leading terms that must be summed before the series may stop
            name: Label used in log and error messages
        """
        self.log_coefficients = log_coefficients
        self.ratio_scale = ratio_scale
        self.min_terms = max(1, int(min_terms))
        self.name = name

    def coefficients(self, n: int) -> np.ndarray:
        """The first n coefficients exp(L_m)."""
        with np.errstate(under="ignore"):
            return np.exp(np.asarray(self.log_coefficients(n), dtype=complex))

    def terms(self, u, n: int) -> np.ndarray:
        """The first n terms at the point u."""
        logs = np.asarray(self.log_coefficients(n), dtype=complex)
        u = complex(u)
        if u == 0:
            terms = np.zeros(n, dtype=complex)
            terms[0] = np.exp(logs[0])
            return terms
        index = np.arange(n)
        if u.imag == 0 and np.all(np.abs(np.sin(logs.imag)) < _REAL_PHASE):
            # Real coefficients at a real point: the terms are real up to sign
            signs = np.sign(np.cos(logs.imag))
            if u.real < 0:
                signs = signs * (-1.0) ** index
            with np.errstate(over="ignore", under="ignore"):
                magnitudes = np.exp(logs.real + index * np.log(abs(u.real)))
            return (signs * magnitudes).astype(complex)
        powers = index * np.log(u)
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            return np.exp(logs + powers)

    def ratio_limit(self, u) -> float:
        return abs(complex(u)) * self.ratio_scale

    def evaluate(self, u, trunc: Optional[Truncation] = None) -> EvalResult:
        """
        Sum the series at u under the truncation policy.

        Raises:
            NonConvergence: If the budget is exhausted before the tail bound is met
        """
        trunc = resolve_truncation(trunc)
        limit = self.ratio_limit(u)
        budget = trunc.max_terms + 1
        n = min(_INITIAL_BLOCK, budget)

        while True:
            terms = self.terms(u, n)
            stop = self._stopping_index(terms, trunc, limit)
            if stop is not None:
                index, tail = stop
                value = complex(np.sum(terms[: index + 1]))
                logger.debug(f"{self.name}: {index + 1} terms, tail {tail:.3e}")
                return EvalResult(value, index + 1, tail, True)
            if n >= budget:
                raise NonConvergence(
                    f"{self.name} did not converge within {trunc.max_terms} terms at u={complex(u)}",
                    terms_used=trunc.max_terms,
                )
            n = min(2 * n, budget)

    def _stopping_index(
        self, terms: np.ndarray, trunc: Truncation, limit: float
    ) -> Optional[Tuple[int, float]]:
        """First index m whose tail bound |t_{m+1}| / (1 - r) meets the tolerance."""
        if terms.size < 2:
            return None
        magnitudes = np.abs(terms)
        current, following = magnitudes[:-1], magnitudes[1:]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = np.maximum(np.where(current > 0, following / current, limit), limit)
            tails = np.where(
                following == 0,
                0.0,
                np.where(ratios < 1, following / (1 - ratios), np.inf),
            )
        partial = np.abs(np.cumsum(terms[:-1]))
        accepted = tails <= trunc.tolerance(partial)
        accepted[: self.min_terms - 1] = False
        hits = np.flatnonzero(accepted)
        if hits.size == 0:
            return None
        index = int(hits[0])
        return index, float(tails[index])

    def realize(self, max_argument, trunc: Optional[Truncation] = None) -> SeriesRealization:
        """
        Freeze the series into a polynomial accurate for |w| <= |max_argument|.

        The truncation point is the one the series needs at the largest argument;
        term magnitudes only depend on |w|, so the real point |max_argument| is used.
        """
        scale = abs(complex(max_argument))
        needed = self.evaluate(scale, trunc).terms_used + _REALIZATION_MARGIN
        if scale == 0:
            scale = 1.0
        logs = np.asarray(self.log_coefficients(needed), dtype=complex)
        with np.errstate(under="ignore"):
            scaled = np.exp(logs + np.arange(needed) * np.log(scale))
        return SeriesRealization(scaled, scale)
