"""
Identity Verification Module
Runs every q-Mittag-Leffler identity as a randomized two-path check and
collects the results into a report.
"""

import logging
import math
import threading
import traceback
from dataclasses import asdict, dataclass, field
from datetime import datetime
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .exceptions import DomainError, InvalidArgument
from .kober import (
    KoberParams,
    apply_power_images,
    kober_D_extended,
    kober_I_extended,
    kober_image_power,
    kober_integral_direct,
    kober_integral_extended_direct,
)
from .qcore import (
    QBase,
    basic_hypergeometric_1phi0,
    q_beta,
    q_gamma,
    q_number,
    q_pochhammer,
)
from .qml import (
    ClassicalMLParams,
    ExtendedMLParams,
    beta_ratio,
    beta_weighted_integral,
    beta_weighted_integral_direct,
    convergence_radius,
    derivative_closed_form,
    derivative_direct,
    extended_series,
    integral_representation,
    laplace_closed_form,
    laplace_direct,
    ml_classical,
    pochhammer_ratio,
    q_mittag_leffler,
    q_ml_extended,
    q_ml_prabhakar,
    recurrence_rhs,
    term_ratio,
)
from .qops import jackson_integral, q_laplace
from .series import Truncation
from .utils import ordered_map, scaled_error

logger = logging.getLogger(__name__)

# Tighter than the library default so truncation stays far below the identity tolerances
VERIFY_TRUNCATION = Truncation(abs_tol=1e-16, rel_tol=1e-16, max_terms=20000)
# Products at q = 0.999 need tens of thousands of factors
CLASSICAL_LIMIT_TRUNCATION = Truncation(abs_tol=1e-14, rel_tol=1e-14, max_terms=60000)

Trial = Callable[[np.random.Generator, Truncation], float]


@dataclass(frozen=True)
class Identity:
    """A named identity checked by comparing two independent computations."""

    identity_id: str
    description: str
    tolerance: float
    trial: Trial
    # Draws used when the suite runs at acceptance size
    acceptance_trials: int = 100


@dataclass(frozen=True)
class IdentityRecord:
    """Outcome of all trials of one identity."""

    identity_id: str
    trials: int
    max_abs_error: float
    tolerance: float
    passed: bool


@dataclass
class VerifyReport:
    """Report over the whole identity suite."""

    seed: int
    trials: Optional[int]
    records: List[IdentityRecord] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(record.passed for record in self.records)

    def to_dict(self) -> Dict:
        return {
            "seed": self.seed,
            "trials": self.trials,
            "passed": self.passed,
            "identities": [asdict(record) for record in self.records],
        }

    def to_text(self) -> str:
        width = max((len(record.identity_id) for record in self.records), default=0)
        lines = []
        for record in self.records:
            status = "PASS" if record.passed else "FAIL"
            lines.append(
                f"{record.identity_id:<{width}}  trials={record.trials}  "
                f"max_error={record.max_abs_error:.3e}  tolerance={record.tolerance:.1e}  {status}"
            )
        failed = sum(not record.passed for record in self.records)
        lines.append(f"{len(self.records) - failed}/{len(self.records)} identities passed")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# Random draws
# ---------------------------------------------------------------------------

def _draw_q(rng: np.random.Generator, low: float = 0.1, high: float = 0.9) -> QBase:
    return QBase(float(rng.uniform(low, high)))


def _draw_params(
    rng: np.random.Generator,
    eta: Sequence[float] = (0.5, 2.0),
    sigma: Sequence[float] = (0.3, 2.0),
) -> ExtendedMLParams:
    s = rng.uniform(*sigma)
    return ExtendedMLParams(
        eta=rng.uniform(*eta),
        kappa=rng.uniform(0.5, 2.0),
        sigma=s,
        c=s + rng.uniform(0.3, 2.0),
    )


def _draw_point(rng: np.random.Generator, radius: float, fraction: float) -> complex:
    """Complex point with modulus below fraction * radius."""
    return complex(rng.uniform(0, fraction * radius) * np.exp(1j * rng.uniform(-np.pi, np.pi)))


# ---------------------------------------------------------------------------
# Trials: each returns the error between its two computation paths
# ---------------------------------------------------------------------------

def _functional_equation(rng, trunc):
    u = rng.uniform(0, 5)
    q = QBase(float(rng.choice([0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])))
    upper = q_gamma(u + 1, q, trunc)
    return abs(upper - q_number(u, q) * q_gamma(u, q, trunc)) / abs(upper)


def _q_beta_integral(rng, trunc):
    q = _draw_q(rng)
    eta, kappa = rng.uniform(0.5, 3.0), rng.uniform(0.5, 3.0)

    def integrand(t):
        return t ** (eta - 1) * q_pochhammer(t * q.q, q, complex(kappa - 1), trunc).value

    return scaled_error(jackson_integral(integrand, 1.0, q, trunc).value, q_beta(eta, kappa, q, trunc))


def _beta_ratio(rng, trunc):
    q = _draw_q(rng)
    sigma = rng.uniform(0.2, 2.0)
    c = sigma + rng.uniform(0.2, 2.0)
    m = int(rng.integers(0, 31))
    return scaled_error(beta_ratio(sigma, c, m, q), pochhammer_ratio(sigma, c, m, q))


def _case_i(rng, trunc):
    q = _draw_q(rng, 0.1, 0.8)
    p = _draw_params(rng, sigma=(0.1, 0.9)).replace(c=1.0)
    u = _draw_point(rng, convergence_radius(p.eta, q), 0.3)
    extended = q_ml_extended(u, p, q, trunc).value
    return scaled_error(extended, q_ml_prabhakar(u, p.eta, p.kappa, p.sigma, q, trunc).value)


def _case_ii(rng, trunc):
    q = _draw_q(rng, 0.1, 0.8)
    p = _draw_params(rng).replace(sigma=1.0, c=1.0 + rng.uniform(0.3, 2.0))
    u = _draw_point(rng, convergence_radius(p.eta, q), 0.3)
    extended = q_ml_extended(u, p, q, trunc).value
    return scaled_error(extended, q_mittag_leffler(u, p.eta, p.kappa, q, trunc).value)


def _case_iii(rng, trunc):
    q = _draw_q(rng)
    c = 1.0 + rng.uniform(0.3, 2.0)
    u = _draw_point(rng, 1.0, 0.9)
    p = ExtendedMLParams(eta=1.0, kappa=1.0, sigma=1.0, c=c)
    closed = 1 / q_pochhammer((1 - q.q) * u, q, trunc=trunc).value
    first = scaled_error(q_ml_extended(u, p, q, trunc).value, closed)
    qc = q.q ** c
    binomial = q_pochhammer(qc * u, q, trunc=trunc).value / q_pochhammer(u, q, trunc=trunc).value
    second = scaled_error(basic_hypergeometric_1phi0(qc, u, q, trunc).value, binomial)
    return max(first, second)


def _case_iv(rng, trunc):
    q = _draw_q(rng)
    p = _draw_params(rng)
    u = _draw_point(rng, convergence_radius(p.eta, q), 0.8)
    shifted = p.replace(c=p.c + p.sigma)
    extended = q_ml_extended(u, shifted, q, trunc).value
    return scaled_error(extended, q_ml_prabhakar(u, p.eta, p.kappa, p.sigma, q, trunc).value)


def _recurrence(rng, trunc):
    q = _draw_q(rng)
    p = _draw_params(rng)
    u = _draw_point(rng, convergence_radius(p.eta, q), 0.8)
    return scaled_error(recurrence_rhs(u, p, q, trunc).value, q_ml_extended(u, p, q, trunc).value)


def _integral_representation(rng, trunc):
    q = _draw_q(rng, 0.1, 0.8)
    p = _draw_params(rng, sigma=(0.5, 2.0))
    u = _draw_point(rng, convergence_radius(p.eta, q), 0.5)
    quadrature = integral_representation(u, p, q, trunc).value
    return scaled_error(quadrature, q_ml_extended(u, p, q, trunc).value)


def _derivative(rng, trunc):
    q = _draw_q(rng, 0.2, 0.8)
    p = _draw_params(rng)
    m = int(rng.integers(1, 4))
    u = rng.uniform(0.1, 1.0)
    reach = rng.uniform(0, 0.5) * convergence_radius(p.eta, q)
    lam = reach / u ** p.eta * np.exp(1j * rng.uniform(-np.pi, np.pi))
    direct = derivative_direct(u, lam, p, m, q, trunc)
    return scaled_error(direct, derivative_closed_form(u, lam, p, m, q, trunc).value)


def _draw_weights(rng):
    return rng.uniform(0.5, 2.0), rng.uniform(0.5, 3.0), rng.uniform(0.5, 2.0)


def _beta_weighted_integral(rng, trunc):
    q = _draw_q(rng, 0.1, 0.8)
    p = _draw_params(rng)
    xi, zeta, rho = _draw_weights(rng)
    x = _draw_point(rng, convergence_radius(p.eta, q), 0.5)
    series = beta_weighted_integral(x, xi, zeta, rho, p, q, trunc).value
    return scaled_error(beta_weighted_integral_direct(x, xi, zeta, rho, p, q, trunc).value, series)


def _beta_weighted_special_case(rng, trunc):
    q = _draw_q(rng)
    p = _draw_params(rng)
    _, zeta, _ = _draw_weights(rng)
    x = _draw_point(rng, convergence_radius(p.eta, q), 0.8)
    series = beta_weighted_integral(x, p.kappa, zeta, p.eta, p, q, trunc).value
    closed = q_gamma(zeta, q, trunc) * q_ml_extended(x, p.replace(kappa=p.kappa + zeta), q, trunc).value
    return scaled_error(series, closed)


def _q_laplace(rng, trunc):
    q = _draw_q(rng)
    p = _draw_params(rng)
    rho = rng.uniform(0.5, 2.0)
    s = complex(rng.uniform(1.0, 5.0), rng.uniform(-1.0, 1.0))
    x = _draw_point(rng, convergence_radius(p.eta, q) * abs(s) ** rho, 0.5)
    closed = laplace_closed_form(x, rho, s, p, q, trunc).value
    return scaled_error(laplace_direct(x, rho, s, p, q, trunc).value, closed)


def _q_laplace_of_one(rng, trunc):
    q = _draw_q(rng)
    s = complex(rng.uniform(0.5, 5.0), rng.uniform(-1.0, 1.0))
    p = _draw_params(rng)
    transform = scaled_error(q_laplace(lambda u: 1.0, s, q, trunc).value, 1 / s)
    at_origin = laplace_closed_form(0.0, 1.0, s, p, q, trunc).value
    reference = 1 / (s * q_gamma(p.kappa, q, trunc))
    return max(transform, scaled_error(at_origin, reference))


def _draw_kober(rng, nu=(-0.9, 1.0), mu=(0.2, 2.0)) -> KoberParams:
    return KoberParams(nu=rng.uniform(*nu), mu=rng.uniform(*mu))


def _kober_power_image(rng, trunc):
    q = _draw_q(rng, 0.1, 0.8)
    k = _draw_kober(rng)
    m = int(rng.integers(0, 6))
    u = rng.uniform(0.2, 2.0)
    direct = kober_integral_direct(lambda t: t ** m, u, k, q, trunc).value / u ** m
    return scaled_error(direct, kober_image_power(m, k, q, "integral"))


def _kober_extended_quadrature(rng, trunc):
    q = _draw_q(rng, 0.1, 0.8)
    p = _draw_params(rng)
    k = _draw_kober(rng, nu=(-0.5, 1.0))
    u = rng.uniform(0.05, 0.5) * convergence_radius(p.eta, q)
    termwise = kober_I_extended(u, p, k, q, trunc).value
    return scaled_error(kober_integral_extended_direct(u, p, k, q, trunc).value, termwise)


def _draw_special_kober(rng) -> KoberParams:
    # Keeps nu+1 and nu+mu+1 inside (0, 1) so that c = 1 stays admissible
    return _draw_kober(rng, nu=(-0.9, -0.4), mu=(0.05, 0.35))


def _kober_special_integral(rng, trunc):
    q = _draw_q(rng)
    k = _draw_special_kober(rng)
    base = _draw_params(rng)
    u = _draw_point(rng, convergence_radius(base.eta, q), 0.8)
    image = kober_I_extended(u, base.replace(sigma=k.nu + k.mu + 1, c=1.0), k, q, trunc).value
    factor = q_gamma(k.nu + 1, q, trunc) / q_gamma(k.nu + k.mu + 1, q, trunc)
    target = q_ml_extended(u, base.replace(sigma=k.nu + 1, c=1.0), q, trunc).value
    return scaled_error(image, factor * target)


def _kober_special_derivative(rng, trunc):
    q = _draw_q(rng)
    k = _draw_special_kober(rng)
    base = _draw_params(rng)
    u = _draw_point(rng, convergence_radius(base.eta, q), 0.8)
    image = kober_D_extended(u, base.replace(sigma=k.nu + 1, c=1.0), k, q, trunc).value
    factor = q_gamma(k.nu + k.mu + 1, q, trunc) / q_gamma(k.nu + 1, q, trunc)
    target = q_ml_prabhakar(u, base.eta, base.kappa, k.nu + k.mu + 1, q, trunc).value
    return scaled_error(image, factor * target)


def _kober_inversion(rng, trunc):
    q = _draw_q(rng)
    p = _draw_params(rng)
    k = _draw_kober(rng)
    u = _draw_point(rng, convergence_radius(p.eta, q), 0.8)
    integral = apply_power_images(extended_series(p, q, trunc), k, q, "integral", trunc)
    composed = apply_power_images(integral, k, q, "derivative", trunc)
    return scaled_error(composed.evaluate(u, trunc).value, q_ml_extended(u, p, q, trunc).value)


def _term_ratio(rng, trunc):
    q = _draw_q(rng, 0.1, 0.8)
    p = _draw_params(rng, eta=(1.0, 2.0))
    u = _draw_point(rng, 1.0, 1.0)
    u = 0.5 * convergence_radius(p.eta, q) * u / abs(u)
    return abs(term_ratio(u, p, q, 40) - 0.5) / 0.5


def _convergence_disk(rng, trunc):
    q = _draw_q(rng)
    p = _draw_params(rng)
    u = convergence_radius(p.eta, q) * rng.uniform(1.0, 1.5)
    try:
        q_ml_extended(u, p, q, trunc)
    except DomainError:
        return 0.0
    return math.inf


def _classical_limit(rng, trunc):
    q = QBase(0.999)
    eta = float(rng.choice([0.5, 1.0, 2.0]))
    u = _draw_point(rng, 0.5, 1.0)
    deformed = q_mittag_leffler(u, eta, 1.0, q, CLASSICAL_LIMIT_TRUNCATION).value
    return scaled_error(deformed, ml_classical(u, ClassicalMLParams(eta, 1.0)).value)


def default_identities() -> List[Identity]:
    """The full identity catalogue in report order."""
    return [
        Identity(
            "functional-equation", "Gamma_q(u+1) = [u]_q Gamma_q(u)", 1e-12, _functional_equation, 1000
        ),
        Identity("q-beta-integral", "gamma-ratio vs Jackson form of B_q", 1e-8, _q_beta_integral, 200),
        Identity("beta-ratio", "beta form vs (q^sigma;q)_m/(q^c;q)_m", 1e-11, _beta_ratio, 200),
        Identity("case-i", "c = 1 gives the q-Prabhakar function", 1e-12, _case_i, 200),
        Identity("case-ii", "sigma = 1 gives the q-Mittag-Leffler function", 1e-12, _case_ii, 200),
        Identity("case-iii", "eta = kappa = sigma = 1 and the q-binomial theorem", 1e-10, _case_iii, 200),
        Identity("case-iv", "c -> c + sigma keeps the q-Prabhakar structure", 1e-10, _case_iv, 200),
        Identity("recurrence", "contiguous relation in (sigma, c)", 1e-10, _recurrence, 500),
        Identity(
            "integral-representation", "Jackson integral vs series", 1e-6, _integral_representation
        ),
        Identity("derivative", "numeric D_q^m vs closed form", 1e-6, _derivative),
        Identity(
            "beta-weighted-integral", "series vs Jackson quadrature", 1e-6, _beta_weighted_integral
        ),
        Identity(
            "beta-weighted-special-case",
            "rho = eta, xi = kappa closed form",
            1e-10,
            _beta_weighted_special_case,
        ),
        Identity("q-laplace", "closed form vs series transform", 1e-6, _q_laplace),
        Identity("q-laplace-of-one", "transform of 1 is 1/s", 1e-10, _q_laplace_of_one),
        Identity("kober-power-image", "quadrature vs gamma ratio on u^m", 1e-8, _kober_power_image),
        Identity(
            "kober-extended-quadrature",
            "termwise vs quadrature Kober integral",
            1e-6,
            _kober_extended_quadrature,
        ),
        Identity(
            "kober-special-integral", "integral image at sigma = nu+mu+1", 1e-10, _kober_special_integral
        ),
        Identity(
            "kober-special-derivative", "derivative image at sigma = nu+1", 1e-10, _kober_special_derivative
        ),
        Identity("kober-inversion", "derivative after integral is the identity", 1e-9, _kober_inversion),
        Identity("term-ratio", "empirical term ratio at m = 40", 0.05, _term_ratio),
        Identity("convergence-disk", "evaluation outside the disk is refused", 0.0, _convergence_disk),
        Identity("classical-limit", "q = 0.999 against the classical series", 1e-2, _classical_limit),
    ]


class VerificationSuite:
    """Runs a list of identities over seeded random draws."""

    def __init__(
        self,
        identities: Optional[List[Identity]] = None,
        seed: int = 0,
        trials: Optional[int] = 20,
        workers: int = 1,
        trunc: Optional[Truncation] = None,
    ):
        """
        Initialize verification suite.

        Args:
            identities: Identities to check; the full catalogue when omitted
            seed: Base seed; identity i draws from default_rng([seed, i])
            trials: Random draws per identity, at least 1; None uses each identity's
                acceptance_trials
            workers: Identities checked concurrently
            trunc: Truncation policy for every evaluation
        """
        if trials is not None and trials < 1:
            raise InvalidArgument(f"trials must be at least 1, got {trials}")
        self.identities = identities if identities is not None else default_identities()
        self.seed = seed
        self.trials = trials
        self.workers = workers
        self.trunc = trunc or VERIFY_TRUNCATION
        self.stats = {
            'runs': 0,
            'identities_checked': 0,
            'identities_failed': 0,
            'trials_raised': 0
        }
        self._lock = threading.Lock()

    def _check(self, indexed) -> IdentityRecord:
        index, identity = indexed
        rng = np.random.default_rng([self.seed, index])
        count = self.trials if self.trials is not None else identity.acceptance_trials
        worst = 0.0
        for trial in range(count):
            try:
                error = float(identity.trial(rng, self.trunc))
            except Exception as e:
                logger.warning(f"{identity.identity_id}: trial {trial} raised {type(e).__name__}: {e}")
                logger.debug(traceback.format_exc())
                with self._lock:
                    self.stats['trials_raised'] += 1
                error = math.inf
            if math.isnan(error):
                error = math.inf
            worst = max(worst, error)
        passed = worst <= identity.tolerance
        if not passed:
            logger.warning(
                f"{identity.identity_id} failed: max error {worst:.3e} > {identity.tolerance:.1e}"
            )
        return IdentityRecord(identity.identity_id, count, worst, identity.tolerance, passed)

    def run(self) -> VerifyReport:
        """
        Check every identity.

        Returns:
            VerifyReport with one record per identity, in catalogue order
        """
        start_time = datetime.now()
        self.stats['runs'] += 1
        logger.info(
            f"Verifying {len(self.identities)} identities, seed={self.seed}, "
            f"trials={self.trials if self.trials is not None else 'acceptance'}"
        )

        records = ordered_map(self._check, list(enumerate(self.identities)), self.workers)
        report = VerifyReport(seed=self.seed, trials=self.trials, records=records)

        self.stats['identities_checked'] += len(records)
        self.stats['identities_failed'] += sum(not record.passed for record in records)
        duration = (datetime.now() - start_time).total_seconds()
        logger.info(f"Verification finished in {duration:.2f} seconds, passed={report.passed}")
        return report

    def get_stats(self) -> Dict:
        """Get suite statistics."""
        return self.stats.copy()
