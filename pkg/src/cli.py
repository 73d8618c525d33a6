"""
Command Line Module
Point evaluation, grid tabulation, identity verification and convergence
scans, emitted as JSON or CSV.
"""

import argparse
import dataclasses
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from . import kober, qcore, qml
from .config import Config
from .exceptions import InvalidArgument, NonConvergence, NumericalError, QCalculusError
from .kober import KoberParams
from .qcore import INFINITY, QBase
from .qml import ExtendedMLParams
from .series import EvalResult, Truncation
from .utils import ensure_directory, ordered_map, setup_logging
from .verify import VERIFY_TRUNCATION, VerificationSuite

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = "config/config.json"

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

TABLE_COLUMNS = ["sweep_param", "value_re", "value_im", "terms_used", "converged"]
SCAN_COLUMNS = ["fraction", "u", "terms_used", "empirical_ratio", "theoretical_ratio", "converged"]
# Fractions of the radius accepted by scan; points at or beyond 1 are flagged, not evaluated
SCAN_FRACTION_LIMIT = 1.05

PARAMETERS = (
    "q", "u", "eta", "kappa", "sigma", "c", "nu", "mu", "lam", "order",
    "m", "tau", "s", "t", "x", "xi", "zeta", "rho", "kind",
)

Values = Dict[str, object]


def parse_complex(text: str) -> complex:
    """
    Parse a real or complex literal such as "2", "-1.5e-3", "1+2i" or "0.5-0.25i".

    Raises:
        InvalidArgument: If the text is not a finite number
    """
    cleaned = str(text).strip().replace(" ", "")
    if cleaned.endswith("i"):
        cleaned = cleaned[:-1] + "j"
    try:
        value = complex(cleaned)
    except ValueError:
        raise InvalidArgument(f"Cannot parse {text!r} as a number (use a+bi syntax)") from None
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise InvalidArgument(f"Value must be finite, got {text!r}")
    return value


def _real(value: complex, name: str) -> float:
    value = complex(value)
    if value.imag != 0:
        raise InvalidArgument(f"--{name} must be real, got {value}")
    return value.real


def _parse_value(name: str, text: str):
    """Typed value of a --name flag."""
    if name == "q":
        return QBase(_real(parse_complex(text), "q"))
    if name == "kind":
        return str(text)
    if name == "m":
        value = _real(parse_complex(text), "m")
        if value != int(value) or value < 0:
            raise InvalidArgument(f"--m must be a nonnegative integer, got {text!r}")
        return int(value)
    if name == "order":
        if str(text).strip().lower() in ("inf", "infinity"):
            return INFINITY
        value = parse_complex(text)
        if value.imag == 0 and value.real == int(value.real) and value.real >= 0:
            return int(value.real)
        return value
    return parse_complex(text)


@dataclass(frozen=True)
class Target:
    """A public operation reachable from the command line."""

    name: str
    params: Tuple[str, ...]
    call: Callable[[Values, Truncation], Union[EvalResult, complex, float]]
    defaults: Dict[str, str] = field(default_factory=dict)

    def evaluate(self, bindings: Dict[str, str], trunc: Truncation) -> EvalResult:
        """Parse the bound flags and run the operation."""
        values: Values = {}
        for name in self.params:
            raw = bindings.get(name, self.defaults.get(name))
            if raw is None:
                raise InvalidArgument(f"{self.name} needs --{name.replace('_', '-')}")
            values[name] = raw if not isinstance(raw, str) else _parse_value(name, raw)
        result = self.call(values, trunc)
        if isinstance(result, EvalResult):
            return result
        return EvalResult(complex(result), 0, 0.0, True)


def _extended(v: Values) -> ExtendedMLParams:
    return ExtendedMLParams(eta=v["eta"], kappa=v["kappa"], sigma=v["sigma"], c=v["c"])


def _kober(v: Values) -> KoberParams:
    return KoberParams(nu=v["nu"], mu=v["mu"])


EXTENDED = ("eta", "kappa", "sigma", "c", "q")

TARGETS: Dict[str, Target] = {
    target.name: target
    for target in (
        Target("q_number", ("u", "q"), lambda v, tr: qcore.q_number(v["u"], v["q"])),
        Target(
            "q_pochhammer",
            ("lam", "q", "order"),
            lambda v, tr: qcore.q_pochhammer(v["lam"], v["q"], v["order"], tr),
            {"order": "inf"},
        ),
        Target(
            "q_power_difference",
            ("s", "t", "q", "order"),
            lambda v, tr: qcore.q_power_difference(
                _real(v["s"], "s"), _real(v["t"], "t"), v["q"], v["order"], tr
            ),
        ),
        Target("q_binomial", ("tau", "m", "q"), lambda v, tr: qcore.q_binomial(v["tau"], v["m"], v["q"])),
        Target("q_gamma", ("u", "q"), lambda v, tr: qcore.q_gamma(v["u"], v["q"], tr)),
        Target("q_beta", ("eta", "kappa", "q"), lambda v, tr: qcore.q_beta(v["eta"], v["kappa"], v["q"], tr)),
        Target(
            "q_exponential",
            ("u", "q", "kind"),
            lambda v, tr: qcore.q_exponential(v["u"], v["q"], v["kind"], tr),
            {"kind": "big"},
        ),
        Target(
            "ml_classical",
            ("u", "eta", "kappa", "sigma"),
            lambda v, tr: qml.ml_classical(
                v["u"], qml.ClassicalMLParams(v["eta"], v["kappa"], v["sigma"]), tr
            ),
            {"sigma": "1"},
        ),
        Target(
            "q_mittag_leffler",
            ("u", "eta", "kappa", "q"),
            lambda v, tr: qml.q_mittag_leffler(v["u"], v["eta"], v["kappa"], v["q"], tr),
        ),
        Target(
            "q_ml_prabhakar",
            ("u", "eta", "kappa", "sigma", "q"),
            lambda v, tr: qml.q_ml_prabhakar(v["u"], v["eta"], v["kappa"], v["sigma"], v["q"], tr),
        ),
        Target(
            "q_ml_extended",
            ("u",) + EXTENDED,
            lambda v, tr: qml.q_ml_extended(v["u"], _extended(v), v["q"], tr),
        ),
        Target("convergence_radius", ("eta", "q"), lambda v, tr: qml.convergence_radius(v["eta"], v["q"])),
        Target(
            "beta_ratio",
            ("sigma", "c", "m", "q"),
            lambda v, tr: qml.beta_ratio(v["sigma"], v["c"], v["m"], v["q"]),
        ),
        Target(
            "pochhammer_ratio",
            ("sigma", "c", "m", "q"),
            lambda v, tr: qml.pochhammer_ratio(v["sigma"], v["c"], v["m"], v["q"]),
        ),
        Target(
            "term_ratio",
            ("u", "m") + EXTENDED,
            lambda v, tr: qml.term_ratio(v["u"], _extended(v), v["q"], v["m"]),
        ),
        Target(
            "recurrence_rhs",
            ("u",) + EXTENDED,
            lambda v, tr: qml.recurrence_rhs(v["u"], _extended(v), v["q"], tr),
        ),
        Target(
            "integral_representation",
            ("u",) + EXTENDED,
            lambda v, tr: qml.integral_representation(v["u"], _extended(v), v["q"], tr),
        ),
        Target(
            "derivative_closed_form",
            ("u", "lam", "m") + EXTENDED,
            lambda v, tr: qml.derivative_closed_form(v["u"], v["lam"], _extended(v), v["m"], v["q"], tr),
        ),
        Target(
            "derivative_direct",
            ("u", "lam", "m") + EXTENDED,
            lambda v, tr: qml.derivative_direct(v["u"], v["lam"], _extended(v), v["m"], v["q"], tr),
        ),
        Target(
            "beta_weighted_integral",
            ("x", "xi", "zeta", "rho") + EXTENDED,
            lambda v, tr: qml.beta_weighted_integral(
                v["x"], v["xi"], v["zeta"], v["rho"], _extended(v), v["q"], tr
            ),
        ),
        Target(
            "beta_weighted_integral_direct",
            ("x", "xi", "zeta", "rho") + EXTENDED,
            lambda v, tr: qml.beta_weighted_integral_direct(
                v["x"], v["xi"], v["zeta"], v["rho"], _extended(v), v["q"], tr
            ),
        ),
        Target(
            "laplace_closed_form",
            ("x", "rho", "s") + EXTENDED,
            lambda v, tr: qml.laplace_closed_form(v["x"], v["rho"], v["s"], _extended(v), v["q"], tr),
        ),
        Target(
            "laplace_direct",
            ("x", "rho", "s") + EXTENDED,
            lambda v, tr: qml.laplace_direct(v["x"], v["rho"], v["s"], _extended(v), v["q"], tr),
        ),
        Target(
            "kober_image_power",
            ("m", "nu", "mu", "q", "kind"),
            lambda v, tr: kober.kober_image_power(v["m"], _kober(v), v["q"], v["kind"]),
            {"kind": "integral"},
        ),
        Target(
            "kober_I_extended",
            ("u", "nu", "mu") + EXTENDED,
            lambda v, tr: kober.kober_I_extended(v["u"], _extended(v), _kober(v), v["q"], tr),
        ),
        Target(
            "kober_D_extended",
            ("u", "nu", "mu") + EXTENDED,
            lambda v, tr: kober.kober_D_extended(v["u"], _extended(v), _kober(v), v["q"], tr),
        ),
        Target(
            "kober_integral_extended_direct",
            ("u", "nu", "mu") + EXTENDED,
            lambda v, tr: kober.kober_integral_extended_direct(
                _real(v["u"], "u"), _extended(v), _kober(v), v["q"], tr
            ),
        ),
    )
}

ALIASES = {"qml_extended": "q_ml_extended"}


def get_target(name: str) -> Target:
    """Look up a target by name or alias."""
    target = TARGETS.get(ALIASES.get(name, name))
    if target is None:
        raise InvalidArgument(f"Unknown target {name!r}; choose from {sorted(TARGETS)}")
    return target


@dataclass(frozen=True)
class TableSpec:
    """A one-parameter sweep of a target."""

    target: str
    param_bindings: Dict[str, str]
    sweep: str
    start: float
    stop: float
    count: int
    log: bool = False
    format: str = "csv"

    def __post_init__(self):
        target = get_target(self.target)
        if self.sweep not in target.params:
            raise InvalidArgument(
                f"--sweep {self.sweep!r} is not a parameter of {target.name} {target.params}"
            )
        if self.sweep in ("kind", "m", "order"):
            raise InvalidArgument(f"--sweep {self.sweep!r} is not a continuous parameter")
        if self.count < 2:
            raise InvalidArgument(f"--count must be at least 2, got {self.count}")
        if not self.start < self.stop:
            raise InvalidArgument(f"--start must be below --stop, got {self.start} >= {self.stop}")
        if self.log and self.start <= 0:
            raise InvalidArgument("A log grid needs --start > 0")
        if self.format not in ("csv", "json"):
            raise InvalidArgument(f"table supports csv or json, got {self.format!r}")
        # Fixed parameters must be usable before any row runs
        fixed: Values = {}
        for name in target.params:
            if name == self.sweep:
                continue
            raw = self.param_bindings.get(name, target.defaults.get(name))
            if raw is None:
                raise InvalidArgument(f"{target.name} needs --{name}")
            fixed[name] = _parse_value(name, raw)
        if {"eta", "kappa", "sigma", "c"} <= fixed.keys():
            _extended(fixed)
        if target.name == "ml_classical" and {"eta", "kappa", "sigma"} <= fixed.keys():
            qml.ClassicalMLParams(fixed["eta"], fixed["kappa"], fixed["sigma"])

    def grid(self) -> np.ndarray:
        if self.log:
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)


def _emit(text: str, out: Optional[str]):
    if out:
        ensure_directory(str(Path(out).parent))
        with open(out, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
        logger.info(f"Wrote {out}")
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _render(rows: List[Dict], columns: List[str], fmt: str, integer_columns: Sequence[str]) -> str:
    if fmt == "json":
        return json.dumps(rows) + "\n"
    frame = pd.DataFrame(rows, columns=columns)
    for column in integer_columns:
        frame[column] = pd.array([row[column] for row in rows], dtype="Int64")
    # Lowercase flags match the JSON rendering
    frame["converged"] = ["true" if row["converged"] else "false" for row in rows]
    return frame.to_csv(index=False, float_format="%.17g", lineterminator="\n")


def cmd_eval(target_name: str, bindings: Dict[str, str], trunc: Truncation) -> EvalResult:
    """Evaluate one target at the bound parameters."""
    target = get_target(target_name)
    logger.info(f"Evaluating {target.name} with {bindings}")
    return target.evaluate(bindings, trunc)


def cmd_table(spec: TableSpec, trunc: Truncation, workers: int = 1) -> Tuple[List[Dict], int]:
    """
    Tabulate a target over a sweep.

    Returns:
        Tuple of (rows in sweep order, number of failed rows)
    """
    target = get_target(spec.target)

    def row(point: float) -> Dict:
        bindings = dict(spec.param_bindings)
        bindings[spec.sweep] = repr(float(point))
        record = {"sweep_param": float(point), "value_re": None, "value_im": None,
                  "terms_used": None, "converged": False}
        try:
            result = target.evaluate(bindings, trunc)
        except (QCalculusError, ArithmeticError) as e:
            logger.warning(f"{target.name} failed at {spec.sweep}={point}: {e}")
            return record
        record.update(
            value_re=result.value.real,
            value_im=result.value.imag,
            terms_used=result.terms_used,
            converged=result.converged,
        )
        return record

    rows = ordered_map(row, spec.grid(), workers)
    failed = sum(r["value_re"] is None for r in rows)
    logger.info(f"Tabulated {len(rows)} rows, {failed} failed")
    return rows, failed


def cmd_verify(seed: int, trials: Optional[int], trunc: Truncation = VERIFY_TRUNCATION, workers: int = 1):
    """Run the identity suite and return its report."""
    return VerificationSuite(seed=seed, trials=trials, workers=workers, trunc=trunc).run()


def cmd_scan(
    eta: float,
    q: QBase,
    fractions: Sequence[float],
    kappa: complex = 1.0,
    sigma: complex = 1.0,
    c: complex = 2.0,
    trunc: Optional[Truncation] = None,
) -> List[Dict]:
    """
    Convergence scan at |u| = fraction * (1 - q)**(-eta).

    Points at or beyond the radius are flagged unconverged without evaluation.
    """
    p = ExtendedMLParams(eta=eta, kappa=kappa, sigma=sigma, c=c)
    radius = qml.convergence_radius(p.eta, q)
    rows = []
    for fraction in fractions:
        fraction = float(fraction)
        if not 0 <= fraction < SCAN_FRACTION_LIMIT:
            raise InvalidArgument(f"Fractions must lie in [0, {SCAN_FRACTION_LIMIT}), got {fraction}")
        u = fraction * radius
        row = {"fraction": fraction, "u": u, "terms_used": None, "empirical_ratio": None,
               "theoretical_ratio": fraction, "converged": False}
        if fraction < 1:
            try:
                result = qml.q_ml_extended(u, p, q, trunc)
                row["terms_used"] = result.terms_used
                row["converged"] = result.converged
                row["empirical_ratio"] = qml.term_ratio(u, p, q, max(result.terms_used - 2, 0))
            except NonConvergence as e:
                logger.warning(f"Scan point {fraction} did not converge: {e}")
                row["terms_used"] = e.terms_used
        rows.append(row)
    return rows


def _parameter_parser() -> argparse.ArgumentParser:
    """Flags shared by every subcommand."""
    parent = argparse.ArgumentParser(add_help=False)
    for name in PARAMETERS:
        parent.add_argument(f"--{name}", type=str, default=None, help=f"Value of {name}")
    parent.add_argument("--tol", type=float, help="Absolute and relative tolerance")
    parent.add_argument("--max-terms", type=int, help="Term budget of every series")
    parent.add_argument("--format", choices=["csv", "json", "text"], help="Output format")
    parent.add_argument("--out", type=str, help="Output path (default stdout)")
    parent.add_argument("--config", type=str, help="Path to configuration file")
    parent.add_argument("--verbose", action="store_true", help="Log at INFO level")
    parent.add_argument("--debug", action="store_true", help="Log at DEBUG level")
    return parent


def build_parser() -> argparse.ArgumentParser:
    parent = _parameter_parser()
    parser = argparse.ArgumentParser(
        prog="qmittag", description="q-calculus and extended q-Mittag-Leffler numerics"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    evaluate = commands.add_parser("eval", parents=[parent], help="Evaluate one target")
    evaluate.add_argument("target", help="Operation name")

    table = commands.add_parser("table", parents=[parent], help="Tabulate a target over a sweep")
    table.add_argument("target", help="Operation name")
    table.add_argument("--sweep", required=True, help="Parameter to sweep")
    table.add_argument("--start", type=float, required=True)
    table.add_argument("--stop", type=float, required=True)
    table.add_argument("--count", type=int, default=20)
    table.add_argument("--log", action="store_true", help="Logarithmic grid")

    verify = commands.add_parser("verify", parents=[parent], help="Run the identity suite")
    verify.add_argument("--seed", type=int)
    verify.add_argument("--trials", type=int)
    verify.add_argument(
        "--acceptance", action="store_true", help="Use each identity's acceptance trial count"
    )

    scan = commands.add_parser("scan", parents=[parent], help="Convergence scan inside the disk")
    scan.add_argument("--fractions", type=str, help="Comma separated fractions of the radius")
    return parser


def _verify_trials(args: argparse.Namespace, section: Dict) -> Optional[int]:
    if args.acceptance:
        if args.trials is not None:
            raise InvalidArgument("--acceptance and --trials are mutually exclusive")
        return None
    return args.trials if args.trials is not None else section.get("trials", 20)


def _load_config(path: Optional[str]) -> Config:
    if path:
        return Config(path)
    if Path(DEFAULT_CONFIG_PATH).exists():
        return Config(DEFAULT_CONFIG_PATH)
    return Config()


def _truncation(args: argparse.Namespace, config: Config) -> Truncation:
    trunc = config.truncation()
    if args.tol is not None:
        trunc = dataclasses.replace(trunc, abs_tol=args.tol, rel_tol=args.tol)
    if args.max_terms is not None:
        trunc = dataclasses.replace(trunc, max_terms=args.max_terms)
    return trunc


def _bindings(args: argparse.Namespace) -> Dict[str, str]:
    return {name: getattr(args, name) for name in PARAMETERS if getattr(args, name) is not None}


def _run(args: argparse.Namespace, config: Config) -> int:
    trunc = _truncation(args, config)

    if args.command == "eval":
        if args.format not in (None, "json"):
            raise InvalidArgument("eval prints JSON only")
        result = cmd_eval(args.target, _bindings(args), trunc)
        _emit(json.dumps(result.to_dict()) + "\n", args.out)
        return EXIT_OK

    if args.command == "table":
        spec = TableSpec(
            target=args.target,
            param_bindings=_bindings(args),
            sweep=args.sweep,
            start=args.start,
            stop=args.stop,
            count=args.count,
            log=args.log,
            format=args.format or "csv",
        )
        rows, failed = cmd_table(spec, trunc, config.get("table", {}).get("workers", 1))
        _emit(_render(rows, TABLE_COLUMNS, spec.format, ["terms_used"]), args.out)
        return EXIT_NUMERICAL if failed == len(rows) else EXIT_OK

    if args.command == "verify":
        fmt = args.format or "text"
        if fmt not in ("text", "json"):
            raise InvalidArgument(f"verify supports text or json, got {fmt!r}")
        section = config.get("verify", {})
        explicit = args.tol is not None or args.max_terms is not None
        report = cmd_verify(
            seed=args.seed if args.seed is not None else section.get("seed", 0),
            trials=_verify_trials(args, section),
            trunc=trunc if explicit else VERIFY_TRUNCATION,
            workers=section.get("workers", 1),
        )
        text = json.dumps(report.to_dict()) if fmt == "json" else report.to_text()
        _emit(text + "\n", args.out)
        return EXIT_OK if report.passed else EXIT_VERIFY_FAILED

    if args.command == "scan":
        fmt = args.format or "csv"
        if fmt not in ("csv", "json"):
            raise InvalidArgument(f"scan supports csv or json, got {fmt!r}")
        if args.fractions:
            fractions = [_real(parse_complex(part), "fractions") for part in args.fractions.split(",")]
        else:
            fractions = config.get("scan", {}).get("fractions", [0.5])
        bindings = _bindings(args)
        for name in ("eta", "q"):
            if name not in bindings:
                raise InvalidArgument(f"scan needs --{name}")
        rows = cmd_scan(
            eta=_real(parse_complex(bindings["eta"]), "eta"),
            q=_parse_value("q", bindings["q"]),
            fractions=fractions,
            kappa=parse_complex(bindings.get("kappa", "1")),
            sigma=parse_complex(bindings.get("sigma", "1")),
            c=parse_complex(bindings.get("c", "2")),
            trunc=trunc,
        )
        _emit(_render(rows, SCAN_COLUMNS, fmt, ["terms_used"]), args.out)
        return EXIT_OK

    raise InvalidArgument(f"Unknown command {args.command!r}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run one subcommand and return its exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        config = _load_config(args.config)
    except (OSError, ValueError) as e:
        print(f"error: cannot load configuration: {e}", file=sys.stderr)
        return EXIT_USAGE

    log_config = config.get("logging", {})
    level = "DEBUG" if args.debug else "INFO" if args.verbose else log_config.get("level", "WARNING")
    setup_logging(level=level, log_file=log_config.get("file"), format_string=log_config.get("format"))

    try:
        return _run(args, config)
    except InvalidArgument as e:
        logger.error(f"Invalid argument: {e}")
        return EXIT_USAGE
    except NumericalError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_NUMERICAL
    except ArithmeticError as e:
        logger.error(f"Floating-point failure ({type(e).__name__}): {e}")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
