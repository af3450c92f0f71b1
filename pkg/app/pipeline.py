import hashlib
import json
import logging
import math
import re
import time

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional

from . import __version__
from . import catalog
from .catalog import CatalogEntry
from .coefring import CoefElement
from .config import settings
from .elliptic import h11_verify
from .errors import (
    DegenerateCriticalPointError,
    IntegrabilityError,
    IntegrationConstantError,
    NotAntidifferentiableError,
    NotInvertibleError,
    NumericRefusal,
    ResidueDomainError,
    SpecParseError,
)
from .expressions import parse_coefficient, parse_open_potential, parse_rational, parse_superpotential
from .frobenius import (
    EulerWeights,
    SuperpotentialSpec,
    check_closed_wdvv,
    check_engine_agreement,
    check_eta_constant,
    check_intersection_duality,
    check_numeric_oracle,
    check_quasi_homogeneity,
    check_unit_axiom,
    derive_frobenius,
    local_form_check,
    matrix_inverse,
    raise_index,
    render_matrix,
    render_tensor,
    sample_assignment,
    third_derivatives,
)
from .laurent import Chart
from .openwdvv import (
    OpenPotential,
    check_calibration_transport,
    check_main_identity,
    derive_open,
    eta_from_F,
    open_checks,
)
from .schemas import CheckResult, Report, SpecFile

logger = logging.getLogger(__name__)

_RECOVERABLE = (
    DegenerateCriticalPointError,
    IntegrabilityError,
    IntegrationConstantError,
    NotAntidifferentiableError,
    NotInvertibleError,
    NumericRefusal,
    ResidueDomainError,
)


@dataclass
class RunOptions:
    """Per-command overrides of the settings; None keeps the configured value"""

    q_terms: Optional[int] = None
    tol: Optional[float] = None
    samples: Optional[int] = None
    seed: Optional[int] = None
    calibration: bool = True
    timings: bool = False
    engine: str = "complement"
    oracle_samples: int = 3

    @property
    def resolved_tol(self) -> float:
        return self.tol or settings.tol

    @property
    def resolved_seed(self) -> int:
        return settings.seed if self.seed is None else self.seed

    def as_dict(self) -> Dict[str, Any]:
        return {
            "q_terms": self.q_terms or settings.q_terms,
            "tol": self.resolved_tol,
            "samples": self.samples or settings.samples,
            "seed": self.resolved_seed,
        }


def input_hash(payload: Dict[str, Any]) -> str:
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


_FLOAT_MARK = "\x00float:"
_FLOAT_TOKEN = re.compile(r'"\\u0000float:([^"]*)"')


def _mark_floats(value: Any) -> Any:
    if isinstance(value, float) and math.isfinite(value):
        return _FLOAT_MARK + format(value, ".17g")
    if isinstance(value, dict):
        return {k: _mark_floats(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_mark_floats(v) for v in value]
    return value


def report_json(report: Report) -> str:
    """Canonical JSON: aliases, no empty optionals, sorted keys, floats with 17 significant digits"""
    data = _mark_floats(report.model_dump(by_alias=True, exclude_none=True))
    text = json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False)
    return _FLOAT_TOKEN.sub(lambda m: m.group(1), text)


def load_spec_file(path: Path) -> SpecFile:
    """Read a TOML or JSON spec file"""
    raw = Path(path).read_bytes()
    try:
        if Path(path).suffix.lower() == ".json":
            data = json.loads(raw.decode("utf-8"))
        else:
            data = tomllib.loads(raw.decode("utf-8"))
    except json.JSONDecodeError as e:
        raise SpecParseError(e.msg, e.lineno, e.colno) from e
    except tomllib.TOMLDecodeError as e:
        raise SpecParseError(str(e)) from e
    except UnicodeDecodeError as e:
        raise SpecParseError(f"spec file is not UTF-8: {e}") from e
    if not isinstance(data, dict):
        raise SpecParseError("spec file must hold a single table")
    return SpecFile.model_validate(data)


def chart_of(spec_file: SpecFile) -> Chart:
    return Chart(spec_file.chart, spec_file.kappa if spec_file.chart == "exp" else "1")


def euler_weights_of(spec_file: SpecFile) -> Optional[EulerWeights]:
    if spec_file.weights is None:
        return None
    if len(spec_file.weights) != len(spec_file.variables):
        raise SpecParseError("one [q, r] weight pair per variable is required", key="weights")
    if spec_file.d is None:
        raise SpecParseError("weights need the charge d", key="d")
    q = [parse_rational(pair[0], key="weights") for pair in spec_file.weights]
    r = [parse_rational(pair[1], key="weights") for pair in spec_file.weights]
    return EulerWeights(q=q, r=r, d=parse_rational(spec_file.d, key="d"))


def superpotential_of(spec_file: SpecFile, name: str = "custom") -> SuperpotentialSpec:
    if spec_file.lambda_ is None:
        raise SpecParseError("the spec file has no lambda", key="lambda")
    chart = chart_of(spec_file)
    lam = parse_superpotential(spec_file.lambda_, chart, spec_file.variables)
    try:
        return SuperpotentialSpec(lam, list(spec_file.variables), euler_weights_of(spec_file), name=name)
    except ValueError as e:
        raise SpecParseError(str(e), key="lambda") from e


def _failed(name: str, error: Exception) -> CheckResult:
    return CheckResult(name=name, passed=False, notes=[f"{type(error).__name__}: {error}"])


class OpenWDVVWorkflow:
    """Derive and verify open WDVV solutions from superpotentials"""

    def __init__(self):
        self._timings: Dict[str, float] = {}

    @contextmanager
    def _timed(self, label: str) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            self._timings[label] = round(time.perf_counter() - start, 6)

    # derivation

    def derive_catalog(self, name: str, n: Optional[int] = None, options: Optional[RunOptions] = None) -> Report:
        entry = catalog.get(name, n)
        options = options or RunOptions()
        if entry.mode == "numeric":
            return self.elliptic_check(options, source=f"catalog:{entry.label()}", entry=entry)
        payload = {"catalog": entry.label(), "options": options.as_dict(), "calibration": options.calibration}
        return self.derive(entry.spec, f"catalog:{entry.label()}", input_hash(payload), options, entry)

    def derive_file(self, path: Path, options: Optional[RunOptions] = None) -> Report:
        spec_file = load_spec_file(path)
        options = self._merge_numeric(spec_file, options or RunOptions())
        if spec_file.mode == "numeric":
            raise SpecParseError("numeric mode is available for the built-in genus-one family only", key="mode")
        spec = superpotential_of(spec_file, name=Path(path).stem)
        payload = {"spec": spec_file.model_dump(by_alias=True), "options": options.as_dict()}
        return self.derive(spec, str(path), input_hash(payload), options)

    def derive(
        self,
        spec: SuperpotentialSpec,
        source: str,
        digest: str,
        options: RunOptions,
        entry: Optional[CatalogEntry] = None,
    ) -> Report:
        """
        Full derivation and verification for one superpotential.

        Args:
            spec: superpotential with flat-variable names
            source: catalog label or file path for the report
            digest: hash of the canonical input
            options: per-command overrides
            entry: catalog entry, enables the comparison with the printed solution

        Returns:
            Report with derived data, check results and calibration comparisons
        """
        self._timings = {}
        names = spec.names()
        report = Report(
            tool_version=__version__,
            input_hash=digest,
            source=source,
            mode="exact",
            chart=spec.chart.describe(),
            variables=list(spec.varnames),
            lambda_=spec.lam.render(names),
            lambda_human=spec.lam.render_human(names),
            euler_weights=spec.euler_weights.as_dict() if spec.euler_weights else None,
            numeric=options.as_dict(),
        )
        logger.info(f"Deriving {source}")
        try:
            with self._timed("frobenius"):
                frob = derive_frobenius(spec, options.engine)
        except _RECOVERABLE as e:
            logger.error(f"Closed derivation failed for {source}: {e}", exc_info=True)
            report.checks.append(_failed("closed_derivation", e))
            return self._finish(report, options)
        report.warnings.extend(frob.warnings)
        report.eta = render_matrix(frob.eta, names)
        report.c = render_tensor(frob.c_lower, names)
        report.F = frob.F.render(names)
        if frob.g_upper is not None:
            report.intersection_form_upper = render_matrix(frob.g_upper, names)

        with self._timed("closed_checks"):
            report.checks.append(check_eta_constant(frob.eta, names))
            report.checks.append(check_unit_axiom(frob.eta, frob.c_lower, names))
            report.checks.append(check_closed_wdvv(frob.c_raised, names))
            if spec.euler_weights is not None:
                report.checks.append(check_quasi_homogeneity(frob.F, spec.euler_weights, names))

        try:
            with self._timed("open"):
                open_data = derive_open(spec, frob)
        except _RECOVERABLE as e:
            logger.error(f"Open derivation failed for {source}: {e}", exc_info=True)
            report.checks.append(check_main_identity(spec, frob.c_raised))
            report.checks.append(_failed("open_derivation", e))
            return self._finish(report, options)
        report.Lambda = open_data.Lambda.render(names)
        report.Lambda_human = open_data.Lambda.render_human(names)
        report.Omega_tilde = open_data.OmegaTilde.render(names)
        report.Omega = open_data.Omega.render(names)
        report.Omega_human = open_data.Omega.render_human(names)
        report.checks.extend(open_data.reports)

        with self._timed("numeric"):
            report.checks.extend(self._numeric_checks(spec, frob, options))
        if options.engine == "complement":
            with self._timed("engine_agreement"):
                report.checks.append(check_engine_agreement(spec, frob.eta, frob.c_lower))

        if entry is not None:
            self._compare(report, entry, frob.F, open_data.Omega, spec, options)
        return self._finish(report, options)

    def _numeric_checks(self, spec: SuperpotentialSpec, frob, options: RunOptions) -> List[CheckResult]:
        tol = options.resolved_tol
        out: List[CheckResult] = []
        oracle: List[CheckResult] = []
        for k in range(options.oracle_samples):
            assignment = sample_assignment(spec.n, options.resolved_seed, k)
            try:
                oracle.append(check_numeric_oracle(spec, frob.eta, frob.c_lower, assignment, tol))
                if k == 0:
                    out.append(local_form_check(spec, assignment, tol))
                    if frob.g_upper is not None:
                        out.append(check_intersection_duality(spec, frob.g_upper, assignment, max(tol, 1e-7)))
            except (NumericRefusal, DegenerateCriticalPointError) as e:
                logger.warning(f"{spec.name}: numeric sample {k} refused ({e})")
                oracle.append(CheckResult(name="numeric_oracle", passed=True, notes=[f"sample {k} refused: {e}"]))
        if oracle:
            worst = max((c.max_residual or 0.0) for c in oracle)
            out.append(
                CheckResult(
                    name="numeric_oracle",
                    passed=all(c.passed for c in oracle),
                    residuals=[r for c in oracle for r in c.residuals],
                    max_residual=worst,
                    notes=[n for c in oracle for n in c.notes] + [f"{len(oracle)} seeded samples"],
                )
            )
        return out

    def _compare(
        self,
        report: Report,
        entry: CatalogEntry,
        F: CoefElement,
        Omega: OpenPotential,
        spec: SuperpotentialSpec,
        options: RunOptions,
    ):
        if not options.calibration:
            report.warnings.append("calibration comparison disabled")
            return
        report.calibration = catalog.compare_with_printed(entry, F, Omega)
        for comparison in report.calibration:
            if not comparison.matches:
                message = f"{entry.label()}: transported {comparison.target} differs from the printed one"
                logger.warning(message)
                report.warnings.append(message)
        if not entry.calibration.is_identity():
            c = entry.calibration
            report.checks.append(
                check_calibration_transport(F, Omega, spec, c.scales, c.F_scale, c.Omega_scale)
            )

    def _finish(self, report: Report, options: RunOptions) -> Report:
        if options.timings:
            report.timings = dict(self._timings)
        failed = [c.name for c in report.checks if not c.passed]
        if failed:
            logger.warning(f"{report.source}: failed checks {failed}")
        else:
            logger.info(f"{report.source}: all {len(report.checks)} checks passed")
        return report

    # verification of user-supplied potentials

    def verify_file(self, path: Path, options: Optional[RunOptions] = None) -> Report:
        spec_file = load_spec_file(path)
        options = self._merge_numeric(spec_file, options or RunOptions())
        payload = {"spec": spec_file.model_dump(by_alias=True), "options": options.as_dict(), "verify": True}
        return self.verify(spec_file, str(path), input_hash(payload), options)

    def verify(self, spec_file: SpecFile, source: str, digest: str, options: RunOptions) -> Report:
        """Checks on a given (F, Omega) without derivation"""
        if spec_file.F is None or spec_file.Omega is None:
            raise SpecParseError("verify needs both F and Omega", key="F" if spec_file.F is None else "Omega")
        self._timings = {}
        variables = list(spec_file.variables)
        names = {j + 1: v for j, v in enumerate(variables)}
        n = len(variables)
        chart = chart_of(spec_file)
        F = parse_coefficient(spec_file.F, variables, key="F")
        Omega = parse_open_potential(spec_file.Omega, chart, variables)
        report = Report(
            tool_version=__version__,
            input_hash=digest,
            source=source,
            mode="verify",
            chart=chart.describe(),
            variables=variables,
            F=F.render(names),
            Omega=Omega.render(names),
            Omega_human=Omega.render_human(names),
            numeric=options.as_dict(),
        )
        logger.info(f"Step 1: closed checks for {source}")
        eta = eta_from_F(F, n)
        report.eta = render_matrix(eta, names)
        c_lower = third_derivatives(F, n)
        report.c = render_tensor(c_lower, names)
        try:
            c_raised = raise_index(matrix_inverse(eta), c_lower)
        except (NotInvertibleError, ZeroDivisionError) as e:
            logger.error(f"eta of {source} is not invertible", exc_info=True)
            report.checks.append(_failed("eta_invertible", e))
            return self._finish(report, options)
        report.checks.append(check_eta_constant(eta, names))
        report.checks.append(check_closed_wdvv(c_raised, names))

        logger.info(f"Step 2: open checks for {source}")
        with self._timed("open_checks"):
            report.checks.extend(open_checks(F, Omega, eta, n, names))
        if spec_file.lambda_ is not None:
            spec = superpotential_of(spec_file, name=Path(source).stem)
            report.lambda_ = spec.lam.render(names)
            report.checks.append(check_main_identity(spec, c_raised))
        weights = euler_weights_of(spec_file)
        if weights is not None:
            report.euler_weights = weights.as_dict()
            report.checks.append(check_quasi_homogeneity(F, weights, names))
        return self._finish(report, options)

    # genus one

    def elliptic_check(
        self, options: Optional[RunOptions] = None, source: str = "catalog:h1_1", entry: Optional[CatalogEntry] = None
    ) -> Report:
        options = options or RunOptions()
        entry = entry or catalog.get("h1_1")
        self._timings = {}
        payload = {"catalog": entry.label(), "options": options.as_dict()}
        with self._timed("elliptic"):
            result = h11_verify(
                q_terms=options.q_terms,
                tol=options.tol,
                samples=options.samples,
                seed=options.resolved_seed,
            )
        printed = entry.printed_solution
        report = Report(
            tool_version=__version__,
            input_hash=input_hash(payload),
            source=source,
            mode="numeric",
            chart="affine p",
            variables=["t1", "t2", "t3"],
            lambda_="t1 + (pi*I/4)*t2^2*d^2/dp^2 log theta1(p, t3)",
            F="t1^2*t3/2 + t1*t2^2/2 - (pi*I/48)*t2^4*E2(t3)",
            Omega="t1*p + (pi*I/4)*t2^2*d/dp log theta1(p, t3)",
            Omega_tilde="0",
            euler_weights=entry.euler_weights.as_dict() if entry.euler_weights else None,
            checks=result.checks,
            warnings=list(result.notes) + (list(printed.notes) if printed else []),
            numeric={**result.settings, "samples_table": result.table},
        )
        return self._finish(report, options)

    @staticmethod
    def _merge_numeric(spec_file: SpecFile, options: RunOptions) -> RunOptions:
        """Flags win over the file's numeric block, which wins over settings"""
        block = spec_file.numeric
        fields = spec_file.model_fields_set
        from_file = "numeric" in fields
        return RunOptions(
            q_terms=options.q_terms or (block.q_terms if from_file else None),
            tol=options.tol or (block.tol if from_file else None),
            samples=options.samples or (block.samples if from_file else None),
            seed=options.seed if options.seed is not None else (block.seed if from_file else None),
            calibration=options.calibration,
            timings=options.timings,
            engine=options.engine,
            oracle_samples=options.oracle_samples,
        )


# Global instance
workflow = OpenWDVVWorkflow()
