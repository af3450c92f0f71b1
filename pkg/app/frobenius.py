"""
Frobenius structure of a Landau-Ginzburg superpotential.

eta, c and the intersection form come from residue sums over the critical
points of lam; F is rebuilt from c by successive closed-form potentials.
"""
from __future__ import annotations

import cmath
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .coefring import CoefElement, ONE, ZERO, as_fraction
from .config import settings
from .errors import (
    DegenerateCriticalPointError,
    ExpansionError,
    IntegrabilityError,
    NotInvertibleError,
    NumericRefusal,
    ResidueDomainError,
    UnknownVariableError,
)
from .laurent import Chart, LaurentPoly, RatFunc, fractional_power_coefficient
from .residue import ResidueRequest, numeric_critical_points, residue_numeric, residue_sum
from .schemas import CheckResult, Residual

logger = logging.getLogger(__name__)

Matrix = List[List[CoefElement]]
Tensor3 = List[List[List[CoefElement]]]


@dataclass
class EulerWeights:
    """E = sum((1 - q_i) t^i + r_i) d/dt^i with conformal dimension d"""

    q: List[Fraction]
    r: List[Fraction]
    d: Fraction

    def __post_init__(self):
        if len(self.q) != len(self.r):
            raise ValueError("q and r weights must have the same length")
        self.q = [as_fraction(x) for x in self.q]
        self.r = [as_fraction(x) for x in self.r]
        self.d = as_fraction(self.d)

    def components(self) -> List[CoefElement]:
        return [
            CoefElement.var(i + 1) * (1 - q) + CoefElement.const(r)
            for i, (q, r) in enumerate(zip(self.q, self.r))
        ]

    def apply(self, f: CoefElement) -> CoefElement:
        total = ZERO
        for i, e in enumerate(self.components()):
            total = total + e * f.derive(i + 1)
        return total

    def as_dict(self) -> Dict[str, object]:
        return {
            "q": [str(x) for x in self.q],
            "r": [str(x) for x in self.r],
            "d": str(self.d),
        }


@dataclass
class SuperpotentialSpec:
    lam: LaurentPoly
    varnames: List[str]
    euler_weights: Optional[EulerWeights] = None
    phi: str = "dp"
    name: str = "custom"

    def __post_init__(self):
        if not self.varnames:
            raise ValueError("a superpotential needs at least one flat variable")
        if self.lam.is_zero() or self.lam.is_p_free():
            raise ValueError("the superpotential must depend on the chart variable")
        if self.phi != "dp":
            raise ValueError(f"Unsupported primary differential {self.phi!r}")
        unknown = [j for j in self.lam.variables() if not 1 <= j <= self.n]
        if unknown:
            raise UnknownVariableError(f"superpotential uses undeclared variables t{sorted(unknown)}")
        if self.euler_weights is not None and len(self.euler_weights.q) != self.n:
            raise ValueError("one Euler weight pair per flat variable is required")
        if self.lam.derive_t(1) != LaurentPoly.const(self.chart, 1):
            logger.warning(f"{self.name}: d lam / d t1 is not 1, the unit direction is not t1")

    @property
    def chart(self) -> Chart:
        return self.lam.chart

    @property
    def n(self) -> int:
        return len(self.varnames)

    def names(self) -> Dict[int, str]:
        return {i + 1: name for i, name in enumerate(self.varnames)}

    def partials(self) -> List[LaurentPoly]:
        return [self.lam.derive_t(j) for j in range(1, self.n + 1)]


@dataclass
class FrobeniusData:
    eta: Matrix
    eta_inv: Matrix
    c_lower: Tensor3
    c_raised: Tensor3
    F: CoefElement
    g_upper: Optional[Matrix] = None
    warnings: List[str] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.eta)


def exact_residual(index: Sequence[int], value: CoefElement, names: Optional[Mapping[int, str]] = None) -> Residual:
    return Residual(index=list(index), value=value.render(names))


def render_matrix(m: Matrix, names: Optional[Mapping[int, str]] = None) -> List[List[str]]:
    return [[x.render(names) for x in row] for row in m]


def render_tensor(c: Tensor3, names: Optional[Mapping[int, str]] = None) -> List[List[List[str]]]:
    return [render_matrix(plane, names) for plane in c]


# residue tensors


def residue_tensor_entry(spec: SuperpotentialSpec, indices: Sequence[int], engine: str = "complement") -> CoefElement:
    """sum over dlam = 0 of prod_i d_i lam / lam' dp"""
    partials = spec.partials()
    numerator = LaurentPoly.const(spec.chart, 1)
    for i in indices:
        numerator = numerator * partials[i - 1]
    integrand = RatFunc(numerator, spec.lam.d_dp())
    return residue_sum(ResidueRequest(integrand, spec.lam), engine)


def _symmetric_entries(spec: SuperpotentialSpec, rank: int, engine: str) -> Dict[Tuple[int, ...], CoefElement]:
    keys = list(combinations_with_replacement(range(1, spec.n + 1), rank))
    with ThreadPoolExecutor(max_workers=settings.threads) as pool:
        values = list(pool.map(lambda key: residue_tensor_entry(spec, key, engine), keys))
    return dict(zip(keys, values))


def compute_eta(spec: SuperpotentialSpec, engine: str = "complement") -> Matrix:
    entries = _symmetric_entries(spec, 2, engine)
    n = spec.n
    return [[entries[tuple(sorted((i, j)))] for j in range(1, n + 1)] for i in range(1, n + 1)]


def compute_c(spec: SuperpotentialSpec, engine: str = "complement") -> Tensor3:
    entries = _symmetric_entries(spec, 3, engine)
    n = spec.n
    return [
        [[entries[tuple(sorted((i, j, k)))] for k in range(1, n + 1)] for j in range(1, n + 1)]
        for i in range(1, n + 1)
    ]


# linear algebra over the coefficient ring


def determinant(m: Matrix) -> CoefElement:
    """Laplace expansion over column subsets"""
    n = len(m)
    partial: Dict[int, CoefElement] = {0: ONE}
    for row in range(n):
        nxt: Dict[int, CoefElement] = {}
        for mask, value in partial.items():
            for col in range(n):
                if mask & (1 << col) or m[row][col].is_zero():
                    continue
                # inversions added by placing col after the columns already used
                sign = -1 if bin(mask >> (col + 1)).count("1") % 2 else 1
                term = value * m[row][col] * sign
                key = mask | (1 << col)
                nxt[key] = nxt[key] + term if key in nxt else term
        partial = nxt
    return partial.get((1 << n) - 1, ZERO)


def _minor(m: Matrix, row: int, col: int) -> Matrix:
    return [[x for j, x in enumerate(r) if j != col] for i, r in enumerate(m) if i != row]


def matrix_inverse(m: Matrix) -> Matrix:
    n = len(m)
    det = determinant(m)
    if det.is_zero():
        raise NotInvertibleError("matrix is degenerate")
    det_inv = det.inverse()
    if n == 1:
        return [[det_inv]]
    return [
        [determinant(_minor(m, j, i)) * det_inv * (-1 if (i + j) % 2 else 1) for j in range(n)]
        for i in range(n)
    ]


def is_constant_matrix(m: Matrix) -> bool:
    return all(x.is_constant() for row in m for x in row)


def raise_index(eta_inv: Matrix, c_lower: Tensor3) -> Tensor3:
    """c^g_{ab} = eta^{g m} c_{m a b}"""
    n = len(eta_inv)
    raised: Tensor3 = []
    for g in range(n):
        plane = []
        for a in range(n):
            row = []
            for b in range(n):
                total = ZERO
                for mu in range(n):
                    if not eta_inv[g][mu].is_zero():
                        total = total + eta_inv[g][mu] * c_lower[mu][a][b]
                row.append(total)
            plane.append(row)
        raised.append(plane)
    return raised


# intersection form


def compute_intersection_form(spec: SuperpotentialSpec, eta_inv: Matrix, c_lower: Tensor3) -> Matrix:
    """g^{ab} = E^e eta^{am} eta^{bn} c_{emn}"""
    if spec.euler_weights is None:
        raise ValueError(f"{spec.name}: the intersection form needs Euler weights")
    euler = spec.euler_weights.components()
    n = spec.n
    contracted = [
        [sum((euler[e] * c_lower[e][m][k] for e in range(n)), ZERO) for k in range(n)] for m in range(n)
    ]
    g: Matrix = []
    for a in range(n):
        row = []
        for b in range(n):
            total = ZERO
            for m in range(n):
                if eta_inv[a][m].is_zero():
                    continue
                for k in range(n):
                    if not eta_inv[b][k].is_zero():
                        total = total + eta_inv[a][m] * eta_inv[b][k] * contracted[m][k]
            row.append(total)
        g.append(row)
    return g


def _numeric_zeros(lam: LaurentPoly, assignment: Mapping[int, complex]) -> np.ndarray:
    shifted = lam.shift_exponents(-lam.valuation) if (lam.chart.is_exponential or lam.valuation < 0) else lam
    coeffs = shifted.numeric_coefficients(assignment)
    dense = [coeffs.get(k, 0j) for k in range(shifted.degree, -1, -1)]
    return np.roots(dense) if len(dense) > 1 else np.array([], dtype=complex)


def intersection_form_numeric(spec: SuperpotentialSpec, assignment: Mapping[int, complex]) -> np.ndarray:
    """g_{ab} = sum over dlam = 0 of d_a lam d_b lam / (lam lam') dp at a numeric sample"""
    data = critical_data_numeric(spec, assignment)
    scale = max([1.0] + [abs(u) for _, u in data.points])
    for _, u in data.points:
        if abs(u) < settings.tol * scale:
            raise DegenerateCriticalPointError("a critical value vanishes; the intersection form degenerates")
    zeros = _numeric_zeros(spec.lam, assignment)
    partials = spec.partials()
    n = spec.n
    den = spec.lam * spec.lam.d_dp()
    g = np.zeros((n, n), dtype=complex)
    for a in range(n):
        for b in range(a, n):
            integrand = RatFunc(partials[a] * partials[b], den)
            value = residue_numeric(ResidueRequest(integrand, spec.lam), assignment, extra_points=list(zeros))
            g[a, b] = g[b, a] = value
    return g


def evaluate_matrix(m: Matrix, assignment: Mapping[int, complex]) -> np.ndarray:
    return np.array([[x.eval_numeric(assignment) for x in row] for row in m], dtype=complex)


def check_intersection_duality(
    spec: SuperpotentialSpec, g_upper: Matrix, assignment: Mapping[int, complex], tol: Optional[float] = None
) -> CheckResult:
    """The residue form g_{ab} is the inverse of the exact g^{ab}"""
    tol = tol or settings.tol
    lower = intersection_form_numeric(spec, assignment)
    upper = evaluate_matrix(g_upper, assignment)
    product = lower @ upper
    error = product - np.eye(spec.n)
    worst = float(np.max(np.abs(error)))
    residuals = [
        Residual(index=[a + 1, b + 1], value=repr(complex(error[a, b])), magnitude=float(abs(error[a, b])))
        for a in range(spec.n)
        for b in range(spec.n)
        if abs(error[a, b]) > tol
    ]
    return CheckResult(name="intersection_duality", passed=worst <= tol, residuals=residuals, max_residual=worst)


def check_engine_agreement(spec: SuperpotentialSpec, eta: Matrix, c_lower: Tensor3) -> CheckResult:
    """The trace engine reproduces the complement engine entry by entry"""
    names = spec.names()
    try:
        eta_trace = compute_eta(spec, "trace")
        c_trace = compute_c(spec, "trace")
    except (DegenerateCriticalPointError, ResidueDomainError, NotInvertibleError) as e:
        logger.warning(f"{spec.name}: trace engine unavailable ({e})")
        return CheckResult(name="engine_agreement", passed=True, notes=[f"trace engine skipped: {e}"])
    n = spec.n
    residuals = [
        exact_residual([a + 1, b + 1], eta[a][b] - eta_trace[a][b], names)
        for a in range(n)
        for b in range(a, n)
        if eta[a][b] != eta_trace[a][b]
    ]
    residuals += [
        exact_residual([a + 1, b + 1, g + 1], c_lower[a][b][g] - c_trace[a][b][g], names)
        for a in range(n)
        for b in range(a, n)
        for g in range(b, n)
        if c_lower[a][b][g] != c_trace[a][b][g]
    ]
    return CheckResult(name="engine_agreement", passed=not residuals, residuals=residuals)


def check_numeric_oracle(
    spec: SuperpotentialSpec, eta: Matrix, c_lower: Tensor3, assignment: Mapping[int, complex], tol: Optional[float] = None
) -> CheckResult:
    """Exact eta and c against contour quadrature at one numeric sample"""
    tol = tol or settings.tol
    n = spec.n
    keys = [(a, b) for a in range(n) for b in range(a, n)] + [
        (a, b, g) for a in range(n) for b in range(a, n) for g in range(b, n)
    ]
    partials = spec.partials()
    dlam = spec.lam.d_dp()
    residuals = []
    worst = 0.0
    for key in keys:
        numerator = LaurentPoly.const(spec.chart, 1)
        for i in key:
            numerator = numerator * partials[i]
        numeric = residue_numeric(ResidueRequest(RatFunc(numerator, dlam), spec.lam), assignment)
        exact_entry = eta[key[0]][key[1]] if len(key) == 2 else c_lower[key[0]][key[1]][key[2]]
        exact = exact_entry.eval_numeric(assignment)
        error = abs(numeric - exact) / max(1.0, abs(exact))
        worst = max(worst, error)
        if error > tol:
            residuals.append(
                Residual(index=[i + 1 for i in key], value=f"{numeric!r} vs {exact!r}", magnitude=error)
            )
    return CheckResult(name="numeric_oracle", passed=worst <= tol, residuals=residuals, max_residual=worst)


def sample_assignment(n: int, seed: int, index: int = 0) -> Dict[int, complex]:
    """Seeded complex sample t_j = r exp(i theta), 0.6 <= r <= 1.4"""
    rng = np.random.default_rng([seed, index])
    return {j: cmath.rect(rng.uniform(0.6, 1.4), rng.uniform(0.1, 2 * np.pi - 0.1)) for j in range(1, n + 1)}


# potential reconstruction


def check_integrability(c_lower: Tensor3):
    """d_delta c_{abg} must be totally symmetric"""
    n = len(c_lower)
    for a, b, g in combinations_with_replacement(range(n), 3):
        for delta in range(n):
            lhs = c_lower[a][b][g].derive(delta + 1)
            rhs = c_lower[delta][b][g].derive(a + 1)
            if lhs != rhs:
                raise IntegrabilityError(
                    f"d_{delta + 1} c_({a + 1},{b + 1},{g + 1}) != d_{a + 1} c_({delta + 1},{b + 1},{g + 1})",
                    index=(a + 1, b + 1, g + 1, delta + 1),
                    difference=(lhs - rhs).render(),
                )


def potential_of_gradient(w: Sequence[CoefElement]) -> CoefElement:
    """P with dP/dt^j = w_j, built one variable at a time; integration constants zero"""
    potential = ZERO
    for j in range(1, len(w) + 1):
        rest = w[j - 1] - potential.derive(j)
        for earlier in range(1, j):
            if not rest.free_of(earlier):
                raise IntegrabilityError(
                    f"gradient is not closed in (t{earlier}, t{j})", index=(earlier, j), difference=rest.render()
                )
        potential = potential + rest.antiderive(j)
    return potential


def reconstruct_F(c_lower: Tensor3, varnames: Optional[Sequence[str]] = None) -> CoefElement:
    """
    Potential F with third derivatives c_lower.

    Args:
        c_lower: totally symmetric tensor of third derivatives
        varnames: flat-variable names (used for logging only)

    Returns:
        F, with all integration constants of degree three and below set to zero
    """
    n = len(c_lower)
    check_integrability(c_lower)
    second = [[ZERO] * n for _ in range(n)]
    for a in range(n):
        for b in range(a, n):
            second[a][b] = second[b][a] = potential_of_gradient(c_lower[a][b])
    first = [potential_of_gradient(second[a]) for a in range(n)]
    # c leaves plain terms of degree <= 2 undetermined
    F = potential_of_gradient(first).drop_free_polynomial(2)
    logger.info(f"Reconstructed F over {list(varnames or [])}: {F.render()}")
    return F


def third_derivatives(F: CoefElement, n: int) -> Tensor3:
    cache: Dict[Tuple[int, int, int], CoefElement] = {}
    for key in combinations_with_replacement(range(1, n + 1), 3):
        a, b, g = key
        cache[key] = F.derive(a).derive(b).derive(g)
    return [
        [[cache[tuple(sorted((a, b, g)))] for g in range(1, n + 1)] for b in range(1, n + 1)]
        for a in range(1, n + 1)
    ]


# checks


def check_closed_wdvv(c_raised: Tensor3, names: Optional[Mapping[int, str]] = None) -> CheckResult:
    """sum_m c^m_{ab} c^d_{mg} = sum_m c^m_{gb} c^d_{ma}"""
    n = len(c_raised)

    def entry(a: int, b: int, g: int, d: int) -> CoefElement:
        total = ZERO
        for mu in range(n):
            total = total + c_raised[mu][a][b] * c_raised[d][mu][g] - c_raised[mu][g][b] * c_raised[d][mu][a]
        return total

    tasks = [(a, b, g, d) for a in range(n) for g in range(a + 1, n) for b in range(n) for d in range(n)]
    with ThreadPoolExecutor(max_workers=settings.threads) as pool:
        values = list(pool.map(lambda idx: entry(*idx), tasks))
    residuals = [
        exact_residual([a + 1, b + 1, g + 1, d + 1], v, names)
        for (a, b, g, d), v in zip(tasks, values)
        if not v.is_zero()
    ]
    return CheckResult(name="closed_wdvv", passed=not residuals, residuals=residuals)


def check_unit_axiom(eta: Matrix, c_lower: Tensor3, names: Optional[Mapping[int, str]] = None) -> CheckResult:
    """c_{1jk} = eta_{jk}"""
    n = len(eta)
    residuals = []
    for j in range(n):
        for k in range(n):
            diff = c_lower[0][j][k] - eta[j][k]
            if not diff.is_zero():
                residuals.append(exact_residual([1, j + 1, k + 1], diff, names))
    return CheckResult(name="unit_axiom", passed=not residuals, residuals=residuals)


def check_quasi_homogeneity(
    F: CoefElement, euler_weights: EulerWeights, names: Optional[Mapping[int, str]] = None
) -> CheckResult:
    """E(F) - (3 - d) F must be quadratic or lower"""
    discrepancy = euler_weights.apply(F) - F * (3 - euler_weights.d)
    passed = discrepancy.is_quadratic_or_lower()
    residuals = [] if discrepancy.is_zero() else [exact_residual([], discrepancy, names)]
    notes = [] if passed else ["discrepancy contains terms beyond quadratic order"]
    return CheckResult(name="quasi_homogeneity", passed=passed, residuals=residuals, notes=notes)


def check_eta_constant(eta: Matrix, names: Optional[Mapping[int, str]] = None) -> CheckResult:
    residuals = [
        exact_residual([i + 1, j + 1], x, names)
        for i, row in enumerate(eta)
        for j, x in enumerate(row)
        if not x.is_constant()
    ]
    return CheckResult(name="eta_constant", passed=not residuals, residuals=residuals)


# flat coordinates


def flat_coordinates_residue(spec: SuperpotentialSpec, gamma: int) -> CoefElement:
    """p^-1 coefficient of lam^((N - gamma) / N) at infinity, N = deg lam"""
    lam = spec.lam
    if spec.chart.is_exponential:
        raise ExpansionError("flat-coordinate residues are defined for the affine chart")
    if not 1 <= gamma <= spec.n:
        raise UnknownVariableError(f"no flat variable t{gamma}")
    N = lam.degree
    if lam.leading != ONE:
        raise ExpansionError("flat-coordinate residues need a monic superpotential")
    return fractional_power_coefficient(lam, N - gamma, N, -1)


def flat_polynomial_family(n: int, with_pole: bool = False) -> LaurentPoly:
    """
    Superpotential whose coefficients are polynomials in flat coordinates.

    Without pole: lam = p^(n+1) + a_(n-1) p^(n-1) + ... + a_0.
    With pole:    lam = p^n + t^n p^(n-1) + a_(n-2) p^(n-2) + ... + a_0 + t^(n+1) / p.

    Each a_(g-1) = t^g + (correction in t^(g+1), ...) is fixed so that the
    p^-1 coefficient of lam^(m/N) equals (m/N) t^g with m = N - g.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    chart = Chart("affine")
    if with_pole:
        N = n
        lam = LaurentPoly.monomial(chart, N) + LaurentPoly.monomial(chart, -1, CoefElement.var(n + 1))
        if n >= 2:
            lam = lam + LaurentPoly.monomial(chart, n - 1, CoefElement.var(n))
            top = n - 1
        else:
            lam = lam + CoefElement.var(1)
            top = 0
    else:
        N = n + 1
        lam = LaurentPoly.monomial(chart, N)
        top = n
    for g in range(top, 0, -1):
        m = N - g
        tg = CoefElement.var(g)
        trial = lam + LaurentPoly.monomial(chart, g - 1, tg)
        value = fractional_power_coefficient(trial, m, N, -1)
        excess = value - tg * Fraction(m, N)
        lam = lam + LaurentPoly.monomial(chart, g - 1, tg - excess * Fraction(N, m))
    return lam


def euler_weights_from_degrees(lam: LaurentPoly, n: int) -> EulerWeights:
    """Weights from deg lam = 1, deg p = 1/N: t^a in front of p^j has degree 1 - j/N"""
    if lam.chart.is_exponential:
        raise ValueError("degree weights are read in the affine chart")
    N = lam.degree
    q: List[Fraction] = []
    for a in range(1, n + 1):
        linear_key = (0, 0, ((a, 1),), (), ())
        found = [
            k for k, coeff in lam.items() if any(key == linear_key for key, _ in coeff.terms())
        ]
        if not found:
            raise ValueError(f"t{a} does not appear linearly in any coefficient")
        q.append(Fraction(max(found), N))
    return EulerWeights(q=q, r=[Fraction(0)] * n, d=1 - Fraction(2, N))


# numeric diagnostics


@dataclass
class CriticalData:
    points: List[Tuple[complex, complex]]
    semisimple: bool
    min_separation: float


def _chart_to_p(chart: Chart, x: complex) -> complex:
    if not chart.is_exponential:
        return x
    return cmath.log(x) / (1j if chart.kappa == "i" else 1)


def critical_data_numeric(spec: SuperpotentialSpec, t_assignment: Mapping[int, complex]) -> CriticalData:
    """Critical points p_i and critical values u_i = lam(p_i) at a numeric sample"""
    try:
        roots = numeric_critical_points(spec.lam, t_assignment, refuse=False)
    except (NumericRefusal, np.linalg.LinAlgError) as e:
        logger.error(f"Root finding failed for {spec.name}: {e}", exc_info=True)
        raise
    values = [spec.lam.eval_numeric(x, t_assignment) for x in roots]
    points = [(_chart_to_p(spec.chart, complex(x)), complex(u)) for x, u in zip(roots, values)]
    scale = max([1.0] + [abs(u) for u in values])
    separation = min(
        (abs(values[i] - values[j]) for i in range(len(values)) for j in range(i + 1, len(values))),
        default=float("inf"),
    )
    semisimple = separation >= settings.semisimple_tol * scale
    if not semisimple:
        logger.warning(f"{spec.name}: critical values coincide at {dict(t_assignment)}")
    return CriticalData(points=points, semisimple=semisimple, min_separation=separation)


def local_form_check(
    spec: SuperpotentialSpec, t_assignment: Mapping[int, complex], tol: Optional[float] = None
) -> CheckResult:
    """lam - u_i vanishes to exactly second order at every critical point"""
    tol = tol or settings.tol
    roots = numeric_critical_points(spec.lam, t_assignment)
    first = spec.lam.d_dp()
    second = first.d_dp()
    residuals = []
    worst = 0.0
    for i, x in enumerate(roots):
        d1 = abs(first.eval_numeric(x, t_assignment))
        d2 = abs(second.eval_numeric(x, t_assignment))
        scale = max(1.0, abs(spec.lam.eval_numeric(x, t_assignment)))
        worst = max(worst, d1 / scale)
        if d1 > 1e3 * tol * scale or d2 < tol:
            residuals.append(Residual(index=[i + 1], value=f"|lam'|={d1:.3e}, |lam''|={d2:.3e}", magnitude=d1))
    return CheckResult(name="local_form", passed=not residuals, residuals=residuals, max_residual=worst)


def derive_frobenius(spec: SuperpotentialSpec, engine: str = "complement") -> FrobeniusData:
    """
    Full closed Frobenius data of a superpotential.

    Args:
        spec: superpotential, flat-variable names and optional Euler weights
        engine: exact residue engine ("complement" or "trace")

    Returns:
        FrobeniusData with eta, its inverse, both c tensors, F and the upper intersection form
    """
    names = spec.names()
    warnings: List[str] = []
    logger.info(f"Step 1: metric eta for {spec.name} ({engine} engine)")
    eta = compute_eta(spec, engine)
    if not is_constant_matrix(eta):
        message = f"{spec.name}: eta is not constant, coordinates are not flat"
        logger.warning(message)
        warnings.append(message)
    eta_inv = matrix_inverse(eta)

    logger.info(f"Step 2: structure constants for {spec.name}")
    c_lower = compute_c(spec, engine)
    c_raised = raise_index(eta_inv, c_lower)

    logger.info(f"Step 3: potential F for {spec.name}")
    F = reconstruct_F(c_lower, spec.varnames)

    g_upper = None
    if spec.euler_weights is not None:
        logger.info(f"Step 4: intersection form for {spec.name}")
        g_upper = compute_intersection_form(spec, eta_inv, c_lower)
    logger.debug(f"eta = {render_matrix(eta, names)}")
    return FrobeniusData(
        eta=eta, eta_inv=eta_inv, c_lower=c_lower, c_raised=c_raised, F=F, g_upper=g_upper, warnings=warnings
    )
