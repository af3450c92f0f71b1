"""
Residue sums over the critical points of a superpotential.

Four engines compute the same quantities and are used to check each other:

* complement - minus the residues at the chart boundary (exact, default)
* trace      - Euler-Jacobi trace on the quotient by the critical polynomial (exact)
* numeric    - trapezoid quadrature around numerically located roots
* boundary   - single boundary residues read off from series expansions

Orientation: res_inf(f dp) = -[p^-1] of the expansion at infinity; finite
residues are counterclockwise. In the exponential chart f dp = f/(kappa z) dz.
"""
from __future__ import annotations

import cmath
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .coefring import CoefElement, ONE, ZERO
from .config import settings
from .errors import (
    DegenerateCriticalPointError,
    NotInvertibleError,
    NumericRefusal,
    ResidueDomainError,
)
from .laurent import Chart, LaurentPoly, RatFunc, series_at

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Locus:
    kind: str = "critical"
    value: Optional[complex] = None

    def __post_init__(self):
        if self.kind not in ("critical", "infinity", "zero", "point"):
            raise ValueError(f"Unknown residue locus {self.kind!r}")
        if self.kind == "point" and self.value is None:
            raise ValueError("a point locus needs a value")


CRITICAL = Locus("critical")
AT_INFINITY = Locus("infinity")
AT_ZERO = Locus("zero")


def at_point(value: complex) -> Locus:
    return Locus("point", value)


@dataclass(frozen=True)
class ResidueRequest:
    integrand: RatFunc
    lam: LaurentPoly
    locus: Locus = CRITICAL

    @property
    def chart(self) -> Chart:
        return self.lam.chart


def boundary_points(lam: LaurentPoly) -> List[str]:
    """Chart boundary: the poles of lam"""
    if lam.chart.is_exponential:
        return ["zero", "infinity"]
    if lam.valuation < 0:
        return ["zero", "infinity"]
    return ["infinity"]


def critical_polynomial(lam: LaurentPoly) -> Tuple[int, LaurentPoly]:
    """
    Split lam' = x^(-m) * P(x) with P a polynomial whose roots are the critical points.

    Returns:
        (m, P)
    """
    dlam = lam.d_dp()
    if dlam.is_zero():
        raise DegenerateCriticalPointError("superpotential is constant in the chart variable")
    v = dlam.valuation
    if lam.chart.is_exponential or v < 0:
        return -v, dlam.shift_exponents(-v)
    return 0, dlam


def _zero_is_boundary(lam: LaurentPoly) -> bool:
    return lam.chart.is_exponential or lam.valuation < 0


# boundary residues


def residue_at_boundary(f, which: str, measure: str = "dp") -> CoefElement:
    """
    Residue of f dp (or f dx, x the chart variable, with measure="dx") at zero or infinity.
    """
    f = RatFunc.of(f)
    if which not in ("zero", "infinity"):
        raise ValueError(f"Unknown boundary point {which!r}")
    if measure not in ("dp", "dx"):
        raise ValueError(f"Unknown measure {measure!r}")
    chart = f.chart
    if f.is_zero():
        return ZERO
    # coefficient of x^target in f is the residue of f dx (up to the infinity sign)
    target = -1
    scale = ONE
    if chart.is_exponential and measure == "dp":
        target = 0
        scale = chart.kappa_element.inverse()
    guard = settings.series_guard
    if which == "infinity":
        series = series_at(f, "infinity", -target + guard)
        return -series.coefficient(target) * scale
    series = series_at(f, "zero", target + guard)
    return series.coefficient(target) * scale


# complement engine


def _check_complement_domain(f: RatFunc, lam: LaurentPoly):
    """Every finite pole of f away from the boundary must be a critical point of lam"""
    _, crit = critical_polynomial(lam)
    chart = f.chart
    den = f.den
    if not _zero_is_boundary(lam) and f.num.valuation < 0:
        den = den.shift_exponents(-f.num.valuation)
    if den.is_p_free():
        return
    if not den.leading.is_unit():
        raise ResidueDomainError(
            f"cannot decide the pole locus of {f.render()}: leading coefficient {den.leading.render()} is not a unit"
        )
    k = den.degree
    reduced = LaurentPoly.const(chart, 1)
    for _ in range(k):
        _, reduced = (reduced * crit).divmod_poly(den)
        if reduced.is_zero():
            return
    raise ResidueDomainError(
        f"integrand {f.render()} has poles away from the critical points and the chart boundary"
    )


def residue_complement(req: ResidueRequest) -> CoefElement:
    """Sum over the critical points as minus the boundary residues"""
    if req.locus.kind != "critical":
        raise ValueError("the complement engine sums over critical points only")
    f = RatFunc.of(req.integrand)
    if f.is_zero():
        return ZERO
    _check_complement_domain(f, req.lam)
    total = ZERO
    for which in boundary_points(req.lam):
        total = total - residue_at_boundary(f, which)
    return total


# trace engine


def _inverse_of_chart_variable(p: LaurentPoly) -> LaurentPoly:
    """x^-1 modulo P, valid when P(0) is a unit"""
    p0 = p.coefficient(0)
    if p0.is_zero() or not p0.is_unit():
        raise ResidueDomainError(
            "negative powers of the chart variable need a unit constant term in the critical polynomial"
        )
    q = (p - p0).shift_exponents(-1)
    return q * (-p0.inverse())


def _reduce_mod(g: LaurentPoly, p: LaurentPoly) -> LaurentPoly:
    chart = g.chart
    positive = LaurentPoly(chart, {k: c for k, c in g.items() if k >= 0})
    _, result = positive.divmod_poly(p)
    negative = [(k, c) for k, c in g.items() if k < 0]
    if negative:
        inv = _inverse_of_chart_variable(p)
        power = LaurentPoly.const(chart, 1)
        depth = -min(k for k, _ in negative)
        powers: Dict[int, LaurentPoly] = {}
        for j in range(1, depth + 1):
            _, power = (power * inv).divmod_poly(p)
            powers[j] = power
        for k, c in negative:
            result = result + powers[-k] * c
        _, result = result.divmod_poly(p)
    return result


def _simple_roots_check(p: LaurentPoly, rng_seed: Optional[int] = None):
    """Root clustering of P at a random sample of its parameters"""
    if p.degree < 2:
        return
    variables = sorted(p.variables())
    rng = np.random.default_rng(settings.seed if rng_seed is None else rng_seed)
    assignment = {
        j: cmath.rect(rng.uniform(0.6, 1.4), rng.uniform(0.1, 2 * np.pi - 0.1)) for j in variables
    }
    coeffs = p.numeric_coefficients(assignment)
    dense = [coeffs.get(k, 0j) for k in range(p.degree, -1, -1)]
    roots = np.roots(dense)
    scale = max(1.0, float(np.max(np.abs(roots))))
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            if abs(roots[i] - roots[j]) < settings.cluster_tol * scale:
                raise DegenerateCriticalPointError(
                    f"critical points of the superpotential are not simple ({p.render()})"
                )


def residue_trace(numerator: LaurentPoly, lam: LaurentPoly) -> CoefElement:
    """
    Sum of N/lam' residues at the critical points as the Euler-Jacobi trace.

    Args:
        numerator: N, the integrand is N / lam' (times dp)
        lam: superpotential

    Returns:
        sum over lam'(a) = 0 of N(a) / lam''(a), exact
    """
    chart = lam.chart
    m, p = critical_polynomial(lam)
    _simple_roots_check(p)
    if p.degree == 0:
        return ZERO
    lead = p.leading
    if not lead.is_unit():
        raise ResidueDomainError(f"critical polynomial has non-unit leading coefficient {lead.render()}")
    if chart.is_exponential:
        g = numerator.shift_exponents(m - 1) * chart.kappa_element.inverse()
    else:
        g = numerator.shift_exponents(m)
    if not _zero_is_boundary(lam) and g.exponents() and g.valuation < 0:
        raise ResidueDomainError("integrand has a pole at p = 0 that is not a critical point")
    remainder = _reduce_mod(g, p)
    return remainder.coefficient(p.degree - 1) * lead.inverse()


# numeric engine


def _eval_dense(coeffs: Mapping[int, complex], x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x, dtype=complex)
    for k, c in coeffs.items():
        out = out + c * x ** k
    return out


class _NumericIntegrand:
    """Vectorised evaluation of f dx / dp-weight at fixed t"""

    def __init__(self, f: RatFunc, assignment: Mapping[int, complex]):
        self.num = f.num.numeric_coefficients(assignment)
        self.den = f.den.numeric_coefficients(assignment)
        chart = f.chart
        self.exponential = chart.is_exponential
        self.kappa = 1j if chart.kappa == "i" else 1.0

    def __call__(self, x: np.ndarray) -> np.ndarray:
        value = _eval_dense(self.num, x) / _eval_dense(self.den, x)
        if self.exponential:
            value = value / (self.kappa * x)
        return value


def _circle_integral(g, center: complex, radius: float, nodes: int) -> complex:
    """(1 / 2 pi i) * contour integral of g over |x - center| = radius"""
    theta = 2 * np.pi * np.arange(nodes) / nodes
    offsets = radius * np.exp(1j * theta)
    values = g(center + offsets) * offsets
    return complex(np.mean(values))


def _adaptive_circle(g, center: complex, radius: float, nodes: int) -> complex:
    current = _circle_integral(g, center, radius, nodes)
    for _ in range(4):
        nodes *= 2
        refined = _circle_integral(g, center, radius, nodes)
        if abs(refined - current) <= 1e-13 * max(1.0, abs(refined)):
            return refined
        current = refined
    return current


def numeric_critical_points(
    lam: LaurentPoly, assignment: Mapping[int, complex], refuse: bool = True
) -> np.ndarray:
    """Roots of the critical polynomial (chart variable values), sorted, with clustering refusal"""
    _, p = critical_polynomial(lam)
    coeffs = p.numeric_coefficients(assignment)
    if p.degree == 0:
        return np.array([], dtype=complex)
    dense = [coeffs.get(k, 0j) for k in range(p.degree, -1, -1)]
    if abs(dense[0]) == 0:
        raise NumericRefusal("leading coefficient of the critical polynomial vanishes at this sample")
    roots = np.roots(dense)
    roots = np.array(sorted(roots, key=lambda r: (round(r.real, 12), round(r.imag, 12))), dtype=complex)
    if not refuse:
        return roots
    scale = max(1.0, float(np.max(np.abs(roots))))
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            if abs(roots[i] - roots[j]) < settings.cluster_tol * scale:
                raise NumericRefusal(
                    f"critical points {roots[i]:.6g} and {roots[j]:.6g} are clustered; refusing"
                )
    return roots


def _fsum_complex(values: Iterable[complex]) -> complex:
    values = list(values)
    return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))


def residue_numeric(
    req: ResidueRequest,
    t_assignment: Mapping[int, complex],
    extra_points: Optional[Sequence[complex]] = None,
    nodes: Optional[int] = None,
) -> complex:
    """
    Numeric residue by trapezoid quadrature on circles.

    Args:
        req: integrand, superpotential and locus
        t_assignment: numeric value per flat-variable index
        extra_points: further singular points of the integrand (e.g. zeros of lam)
        nodes: quadrature nodes per circle (at least settings.quadrature_nodes)

    Returns:
        complex residue (sum)
    """
    nodes = max(nodes or settings.quadrature_nodes, 256)
    lam = req.lam
    g = _NumericIntegrand(RatFunc.of(req.integrand), t_assignment)
    roots = numeric_critical_points(lam, t_assignment)
    singular = list(roots) + list(extra_points or [])
    if _zero_is_boundary(lam):
        singular.append(0j)

    def radius_around(center: complex) -> float:
        others = [abs(center - s) for s in singular if abs(center - s) > 1e-14]
        if not others:
            return 1.0
        nearest = min(others)
        if nearest < settings.cluster_tol * max(1.0, abs(center)):
            raise NumericRefusal(f"singular point too close to {center:.6g}")
        return nearest / 2

    kind = req.locus.kind
    if kind == "critical":
        centers = list(roots)
        with ThreadPoolExecutor(max_workers=settings.threads) as pool:
            parts = list(pool.map(lambda c: _adaptive_circle(g, c, radius_around(c), nodes), centers))
        return _fsum_complex(parts)
    if kind == "zero":
        return _adaptive_circle(g, 0j, radius_around(0j), nodes)
    if kind == "point":
        center = complex(req.locus.value)
        return _adaptive_circle(g, center, radius_around(center), nodes)
    reach = max([abs(s) for s in singular] + [1.0])
    return -_adaptive_circle(g, 0j, 2 * reach + 1.0, nodes)


def residue_sum(req: ResidueRequest, engine: str = "complement") -> CoefElement:
    """Exact residue sum over the critical points with the chosen engine"""
    if engine == "complement":
        return residue_complement(req)
    if engine == "trace":
        numerator = RatFunc.of(req.integrand) * req.lam.d_dp()
        if not numerator.is_laurent():
            raise ResidueDomainError("the trace engine needs an integrand of the form N / lam'")
        return residue_trace(numerator.as_laurent(), req.lam)
    raise ValueError(f"Unknown exact residue engine {engine!r}")
