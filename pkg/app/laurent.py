"""
Laurent polynomials and rational functions in the chart variable.

The chart variable is p itself (affine chart) or z = exp(kappa * p) with
kappa in {1, I} (exponential chart). Derivatives are always taken in p:
in the exponential chart d/dp acts as kappa * z * d/dz.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

from .coefring import CoefElement, I, ONE, ZERO, as_fraction
from .errors import ExpansionError, NotInvertibleError

logger = logging.getLogger(__name__)

Coefficient = Union[CoefElement, int, Fraction]


@dataclass(frozen=True)
class Chart:
    kind: str = "affine"
    kappa: str = "1"

    def __post_init__(self):
        if self.kind not in ("affine", "exp"):
            raise ValueError(f"Unknown chart kind {self.kind!r}")
        if self.kappa not in ("1", "i"):
            raise ValueError(f"Unknown chart kappa {self.kappa!r}")

    @property
    def is_exponential(self) -> bool:
        return self.kind == "exp"

    @property
    def variable(self) -> str:
        return "z" if self.is_exponential else "p"

    @property
    def kappa_element(self) -> CoefElement:
        return I if self.kappa == "i" else ONE

    def describe(self) -> str:
        if not self.is_exponential:
            return "affine p"
        return "z = exp(I*p)" if self.kappa == "i" else "z = exp(p)"


AFFINE = Chart("affine")


def _coerce(value: Coefficient) -> CoefElement:
    return CoefElement.coerce(value)


class LaurentPoly:
    """Immutable Laurent polynomial in the chart variable with CoefElement coefficients"""

    __slots__ = ("chart", "_coeffs", "_hash")

    def __init__(self, chart: Chart, coeffs: Optional[Mapping[int, Coefficient]] = None):
        self.chart = chart
        cleaned: Dict[int, CoefElement] = {}
        for k, c in (coeffs or {}).items():
            c = _coerce(c)
            if not c.is_zero():
                cleaned[int(k)] = c
        self._coeffs = cleaned
        self._hash: Optional[int] = None

    @classmethod
    def zero(cls, chart: Chart) -> "LaurentPoly":
        return cls(chart)

    @classmethod
    def const(cls, chart: Chart, value: Coefficient) -> "LaurentPoly":
        return cls(chart, {0: value})

    @classmethod
    def monomial(cls, chart: Chart, k: int, value: Coefficient = 1) -> "LaurentPoly":
        return cls(chart, {k: value})

    # structure

    def coefficient(self, k: int) -> CoefElement:
        return self._coeffs.get(k, ZERO)

    def items(self) -> List[Tuple[int, CoefElement]]:
        return sorted(self._coeffs.items(), reverse=True)

    def exponents(self) -> List[int]:
        return sorted(self._coeffs)

    def is_zero(self) -> bool:
        return not self._coeffs

    def is_p_free(self) -> bool:
        return all(k == 0 for k in self._coeffs)

    @property
    def degree(self) -> int:
        if not self._coeffs:
            raise ValueError("degree of the zero Laurent polynomial")
        return max(self._coeffs)

    @property
    def valuation(self) -> int:
        if not self._coeffs:
            raise ValueError("valuation of the zero Laurent polynomial")
        return min(self._coeffs)

    @property
    def leading(self) -> CoefElement:
        return self._coeffs[self.degree]

    @property
    def trailing(self) -> CoefElement:
        return self._coeffs[self.valuation]

    def _same_chart(self, other: "LaurentPoly"):
        if other.chart != self.chart:
            raise ValueError(f"Chart mismatch: {self.chart} vs {other.chart}")

    # arithmetic

    def __add__(self, other) -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.const(self.chart, other)
        self._same_chart(other)
        coeffs = dict(self._coeffs)
        for k, c in other._coeffs.items():
            coeffs[k] = coeffs[k] + c if k in coeffs else c
        return LaurentPoly(self.chart, coeffs)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.chart, {k: -c for k, c in self._coeffs.items()})

    def __sub__(self, other) -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.const(self.chart, other)
        return self + (-other)

    def __rsub__(self, other) -> "LaurentPoly":
        return (-self) + other

    def __mul__(self, other) -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            c = _coerce(other)
            return LaurentPoly(self.chart, {k: v * c for k, v in self._coeffs.items()})
        self._same_chart(other)
        coeffs: Dict[int, CoefElement] = {}
        for k1, c1 in self._coeffs.items():
            for k2, c2 in other._coeffs.items():
                prod = c1 * c2
                k = k1 + k2
                coeffs[k] = coeffs[k] + prod if k in coeffs else prod
        return LaurentPoly(self.chart, coeffs)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LaurentPoly":
        if n < 0:
            raise ValueError("negative powers of Laurent polynomials go through RatFunc")
        result = LaurentPoly.const(self.chart, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def shift_exponents(self, k: int) -> "LaurentPoly":
        """Multiply by (chart variable)^k"""
        return LaurentPoly(self.chart, {e + k: c for e, c in self._coeffs.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentPoly):
            if isinstance(other, (int, Fraction, CoefElement)):
                other = LaurentPoly.const(self.chart, other)
            else:
                return NotImplemented
        return self.chart == other.chart and self._coeffs == other._coeffs

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.chart, frozenset(self._coeffs.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"LaurentPoly({self.render()})"

    # calculus

    def d_dp(self) -> "LaurentPoly":
        if self.chart.is_exponential:
            kappa = self.chart.kappa_element
            return LaurentPoly(self.chart, {k: c * kappa * k for k, c in self._coeffs.items() if k})
        return LaurentPoly(self.chart, {k - 1: c * k for k, c in self._coeffs.items() if k})

    def derive_t(self, j: int) -> "LaurentPoly":
        return LaurentPoly(self.chart, {k: c.derive(j) for k, c in self._coeffs.items()})

    def map_coefficients(self, fn) -> "LaurentPoly":
        return LaurentPoly(self.chart, {k: fn(c) for k, c in self._coeffs.items()})

    # evaluation

    def eval_numeric(self, x: complex, assignment: Mapping[int, complex]) -> complex:
        return sum((c.eval_numeric(assignment) * complex(x) ** k for k, c in self.items()), 0j)

    def numeric_coefficients(self, assignment: Mapping[int, complex]) -> Dict[int, complex]:
        return {k: c.eval_numeric(assignment) for k, c in self._coeffs.items()}

    def variables(self) -> set:
        found = set()
        for c in self._coeffs.values():
            found |= c.variables()
        return found

    # division

    def divmod_poly(self, divisor: "LaurentPoly") -> Tuple["LaurentPoly", "LaurentPoly"]:
        """Polynomial long division for polynomials (no negative exponents) by a divisor with unit leading coefficient"""
        self._same_chart(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if (self._coeffs and self.valuation < 0) or divisor.valuation < 0:
            raise ValueError("divmod_poly expects polynomials in the chart variable")
        lead_inv = divisor.leading.inverse()
        d = divisor.degree
        remainder = dict(self._coeffs)
        quotient: Dict[int, CoefElement] = {}
        while remainder and max(remainder) >= d:
            top = max(remainder)
            factor = remainder[top] * lead_inv
            quotient[top - d] = factor
            for k, c in divisor._coeffs.items():
                e = k + top - d
                updated = remainder.get(e, ZERO) - factor * c
                if updated.is_zero():
                    remainder.pop(e, None)
                else:
                    remainder[e] = updated
        return LaurentPoly(self.chart, quotient), LaurentPoly(self.chart, remainder)

    def exact_quotient(self, divisor: "LaurentPoly") -> Optional["LaurentPoly"]:
        """self / divisor as a Laurent polynomial, or None when it is not one"""
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero Laurent polynomial")
        if self.is_zero():
            return LaurentPoly.zero(self.chart)
        if not divisor.leading.is_unit():
            return None
        a = self.shift_exponents(-self.valuation)
        b = divisor.shift_exponents(-divisor.valuation)
        q, r = a.divmod_poly(b)
        if not r.is_zero():
            return None
        return q.shift_exponents(self.valuation - divisor.valuation)

    def shift(self, c: Coefficient) -> "LaurentPoly":
        """Substitute p -> p + c (affine polynomials only)"""
        if self.chart.is_exponential:
            raise ExpansionError("translation of the chart variable is only defined in the affine chart")
        if self._coeffs and self.valuation < 0:
            raise ExpansionError("cannot translate a Laurent polynomial with negative exponents")
        c = _coerce(c)
        result: Dict[int, CoefElement] = {}
        for k, a in self._coeffs.items():
            # binomial expansion of (p + c)^k
            binom = 1
            power = ONE
            for j in range(k, -1, -1):
                term = a * power * binom
                result[j] = result[j] + term if j in result else term
                binom = binom * j // (k - j + 1)
                power = power * c
        return LaurentPoly(self.chart, result)

    # rendering

    def render(self, names: Optional[Mapping[int, str]] = None) -> str:
        return _render_terms(
            [(k, c.render(names)) for k, c in self.items()],
            lambda k: _power_text(self.chart.variable, k),
        )

    def render_human(self, names: Optional[Mapping[int, str]] = None) -> str:
        """Render the exponential chart back in exp/trig notation"""
        if not self.chart.is_exponential:
            return self.render(names)
        if self.chart.kappa == "1":
            return _render_terms([(k, c.render(names)) for k, c in self.items()], _exp_text)
        pieces: List[Tuple[int, str, str]] = []
        seen = set()
        for k, _ in self.items():
            m = abs(k)
            if m in seen:
                continue
            seen.add(m)
            if m == 0:
                pieces.append((0, self.coefficient(0).render(names), ""))
                continue
            a, b = self.coefficient(m), self.coefficient(-m)
            cos_part = a + b
            sin_part = I * (a - b)
            arg = "p" if m == 1 else f"{m}*p"
            if not cos_part.is_zero():
                pieces.append((m, cos_part.render(names), f"cos({arg})"))
            if not sin_part.is_zero():
                pieces.append((m, sin_part.render(names), f"sin({arg})"))
        return _join_rendered(pieces)


def _power_text(var: str, k: int) -> str:
    if k == 0:
        return ""
    if k == 1:
        return var
    return f"{var}^{k}"


def _exp_text(k: int) -> str:
    if k == 0:
        return ""
    if k == 1:
        return "exp(p)"
    if k == -1:
        return "exp(-p)"
    return f"exp({k}*p)"


def _render_terms(items: List[Tuple[int, str]], factor_text) -> str:
    return _join_rendered([(k, coeff, factor_text(k)) for k, coeff in items])


def _join_rendered(pieces: List[Tuple[int, str, str]]) -> str:
    if not pieces:
        return "0"
    out: List[str] = []
    for _, coeff, factor in pieces:
        compound = (" + " in coeff) or (" - " in coeff)
        if not factor:
            body = f"({coeff})" if compound and out else coeff
        elif coeff == "1":
            body = factor
        elif coeff == "-1":
            body = f"-{factor}"
        elif compound:
            body = f"({coeff})*{factor}"
        else:
            body = f"{coeff}*{factor}"
        if out and body.startswith("-"):
            out.append(f" - {body[1:]}")
        elif out:
            out.append(f" + {body}")
        else:
            out.append(body)
    return "".join(out)


def _rational_content(poly: LaurentPoly) -> Fraction:
    """gcd of the numerators over lcm of the denominators of every rational coefficient"""
    from math import gcd

    num = 0
    den = 1
    for _, c in poly.items():
        for _, q in c.terms():
            num = gcd(num, q.numerator)
            den = den * q.denominator // gcd(den, q.denominator)
    return Fraction(num, den) if num else Fraction(1)


class RatFunc:
    """Quotient of Laurent polynomials, reduced by monomial factor, content and exact division"""

    __slots__ = ("num", "den")

    def __init__(self, num: LaurentPoly, den: Optional[LaurentPoly] = None):
        if den is None:
            den = LaurentPoly.const(num.chart, 1)
        num._same_chart(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            self.num, self.den = num, LaurentPoly.const(num.chart, 1)
            return
        shift = -den.valuation
        num, den = num.shift_exponents(shift), den.shift_exponents(shift)
        quotient = num.exact_quotient(den)
        if quotient is not None:
            self.num, self.den = quotient, LaurentPoly.const(num.chart, 1)
            return
        content = _rational_content(den)
        lead_terms = den.leading.terms()
        if lead_terms and lead_terms[0][1] < 0:
            content = -content
        if content != 1:
            num, den = num * (1 / content), den * (1 / content)
        self.num, self.den = num, den

    @property
    def chart(self) -> Chart:
        return self.num.chart

    @classmethod
    def of(cls, value) -> "RatFunc":
        if isinstance(value, RatFunc):
            return value
        if isinstance(value, LaurentPoly):
            return cls(value)
        raise TypeError(f"Cannot make a rational function from {value!r}")

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_laurent(self) -> bool:
        return self.den.is_p_free() and self.den.coefficient(0) == 1

    def as_laurent(self) -> LaurentPoly:
        if not self.is_laurent():
            raise ExpansionError(f"{self.render()} is not a Laurent polynomial")
        return self.num

    def _lift(self, other) -> "RatFunc":
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, LaurentPoly):
            return RatFunc(other)
        return RatFunc(LaurentPoly.const(self.chart, other))

    def __add__(self, other) -> "RatFunc":
        other = self._lift(other)
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den)

    def __sub__(self, other) -> "RatFunc":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "RatFunc":
        return self._lift(other) - self

    def __mul__(self, other) -> "RatFunc":
        other = self._lift(other)
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RatFunc":
        other = self._lift(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __eq__(self, other) -> bool:
        if isinstance(other, (RatFunc, LaurentPoly, int, Fraction, CoefElement)):
            other = self._lift(other)
            return self.num * other.den == other.num * self.den
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __repr__(self) -> str:
        return f"RatFunc({self.render()})"

    def d_dp(self) -> "RatFunc":
        if self.is_laurent():
            return RatFunc(self.num.d_dp())
        return RatFunc(self.num.d_dp() * self.den - self.num * self.den.d_dp(), self.den * self.den)

    def derive_t(self, j: int) -> "RatFunc":
        if self.is_laurent():
            return RatFunc(self.num.derive_t(j))
        return RatFunc(
            self.num.derive_t(j) * self.den - self.num * self.den.derive_t(j), self.den * self.den
        )

    def eval_numeric(self, x: complex, assignment: Mapping[int, complex]) -> complex:
        return self.num.eval_numeric(x, assignment) / self.den.eval_numeric(x, assignment)

    def render(self, names: Optional[Mapping[int, str]] = None) -> str:
        if self.is_laurent():
            return self.num.render(names)
        return f"({self.num.render(names)})/({self.den.render(names)})"

    def render_human(self, names: Optional[Mapping[int, str]] = None) -> str:
        if self.is_laurent():
            return self.num.render_human(names)
        return f"({self.num.render_human(names)})/({self.den.render_human(names)})"


def ratfunc_arith(op: str, a, b) -> RatFunc:
    """add | sub | mul | div on rational functions"""
    a, b = RatFunc.of(a), RatFunc.of(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"Unknown rational-function operation {op!r}")


@dataclass(frozen=True)
class Primitive:
    """laurent_part + log_coefficient * L with L = log p (affine) or L = p (exponential chart)"""

    laurent_part: LaurentPoly
    log_coefficient: CoefElement = ZERO

    @property
    def chart(self) -> Chart:
        return self.laurent_part.chart

    def log_unit(self) -> LaurentPoly:
        """d/dp of the log term L"""
        if self.chart.is_exponential:
            return LaurentPoly.const(self.chart, 1)
        return LaurentPoly.monomial(self.chart, -1)

    def derivative(self) -> LaurentPoly:
        return self.laurent_part.d_dp() + self.log_unit() * self.log_coefficient

    def render(self, names: Optional[Mapping[int, str]] = None) -> str:
        return _render_with_log(self.laurent_part.render(names), self.log_coefficient, self.chart, names)

    def render_human(self, names: Optional[Mapping[int, str]] = None) -> str:
        return _render_with_log(self.laurent_part.render_human(names), self.log_coefficient, self.chart, names)


def _log_text(chart: Chart) -> str:
    return "p" if chart.is_exponential else "log(p)"


def _render_with_log(body: str, log_coefficient: CoefElement, chart: Chart, names) -> str:
    if log_coefficient.is_zero():
        return body
    coeff = log_coefficient.render(names)
    term = _join_rendered([(1, coeff, _log_text(chart))])
    if body == "0":
        return term
    if term.startswith("-"):
        return f"{body} - {term[1:]}"
    return f"{body} + {term}"


def d_dp(f: LaurentPoly) -> LaurentPoly:
    return f.d_dp()


def derive_t(f, j: int):
    return f.derive_t(j)


def primitive_in_p(f: LaurentPoly) -> Primitive:
    """Antiderivative in p with the p-free constant fixed to zero"""
    chart = f.chart
    coeffs: Dict[int, CoefElement] = {}
    log_coefficient = ZERO
    if chart.is_exponential:
        kappa_inv = chart.kappa_element.inverse()
        for k, c in f.items():
            if k == 0:
                log_coefficient = c
            else:
                coeffs[k] = c * kappa_inv * Fraction(1, k)
    else:
        for k, c in f.items():
            if k == -1:
                log_coefficient = c
            else:
                coeffs[k + 1] = c * Fraction(1, k + 1)
    return Primitive(LaurentPoly(chart, coeffs), log_coefficient)


# series expansion


@dataclass
class TruncatedSeries:
    """Exact Laurent coefficients at a center; at infinity exponents are in the chart variable"""

    center: str
    coefficients: Dict[int, CoefElement] = field(default_factory=dict)
    order: int = 0

    def coefficient(self, k: int) -> CoefElement:
        return self.coefficients.get(k, ZERO)


def _power_series_quotient(num: List[CoefElement], den: List[CoefElement], count: int) -> List[CoefElement]:
    """First `count` coefficients of num(w)/den(w) as a power series in w"""
    if not den or den[0].is_zero():
        raise ExpansionError("expansion needs a nonvanishing constant term in the denominator")
    try:
        inv0 = den[0].inverse()
    except NotInvertibleError as exc:
        raise ExpansionError(
            f"coefficient {den[0].render()} is not invertible; expansion leaves the coefficient ring"
        ) from exc
    out: List[CoefElement] = []
    for k in range(count):
        acc = num[k] if k < len(num) else ZERO
        for j in range(1, min(k, len(den) - 1) + 1):
            acc = acc - den[j] * out[k - j]
        out.append(acc * inv0)
    return out


def series_at(f, center: Union[str, Coefficient], order: int) -> TruncatedSeries:
    """
    Exact Laurent expansion of f.

    center "infinity": coefficients of x^k for k from the top down to -order.
    center "zero" or a finite value c: coefficients of (x - c)^k from the
    pole order up to `order`.
    """
    f = RatFunc.of(f)
    num, den = f.num, f.den
    if f.is_zero():
        return TruncatedSeries(str(center), {}, order)
    if center == "infinity":
        a, m = num.degree, den.degree
        count = a - m + order + 1
        if count <= 0:
            return TruncatedSeries("infinity", {}, order)
        n_list = [num.coefficient(a - k) for k in range(a - num.valuation + 1)]
        d_list = [den.coefficient(m - k) for k in range(m - den.valuation + 1)]
        s = _power_series_quotient(n_list, d_list, count)
        coeffs = {a - m - k: c for k, c in enumerate(s) if not c.is_zero()}
        return TruncatedSeries("infinity", coeffs, order)

    label = "zero"
    if center != "zero":
        c = _coerce(center)
        if not c.is_zero():
            label = c.render()
            num = num.shift(c)
            den = den.shift(c)
            if num.coefficient(0).is_zero() and den.coefficient(0).is_zero():
                raise ExpansionError(
                    f"center {label} is a common zero of numerator and denominator of {f.render()}"
                )
    b, l = num.valuation, den.valuation
    count = order - (b - l) + 1
    if count <= 0:
        return TruncatedSeries(label, {}, order)
    n_list = [num.coefficient(b + k) for k in range(num.degree - b + 1)]
    d_list = [den.coefficient(l + k) for k in range(den.degree - l + 1)]
    s = _power_series_quotient(n_list, d_list, count)
    coeffs = {b - l + k: c for k, c in enumerate(s) if not c.is_zero()}
    return TruncatedSeries(label, coeffs, order)


def _binomial(r: Fraction, j: int) -> Fraction:
    out = Fraction(1)
    for i in range(j):
        out = out * (r - i) / (i + 1)
    return out


def fractional_power_coefficient(lam: LaurentPoly, m: int, n: int, k: int = -1) -> CoefElement:
    """
    Coefficient of p^k in lam^(m/n) expanded at p = infinity.

    lam must be affine with leading term exactly p^n.
    """
    if lam.chart.is_exponential:
        raise ExpansionError("fractional powers are expanded in the affine chart only")
    if lam.degree != n or lam.leading != ONE:
        raise ExpansionError(f"expected a monic superpotential of degree {n}")
    depth = m - k
    if depth < 0:
        return ZERO
    # lam = p^n (1 + u), u = sum_{j>=1} u_j w^j with w = 1/p
    u = [ZERO] * (depth + 1)
    for e, c in lam.items():
        j = n - e
        if 1 <= j <= depth:
            u[j] = c
    r = Fraction(m, n)
    total = [ZERO] * (depth + 1)
    total[0] = ONE
    power = [ONE] + [ZERO] * depth
    for j in range(1, depth + 1):
        nxt = [ZERO] * (depth + 1)
        for a in range(depth + 1):
            if power[a].is_zero():
                continue
            for b in range(1, depth + 1 - a):
                if not u[b].is_zero():
                    nxt[a + b] = nxt[a + b] + power[a] * u[b]
        power = nxt
        coeff = _binomial(r, j)
        for a in range(depth + 1):
            if not power[a].is_zero():
                total[a] = total[a] + power[a] * coeff
    return total[depth]


class LogLaurent:
    """Polynomial in the primitive's log term L with Laurent coefficients"""

    __slots__ = ("chart", "parts")

    def __init__(self, chart: Chart, parts: Optional[Mapping[int, LaurentPoly]] = None):
        self.chart = chart
        self.parts: Dict[int, LaurentPoly] = {k: v for k, v in (parts or {}).items() if not v.is_zero()}

    @classmethod
    def of(cls, chart: Chart, value) -> "LogLaurent":
        if isinstance(value, LogLaurent):
            return value
        if isinstance(value, LaurentPoly):
            return cls(chart, {0: value})
        return cls(chart, {0: LaurentPoly.const(chart, value)})

    def __add__(self, other) -> "LogLaurent":
        other = LogLaurent.of(self.chart, other)
        parts = dict(self.parts)
        for k, v in other.parts.items():
            parts[k] = parts[k] + v if k in parts else v
        return LogLaurent(self.chart, parts)

    def __neg__(self) -> "LogLaurent":
        return LogLaurent(self.chart, {k: -v for k, v in self.parts.items()})

    def __sub__(self, other) -> "LogLaurent":
        return self + (-LogLaurent.of(self.chart, other))

    def __mul__(self, other) -> "LogLaurent":
        other = LogLaurent.of(self.chart, other)
        parts: Dict[int, LaurentPoly] = {}
        for k1, v1 in self.parts.items():
            for k2, v2 in other.parts.items():
                prod = v1 * v2
                parts[k1 + k2] = parts[k1 + k2] + prod if (k1 + k2) in parts else prod
        return LogLaurent(self.chart, parts)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self.parts

    def render(self, names: Optional[Mapping[int, str]] = None) -> str:
        if not self.parts:
            return "0"
        log = _log_text(self.chart)
        pieces = []
        for k in sorted(self.parts, reverse=True):
            body = self.parts[k].render(names)
            factor = "" if k == 0 else (log if k == 1 else f"{log}^{k}")
            pieces.append((k, body, factor))
        return _join_rendered(pieces)
