"""
Exact coefficient ring for superpotential computations.

An element is a finite sum of terms

    q * sqrt2^a * I^b * prod (t_j)^e_j * prod log(t_j)^l_j * exp(sum c_j t_j)

with q rational, a and b in {0, 1}, e_j integers (negative allowed), l_j
positive integers and c_j rational. sqrt2^2 rewrites to 2 and I^2 to -1, so
the dictionary of terms is a canonical form and equality is dictionary
equality.
"""
from __future__ import annotations

import cmath
import logging
import math
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

from .errors import (
    MissingAssignmentError,
    NotAntidifferentiableError,
    NotInvertibleError,
    OpenWDVVError,
    UnknownVariableError,
)

logger = logging.getLogger(__name__)

Monomial = Tuple[Tuple[int, int], ...]
LinearForm = Tuple[Tuple[int, Fraction], ...]
# (sqrt2 exponent, I exponent, t-monomial, log-monomial, exponential argument)
TermKey = Tuple[int, int, Monomial, Monomial, LinearForm]
Scalar = Union[int, Fraction]

_UNIT_KEY: TermKey = (0, 0, (), (), ())
_SQRT2 = math.sqrt(2.0)


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"Cannot use {value!r} as an exact rational")


def _merge(a: tuple, b: tuple) -> tuple:
    """Add exponent maps stored as sorted (variable, exponent) tuples"""
    if not a:
        return b
    if not b:
        return a
    powers = dict(a)
    for var, e in b:
        powers[var] = powers.get(var, 0) + e
    return tuple(sorted((v, e) for v, e in powers.items() if e != 0))


def _algebraic_product(s1: int, i1: int, s2: int, i2: int) -> Tuple[int, int, int]:
    factor = 1
    s = s1 + s2
    if s == 2:
        factor *= 2
        s = 0
    i = i1 + i2
    if i == 2:
        factor = -factor
        i = 0
    return factor, s, i


def _key_product(k1: TermKey, k2: TermKey) -> Tuple[int, TermKey]:
    factor, s, i = _algebraic_product(k1[0], k1[1], k2[0], k2[1])
    return factor, (s, i, _merge(k1[2], k2[2]), _merge(k1[3], k2[3]), _merge(k1[4], k2[4]))


def _sort_key(key: TermKey):
    s, i, tm, lm, ea = key
    return (
        -sum(e for _, e in tm),
        tuple((v, -e) for v, e in tm),
        -sum(l for _, l in lm),
        tuple((v, -l) for v, l in lm),
        tuple((v, -c) for v, c in ea),
        s,
        i,
    )


def _render_fraction(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _render_linear_form(form: LinearForm, names: Mapping[int, str]) -> str:
    pieces: List[str] = []
    for var, c in form:
        name = names.get(var, f"t{var}")
        if c == 1:
            body = name
        elif c == -1:
            body = f"-{name}"
        else:
            body = f"{_render_fraction(c)}*{name}"
        if pieces and body.startswith("-"):
            pieces.append(f" - {body[1:]}")
        elif pieces:
            pieces.append(f" + {body}")
        else:
            pieces.append(body)
    return "".join(pieces)


def _primitive_factor(e: int, l: int, a: Fraction) -> Dict[Tuple[int, int], Fraction]:
    """Antiderivative of t^e * log(t)^l * exp(a t), as {(e', l'): coefficient} times exp(a t)"""
    if a == 0:
        if e == -1:
            return {(0, l + 1): Fraction(1, l + 1)}
        result = {(e + 1, l): Fraction(1, e + 1)}
        if l > 0:
            for k, v in _primitive_factor(e, l - 1, a).items():
                result[k] = result.get(k, Fraction(0)) - Fraction(l, e + 1) * v
        return result
    if l > 0 or e < 0:
        raise NotAntidifferentiableError(
            f"t^{e}*log(t)^{l}*exp({a}*t) has no antiderivative in the coefficient ring"
        )
    result = {(e, 0): 1 / a}
    if e > 0:
        for k, v in _primitive_factor(e - 1, 0, a).items():
            result[k] = result.get(k, Fraction(0)) - (e / a) * v
    return result


class CoefElement:
    """Immutable element of the differential coefficient ring"""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Mapping[TermKey, Fraction]] = None):
        self._terms: Dict[TermKey, Fraction] = {k: v for k, v in (terms or {}).items() if v != 0}
        self._hash: Optional[int] = None

    # construction

    @classmethod
    def zero(cls) -> "CoefElement":
        return cls()

    @classmethod
    def one(cls) -> "CoefElement":
        return cls({_UNIT_KEY: Fraction(1)})

    @classmethod
    def const(cls, value: Scalar) -> "CoefElement":
        return cls({_UNIT_KEY: as_fraction(value)})

    @classmethod
    def var(cls, j: int, power: int = 1) -> "CoefElement":
        if j < 1:
            raise UnknownVariableError(f"Flat variables are numbered from 1, got {j}")
        return cls({(0, 0, ((j, power),) if power else (), (), ()): Fraction(1)})

    @classmethod
    def sqrt2(cls) -> "CoefElement":
        return cls({(1, 0, (), (), ()): Fraction(1)})

    @classmethod
    def imag(cls) -> "CoefElement":
        return cls({(0, 1, (), (), ()): Fraction(1)})

    @classmethod
    def exp(cls, form: Mapping[int, Scalar]) -> "CoefElement":
        """exp of the Q-linear form sum form[j] * t_j"""
        items = tuple(sorted((j, as_fraction(c)) for j, c in form.items() if as_fraction(c) != 0))
        for j, _ in items:
            if j < 1:
                raise UnknownVariableError(f"Flat variables are numbered from 1, got {j}")
        return cls({(0, 0, (), (), items): Fraction(1)})

    @classmethod
    def log(cls, j: int) -> "CoefElement":
        if j < 1:
            raise UnknownVariableError(f"Flat variables are numbered from 1, got {j}")
        return cls({(0, 0, (), ((j, 1),), ()): Fraction(1)})

    @staticmethod
    def coerce(value) -> "CoefElement":
        if isinstance(value, CoefElement):
            return value
        return CoefElement.const(value)

    # arithmetic

    def __add__(self, other) -> "CoefElement":
        other = CoefElement.coerce(other)
        terms = dict(self._terms)
        for k, v in other._terms.items():
            terms[k] = terms.get(k, Fraction(0)) + v
        return CoefElement(terms)

    __radd__ = __add__

    def __neg__(self) -> "CoefElement":
        return CoefElement({k: -v for k, v in self._terms.items()})

    def __sub__(self, other) -> "CoefElement":
        return self + (-CoefElement.coerce(other))

    def __rsub__(self, other) -> "CoefElement":
        return CoefElement.coerce(other) - self

    def __mul__(self, other) -> "CoefElement":
        if isinstance(other, (int, Fraction)):
            q = as_fraction(other)
            return CoefElement({k: v * q for k, v in self._terms.items()})
        other = CoefElement.coerce(other)
        terms: Dict[TermKey, Fraction] = {}
        for k1, v1 in self._terms.items():
            for k2, v2 in other._terms.items():
                factor, key = _key_product(k1, k2)
                terms[key] = terms.get(key, Fraction(0)) + factor * v1 * v2
        return CoefElement(terms)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "CoefElement":
        if n < 0:
            return self.inverse() ** (-n)
        result = CoefElement.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __truediv__(self, other) -> "CoefElement":
        if isinstance(other, (int, Fraction)):
            q = as_fraction(other)
            if q == 0:
                raise ZeroDivisionError("division of a coefficient by zero")
            return self * (1 / q)
        return self * CoefElement.coerce(other).inverse()

    def __rtruediv__(self, other) -> "CoefElement":
        return CoefElement.coerce(other) * self.inverse()

    # comparison

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = CoefElement.const(other)
        if not isinstance(other, CoefElement):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        # rational constants hash like the int/Fraction they compare equal to
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(self._terms.get(_UNIT_KEY, Fraction(0)))
            else:
                self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"CoefElement({self.render()})"

    def __str__(self) -> str:
        return self.render()

    # predicates

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not k[2] and not k[3] and not k[4] for k in self._terms)

    def is_rational(self) -> bool:
        return all(k == _UNIT_KEY for k in self._terms)

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise OpenWDVVError(f"{self.render()} is not a rational constant")
        return self._terms.get(_UNIT_KEY, Fraction(0))

    def is_unit(self) -> bool:
        if not self._terms:
            return False
        if self.is_constant():
            return True
        return len(self._terms) == 1 and not next(iter(self._terms))[3]

    def is_polynomial(self, max_degree: Optional[int] = None) -> bool:
        """True when no exp/log factor and no negative power occurs (degree bounded if asked)"""
        for s, i, tm, lm, ea in self._terms:
            if lm or ea or any(e < 0 for _, e in tm):
                return False
            if max_degree is not None and sum(e for _, e in tm) > max_degree:
                return False
        return True

    def total_degree(self) -> int:
        """Largest total t-degree over the terms (polynomial elements only)"""
        if not self.is_polynomial():
            raise OpenWDVVError(f"{self.render()} is not a polynomial in the flat variables")
        return max((sum(e for _, e in k[2]) for k in self._terms), default=0)

    def is_quadratic_or_lower(self) -> bool:
        return self.is_polynomial(max_degree=2)

    def drop_free_polynomial(self, max_degree: int) -> "CoefElement":
        """Remove the plain polynomial terms of total degree <= max_degree"""
        kept = {}
        for key, v in self._terms.items():
            _, _, tm, lm, ea = key
            plain = not lm and not ea and all(e >= 0 for _, e in tm)
            if plain and sum(e for _, e in tm) <= max_degree:
                continue
            kept[key] = v
        return CoefElement(kept)

    def variables(self) -> set:
        found = set()
        for _, _, tm, lm, ea in self._terms:
            found.update(v for v, _ in tm)
            found.update(v for v, _ in lm)
            found.update(v for v, _ in ea)
        return found

    def free_of(self, j: int) -> bool:
        return j not in self.variables()

    def num_terms(self) -> int:
        return len(self._terms)

    def terms(self) -> List[Tuple[TermKey, Fraction]]:
        """Terms in canonical order"""
        return sorted(self._terms.items(), key=lambda kv: _sort_key(kv[0]))

    # inversion

    def _conjugate(self, flip_sqrt2: bool, flip_imag: bool) -> "CoefElement":
        terms = {}
        for k, v in self._terms.items():
            sign = 1
            if flip_sqrt2 and k[0]:
                sign = -sign
            if flip_imag and k[1]:
                sign = -sign
            terms[k] = sign * v
        return CoefElement(terms)

    def inverse(self) -> "CoefElement":
        if not self._terms:
            raise ZeroDivisionError("inverse of the zero coefficient")
        if len(self._terms) == 1:
            (s, i, tm, lm, ea), v = next(iter(self._terms.items()))
            if lm:
                raise NotInvertibleError(f"{self.render()} is not a unit of the coefficient ring")
            q = 1 / v
            if s:
                q = q / 2
            if i:
                q = -q
            inv_key = (s, i, tuple((var, -e) for var, e in tm), (), tuple((var, -c) for var, c in ea))
            return CoefElement({inv_key: q})
        if self.is_constant():
            # product of the other Galois conjugates over Q(sqrt2, I)
            cofactor = (
                self._conjugate(True, False)
                * self._conjugate(False, True)
                * self._conjugate(True, True)
            )
            norm = self * cofactor
            return cofactor * (1 / norm.rational_value())
        raise NotInvertibleError(f"{self.render()} is not a unit of the coefficient ring")

    # derivation

    def derive(self, j: int) -> "CoefElement":
        if j < 1:
            raise UnknownVariableError(f"Flat variables are numbered from 1, got {j}")
        terms: Dict[TermKey, Fraction] = {}
        down = ((j, -1),)

        def put(key: TermKey, value: Fraction):
            terms[key] = terms.get(key, Fraction(0)) + value

        for key, v in self._terms.items():
            s, i, tm, lm, ea = key
            e = dict(tm).get(j, 0)
            l = dict(lm).get(j, 0)
            a = dict(ea).get(j, Fraction(0))
            if e:
                put((s, i, _merge(tm, down), lm, ea), v * e)
            if l:
                put((s, i, _merge(tm, down), _merge(lm, down), ea), v * l)
            if a:
                put(key, v * a)
        return CoefElement(terms)

    def antiderive(self, j: int) -> "CoefElement":
        """Antiderivative in t_j with the j-free integration constant set to zero"""
        if j < 1:
            raise UnknownVariableError(f"Flat variables are numbered from 1, got {j}")
        terms: Dict[TermKey, Fraction] = {}
        for key, v in self._terms.items():
            s, i, tm, lm, ea = key
            e = dict(tm).get(j, 0)
            l = dict(lm).get(j, 0)
            a = dict(ea).get(j, Fraction(0))
            rest_t = tuple((var, p) for var, p in tm if var != j)
            rest_l = tuple((var, p) for var, p in lm if var != j)
            try:
                pieces = _primitive_factor(e, l, a)
            except NotAntidifferentiableError as exc:
                term = CoefElement({key: v}).render()
                raise NotAntidifferentiableError(f"{term}: {exc}", term=term) from exc
            for (e2, l2), c in pieces.items():
                new_key = (
                    s,
                    i,
                    _merge(rest_t, ((j, e2),) if e2 else ()),
                    _merge(rest_l, ((j, l2),) if l2 else ()),
                    ea,
                )
                terms[new_key] = terms.get(new_key, Fraction(0)) + v * c
        return CoefElement(terms)

    # evaluation

    def eval_numeric(self, assignment: Mapping[int, complex]) -> complex:
        values: List[complex] = []
        for (s, i, tm, lm, ea), v in self._terms.items():
            try:
                z = complex(float(v))
                if s:
                    z *= _SQRT2
                if i:
                    z *= 1j
                for var, e in tm:
                    z *= complex(assignment[var]) ** e
                for var, l in lm:
                    z *= cmath.log(complex(assignment[var])) ** l
                if ea:
                    z *= cmath.exp(sum(float(c) * complex(assignment[var]) for var, c in ea))
            except KeyError as exc:
                raise MissingAssignmentError(f"No numeric value for t{exc.args[0]}") from exc
            values.append(z)
        values.sort(key=abs)
        return complex(math.fsum(z.real for z in values), math.fsum(z.imag for z in values))

    # substitution

    def substitute_scaling(self, scales: Mapping[int, Scalar]) -> "CoefElement":
        """Replace t_j by scales[j] * t_j"""
        factors = {j: as_fraction(a) for j, a in scales.items()}
        terms: Dict[TermKey, Fraction] = {}
        for (s, i, tm, lm, ea), v in self._terms.items():
            for var, _ in lm:
                if factors.get(var, 1) != 1:
                    raise OpenWDVVError(f"Cannot rescale t{var} inside a logarithm")
            coeff = v
            for var, e in tm:
                coeff *= factors.get(var, Fraction(1)) ** e
            new_ea = tuple((var, c * factors.get(var, Fraction(1))) for var, c in ea)
            key = (s, i, tm, lm, new_ea)
            terms[key] = terms.get(key, Fraction(0)) + coeff
        return CoefElement(terms)

    # rendering

    def render(self, names: Optional[Mapping[int, str]] = None) -> str:
        names = names or {}
        if not self._terms:
            return "0"
        out: List[str] = []
        for (s, i, tm, lm, ea), v in self.terms():
            factors: List[str] = []
            if s:
                factors.append("sqrt2")
            if i:
                factors.append("I")
            for var, e in tm:
                name = names.get(var, f"t{var}")
                factors.append(name if e == 1 else f"{name}^{e}")
            for var, l in lm:
                name = names.get(var, f"t{var}")
                factors.append(f"log({name})" if l == 1 else f"log({name})^{l}")
            if ea:
                factors.append(f"exp({_render_linear_form(ea, names)})")
            if not factors:
                body = _render_fraction(v)
            elif v == 1:
                body = "*".join(factors)
            elif v == -1:
                body = "-" + "*".join(factors)
            else:
                body = _render_fraction(v) + "*" + "*".join(factors)
            if out and body.startswith("-"):
                out.append(f" - {body[1:]}")
            elif out:
                out.append(f" + {body}")
            else:
                out.append(body)
        return "".join(out)


def add(a: CoefElement, b: CoefElement) -> CoefElement:
    return a + b


def mul(a: CoefElement, b: CoefElement) -> CoefElement:
    return a * b


def negate(a: CoefElement) -> CoefElement:
    return -a


def _check_declared(j: int, declared: Optional[Iterable[int]]):
    if declared is not None and j not in set(declared):
        raise UnknownVariableError(f"t{j} is not a declared flat variable")


def derive_t(a: CoefElement, j: int, declared: Optional[Iterable[int]] = None) -> CoefElement:
    _check_declared(j, declared)
    return a.derive(j)


def antiderive_t(a: CoefElement, j: int, declared: Optional[Iterable[int]] = None) -> CoefElement:
    _check_declared(j, declared)
    return a.antiderive(j)


def eval_numeric(a: CoefElement, assignment: Mapping[int, complex]) -> complex:
    return a.eval_numeric(assignment)


def t(j: int, power: int = 1) -> CoefElement:
    """Shorthand for the flat variable t_j (to a power)"""
    return CoefElement.var(j, power)


ZERO = CoefElement.zero()
ONE = CoefElement.one()
SQRT2 = CoefElement.sqrt2()
I = CoefElement.imag()
