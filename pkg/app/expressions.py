"""
Parser for the expression language of spec files.

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := ("+" | "-") unary | power
    power   := atom (("^" | "**") ["-"] INT)?
    atom    := INT | NAME | "(" expr ")" | exp "(" expr ")" | log "(" NAME ")"

NAME is a declared flat variable, the chart variable (p in the affine
chart, z in the exponential chart), p in the exponential chart (the linear
log term of a primitive), or one of the constants sqrt2 and I. No floating
point literals are accepted.
"""
import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

from .coefring import CoefElement, I, ONE, SQRT2
from .errors import NotInvertibleError, OpenWDVVError, SpecParseError
from .laurent import Chart, LaurentPoly, LogLaurent
from .openwdvv import OpenPotential

logger = logging.getLogger(__name__)

_TOKEN = re.compile(r"(?P<space>[ \t\r]+)|(?P<newline>\n)|(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>\*\*|[-+*/^(),])")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str, key: Optional[str] = None) -> List[Token]:
    tokens: List[Token] = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            ch = text[pos]
            reason = "floating point literals are not accepted" if ch == "." else f"unexpected character {ch!r}"
            raise SpecParseError(reason, line, pos - line_start + 1, key)
        kind = match.lastgroup
        if kind == "newline":
            line, line_start = line + 1, match.end()
        elif kind != "space":
            tokens.append(Token(kind, match.group(), line, pos - line_start + 1))
        pos = match.end()
    tokens.append(Token("end", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    """Recursive descent over the token list, building LogLaurent values"""

    def __init__(self, text: str, chart: Chart, variables: Sequence[str], key: Optional[str]):
        self.chart = chart
        self.key = key
        self.index = {name: j + 1 for j, name in enumerate(variables)}
        self.tokens = tokenize(text, key)
        self.pos = 0

    # token helpers

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def error(self, message: str, token: Optional[Token] = None) -> SpecParseError:
        token = token or self.current
        return SpecParseError(message, token.line, token.column, self.key)

    def accept(self, *texts: str) -> Optional[Token]:
        token = self.current
        if token.kind == "op" and token.text in texts:
            self.pos += 1
            return token
        return None

    def expect(self, text: str) -> Token:
        token = self.accept(text)
        if token is None:
            raise self.error(f"expected {text!r}, found {self.current.text or 'end of input'!r}")
        return token

    # grammar

    def parse(self) -> LogLaurent:
        if self.current.kind == "end":
            raise self.error("empty expression")
        value = self.expr()
        if self.current.kind != "end":
            raise self.error(f"unexpected {self.current.text!r}")
        return value

    def expr(self) -> LogLaurent:
        value = self.term()
        while True:
            if self.accept("+"):
                value = value + self.term()
            elif self.accept("-"):
                value = value - self.term()
            else:
                return value

    def term(self) -> LogLaurent:
        value = self.unary()
        while True:
            if self.accept("*"):
                value = value * self.unary()
            elif self.current.kind == "op" and self.current.text == "/":
                token = self.current
                self.pos += 1
                value = value * self.reciprocal(self.unary(), token)
            else:
                return value

    def unary(self) -> LogLaurent:
        if self.accept("-"):
            return -self.unary()
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> LogLaurent:
        base = self.atom()
        token = self.accept("^", "**")
        if token is None:
            return base
        negative = self.accept("-") is not None
        if self.current.kind != "int":
            raise self.error("exponents must be integer literals")
        k = int(self.current.text)
        self.pos += 1
        if k == 0:
            return self.lift(ONE)
        result = base
        for _ in range(k - 1):
            result = result * base
        return self.reciprocal(result, token) if negative else result

    def atom(self) -> LogLaurent:
        token = self.current
        if token.kind == "int":
            self.pos += 1
            return self.lift(CoefElement.const(int(token.text)))
        if self.accept("("):
            value = self.expr()
            self.expect(")")
            return value
        if token.kind != "name":
            raise self.error(f"unexpected {token.text or 'end of input'!r}")
        self.pos += 1
        name = token.text
        if name == "exp":
            return self.exponential(token)
        if name == "log":
            return self.logarithm(token)
        if name in self.index:
            return self.lift(CoefElement.var(self.index[name]))
        if name == "sqrt2":
            return self.lift(SQRT2)
        if name == "I":
            return self.lift(I)
        if name == "p":
            if self.chart.is_exponential:
                return LogLaurent(self.chart, {1: LaurentPoly.const(self.chart, 1)})
            return LogLaurent.of(self.chart, LaurentPoly.monomial(self.chart, 1))
        if name == "z":
            if not self.chart.is_exponential:
                raise self.error("z is the chart variable of the exponential chart only", token)
            return LogLaurent.of(self.chart, LaurentPoly.monomial(self.chart, 1))
        raise self.error(f"unknown name {name!r}", token)

    # atoms with arguments

    def exponential(self, token: Token) -> LogLaurent:
        self.expect("(")
        arg = self.expr()
        self.expect(")")
        if any(k not in (0, 1) for k in arg.parts):
            raise self.error("exp argument must be linear", token)
        body = arg.parts.get(0, LaurentPoly.zero(self.chart))
        if not body.is_p_free():
            raise self.error("exp argument may not contain the chart variable", token)
        form = {}
        for key, coeff in body.coefficient(0).terms():
            sqrt2, imag, monomial, logs, exps = key
            if sqrt2 or imag or logs or exps or len(monomial) != 1 or monomial[0][1] != 1:
                raise self.error("exp argument must be a rational linear form in the flat variables", token)
            form[monomial[0][0]] = coeff
        result = LaurentPoly.const(self.chart, CoefElement.exp(form))
        if 1 in arg.parts:
            # exp(c p) = z^(c / kappa)
            c = arg.parts[1].coefficient(0) * self.chart.kappa_element.inverse()
            if not arg.parts[1].is_p_free() or not c.is_rational() or c.rational_value().denominator != 1:
                raise self.error("exp(c*p) needs c/kappa to be an integer", token)
            result = result.shift_exponents(int(c.rational_value()))
        return LogLaurent.of(self.chart, result)

    def logarithm(self, token: Token) -> LogLaurent:
        self.expect("(")
        arg = self.current
        if arg.kind != "name":
            raise self.error("log takes a single name")
        self.pos += 1
        self.expect(")")
        if arg.text in self.index:
            return self.lift(CoefElement.log(self.index[arg.text]))
        if arg.text == "p" and not self.chart.is_exponential:
            return LogLaurent(self.chart, {1: LaurentPoly.const(self.chart, 1)})
        raise self.error(f"log({arg.text}) is not part of the language", arg)

    # helpers

    def lift(self, c: CoefElement) -> LogLaurent:
        return LogLaurent.of(self.chart, LaurentPoly.const(self.chart, c))

    def reciprocal(self, value: LogLaurent, token: Token) -> LogLaurent:
        """Inverse of a single term c * x^k without log part"""
        if set(value.parts) != {0} or len(value.parts[0].items()) != 1:
            raise self.error("only single terms can be inverted", token)
        (k, c), = value.parts[0].items()
        try:
            inverse = c.inverse()
        except (NotInvertibleError, ZeroDivisionError) as e:
            raise self.error(str(e), token) from e
        return LogLaurent.of(self.chart, LaurentPoly.monomial(self.chart, -k, inverse))


def parse(text: str, chart: Chart, variables: Sequence[str], key: Optional[str] = None) -> LogLaurent:
    """Parse text into a polynomial in the log term with Laurent coefficients"""
    logger.debug(f"Parsing {key or 'expression'}: {text!r}")
    try:
        return _Parser(text, chart, variables, key).parse()
    except SpecParseError:
        raise
    except OpenWDVVError as e:
        logger.error(f"Expression {key or text!r} failed: {e}", exc_info=True)
        raise SpecParseError(str(e), key=key) from e


def parse_superpotential(text: str, chart: Chart, variables: Sequence[str]) -> LaurentPoly:
    value = parse(text, chart, variables, key="lambda")
    if any(k != 0 for k in value.parts):
        raise SpecParseError("the superpotential cannot contain the log term", key="lambda")
    return value.parts.get(0, LaurentPoly.zero(chart))


def parse_coefficient(text: str, variables: Sequence[str], key: Optional[str] = None) -> CoefElement:
    """p-free expression, e.g. a potential F"""
    chart = Chart("affine")
    value = parse(text, chart, variables, key=key)
    body = value.parts.get(0, LaurentPoly.zero(chart))
    if any(k != 0 for k in value.parts) or not body.is_p_free():
        raise SpecParseError("expression may not depend on p", key=key)
    return body.coefficient(0)


def parse_rational(text: str, key: Optional[str] = None) -> Fraction:
    value = parse_coefficient(str(text), [], key=key)
    if not value.is_rational():
        raise SpecParseError(f"{text!r} is not a rational number", key=key)
    return value.rational_value()


def parse_open_potential(text: str, chart: Chart, variables: Sequence[str]) -> OpenPotential:
    """Omega = laurent + c * L + correction, the p^0 part being the correction"""
    value = parse(text, chart, variables, key="Omega")
    if any(k not in (0, 1) for k in value.parts):
        raise SpecParseError("Omega is at most linear in the log term", key="Omega")
    log_part = value.parts.get(1, LaurentPoly.zero(chart))
    if not log_part.is_p_free():
        raise SpecParseError("the log term must have a p-free coefficient", key="Omega")
    body = value.parts.get(0, LaurentPoly.zero(chart))
    correction = body.coefficient(0)
    laurent = body - LaurentPoly.const(chart, correction)
    return OpenPotential(laurent, log_part.coefficient(0), correction)
