from fractions import Fraction

import pytest

from app.coefring import CoefElement, I, SQRT2, t
from app.errors import SpecParseError
from app.expressions import (
    parse,
    parse_coefficient,
    parse_open_potential,
    parse_rational,
    parse_superpotential,
    tokenize,
)
from app.laurent import AFFINE, Chart, LaurentPoly

EXP = Chart("exp", "1")
EXP_I = Chart("exp", "i")
T2 = ["t1", "t2"]
T3 = ["t1", "t2", "t3"]


def test_tokenize_tracks_positions():
    tokens = tokenize("t1 +\n  p^2")
    assert [(tok.text, tok.line, tok.column) for tok in tokens[:-1]] == [
        ("t1", 1, 1),
        ("+", 1, 4),
        ("p", 2, 3),
        ("^", 2, 4),
        ("2", 2, 5),
    ]
    assert tokens[-1].kind == "end"


def test_affine_superpotential():
    lam = parse_superpotential("p^3 + t2*p + t1", AFFINE, T2)
    assert lam == LaurentPoly(AFFINE, {3: 1, 1: t(2), 0: t(1)})
    assert parse_superpotential("p**2 + t1 - t2/p", AFFINE, T2) == LaurentPoly(AFFINE, {2: 1, 0: t(1), -1: -t(2)})


def test_exponential_chart_superpotential():
    text = "z^2 + sqrt2*t2*z + t1 + exp(t3 - p)/sqrt2"
    lam = parse_superpotential(text, EXP, T3)
    expected = LaurentPoly(EXP, {2: 1, 1: SQRT2 * t(2), 0: t(1), -1: SQRT2 * CoefElement.exp({3: 1}) / 2})
    assert lam == expected


def test_exp_of_imaginary_multiple():
    lam = parse_superpotential("t1 - exp(t2/2)*(exp(I*p) + exp(-I*p))", EXP_I, T2)
    e = CoefElement.exp({2: Fraction(1, 2)})
    assert lam == LaurentPoly(EXP_I, {1: -e, 0: t(1), -1: -e})


def test_coefficients():
    F = parse_coefficient("t1^2*t2/6 - t2^4/216", T2, key="F")
    assert F == t(1, 2) * t(2) / 6 - t(2, 4) / 216
    assert parse_coefficient("I*t1*log(t2)", T2) == I * t(1) * CoefElement.log(2)
    assert parse_coefficient("t1*t2^-1", T2) == t(1) * t(2, -1)


def test_rationals():
    assert parse_rational("1/3") == Fraction(1, 3)
    assert parse_rational("-(2/4)") == Fraction(-1, 2)
    assert parse_rational(0) == 0
    with pytest.raises(SpecParseError):
        parse_rational("sqrt2")


def test_open_potential_split():
    omega = parse_open_potential("z^2/2 + sqrt2*t2*z + t1*p - sqrt2*exp(t3)/(2*z) + t2^2/2", EXP, T3)
    assert omega.log_coefficient == t(1)
    assert omega.correction == t(2, 2) / 2
    assert omega.laurent.coefficient(-1) == -SQRT2 * CoefElement.exp({3: 1}) / 2
    assert omega.laurent.coefficient(0).is_zero()


def test_affine_log_term():
    omega = parse_open_potential("p^2/2 + t2*log(p)", AFFINE, T2)
    assert omega.log_coefficient == t(2)
    value = parse("log(p)^2", AFFINE, T2)
    assert set(value.parts) == {2}


def test_float_literals_are_refused():
    with pytest.raises(SpecParseError) as info:
        parse_superpotential("p^2 + 0.5*t1", AFFINE, ["t1"])
    assert info.value.line == 1
    assert info.value.column == 8
    assert "floating point" in str(info.value)


@pytest.mark.parametrize(
    "text,message",
    [
        ("p^2 + s1", "unknown name"),
        ("p^2 +", "unexpected"),
        ("(p + t1", "expected ')'"),
        ("p^t1", "integer literals"),
        ("p/(p + 1)", "single terms"),
        ("exp(p)", "chart variable"),
        ("exp(t1^2)", "linear form"),
        ("z + t1", "exponential chart only"),
        ("", "empty"),
    ],
)
def test_parse_errors(text, message):
    with pytest.raises(SpecParseError) as info:
        parse_superpotential(text, AFFINE, ["t1"])
    assert message in str(info.value)
    assert str(info.value).startswith("lambda: line 1")


def test_log_term_rejected_in_superpotential():
    with pytest.raises(SpecParseError):
        parse_superpotential("z + p", EXP, ["t1"])
    with pytest.raises(SpecParseError):
        parse_coefficient("t1 + p", ["t1"], key="F")


def test_inverse_of_non_unit_is_a_parse_error():
    with pytest.raises(SpecParseError) as info:
        parse_coefficient("1/(t1 + t2)", T2, key="F")
    assert info.value.key == "F"
