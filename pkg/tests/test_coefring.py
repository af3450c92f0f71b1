import cmath
from fractions import Fraction

import numpy as np
import pytest
import sympy

from app.coefring import CoefElement, I, ONE, SQRT2, ZERO, add, antiderive_t, derive_t, eval_numeric, mul, negate, t
from app.config import settings
from app.errors import MissingAssignmentError, NotAntidifferentiableError, NotInvertibleError, UnknownVariableError
from app.frobenius import sample_assignment


def test_canonical_form_is_order_independent():
    a = (t(1) + t(2)) * (t(1) - t(2))
    b = t(1, 2) - t(2, 2)
    assert a == b
    assert hash(a) == hash(b)
    assert t(1) * t(2) == t(2) * t(1)


def test_algebraic_constants_reduce():
    assert SQRT2 * SQRT2 == CoefElement.const(2)
    assert I * I == -ONE
    assert (SQRT2 * I) ** 2 == CoefElement.const(-2)


def test_exponentials_multiply_by_adding_forms():
    e = CoefElement.exp({1: 1})
    assert e * e == CoefElement.exp({1: 2})
    assert CoefElement.exp({1: 1, 2: Fraction(1, 2)}) * CoefElement.exp({2: Fraction(-1, 2)}) == e
    assert CoefElement.exp({}) == ONE


def test_derivatives():
    f = t(1, 3) * t(2) + CoefElement.exp({2: Fraction(1, 2)})
    assert f.derive(1) == 3 * t(1, 2) * t(2)
    assert f.derive(2) == t(1, 3) + CoefElement.exp({2: Fraction(1, 2)}) / 2
    assert CoefElement.log(3).derive(3) == t(3, -1)
    assert f.derive(4).is_zero()


def test_antiderivative_inverts_derivative():
    f = t(1, 2) * t(2) + SQRT2 * t(2) * CoefElement.exp({3: 1}) + t(2, -1)
    for j in (1, 2, 3):
        assert f.antiderive(j).derive(j) == f


def test_antiderivative_of_reciprocal_is_log():
    assert t(4, -1).antiderive(4) == CoefElement.log(4)
    g = t(4) * CoefElement.log(4)
    assert g.antiderive(4).derive(4) == g


def test_antiderivative_refuses_log_times_exp():
    f = CoefElement.log(1) * CoefElement.exp({1: 1})
    with pytest.raises(NotAntidifferentiableError) as info:
        f.antiderive(1)
    assert info.value.term is not None


def test_inverse_of_units():
    assert SQRT2.inverse() == SQRT2 / 2
    assert (ONE + SQRT2).inverse() == SQRT2 - 1
    assert (ONE + I).inverse() * (ONE + I) == ONE
    x = 3 * t(1, 2) * CoefElement.exp({2: 1})
    assert x.inverse() * x == ONE


def test_inverse_of_sum_with_variables_fails():
    with pytest.raises(NotInvertibleError):
        (t(1) + t(2)).inverse()
    with pytest.raises(NotInvertibleError):
        CoefElement.log(1).inverse()


def test_eval_numeric_matches_sympy():
    t1, t2 = sympy.symbols("t1 t2")
    f = t(1, 2) * t(2) / 3 + SQRT2 * CoefElement.exp({2: Fraction(1, 2)}) - I * t(1)
    expr = t1 ** 2 * t2 / 3 + sympy.sqrt(2) * sympy.exp(t2 / 2) - sympy.I * t1
    point = {1: 0.7 + 0.2j, 2: -0.3 + 1.1j}
    expected = complex(expr.subs({t1: point[1], t2: point[2]}).evalf(30))
    assert cmath.isclose(f.eval_numeric(point), expected, rel_tol=1e-13)


def test_eval_numeric_requires_every_variable():
    with pytest.raises(MissingAssignmentError):
        (t(1) + t(2)).eval_numeric({1: 1.0})


def test_substitute_scaling():
    f = t(1, 2) * t(2) + CoefElement.exp({2: 1})
    scaled = f.substitute_scaling({1: 2, 2: Fraction(1, 2)})
    assert scaled == 2 * t(1, 2) * t(2) + CoefElement.exp({2: Fraction(1, 2)})


def test_predicates():
    assert (t(1) * t(2) + 5).is_quadratic_or_lower()
    assert not t(1, 3).is_quadratic_or_lower()
    assert (t(1, 2) * t(3) + t(2)).total_degree() == 3
    assert CoefElement.const(Fraction(2, 3)).is_rational()
    assert not SQRT2.is_rational()
    assert (SQRT2 + I).is_constant()
    assert t(2).free_of(1)
    assert CoefElement.exp({3: 1}).variables() == {3}
    assert ZERO.is_zero() and not ZERO.is_unit()


def test_declared_variables_are_enforced():
    with pytest.raises(UnknownVariableError):
        derive_t(t(1), 3, declared=[1, 2])
    with pytest.raises(UnknownVariableError):
        antiderive_t(t(1), 0)
    with pytest.raises(UnknownVariableError):
        CoefElement.var(0)


def test_render_is_canonical():
    assert ZERO.render() == "0"
    assert t(1).render({1: "x"}) == "x"
    f = t(1, 2) * t(2) / 2 - t(2, 4) / 72
    assert f.render() == (t(2, 4) * Fraction(-1, 72) + t(2) * t(1, 2) / 2).render()


def test_constants_hash_like_numbers():
    assert hash(CoefElement.const(3)) == hash(3)
    assert hash(CoefElement.const(Fraction(1, 2))) == hash(Fraction(1, 2))
    assert hash(ZERO) == hash(0)
    lookup = {CoefElement.const(2): "two"}
    assert lookup[2] == "two"
    assert len({ONE, 1, Fraction(1)}) == 1


def test_drop_free_polynomial():
    rest = t(1, 3) + t(2) * CoefElement.log(2) + CoefElement.exp({1: 1}) + t(1, -1)
    f = rest + t(1) * t(2) + SQRT2 * t(2) + 4
    assert f.drop_free_polynomial(1) == rest + t(1) * t(2)
    assert f.drop_free_polynomial(2) == rest


def random_element(rng, n=3, terms=4):
    element = ZERO
    for _ in range(terms):
        term = CoefElement.const(Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 7))))
        if rng.random() < 0.3:
            term = term * SQRT2
        if rng.random() < 0.3:
            term = term * I
        for j in range(1, n + 1):
            e = int(rng.integers(-1, 4))
            if e:
                term = term * t(j, e)
        if rng.random() < 0.25:
            term = term * CoefElement.log(int(rng.integers(1, n + 1)))
        if rng.random() < 0.25:
            term = term * CoefElement.exp({int(rng.integers(1, n + 1)): Fraction(int(rng.integers(-2, 3)), 2)})
        element = element + term
    return element


@pytest.mark.parametrize("trial", range(8))
def test_ring_laws_on_generated_elements(trial):
    rng = np.random.default_rng([settings.seed, trial])
    a, b, c = (random_element(rng) for _ in range(3))
    assert add(a, negate(a)).is_zero()
    assert a + b == b + a
    assert mul(a, b + c) == mul(a, b) + mul(a, c)
    assert (a * b) * c == a * (b * c)


@pytest.mark.parametrize("trial", range(8))
def test_leibniz_and_commuting_derivatives(trial):
    rng = np.random.default_rng([settings.seed, trial])
    a, b = random_element(rng), random_element(rng)
    for j in (1, 2, 3):
        assert (a * b).derive(j) == a.derive(j) * b + a * b.derive(j)
        for k in (1, 2, 3):
            assert a.derive(j).derive(k) == a.derive(k).derive(j)


@pytest.mark.parametrize("trial", range(8))
def test_eval_numeric_is_a_ring_homomorphism(trial):
    rng = np.random.default_rng([settings.seed, trial])
    a, b = random_element(rng), random_element(rng)
    point = sample_assignment(3, settings.seed, trial)
    va, vb = eval_numeric(a, point), eval_numeric(b, point)
    assert cmath.isclose(eval_numeric(a + b, point), va + vb, rel_tol=1e-9, abs_tol=1e-6)
    assert cmath.isclose(eval_numeric(a * b, point), va * vb, rel_tol=1e-9, abs_tol=1e-6)
    assert cmath.isclose(eval_numeric(-a, point), -va, rel_tol=1e-12, abs_tol=1e-12)
