import cmath
from fractions import Fraction

import numpy as np
import pytest

from app.coefring import CoefElement, SQRT2, t
from app.config import settings
from app.errors import DegenerateCriticalPointError, NumericRefusal, ResidueDomainError
from app.frobenius import sample_assignment
from app.laurent import AFFINE, Chart, LaurentPoly, RatFunc
from app.residue import (
    AT_INFINITY,
    CRITICAL,
    ResidueRequest,
    at_point,
    boundary_points,
    critical_polynomial,
    numeric_critical_points,
    residue_at_boundary,
    residue_complement,
    residue_numeric,
    residue_sum,
    residue_trace,
)

EXP = Chart("exp", "1")
EXP_I = Chart("exp", "i")

H02 = LaurentPoly(AFFINE, {3: 1, 1: t(2), 0: t(1)})
WITH_POLE = LaurentPoly(AFFINE, {1: 1, 0: t(1), -1: t(2)})
TRIG1 = LaurentPoly(EXP_I, {1: -CoefElement.exp({2: Fraction(1, 2)}), 0: t(1), -1: -CoefElement.exp({2: Fraction(1, 2)})})
TRIG2 = LaurentPoly(EXP, {2: 1, 1: SQRT2 * t(2), 0: t(1), -1: SQRT2 * CoefElement.exp({3: 1}) / 2})

SAMPLE = {1: 0.8 + 0.3j, 2: 1.1 - 0.4j, 3: 0.2 + 0.5j}


def tensor_request(lam, indices):
    numerator = LaurentPoly.const(lam.chart, 1)
    for j in indices:
        numerator = numerator * lam.derive_t(j)
    return ResidueRequest(RatFunc(numerator, lam.d_dp()), lam)


def test_boundary_points():
    assert boundary_points(H02) == ["infinity"]
    assert boundary_points(WITH_POLE) == ["zero", "infinity"]
    assert boundary_points(TRIG1) == ["zero", "infinity"]


def test_critical_polynomial_clears_negative_powers():
    m, p = critical_polynomial(WITH_POLE)
    assert m == 2
    assert p == LaurentPoly(AFFINE, {2: 1, 0: -t(2)})


def test_boundary_residue_orientation():
    inv = RatFunc(LaurentPoly.monomial(AFFINE, -1))
    assert residue_at_boundary(inv, "infinity") == CoefElement.const(-1)
    assert residue_at_boundary(inv, "zero") == CoefElement.const(1)
    # dp = dz / (kappa z) in the exponential chart
    one = RatFunc(LaurentPoly.const(EXP_I, 1))
    assert residue_at_boundary(one, "zero") == CoefElement.imag().inverse()


def test_h02_structure_constant():
    assert residue_sum(tensor_request(H02, (2, 2, 2))) == t(2) * Fraction(-1, 9)
    assert residue_sum(tensor_request(H02, (1, 2))) == CoefElement.const(Fraction(1, 3))
    assert residue_sum(tensor_request(H02, (1, 1))).is_zero()


def test_metric_with_pole_at_zero():
    assert residue_sum(tensor_request(WITH_POLE, (1, 1))).is_zero()
    assert residue_sum(tensor_request(WITH_POLE, (1, 2))) == CoefElement.const(1)
    assert residue_sum(tensor_request(WITH_POLE, (2, 2))).is_zero()


@pytest.mark.parametrize("lam", [H02, WITH_POLE, TRIG1, TRIG2], ids=["h02", "pole", "trig1", "trig2"])
def test_complement_and_trace_agree(lam):
    n = max(lam.variables())
    for indices in [(1, 1), (1, 2), (2, 2), (2, 2, 2), (1, 2, n), (n, n, n)]:
        req = tensor_request(lam, indices)
        assert residue_sum(req, "complement") == residue_sum(req, "trace")


@pytest.mark.parametrize("lam", [H02, WITH_POLE, TRIG1, TRIG2], ids=["h02", "pole", "trig1", "trig2"])
def test_numeric_oracle(lam):
    n = max(lam.variables())
    point = {j: SAMPLE[j] for j in range(1, n + 1)}
    for indices in [(1, 2), (2, 2), (2, 2, n)]:
        req = tensor_request(lam, indices)
        exact = residue_sum(req).eval_numeric(point)
        numeric = residue_numeric(req, point)
        assert abs(numeric - exact) <= 1e-9 * max(1.0, abs(exact))


def test_numeric_single_point_and_infinity():
    # 1/(p - 2) has residue 1 at p = 2 and -1 at infinity
    lam = LaurentPoly(AFFINE, {2: 1, 0: t(1)})
    f = RatFunc(LaurentPoly.const(AFFINE, 1), LaurentPoly(AFFINE, {1: 1, 0: -2}))
    point = {1: 1.0}
    assert cmath.isclose(residue_numeric(ResidueRequest(f, lam, at_point(2.0)), point, extra_points=[2.0]), 1.0, abs_tol=1e-10)
    assert cmath.isclose(residue_numeric(ResidueRequest(f, lam, AT_INFINITY), point, extra_points=[2.0]), -1.0, abs_tol=1e-10)


def test_complement_refuses_poles_off_the_critical_locus():
    lam = LaurentPoly(AFFINE, {2: 1, 0: t(1)})
    f = RatFunc(LaurentPoly.const(AFFINE, 1), LaurentPoly(AFFINE, {1: 1, 0: -1}))
    with pytest.raises(ResidueDomainError):
        residue_complement(ResidueRequest(f, lam, CRITICAL))


def test_trace_refuses_degenerate_critical_points():
    lam = LaurentPoly(AFFINE, {3: 1, 0: t(1)})
    with pytest.raises(DegenerateCriticalPointError):
        residue_trace(LaurentPoly.const(AFFINE, 1), lam)


def test_numeric_refuses_clustered_roots():
    lam = LaurentPoly(AFFINE, {3: 1, 1: t(2), 0: t(1)})
    with pytest.raises(NumericRefusal):
        numeric_critical_points(lam, {1: 1.0, 2: 0.0})


def test_unknown_engine():
    with pytest.raises(ValueError):
        residue_sum(tensor_request(H02, (1, 1)), engine="magic")


@pytest.mark.parametrize("lam", [H02, WITH_POLE, TRIG1, TRIG2], ids=["h02", "pole", "trig1", "trig2"])
@pytest.mark.parametrize("trial", range(3))
def test_global_residue_sum_vanishes(lam, trial):
    rng = np.random.default_rng([settings.seed, trial])
    n = max(lam.variables())
    indices = tuple(int(j) for j in rng.integers(1, n + 1, size=int(rng.integers(1, 4))))
    req = tensor_request(lam, indices)
    point = sample_assignment(n, settings.seed, trial)
    total = residue_numeric(req, point)
    for which in boundary_points(lam):
        total += residue_at_boundary(req.integrand, which).eval_numeric(point)
    assert abs(total) <= 1e-9 * max(1.0, abs(residue_numeric(req, point)))


@pytest.mark.parametrize("trial", range(3))
def test_residues_of_extra_poles_balance_infinity(trial):
    rng = np.random.default_rng([settings.seed, trial])
    num = LaurentPoly(AFFINE, {k: int(rng.integers(-4, 5)) * t(1, int(rng.integers(0, 3))) for k in range(5)})
    den = LaurentPoly(AFFINE, {3: 2, 2: -3, 1: -3, 0: 2})  # (p - 2)(p + 1)(2p - 1)
    f = RatFunc(num, den)
    lam = LaurentPoly(AFFINE, {2: 1, 0: t(1)})
    point = sample_assignment(1, settings.seed, trial)
    poles = [2.0, -1.0, 0.5]
    finite = sum(residue_numeric(ResidueRequest(f, lam, at_point(x)), point, extra_points=poles) for x in poles)
    at_infinity = residue_at_boundary(f, "infinity").eval_numeric(point)
    assert abs(finite + at_infinity) <= 1e-9 * max(1.0, abs(at_infinity))


@pytest.mark.parametrize("lam", [H02, WITH_POLE, TRIG1, TRIG2], ids=["h02", "pole", "trig1", "trig2"])
@pytest.mark.parametrize("trial", range(3))
def test_residue_sum_is_linear(lam, trial):
    rng = np.random.default_rng([settings.seed, trial])
    n = max(lam.variables())
    f = tensor_request(lam, tuple(int(j) for j in rng.integers(1, n + 1, size=2))).integrand
    g = tensor_request(lam, tuple(int(j) for j in rng.integers(1, n + 1, size=3))).integrand
    a = Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 5))) * t(1)
    b = CoefElement.const(Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 5))))
    combined = ResidueRequest(f * a + g * b, lam)
    for engine in ("complement", "trace"):
        expected = a * residue_sum(ResidueRequest(f, lam), engine) + b * residue_sum(ResidueRequest(g, lam), engine)
        assert residue_sum(combined, engine) == expected
