from fractions import Fraction

import pytest

from app import catalog
from app.coefring import CoefElement, ONE, ZERO, t
from app.errors import IntegrationConstantError
from app.frobenius import check_closed_wdvv, derive_frobenius, raise_index
from app.openwdvv import (
    OpenPotential,
    alcolado_rhs,
    check_calibration_transport,
    check_first_line_redundancy,
    check_main_identity,
    check_open_wdvv,
    check_oriented_wdvv,
    check_unit_conditions,
    derive_open,
    eta_from_F,
    integration_constants,
    omega_scaling_report,
    open_checks,
)


def derived(name):
    spec = catalog.get(name).spec
    frob = derive_frobenius(spec)
    return spec, frob, derive_open(spec, frob)


@pytest.mark.parametrize(
    "name,expected",
    [
        ("h0_1", ZERO),
        ("h0_2", t(2, 2) / 6),
        ("trig1", ZERO),
        ("trig2", t(2, 2) / 2),
    ],
)
def test_integration_constants(name, expected):
    _, _, open_data = derived(name)
    assert open_data.OmegaTilde == expected
    assert open_data.Omega.correction == expected


FAMILY_MEMBERS = [("h0_n", n) for n in range(1, 6)] + [("h0_n_0", n) for n in range(1, 5)]


@pytest.mark.parametrize("name,n", FAMILY_MEMBERS)
def test_family_members_pass_every_check(name, n):
    spec = catalog.get(name, n).spec
    frob = derive_frobenius(spec)
    open_data = derive_open(spec, frob)
    assert check_closed_wdvv(frob.c_raised).passed
    assert open_data.reports[0].name == "main_identity"
    failed = [r.name for r in open_data.reports if not r.passed]
    assert failed == []
    assert open_data.OmegaTilde == open_data.OmegaTilde.drop_free_polynomial(1)
    assert frob.F == frob.F.drop_free_polynomial(2)


@pytest.mark.parametrize(
    "name,n,F,omega_tilde",
    [
        ("h0_n", 1, t(1, 3) / 12, ZERO),
        ("h0_n", 2, t(1, 2) * t(2) / 6 - t(2, 4) / 216, t(2, 2) / 6),
        ("h0_n_0", 1, t(1, 2) * t(2) / 2 + t(2, 2) * CoefElement.log(2) / 2, -t(2) * CoefElement.log(2)),
    ],
)
def test_family_closed_forms(name, n, F, omega_tilde):
    spec = catalog.get(name, n).spec
    frob = derive_frobenius(spec)
    open_data = derive_open(spec, frob)
    assert frob.F == F
    assert open_data.OmegaTilde == omega_tilde


def test_pole_family_correction_has_no_linear_term():
    spec = catalog.get("h0_n_0", 2).spec
    _, omega_tilde = integration_constants(spec, alcolado_rhs(spec, derive_frobenius(spec).c_raised))
    assert omega_tilde == -t(3) * CoefElement.log(3)


@pytest.mark.parametrize("name", ["h0_1", "h0_2", "trig1", "trig2"])
def test_every_open_report_passes(name):
    _, _, open_data = derived(name)
    failed = [r.name for r in open_data.reports if not r.passed]
    assert failed == []
    names = [r.name for r in open_data.reports]
    assert names[:4] == ["main_identity", "open_wdvv", "oriented_wdvv", "unit_conditions"]
    assert "first_line_redundancy" in names


def test_h0_2_open_potential():
    spec, _, open_data = derived("h0_2")
    assert open_data.Lambda.log_coefficient.is_zero()
    assert open_data.Omega.laurent.coefficient(4) == CoefElement.const(Fraction(1, 4))
    assert open_data.Omega.laurent.coefficient(2) == t(2) / 2
    assert open_data.Delta[1][1] == CoefElement.const(Fraction(1, 3))
    assert open_data.Delta[0][1].is_zero()
    assert open_data.Omega.d_dp() == spec.lam


def test_exponential_chart_carries_log_term():
    _, _, open_data = derived("trig2")
    assert open_data.Omega.log_coefficient == t(1)
    assert "t1*p" in open_data.Omega.render_human().replace(" ", "")


def test_main_identity_detects_wrong_structure_constants():
    spec, frob, _ = derived("h0_2")
    c = [[[x for x in row] for row in plane] for plane in frob.c_raised]
    c[0][1][1] = c[0][1][1] + ONE
    assert check_main_identity(spec, frob.c_raised).passed
    assert not check_main_identity(spec, c).passed
    with pytest.raises(IntegrationConstantError):
        integration_constants(spec, alcolado_rhs(spec, c))


def test_rhs_is_laurent_for_consistent_data():
    spec, frob, _ = derived("trig1")
    rhs = alcolado_rhs(spec, frob.c_raised)
    assert all(entry.is_laurent() for row in rhs for entry in row)
    assert rhs[0][1] == rhs[1][0]
    assert check_first_line_redundancy(spec, frob.c_raised, rhs).passed


def test_cubic_correction_breaks_open_wdvv():
    spec, frob, open_data = derived("h0_2")
    omega = open_data.Omega
    bad = OpenPotential(omega.laurent, omega.log_coefficient, omega.correction + t(2, 3))
    assert check_open_wdvv(frob.F, omega, frob.eta).passed
    result = check_open_wdvv(frob.F, bad, frob.eta, spec.n, spec.names())
    assert not result.passed
    assert any(r.index[-1] == spec.n + 1 for r in result.residuals)
    assert not check_oriented_wdvv(frob.F, bad, frob.eta).passed


def test_unit_conditions_detect_t1_dependence():
    spec, _, open_data = derived("h0_2")
    omega = open_data.Omega
    assert check_unit_conditions(omega, spec.n).passed
    bad = OpenPotential(omega.laurent, omega.log_coefficient, omega.correction + t(1, 2))
    result = check_unit_conditions(bad, spec.n)
    assert not result.passed
    assert result.residuals[0].index == [1, 1]


def test_eta_from_F_recovers_metric():
    spec, frob, _ = derived("trig2")
    assert eta_from_F(frob.F, spec.n) == frob.eta


def test_open_checks_order():
    spec, frob, open_data = derived("h0_1")
    reports = open_checks(frob.F, open_data.Omega, frob.eta, spec.n)
    assert [r.name for r in reports] == ["open_wdvv", "oriented_wdvv", "unit_conditions"]
    assert all(r.passed for r in reports)


def test_calibration_transport_keeps_outcomes():
    entry = catalog.get("trig1")
    spec = entry.spec
    frob = derive_frobenius(spec)
    open_data = derive_open(spec, frob)
    calibration = entry.calibration
    result = check_calibration_transport(
        frob.F, open_data.Omega, spec, calibration.scales, calibration.F_scale, calibration.Omega_scale
    )
    assert result.passed
    assert len(result.notes) == 3
    # t1 -> 2 t1 breaks the unit condition on the transported side
    broken = check_calibration_transport(frob.F, open_data.Omega, spec, {1: Fraction(2)}, Fraction(1), Fraction(1))
    assert not broken.passed


def test_omega_scaling_is_recorded_only():
    entry = catalog.get("h0_2")
    report = omega_scaling_report(t(2, 3), entry.euler_weights)
    assert report.passed
    assert report.residuals
    assert "recorded only" in report.notes


def test_scaled_open_potential():
    omega = OpenPotential(catalog.get("h0_1").spec.lam, t(1), t(1, 2))
    scaled = omega.scaled({1: Fraction(2)}, Fraction(3))
    assert scaled.log_coefficient == 6 * t(1)
    assert scaled.correction == 12 * t(1, 2)
    assert scaled.laurent.coefficient(0) == 6 * t(1)
