from fractions import Fraction

import pytest

from app import catalog
from app.catalog import Calibration, compare_with_printed, describe, parse_name
from app.coefring import t
from app.errors import CatalogError
from app.frobenius import derive_frobenius
from app.openwdvv import derive_open


def derive_and_compare(name, apply_calibration=True):
    entry = catalog.get(name)
    frob = derive_frobenius(entry.spec)
    open_data = derive_open(entry.spec, frob)
    return {c.target: c for c in compare_with_printed(entry, frob.F, open_data.Omega, apply_calibration)}


def test_list_entries():
    listing = {e.name: e for e in catalog.list_entries()}
    assert set(listing) == {"h0_1", "h0_2", "h0_n", "h0_n_0", "trig1", "trig2", "h1_1"}
    assert listing["h0_n"].arity == 1
    assert listing["h1_1"].mode == "numeric"


def test_get_validates_parameters():
    with pytest.raises(CatalogError):
        catalog.get("h0_3")
    with pytest.raises(CatalogError):
        catalog.get("h0_n")
    with pytest.raises(CatalogError):
        catalog.get("h0_n", 0)
    with pytest.raises(CatalogError):
        catalog.get("h0_2", 2)


def test_parametrized_families():
    entry = catalog.get("h0_n", 3)
    assert entry.label() == "h0_n(n=3)"
    assert entry.spec.n == 3
    assert entry.euler_weights.d == Fraction(1, 2)
    pole = catalog.get("h0_n_0", 2)
    assert pole.spec.n == 3
    assert pole.spec.lam.valuation == -1


@pytest.mark.parametrize(
    "text,expected",
    [("h0_n(3)", ("h0_n", 3)), ("h0_n:3", ("h0_n", 3)), ("h0_n(n=3)", ("h0_n", 3)), ("trig1", ("trig1", None))],
)
def test_parse_name(text, expected):
    assert parse_name(text) == expected


def test_parse_name_rejects_garbage():
    with pytest.raises(CatalogError):
        parse_name("h0_n(x)")


@pytest.mark.parametrize("name", ["h0_1", "h0_2", "trig1"])
def test_calibrated_potentials_match(name):
    comparisons = derive_and_compare(name)
    assert comparisons["F"].matches
    assert comparisons["Omega"].matches
    assert comparisons["F"].difference is None


def test_uncalibrated_h0_2_differs_by_the_scale():
    comparisons = derive_and_compare("h0_2", apply_calibration=False)
    assert not comparisons["F"].matches
    assert comparisons["Omega"].matches


def test_trig2_reports_the_printed_slip():
    comparisons = derive_and_compare("trig2")
    F = comparisons["F"]
    assert not F.matches
    expected = t(1, 2) * t(3) / 2 - t(1, 2) * t(2) / 2
    assert F.difference == expected.render({1: "t1", 2: "t2", 3: "t3"})
    assert "t3" in F.note
    assert comparisons["Omega"].matches


def test_numeric_entry_has_no_exact_comparison():
    entry = catalog.get("h1_1")
    assert entry.spec is None
    assert compare_with_printed(entry, t(1), None) == []


def test_calibration_must_be_invertible():
    with pytest.raises(CatalogError):
        Calibration(F_scale=Fraction(0))
    with pytest.raises(CatalogError):
        Calibration(t_scale=((1, Fraction(0)),))
    assert Calibration().is_identity()
    scaled = Calibration(t_scale=((2, Fraction(3)),), F_scale=Fraction(2))
    assert scaled.transport_F(t(1) * t(2)) == 6 * t(1) * t(2)
    assert scaled.describe()["t_scale"] == "t2 -> 3*t2"


def test_describe():
    info = describe(catalog.get("trig1"))
    assert info["name"] == "trig1"
    assert info["variables"] == ["t1", "t2"]
    assert "cos(p)" in info["lambda_human"]
    assert info["calibration"]["F_scale"] == "-1"
    assert describe(catalog.get("h1_1"))["printed"]["F"].startswith("(t1)^2*t3/2")
