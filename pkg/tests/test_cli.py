import json

import pytest

from app import __version__
from app.cli import EXIT_CHECK_FAILED, EXIT_INPUT_ERROR, EXIT_OK, main
from app.config import settings

H0_2_TOML = """
variables = ["t1", "t2"]
lambda = "p^3 + t2*p + t1"
weights = [["0", "0"], ["1/3", "0"]]
d = "1/3"
F = "t1^2*t2/6 - t2^4/216"
Omega = "p^4/4 + t2*p^2/2 + t1*p + t2^2/6"
"""

BROKEN_TOML = """
variables = ["t1"]
F = "t1^3"
Omega = "p^2"
"""


@pytest.fixture(autouse=True)
def single_thread(monkeypatch):
    monkeypatch.setattr(settings, "threads", 1)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_version(capsys):
    code, out, _ = run(capsys, "--version")
    assert code == EXIT_OK
    assert __version__ in out


def test_catalog_list(capsys):
    code, out, _ = run(capsys, "catalog", "list")
    assert code == EXIT_OK
    names = [item["name"] for item in json.loads(out)]
    assert names == ["h0_1", "h0_2", "h0_n", "h0_n_0", "trig1", "trig2", "h1_1"]


def test_catalog_show_with_parameter(capsys, tmp_path):
    out_file = tmp_path / "h0_n.json"
    code, out, _ = run(capsys, "catalog", "show", "h0_n", "-n", "3", "--out", str(out_file))
    assert code == EXIT_OK
    assert out == ""
    info = json.loads(out_file.read_text())
    assert info["name"] == "h0_n(n=3)"
    assert info["euler_weights"]["d"] == "1/2"


def test_derive_h0_2(capsys):
    code, out, err = run(capsys, "derive", "h0_2", "--summary")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["source"] == "catalog:h0_2"
    assert report["Omega_tilde"] == "1/6*t2^2"
    assert report["lambda"] == "p^3 + t2*p + t1"
    assert all(check["passed"] for check in report["checks"])
    assert {c["target"]: c["matches"] for c in report["calibration"]} == {"F": True, "Omega": True}
    assert "[ok  ] closed_wdvv" in err


def test_derive_is_deterministic(capsys):
    _, first, _ = run(capsys, "derive", "h0_n(2)")
    _, second, _ = run(capsys, "derive", "h0_n", "-n", "2")
    assert first == second


def test_derive_trig2_passes_despite_printed_slip(capsys):
    code, out, _ = run(capsys, "derive", "trig2", "--timings")
    assert code == EXIT_OK
    report = json.loads(out)
    F = next(c for c in report["calibration"] if c["target"] == "F")
    assert not F["matches"]
    assert any("differs from the printed one" in w for w in report["warnings"])
    assert "frobenius" in report["timings"]


def test_derive_without_calibration(capsys):
    code, out, _ = run(capsys, "derive", "trig1", "--no-calibration", "--engine", "trace")
    assert code == EXIT_OK
    report = json.loads(out)
    assert "calibration" not in report or report["calibration"] == []
    assert "calibration comparison disabled" in report["warnings"]


def test_derive_spec_file(capsys, tmp_path):
    path = tmp_path / "cubic.toml"
    path.write_text(H0_2_TOML)
    code, out, _ = run(capsys, "derive", str(path))
    assert code == EXIT_OK
    assert json.loads(out)["F"] == json.loads(run(capsys, "derive", "h0_2")[1])["F"]


def test_verify_passes_for_consistent_pair(capsys, tmp_path):
    path = tmp_path / "pair.toml"
    path.write_text(H0_2_TOML)
    code, out, _ = run(capsys, "verify", str(path))
    assert code == EXIT_OK
    names = [c["name"] for c in json.loads(out)["checks"]]
    assert names == [
        "eta_constant",
        "closed_wdvv",
        "open_wdvv",
        "oriented_wdvv",
        "unit_conditions",
        "main_identity",
        "quasi_homogeneity",
    ]


def test_verify_negative_control(capsys, tmp_path):
    path = tmp_path / "broken.toml"
    path.write_text(BROKEN_TOML)
    code, out, _ = run(capsys, "verify", str(path))
    assert code == EXIT_CHECK_FAILED
    failed = [c["name"] for c in json.loads(out)["checks"] if not c["passed"]]
    assert failed == ["unit_conditions"]


def test_verify_json_spec(capsys, tmp_path):
    path = tmp_path / "pair.json"
    path.write_text(json.dumps({"variables": ["t1"], "F": "t1^3/12", "Omega": "p^3/3 + t1*p", "lambda": "p^2 + t1"}))
    code, _, _ = run(capsys, "verify", str(path))
    assert code == EXIT_OK


@pytest.mark.parametrize(
    "content,suffix",
    [
        ('variables = ["t1"]\nlambda = "p^2 + 0.5*t1"\n', ".toml"),
        ('variables = ["t1"]\nlambda = "p^2 + t1"\ncolour = "red"\n', ".toml"),
        ('variables = ["p"]\nlambda = "p^2"\n', ".toml"),
        ("variables = [", ".toml"),
        ("{not json", ".json"),
    ],
)
def test_invalid_spec_files(capsys, tmp_path, content, suffix):
    path = tmp_path / f"bad{suffix}"
    path.write_text(content)
    code, out, err = run(capsys, "derive", str(path))
    assert code == EXIT_INPUT_ERROR
    assert out == ""
    assert "error:" in err


def test_parse_error_reports_position(capsys, tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text('variables = ["t1"]\nlambda = "p^2 + 0.5*t1"\n')
    _, _, err = run(capsys, "derive", str(path))
    assert "lambda: line 1, column 8" in err


def test_input_errors(capsys, tmp_path):
    assert run(capsys, "derive", "h0_9")[0] == EXIT_INPUT_ERROR
    assert run(capsys, "derive", "h0_n")[0] == EXIT_INPUT_ERROR
    assert run(capsys, "derive", str(tmp_path / "missing.toml"))[0] == EXIT_INPUT_ERROR
    assert run(capsys, "verify", str(tmp_path / "missing.toml"))[0] == EXIT_INPUT_ERROR
    assert run(capsys, "catalog", "show")[0] == EXIT_INPUT_ERROR
    assert run(capsys, "derive", "h0_2", "--tol", "-1")[0] == EXIT_INPUT_ERROR
    assert run(capsys, "frobnicate")[0] == EXIT_INPUT_ERROR


def test_verify_needs_both_potentials(capsys, tmp_path):
    path = tmp_path / "only_f.toml"
    path.write_text('variables = ["t1"]\nF = "t1^3/12"\n')
    code, _, err = run(capsys, "verify", str(path))
    assert code == EXIT_INPUT_ERROR
    assert "Omega" in err


def test_elliptic_check(capsys):
    code, out, _ = run(capsys, "elliptic-check", "--samples", "2", "--seed", "3", "--tol", "1e-7")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["mode"] == "numeric"
    assert report["numeric"]["seed"] == 3
    assert len(report["numeric"]["samples_table"]) == 2
