import json

import pytest

from app.config import settings
from app.errors import SpecParseError
from app.pipeline import RunOptions, input_hash, load_spec_file, report_json, superpotential_of, workflow
from app.schemas import CheckResult, NumericBlock, Report, SpecFile


def test_input_hash_is_canonical():
    assert input_hash({"a": 1, "b": [1, 2]}) == input_hash({"b": [1, 2], "a": 1})
    assert input_hash({"a": 1}) != input_hash({"a": 2})


def test_run_options_fall_back_to_settings(monkeypatch):
    monkeypatch.setattr(settings, "tol", 1e-6)
    options = RunOptions(seed=0)
    assert options.resolved_tol == 1e-6
    assert options.resolved_seed == 0
    assert options.as_dict()["q_terms"] == settings.q_terms


def test_numeric_block_precedence(tmp_path):
    path = tmp_path / "spec.toml"
    path.write_text('variables = ["t1"]\nlambda = "p^2 + t1"\n[numeric]\ntol = 1e-6\nseed = 5\n')
    spec_file = load_spec_file(path)
    merged = workflow._merge_numeric(spec_file, RunOptions(seed=9))
    assert merged.tol == 1e-6
    assert merged.seed == 9
    assert workflow._merge_numeric(SpecFile(variables=["t1"]), RunOptions()).tol is None


def test_superpotential_from_spec_file():
    spec_file = SpecFile.model_validate(
        {"variables": ["x", "y"], "lambda": "p^3 + y*p + x", "weights": [["0", "0"], ["1/3", "0"]], "d": "1/3"}
    )
    spec = superpotential_of(spec_file)
    assert spec.names() == {1: "x", 2: "y"}
    assert str(spec.euler_weights.d) == "1/3"


def test_weights_need_charge():
    spec_file = SpecFile.model_validate({"variables": ["t1"], "lambda": "p^2 + t1", "weights": [["0", "0"]]})
    with pytest.raises(SpecParseError):
        superpotential_of(spec_file)


def test_superpotential_without_p_is_refused():
    spec_file = SpecFile.model_validate({"variables": ["t1"], "lambda": "t1"})
    with pytest.raises(SpecParseError):
        superpotential_of(spec_file)


def test_derive_catalog_report():
    report = workflow.derive_catalog("h0_1", options=RunOptions(seed=1))
    assert report.passed
    assert report.F == "1/12*t1^3"
    assert report.eta == [["1/2"]]
    assert report.intersection_form_upper == [["2*t1"]]
    names = [c.name for c in report.checks]
    for expected in ("numeric_oracle", "local_form", "intersection_duality", "engine_agreement"):
        assert expected in names
    data = json.loads(report_json(report))
    assert "lambda" in data and "lambda_" not in data
    assert "timings" not in data


def test_pole_family_derives():
    report = workflow.derive_catalog("h0_n_0", 1, RunOptions(seed=2))
    assert report.passed
    assert report.eta == [["0", "1"], ["1", "0"]]


def test_failed_integration_is_reported_not_raised():
    # t1 enters quadratically, so (t1, t2) are not flat coordinates
    spec_file = SpecFile.model_validate({"variables": ["t1", "t2"], "lambda": "p^3 + t1^2*p + t2"})
    spec = superpotential_of(spec_file)
    report = workflow.derive(spec, "inline", "0", RunOptions(seed=3))
    assert not report.passed
    assert any(not c.passed for c in report.checks)


def test_numeric_block_defaults():
    block = NumericBlock()
    assert block.q_terms == 40 and block.seed == 20240601


def test_report_floats_use_17_significant_digits():
    report = Report(
        tool_version="0",
        input_hash="0",
        source="inline",
        mode="verify",
        chart="affine p",
        variables=["t1"],
        checks=[CheckResult(name="numeric_oracle", passed=True, max_residual=0.1)],
        numeric={"tol": 1e-7, "seed": 3, "table": [{"p": [0.5, 2.0]}]},
    )
    text = report_json(report)
    assert '"max_residual": 0.10000000000000001' in text
    assert '"tol": 9.9999999999999995e-08' in text
    assert "float:" not in text
    data = json.loads(text)
    assert data["checks"][0]["max_residual"] == 0.1
    assert data["numeric"]["seed"] == 3
    assert data["numeric"]["table"][0]["p"] == [0.5, 2]
