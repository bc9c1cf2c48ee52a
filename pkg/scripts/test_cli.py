"""
Tests for the bellshape command line: outputs and exit codes.
"""

import json
import math
import os

import pytest

from scripts.cli import EXIT_FAILURE, EXIT_INPUT, EXIT_OK, main
from scripts.numeric import PRECISION_ENV

DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "Data")
GAUSSIAN = os.path.join(DATA_DIR, "representations", "gaussian.json")
EX61 = os.path.join(DATA_DIR, "representations", "ex61.json")


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture(autouse=True)
def _default_precision(monkeypatch):
    monkeypatch.delenv(PRECISION_ENV, raising=False)


# ---------------------------------------------------------------------------
# eval and density
# ---------------------------------------------------------------------------

def test_eval_of_the_gaussian_representation(capsys):
    code, out, _ = _run(capsys, "eval", GAUSSIAN, "--xi", "0.5")
    assert code == EXIT_OK
    payload = json.loads(out)
    (value,) = payload["values"]
    assert abs(value["re"] - math.exp(-0.25)) <= 1e-15
    assert value["im"] == 0
    assert payload["precision"]["working_dps"] == 30


def test_eval_accepts_comma_separated_frequencies_and_csv(capsys):
    code, out, _ = _run(capsys, "eval", GAUSSIAN, "--xi", "1,2", "--closed-form", "--format", "csv")
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0] == "xi,re,im"
    assert len(lines) == 3


def test_density_defaults_to_csv(capsys):
    code, out, _ = _run(capsys, "density", GAUSSIAN, "--x", "0", "--t", "0.5")
    assert code == EXIT_OK
    header, row = out.strip().splitlines()
    assert header == "x,value"
    assert abs(float(row.split(",")[1]) - 1 / math.sqrt(6 * math.pi)) <= 1e-12


def test_output_file(capsys, tmp_path):
    target = tmp_path / "values.json"
    code, out, _ = _run(capsys, "eval", GAUSSIAN, "--xi", "1", "-o", str(target))
    assert code == EXIT_OK and out == ""
    assert json.loads(target.read_text(encoding="utf-8"))["name"] == "gaussian"


# ---------------------------------------------------------------------------
# check-phi and sign-changes
# ---------------------------------------------------------------------------

def test_check_phi_exit_code_follows_the_verdict(capsys):
    code, out, _ = _run(capsys, "check-phi", EX61)
    assert code == EXIT_FAILURE
    assert json.loads(out)["level_crossing"]["violations"] == [1, 2]
    code, out, _ = _run(capsys, "check-phi", GAUSSIAN)
    assert code == EXIT_OK and json.loads(out)["passed"]


def test_exact_sign_changes_of_rational_function(capsys):
    path = os.path.join(DATA_DIR, "functions", "ex65.json")
    code, out, _ = _run(capsys, "sign-changes", "--exact", path, "--n", "1")
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["count"] == 1 and payload["certificate"] == "exact count"


def test_sign_certificates_of_exponential_polynomial(capsys):
    path = os.path.join(DATA_DIR, "functions", "ex61_density.json")
    code, out, _ = _run(capsys, "sign-changes", "--exact", path, "--n", "2")
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["certificate"] == "lower bound" and payload["count"] >= 4
    code, out, _ = _run(capsys, "sign-changes", "--exact", os.path.join(DATA_DIR, "functions", "ex63_density.json"),
                        "--n", "8", "--at", "4", "--format", "text")
    assert code == EXIT_OK
    assert "sign -1" in out


def test_second_derivative_of_the_cauchy_density(capsys):
    path = os.path.join(DATA_DIR, "functions", "cauchy.json")
    code, out, _ = _run(capsys, "sign-changes", "--exact", path, "--n", "2", "--format", "text")
    assert code == EXIT_OK
    assert out == "sign changes of f^(2): 2\n"


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def test_verify_single_case_in_text(capsys):
    code, out, _ = _run(capsys, "verify", "--case", "6.5b", "--fast")
    assert code == EXIT_OK
    assert "sign changes of f': 1 (expected 1) PASS" in out
    assert "1 skipped" in out


def test_verify_json_output(capsys):
    code, out, _ = _run(capsys, "verify", "--case", "6.2", "--format", "json")
    assert code == EXIT_OK
    document = json.loads(out)
    assert document["cases"][0]["id"] == "6.2" and document["passed"]


def test_verify_list(capsys):
    code, out, _ = _run(capsys, "verify", "--list")
    assert code == EXIT_OK
    assert out.splitlines()[0].startswith("6.1\t")


# ---------------------------------------------------------------------------
# Input errors
# ---------------------------------------------------------------------------

def test_unknown_case_is_an_input_error(capsys):
    code, _, err = _run(capsys, "verify", "--case", "9.9")
    assert code == EXIT_INPUT and "9.9" in err


def test_missing_file_is_an_input_error(capsys):
    code, _, err = _run(capsys, "eval", "no/such/file.json", "--xi", "1")
    assert code == EXIT_INPUT and "not found" in err


def test_bad_points_are_input_errors(capsys):
    code, _, _ = _run(capsys, "eval", GAUSSIAN, "--xi", "half")
    assert code == EXIT_INPUT


def test_precision_below_minimum_is_rejected(capsys):
    code, _, _ = _run(capsys, "eval", GAUSSIAN, "--xi", "1", "--precision", "10")
    assert code == EXIT_INPUT


def test_precision_from_environment(capsys, monkeypatch):
    monkeypatch.setenv(PRECISION_ENV, "45")
    code, out, _ = _run(capsys, "eval", GAUSSIAN, "--xi", "1")
    assert code == EXIT_OK and json.loads(out)["precision"]["working_dps"] == 45
    monkeypatch.setenv(PRECISION_ENV, "lots")
    code, _, _ = _run(capsys, "eval", GAUSSIAN, "--xi", "1")
    assert code == EXIT_INPUT
