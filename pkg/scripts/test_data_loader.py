"""
Tests for the JSON documents read by the command line and the pipeline.
"""

import os
from fractions import Fraction

import pytest

from scripts.data_loader import (
    constant_from_json,
    constant_to_json,
    function_document,
    load_function,
    load_representation,
    load_representations,
    parse_rational,
    phi_from_json,
    phi_to_json,
    read_json,
    representation_document,
    representation_from_json,
    representation_to_json,
    write_json,
)
from scripts.errors import InputFormatError
from scripts.exact_core import LogCombination
from scripts.examples import example_61_density, example_61_phi, example_61_representation, two_pole_phi
from scripts.representation import INF, PhiFunction, check_level_crossing

DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "Data")


# ---------------------------------------------------------------------------
# Scalars
# ---------------------------------------------------------------------------

def test_rationals_parse_from_integers_and_strings():
    assert parse_rational(3) == 3
    assert parse_rational("67/68") == Fraction(67, 68)
    assert parse_rational(" 0.25 ") == Fraction(1, 4)


@pytest.mark.parametrize("value", [0.5, True, "one", "1/0", None, [1, 2]])
def test_non_rationals_are_rejected(value):
    with pytest.raises(InputFormatError):
        parse_rational(value)


def test_constants_with_logarithms():
    c = constant_from_json({"rational": "1/2", "logs": [["-1", "2"]]})
    assert c == LogCombination(Fraction(1, 2), ((-1, 2),))
    assert constant_to_json(c) == {"rational": "1/2", "logs": [["-1", "2"]]}
    assert constant_to_json(LogCombination(Fraction(3))) == "3"
    with pytest.raises(InputFormatError):
        constant_from_json({"logs": [["1", "0"]]})


# ---------------------------------------------------------------------------
# phi and representations
# ---------------------------------------------------------------------------

def test_step_phi_survives_serialisation():
    phi = example_61_phi()
    document = phi_to_json(phi)
    assert document["steps"][-1] == {"lo": "17", "hi": "inf", "value": "4"}
    assert phi_from_json(document) == phi


def test_analytic_phi_survives_serialisation():
    phi = two_pole_phi(1, 2)
    assert phi_from_json(phi_to_json(phi)) == phi


def test_representation_survives_serialisation():
    rep = example_61_representation()
    document = representation_to_json(rep, name="ex61")
    assert document["b"] == "67/68" and document["name"] == "ex61"
    assert representation_from_json(document) == rep


def test_malformed_phi_is_an_input_error():
    with pytest.raises(InputFormatError):
        phi_from_json({"steps": [{"lo": "1", "value": "1"}]})
    with pytest.raises(InputFormatError):
        phi_from_json({"analytic": [{"kind": "spline", "lo": "0", "hi": "inf"}]})
    with pytest.raises(InputFormatError):
        phi_from_json([1, 2])


def test_unknown_document_kind():
    with pytest.raises(InputFormatError):
        representation_document({"kind": "wavelet"})
    with pytest.raises(InputFormatError):
        representation_document({"kind": "rational"})
    with pytest.raises(InputFormatError):
        function_document({"kind": "rational", "numerator": "sin(x)"})


# ---------------------------------------------------------------------------
# Files
# ---------------------------------------------------------------------------

def test_bundled_representations_load():
    documents = load_representations(os.path.join(DATA_DIR, "representations"))
    assert {"ex61", "ex61_steps", "ex63", "gaussian", "polya_geometric", "bad_level_crossing"} <= set(documents)
    assert documents["ex61"].representation == documents["ex61_steps"].representation
    assert documents["ex61"].closed_form and documents["gaussian"].closed_form
    assert not documents["bad_level_crossing"].closed_form


def test_bundled_bad_level_crossing_fails_the_check():
    document = load_representation(os.path.join(DATA_DIR, "representations", "bad_level_crossing.json"))
    report = check_level_crossing(document.representation.phi)
    assert report.violations == [1]


def test_bundled_density_matches_the_catalog():
    document = load_function(os.path.join(DATA_DIR, "functions", "ex61_density.json"))
    assert document.kind == "exp_poly"
    assert document.function == example_61_density()
    assert document.samples[-1] == 100


def test_write_then_read_is_deterministic(tmp_path):
    path = str(tmp_path / "nested" / "phi.json")
    document = phi_to_json(PhiFunction.from_steps([(1, INF, Fraction(1, 3))]))
    write_json(document, path)
    with open(path, encoding="utf-8") as handle:
        text = handle.read()
    assert text.endswith("\n")
    assert read_json(path) == document


def test_missing_and_invalid_files(tmp_path):
    with pytest.raises(InputFormatError):
        read_json(str(tmp_path / "absent.json"))
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    with pytest.raises(InputFormatError):
        read_json(str(broken))
    with pytest.raises(FileNotFoundError):
        load_representations(str(tmp_path / "nowhere"))
