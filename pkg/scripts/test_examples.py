"""
Tests for the catalog of worked examples and the claim runner.
"""

import json
from fractions import Fraction

import pytest

from scripts.errors import UnknownCase
from scripts.examples import (
    Claim,
    Outcome,
    _run_claim,
    case_ids,
    certify_three_term_maximum,
    get_case,
    hermite_numerators,
    run_all,
    run_case,
)
from scripts.exact_core import ExpPolySum


def _verdicts(report):
    return {r.description: r.verdict for r in report.results}


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------

def test_catalog_order_is_stable():
    assert case_ids() == ["6.1", "6.1m", "6.2", "6.3", "6.4a", "6.4b", "6.4c", "6.4d", "6.5a", "6.5b", "stable"]


def test_unknown_case_is_reported():
    with pytest.raises(UnknownCase):
        get_case("7.1")
    with pytest.raises(UnknownCase):
        run_all(["6.5b", "nope"], include_slow=False)


def test_every_case_builds_with_valid_claims():
    for case_id in case_ids():
        case = get_case(case_id)
        assert case.id == case_id and case.claims


# ---------------------------------------------------------------------------
# Fast claims
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("case_id", ["6.1", "6.2", "6.3", "6.4d"])
def test_fast_claims_pass(case_id, opts):
    report = run_case(case_id, opts, include_slow=False)
    verdicts = {r.verdict for r in report.results}
    assert verdicts <= {"pass", "skipped"}, _verdicts(report)
    assert report.verdict == "pass"


def test_slow_claims_are_skipped_on_request(opts):
    report = run_case("6.5b", opts, include_slow=False)
    first, benchmark = report.results
    assert first.verdict == "pass" and first.observed == 1
    assert benchmark.verdict == "skipped" and benchmark.observed is None
    assert first.line() == "sign changes of f': 1 (expected 1) PASS"


def test_claim_exceptions_become_error_verdicts(opts):
    def broken(_):
        raise ZeroDivisionError("boom")

    result = _run_claim(Claim("identity", "broken", "-", "nothing", broken), opts, include_slow=True)
    assert result.verdict == "error"
    assert result.error_type == "ZeroDivisionError"
    assert "boom" in result.message


def test_inconclusive_outcomes_are_not_failures(opts):
    claim = Claim("numeric-count", "search", ">= 1", "bell_test",
                  lambda _: Outcome("no witness", False, inconclusive=True))
    assert _run_claim(claim, opts, include_slow=True).verdict == "inconclusive"


def test_unknown_claim_kind_is_rejected():
    with pytest.raises(ValueError):
        Claim("guess", "x", 1, "none", lambda _: Outcome(1, True))


def test_suite_report_serialises_deterministically(opts):
    suite = run_all(["6.5b", "6.2"], opts, include_slow=False, jobs=2)
    assert [case.id for case in suite.cases] == ["6.5b", "6.2"]
    document = json.loads(suite.to_json())
    assert document["passed"] is True
    assert document["counts"]["skipped"] == 1
    assert document["counts"]["pass"] == len(suite.results) - 1
    assert suite.to_json() == json.dumps(document, indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# Helpers behind the claims
# ---------------------------------------------------------------------------

def test_three_term_maximum_is_certified_negative():
    h = ExpPolySum.on_half_line([(-3, 0, 0), (6, 0, -2), (-34, 0, -15)])
    certificate = certify_three_term_maximum(h)
    assert certificate["sign"] == -1
    assert certificate["enclosure"].hi < 0


def test_three_term_maximum_needs_three_terms():
    with pytest.raises(ValueError):
        certify_three_term_maximum(ExpPolySum.on_half_line([(1, 0, -1)]))


def test_hermite_numerators_have_expected_degrees():
    numerators = hermite_numerators(6)
    assert [p.degree for p in numerators] == list(range(7))
    assert numerators[1].poly.all_coeffs()[-1] == 0


@pytest.mark.slow
def test_exact_benchmark_claim(opts):
    report = run_case("6.5b", opts, include_slow=True)
    assert [r.observed for r in report.results] == [1, 61]
    assert report.verdict == "pass"


@pytest.mark.slow
def test_half_integer_counterexample_including_numeric_claims(opts):
    report = run_case("6.3", opts, include_slow=True)
    verdicts = _verdicts(report)
    assert verdicts["sign of f^(8)(4)"] == "pass"
    assert verdicts["sign changes of (g*G_1)^(8)"] == "pass"
    assert verdicts["sign changes of (f*G_t)^(8) for small t"] == "pass"
    assert Fraction(report.results[0].observed) == Fraction(-11598375, 67108864)
