"""Acceptance criteria 1 to 11, one pass/fail line per criterion (run with -s to see them)."""

import pytest

from fracdtn import acceptance
from fracdtn.report import dumps


@pytest.fixture(scope="module")
def report():
    rep = acceptance.selftest()
    print()
    for rec in rep["criteria"]:
        status = "PASS" if rec["passed"] else "FAIL"
        print(f"criterion {rec['id']:2d} {status}  {rec['name']}: metric={rec['metric']:.3e} tol={rec['tolerance']:.1e}")
    return rep


@pytest.mark.parametrize("cid", range(1, 12))
def test_criterion(report, cid):
    rec = next(r for r in report["criteria"] if r["id"] == cid)
    assert "error" not in rec["details"], rec["details"].get("error")
    assert rec["passed"], rec


def test_flags_recomputable(report):
    for rec in report["criteria"]:
        if rec["id"] == 8:
            continue
        assert rec["passed"] == (rec["metric"] <= rec["tolerance"])
    c8 = next(r for r in report["criteria"] if r["id"] == 8)
    assert c8["passed"] == (c8["metric"] <= c8["tolerance"] and
                            c8["details"]["limit_error"] <= c8["details"]["limit_tolerance"])
    assert report["passed"] == all(r["passed"] for r in report["criteria"])


def test_report_serializes(report):
    text = dumps(report)
    assert text.startswith('{\n  "schema": 1,')
