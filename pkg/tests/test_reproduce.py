from __future__ import annotations

import pytest

from proprank.errors import InvalidInputError
from proprank.reproduce import CASES, CaseResult, run_case


@pytest.mark.parametrize("case", sorted(CASES))
def test_case_passes(case):
    res = run_case(case)
    assert res.passed, "\n".join(res.lines())


def test_ex4_reports_tie_order_and_literal_reading():
    notes = run_case("ex4").notes
    assert any(n.startswith("PSB tie order: ") for n in notes)
    assert any("covers 261 of 270" in n for n in notes)


def test_unknown_case():
    with pytest.raises(InvalidInputError):
        run_case("ex9")


def test_case_result_lines():
    res = CaseResult("demo")
    res.expect("value", 2, 3)
    res.require("flag", False, "why")
    res.notes.append("n")
    assert not res.passed
    assert res.lines() == ["  FAIL value: expected 3, got 2", "  FAIL flag why", "  note n"]
