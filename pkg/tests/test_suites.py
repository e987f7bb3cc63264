import csv
import io
import json

import pytest

from kummer.suites import SUITES, UnknownSuite, check_lemma, replay

FAST = {
    "lemma3.1": 30, "lemma3.2": 30, "lemma3.3": 30, "lemma3.4": 30, "lemma3.5": 30,
    "lemma3.6": 6, "measures": 3, "lemma2.1": 2, "lemma2.1.blockwise": 2, "lemma2.2": 2,
    "lemma4.1": 10, "lemma4.1.columnwise": 10, "lemma4.2": 4, "lemma4.3": 4, "thm4.4": 3,
    "lemma5.2": 2, "thm1.1": 3, "remark5.4": 3,
}


def test_every_suite_is_exercised():
    assert set(FAST) == set(SUITES)


@pytest.mark.parametrize("suite", sorted(FAST))
def test_suite_is_deterministic_and_replayable(suite):
    a = check_lemma(suite, trials=FAST[suite], seed=11)
    b = check_lemma(suite, trials=FAST[suite], seed=11)
    assert a.dumps() == b.dumps()
    assert a.to_csv() == b.to_csv()
    for rec in a.records[:5] + a.failures[:3]:
        again = replay(suite, rec.inputs, a.params)
        assert again.verdict == rec.verdict


@pytest.mark.parametrize("suite", sorted(FAST))
def test_report_schema(suite):
    rep = check_lemma(suite, trials=FAST[suite], seed=3)
    data = json.loads(rep.dumps())
    assert list(data)[:7] == ["suite", "params", "seed", "trials", "conclusive", "passes",
                              "failures"]
    assert data["trials"] == len(rep.records)
    for f in data["failures"]:
        assert set(f) >= {"inputs", "lhs", "rhs"}
        assert set(f["lhs"]) == {"low", "high"}
    rows = list(csv.reader(io.StringIO(rep.to_csv())))
    assert rows[0][:2] == ["trial", "verdict"]
    assert len(rows) == rep.trials + 1


@pytest.mark.parametrize("suite", ["lemma3.1", "lemma3.2", "lemma3.3", "lemma3.4", "lemma3.5",
                                   "lemma3.6", "measures", "lemma2.1.blockwise",
                                   "lemma4.1.columnwise", "lemma5.2", "thm1.1"])
def test_proven_statements_have_no_counterexamples(suite):
    rep = check_lemma(suite, trials=FAST[suite] * 2, seed=5)
    assert rep.failures == []
    assert rep.exit_code() == 0


def test_report_mode_findings_do_not_fail():
    rep = check_lemma("thm4.4", params={"fields": [[1, 7]]}, trials=5, seed=1)
    assert rep.mode == "report"
    assert rep.failures, "small n at p = 7 is expected to violate the stand-in threshold"
    assert rep.exit_code() == 0


def test_literal_lemma_statements_are_refuted():
    # j != 0 cross terms are missing from the displayed identity when p >= 3 and a > 1
    rep = check_lemma("lemma2.1", params={"configs": [[2, 6, 2]]}, trials=3, seed=0)
    assert len(rep.failures) == 3 and rep.exit_code() == 1
    rep = check_lemma("lemma2.1", params={"configs": [[2, 6, 3], [1, 15, 5]]}, trials=5, seed=0)
    assert rep.failures == []


def test_exit_codes():
    rep = check_lemma("lemma3.4", trials=5, seed=0)
    assert rep.exit_code() == 0
    rep.records = [r for r in rep.records]
    for r in rep.records:
        r.verdict = "inconclusive"
    assert rep.exit_code() == 3
    rep.records[0].verdict = "fail"
    assert rep.exit_code() == 1


def test_unknown_suite():
    with pytest.raises(UnknownSuite):
        check_lemma("lemma9.9")
