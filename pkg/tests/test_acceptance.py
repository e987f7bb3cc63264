"""Acceptance criteria, one test per criterion.

Every test appends a single ``criterion N: PASS|FAIL ...`` line to the
terminal summary and then asserts the criterion at its stated tolerance.
Criteria 4 and 8 exercise statements that are false as written; they fail
and stay failing (see the README for the counterexamples).

Run as a script to get only the summary lines:  ``python3 tests/test_acceptance.py``.
"""
import random
import time
from fractions import Fraction

from kummer.algebra import make_algebra
from kummer.exact import Poly, cyclotomic_poly, divisors
from kummer.measures import delta
from kummer.representations import (Exhausted, canonical_term, min_rep_count,
                                    min_rep_oracle, term_set, verify_witness)
from kummer.suites import check_lemma

from . import conftest

CORPUS = [[1, 3], [1, 4], [1, 5], [2, 2], [2, 3], [3, 2], [5, 2]]


def record(n: int, ok: bool, detail: str, seconds: float) -> None:
    conftest.ACCEPTANCE_LINES.append(
        f"criterion {n}: {'PASS' if ok else 'FAIL'} ({seconds:.1f}s) {detail}")


def _summary(rep) -> str:
    return f"{rep.passes}/{rep.conclusive} conclusive pass, {len(rep.failures)} fail, " \
           f"{rep.count('inconclusive')} inconclusive"


def test_criterion_1_cyclotomic_product():
    t0 = time.perf_counter()
    bad = []
    for n in range(1, 31):
        prod = Poly((1,))
        for d in divisors(n):
            prod = prod * cyclotomic_poly(d)
        if prod != Poly.x_power_minus(n, 1):
            bad.append(n)
    dt = time.perf_counter() - t0
    ok = not bad and dt < 1
    record(1, ok, f"N=1..30, mismatches {bad}", dt)
    assert ok


def test_criterion_2_golden_deltas():
    t0 = time.perf_counter()
    got = {(1, 12): delta(make_algebra(1, 12)), (2, 2): delta(make_algebra(2, 2)),
           (2, 1): delta(make_algebra(2, 1))}
    want = {(1, 12): 1, (2, 2): 64, (2, 1): 1}
    ok = got == want
    record(2, ok, f"{got}", time.perf_counter() - t0)
    assert ok


def test_criterion_3_measures_corpus():
    t0 = time.perf_counter()
    rep = check_lemma("measures", params={"fields": CORPUS}, trials=200, seed=0)
    dt = time.perf_counter() - t0
    ok = rep.trials == 1400 and not rep.failures and rep.conclusive == rep.trials and dt < 120
    record(3, ok, _summary(rep), dt)
    assert ok


def test_criterion_4_lemma_2_1_literal():
    t0 = time.perf_counter()
    rep = check_lemma("lemma2.1", params={"configs": [[2, 6, 2], [2, 6, 3], [3, 6, 2], [1, 15, 5]]},
                      trials=50, seed=0)
    dt = time.perf_counter() - t0
    ok = rep.trials == 200 and rep.passes == rep.trials and dt < 300
    bad = sorted({(f.inputs["a"], f.inputs["N"], f.inputs["N1"]) for f in rep.failures})
    record(4, ok, _summary(rep) + (f"; failing configs {bad}" if bad else ""), dt)
    assert ok


def test_criterion_5_lemma_2_2_report():
    t0 = time.perf_counter()
    rep = check_lemma("lemma2.2", params={"configs": [[2, 4, 2], [1, 9, 3]]}, seed=0)
    dt = time.perf_counter() - t0
    ok = rep.mode == "report" and rep.trials > 0 and rep.conclusive == rep.trials
    record(5, ok, _summary(rep), dt)
    assert ok


def test_criterion_6_section_three_inequalities():
    t0 = time.perf_counter()
    ok, parts = True, []
    for suite in ["lemma3.1", "lemma3.2", "lemma3.3", "lemma3.4", "lemma3.5"]:
        rep = check_lemma(suite, params={"k": ["4/5", "1", "2"]}, trials=10_000, seed=0)
        good = rep.trials == 30_000 and not rep.failures and rep.conclusive == rep.trials
        ok &= good
        parts.append(f"{suite} {len(rep.failures)} fail/{rep.trials}")
    rep = check_lemma("lemma3.6", seed=0)
    ok &= not rep.failures and rep.conclusive == rep.trials
    parts.append(f"lemma3.6 {len(rep.failures)} fail/{rep.trials}")
    dt = time.perf_counter() - t0
    ok &= dt < 120
    record(6, ok, "; ".join(parts), dt)
    assert ok


def _in_span_target(alg, rng):
    terms = term_set(alg)
    total = alg.zero
    for _ in range(rng.randint(0, 6)):
        total = total + rng.choice(terms).value(alg)
    return total * Fraction(1, delta(alg))


def test_criterion_7_min_rep_against_oracle():
    t0 = time.perf_counter()
    rng = random.Random(0)
    mismatches, checked, witnessed = [], 0, 0
    for a, N in [(1, 3), (1, 4), (2, 2), (2, 3)]:
        alg = make_algebra(a, N)
        for _ in range(200):
            e = _in_span_target(alg, rng)
            want = min_rep_oracle(e, 4)
            try:
                got, rep = min_rep_count(e, bound=4)
                assert verify_witness(e, rep) and rep.total == got
                witnessed += 1
            except Exhausted:
                got = None
            checked += 1
            if got != want:
                mismatches.append((a, N, e.coeffs, got, want))
    dt = time.perf_counter() - t0
    ok = checked == 800 and not mismatches and dt < 300
    record(7, ok, f"{checked - len(mismatches)}/{checked} agree, {witnessed} witnesses re-verified",
           dt)
    assert ok, mismatches[:3]


def test_criterion_8_lemma_4_1_literal():
    t0 = time.perf_counter()
    rep = check_lemma("lemma4.1", params={"fields": [[2, 3], [1, 15]]}, trials=50, seed=0)
    dt = time.perf_counter() - t0
    ok = rep.trials == 100 and not rep.failures and rep.conclusive == rep.trials
    detail = _summary(rep)
    if rep.failures:
        f = rep.failures[0]
        detail += f"; e.g. {f.inputs}"
    record(8, ok, detail, dt)
    assert ok


def test_criterion_9_lemma_5_2():
    t0 = time.perf_counter()
    rep = check_lemma("lemma5.2", params={"fields": [[1, 3], [2, 3], [1, 15], [2, 15]],
                                          "max_terms": 4}, seed=0)
    dt = time.perf_counter() - t0
    ok = rep.conclusive > 0 and rep.passes == rep.conclusive
    record(9, ok, _summary(rep), dt)
    assert ok


def test_criterion_10_theorem_scan():
    t0 = time.perf_counter()
    first = check_lemma("thm1.1", params={"fields": CORPUS, "k": "1"}, seed=7)
    again = check_lemma("thm1.1", params={"fields": CORPUS, "k": "1"}, seed=7)
    dt = time.perf_counter() - t0
    s = first.summary
    same = first.dumps().encode() == again.dumps().encode()
    ok = s["positive"] and Fraction(s["infimum_low"]) > 0 and same and not first.failures
    record(10, ok, f"infimum ~ {float(s['infimum_float']):.4f} at {s['argmin_inputs']}, "
                   f"identical JSON {same}", dt)
    assert ok


if __name__ == "__main__":
    import sys

    import pytest
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
