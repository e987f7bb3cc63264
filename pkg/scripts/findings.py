#!/usr/bin/env python3
"""Print the concrete counterexamples found by the literal suites, exactly.

Each line is checked with exact arithmetic in the algebra before printing.
"""
from kummer.algebra import make_algebra, parse_element
from kummer.representations import min_rep_count
from kummer.suites import check_lemma


def additivity() -> None:
    alg = make_algebra(1, 3)
    lhs, rhs = parse_element(alg, "1 + z"), parse_element(alg, "-z^2")
    assert lhs == rhs
    n, rep = min_rep_count(lhs, bound=4)
    print(f"1 + z = -z^2 in Q(zeta_3): two unit terms collapse to {n}")
    rep = check_lemma("lemma4.1", params={"fields": [[2, 3], [1, 15]]}, trials=50, seed=0)
    print(f"additivity over a step, literal hypothesis: {len(rep.failures)}/{rep.trials} fail")
    for f in rep.failures[:3]:
        print(f"    {f.inputs}")
    col = check_lemma("lemma4.1.columnwise", params={"fields": [[2, 3], [1, 15]]}, trials=50,
                      seed=0)
    print(f"additivity with the columnwise hypothesis: {len(col.failures)}/{col.trials} fail")


def decomposition_identity() -> None:
    for name in ("lemma2.1", "lemma2.1.blockwise"):
        rep = check_lemma(name, params={"configs": [[2, 6, 2], [2, 6, 3], [3, 6, 2], [1, 15, 5]]},
                          trials=50, seed=0)
        print(f"{name}: {len(rep.failures)}/{rep.trials} fail")
        if rep.failures:
            f = rep.failures[0]
            print(f"    e.g. {f.inputs}")
            print(f"    lhs in [{float(f.lhs.low):.12g}, {float(f.lhs.high):.12g}], "
                  f"rhs in [{float(f.rhs.low):.12g}, {float(f.rhs.high):.12g}]")


def small_n_threshold() -> None:
    rep = check_lemma("thm4.4", params={"fields": [[1, 7]]}, trials=20, seed=0)
    print(f"mean-square lower bound with the p >= 5 stand-in at small n: "
          f"{len(rep.failures)}/{rep.conclusive} below (report mode)")


if __name__ == "__main__":
    additivity()
    decomposition_identity()
    small_n_threshold()
