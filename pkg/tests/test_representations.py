import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from kummer.algebra import is_algebraic_integer, make_algebra, parse_element
from kummer.measures import delta, make_step, step_basis
from kummer.representations import (Exhausted, NotInSpan, Representation, Term,
                                    additivity_check, decompose_step, min_rep_count,
                                    min_rep_oracle, term_set, verify_witness)

SMALL = [(1, 3), (1, 4), (2, 2), (2, 3), (1, 6), (3, 2), (1, 12)]


def random_target(alg, rng, max_terms=6):
    terms = term_set(alg)
    total = alg.zero
    for _ in range(rng.randint(0, max_terms)):
        total = total + rng.choice(terms).value(alg)
    return total / delta(alg)


@pytest.mark.parametrize("a,N,size", [(1, 2, 2), (2, 2, 4), (1, 3, 6), (1, 4, 4), (2, 3, 18)])
def test_term_set_sizes(a, N, size):
    terms = term_set(make_algebra(a, N))
    assert len(terms) == size
    values = {t.value(make_algebra(a, N)).coeffs for t in terms}
    assert len(values) == size


def test_documented_counts():
    Q3 = make_algebra(1, 3)
    assert min_rep_count(Q3.scalar(-1))[0] == 1
    assert min_rep_count(Q3.scalar(2))[0] == 2
    count, rep = min_rep_count(parse_element(make_algebra(2, 2), "(3 + 2*r)/64"))
    assert count == 5
    assert rep.to_json() == [{"sign": 1, "i": 0, "j": 0, "mult": 3},
                             {"sign": 1, "i": 0, "j": 1, "mult": 2}]
    assert min_rep_count(Q3.zero)[0] == 0
    assert min_rep_oracle(Q3.zero, 0) == 0
    assert min_rep_oracle(make_algebra(1, 4).x, 1) == 1


def test_not_in_span_and_exhausted():
    with pytest.raises(NotInSpan):
        min_rep_count(make_algebra(1, 3).scalar(Fraction(1, 2)))
    with pytest.raises(Exhausted):
        min_rep_count(parse_element(make_algebra(1, 15), "5 + 4*z^3"), 3)


@pytest.mark.parametrize("a,N", SMALL)
def test_solver_agrees_with_oracle(a, N):
    alg = make_algebra(a, N)
    rng = random.Random(N * 10 + a)
    for _ in range(40):
        e = random_target(alg, rng)
        want = min_rep_oracle(e, 4)
        try:
            count, rep = min_rep_count(e, 4)
        except Exhausted:
            assert want is None
            continue
        assert count == want
        assert verify_witness(e, rep)
        assert rep.total == count


@pytest.mark.parametrize("a,N", [(1, 3), (1, 4), (2, 2), (2, 3), (1, 9), (3, 2), (1, 10)])
def test_closed_form_agrees_with_search(a, N):
    alg = make_algebra(a, N)
    rng = random.Random(7 * N + a)
    for _ in range(40):
        e = random_target(alg, rng, 5)
        closed = min_rep_count(e, method="closed")[0]
        try:
            searched = min_rep_count(e, 5, method="search")[0]
        except Exhausted:
            assert closed > 5
            continue
        assert closed == searched


@given(st.data())
def test_triangle_inequality(data):
    a, N = data.draw(st.sampled_from(SMALL))
    alg = make_algebra(a, N)
    rng = random.Random(data.draw(st.integers(0, 10 ** 6)))
    e1, e2 = random_target(alg, rng, 3), random_target(alg, rng, 3)
    try:
        m1, m2 = min_rep_count(e1, 6)[0], min_rep_count(e2, 6)[0]
        m12 = min_rep_count(e1 + e2, 6)[0]
    except Exhausted:
        return
    assert m12 <= m1 + m2


@given(st.data())
def test_unit_multiplication_preserves_count(data):
    a, N = data.draw(st.sampled_from(SMALL))
    alg = make_algebra(a, N)
    rng = random.Random(data.draw(st.integers(0, 10 ** 6)))
    e = random_target(alg, rng, 4)
    u = alg.monomial(data.draw(st.integers(0, N - 1)), 0)
    if data.draw(st.booleans()):
        u = -u
    try:
        assert min_rep_count(u * e, 4)[0] == min_rep_count(e, 4)[0]
    except Exhausted:
        with pytest.raises(Exhausted):
            min_rep_count(e, 4)


def test_representation_json_round_trip():
    rep = Representation.from_counts({Term(1, 0, 0): 2, Term(-1, 1, 2): 1})
    assert Representation.from_json(rep.to_json()) == rep
    assert rep.total == 3


def test_decompose_documented_example():
    e = parse_element(make_algebra(2, 2), "(3 + 2*r)/64")
    dec = decompose_step(e, make_step(1, 2))
    assert dec.scale == Fraction(1, 64)
    assert dec.coefficients[(0, 0)].coeffs == (3,)
    assert dec.coefficients[(0, 1)].coeffs == (2,)
    assert dec.reassemble() == e


@pytest.mark.parametrize("a,sub,top", [(2, 1, 3), (2, 2, 6), (2, 3, 6), (1, 3, 15), (1, 3, 9),
                                       (2, 2, 4), (3, 1, 2)])
def test_decompose_round_trip_and_integrality(a, sub, top):
    alg = make_algebra(a, top)
    rng = random.Random(top)
    step = make_step(sub, top)
    for _ in range(10):
        e = alg.element(rng.randint(-3, 3) for _ in range(alg.dim))
        dec = decompose_step(e, step)
        assert dec.reassemble() == e
        for alpha in dec.coefficients.values():
            assert alpha.algebra.N == sub
            assert is_algebraic_integer(alpha)
    # a basis monomial has a single coefficient 1/r
    b = step_basis(a, step)[-1]
    dec = decompose_step(b, step)
    nonzero = {k: v for k, v in dec.coefficients.items() if not v.is_zero()}
    assert list(nonzero) == [step.index_pairs(a)[-1]]
    assert nonzero[step.index_pairs(a)[-1]] == make_algebra(a, sub).scalar(1 / dec.scale)


def test_additivity_documented_example():
    alg = make_algebra(1, 6)
    step = make_step(2, 6)
    b = {(1, 0): make_algebra(1, 2).scalar(2)}
    rep = additivity_check(alg, step, [(1, 0)], b, 4)
    assert rep.n == 2 and rep.holds


def test_additivity_rejects_oversized_index_sets():
    alg = make_algebra(2, 3)
    step = make_step(1, 3)
    one = make_algebra(2, 1).one
    I = step.index_pairs(2)[:4]
    with pytest.raises(ValueError):
        additivity_check(alg, step, I, {p: one for p in I}, 4)


def test_additivity_counterexample_with_two_indices_in_one_column():
    # 1 + zeta_3 = -zeta_3^2: two terms collapse into one
    alg = make_algebra(1, 3)
    step = make_step(1, 3)
    one = make_algebra(1, 1).one
    rep = additivity_check(alg, step, [(0, 0), (1, 0)], {(0, 0): one, (1, 0): one}, 4)
    assert rep.conclusive
    assert rep.n == 1 and sum(rep.m.values()) == 2
    assert rep.holds is False
