from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st
from mpmath import iv

from kummer.algebra import Embedding, embeddings, include, make_algebra, parse_element
from kummer.measures import (DEFAULT_TOL, NonConvergence, StepCase, delta, embed_value,
                             embed_values, make_step, mean_square, mean_square_relative, measure,
                             refine, relative_conjugate_embeddings, step_basis,
                             step_discriminant, step_scale, tower_steps, working_precision)

from .oracles import embed_numeric

FIELDS = [(1, 3), (1, 4), (1, 5), (2, 2), (2, 3), (3, 2), (5, 2), (1, 12), (2, 4)]


def numeric(e, l, k, dps=60):
    alg = e.algebra
    return embed_numeric(alg.a, alg.N, alg.rad, alg.phi, e.coeffs, l, k, dps)


def mpq(q):
    return mpmath.mpf(q.numerator) / q.denominator


def element_of(alg):
    return st.lists(st.integers(-3, 3), min_size=alg.dim, max_size=alg.dim).map(alg.element)


@given(st.data())
def test_embedding_enclosures_contain_reference(data):
    alg = make_algebra(*data.draw(st.sampled_from(FIELDS)))
    e = data.draw(element_of(alg))
    prec = data.draw(st.sampled_from([32, 64, 200]))
    for emb, ball in zip(embeddings(alg), embed_values(e, embeddings(alg), prec)):
        ref = numeric(e, emb.l, emb.k)
        with mpmath.workdps(60):
            assert ball.re.a <= ref.real <= ball.re.b
            assert ball.im.a <= ref.imag <= ball.im.b


def test_embed_value_rejects_low_precision():
    with pytest.raises(ValueError):
        embed_value(make_algebra(1, 3).x, Embedding(1, 0), 16)


@given(st.data())
def test_measure_enclosures(data):
    alg = make_algebra(*data.draw(st.sampled_from(FIELDS)))
    e = data.draw(element_of(alg))
    rep = measure(e)
    with mpmath.workdps(60):
        vals = [abs(numeric(e, m.l, m.k)) for m in embeddings(alg)]
        house = max(vals)
        msq = sum(v * v for v in vals) / len(vals)
        assert mpq(rep.house_low) <= house <= mpq(rep.house_high)
        assert mpq(rep.msq_low) <= msq <= mpq(rep.msq_high)
    if not e.is_zero():
        assert rep.house_high - rep.house_low < DEFAULT_TOL
        assert rep.msq_high - rep.msq_low < DEFAULT_TOL


def test_measure_of_small_elements():
    rep = measure(parse_element(make_algebra(2, 2), "1 + r"))
    assert rep.msq_low <= 3 <= rep.msq_high
    assert rep.house_low < 1 + Fraction(14142135623730951, 10 ** 16) < rep.house_high + 10 ** -15
    one = measure(make_algebra(1, 5).x)
    assert one.msq_low <= 1 <= one.msq_high
    assert one.house_low <= 1 <= one.house_high
    zero = measure(make_algebra(1, 5).zero)
    assert zero.house_high == 0 and zero.msq_high == 0


def test_relative_mean_square_over_level_one_is_the_mean_square():
    alg = make_algebra(2, 3)
    e = parse_element(alg, "1 + 2*z - r^2 + z*r")
    rel = mean_square_relative(e, 1)
    rep = mean_square(e)
    assert rel.overlaps(rep.msq)


def test_relative_conjugates_fix_the_sublevel():
    alg = make_algebra(2, 6)
    sub = make_algebra(2, 2)
    e = include(parse_element(sub, "3 - r"), alg)
    embs = relative_conjugate_embeddings(alg, 2)
    vals = embed_values(e, embs, 128)
    with working_precision(128):
        for v in vals[1:]:
            assert (v - vals[0]).abs2().b < mpmath.mpf(2) ** -100


def test_working_precision_is_restored():
    before = iv.prec
    with working_precision(300):
        assert iv.prec == 300
    assert iv.prec == before


def test_refine_reports_nonconvergence():
    with pytest.raises(NonConvergence):
        refine(lambda prec: [iv.mpf([0, 1])], Fraction(1, 2 ** 64), cap=256)


@pytest.mark.parametrize("N,expected", [
    (12, [(2, 1, 1, 2), (2, 2, 2, 4), (3, 1, 4, 12)]),
    (15, [(3, 1, 1, 3), (5, 1, 3, 15)]),
    (9, [(3, 1, 1, 3), (3, 2, 3, 9)]),
])
def test_tower_steps(N, expected):
    assert [(s.p, s.t, s.sub_level, s.top_level) for s in tower_steps(N)] == expected
    assert make_step(4, 12).case_tag == StepCase.FIRST
    assert make_step(3, 9).case_tag == StepCase.SECOND
    with pytest.raises(ValueError):
        make_step(2, 12)


def _vandermonde_disc(a, step, reference=Embedding(1, 0)):
    """det(tau sigma(b_i))^2 over relative conjugates sigma, by floating point."""
    top = make_algebra(a, step.top_level)
    basis = step_basis(a, step)
    embs = relative_conjugate_embeddings(top, step.sub_level, reference)
    with mpmath.workdps(80):
        m = mpmath.matrix([[numeric(b, s.l, s.k, 80) for b in basis] for s in embs])
        return mpmath.det(m) ** 2


@pytest.mark.parametrize("a,sub,top", [(2, 1, 2), (3, 1, 2), (2, 1, 3), (3, 1, 3), (2, 2, 6),
                                       (2, 3, 6), (1, 3, 15), (1, 1, 5), (2, 2, 4), (1, 3, 9)])
def test_step_discriminant_matches_vandermonde(a, sub, top):
    step = make_step(sub, top)
    alg = make_algebra(a, top)
    d = step_discriminant(alg, step)
    with mpmath.workdps(80):
        ref = _vandermonde_disc(a, step)
        got = numeric(d, 1, 0, 80)
        assert abs(got - ref) <= mpmath.mpf(10) ** -40 * max(1, abs(ref))


def test_golden_deltas():
    assert delta(make_algebra(1, 12)) == 1
    assert delta(make_algebra(2, 2)) == 64
    assert delta(make_algebra(2, 1)) == 1
    for a in (3, 5, 7):
        # disc{1, sqrt a} = 4a, raised to the degree 2
        assert delta(make_algebra(a, 2)) == (4 * a) ** 2


def test_delta_of_a_prime_level_is_a_power_of_the_basis_discriminant():
    step = make_step(1, 3)
    with mpmath.workdps(80):
        d = int(mpmath.nint(abs(_vandermonde_disc(2, step))))
    assert d == 314928
    assert delta(make_algebra(2, 3)) == d ** 6
    assert step_scale(2, step) == Fraction(1, d ** 6)
