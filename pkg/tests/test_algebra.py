from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from kummer.algebra import (Embedding, ExpressionError, FieldStatus, MixedAlgebraError,
                            PerfectPowerRadicand, apply_automorphism, char_poly, compose,
                            embeddings, field_degree_check, format_element, include, invert,
                            is_algebraic_integer, make_algebra, norm_abs, parse_element,
                            relative_embeddings, relative_trace, restrict, trace_abs)

from .oracles import all_embeddings, embed_numeric

FIELDS = [(1, 3), (1, 4), (1, 5), (1, 12), (2, 2), (2, 3), (3, 2), (5, 2), (2, 4), (3, 3),
          (2, 6)]


def element_of(alg):
    return st.lists(st.integers(-4, 4), min_size=alg.dim, max_size=alg.dim).map(alg.element)


fields = st.sampled_from(FIELDS).map(lambda p: make_algebra(*p))


def numeric(e, emb):
    alg = e.algebra
    return embed_numeric(alg.a, alg.N, alg.rad, alg.phi, e.coeffs, emb.l, emb.k)


def close(u, v, tol=1e-40):
    with mpmath.workdps(60):
        return abs(u - v) <= tol * max(1, abs(u))


@given(st.data())
def test_ring_axioms(data):
    alg = data.draw(fields)
    x, y, z = (data.draw(element_of(alg)) for _ in range(3))
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x
    assert x + (-x) == alg.zero
    assert x * alg.one == x


@given(st.data())
def test_embeddings_are_ring_maps(data):
    alg = data.draw(fields)
    x, y = data.draw(element_of(alg)), data.draw(element_of(alg))
    emb = data.draw(st.sampled_from(embeddings(alg)))
    with mpmath.workdps(60):
        assert close(numeric(x * y, emb), numeric(x, emb) * numeric(y, emb))


@pytest.mark.parametrize("a,N", FIELDS)
def test_dimension_and_embedding_count(a, N):
    alg = make_algebra(a, N)
    assert len(embeddings(alg)) == alg.dim
    assert {(e.l, e.k) for e in embeddings(alg)} == set(all_embeddings(N, alg.rad))
    assert alg.dim == (N if a > 1 else 1) * alg.phi


@given(st.data())
def test_trace_and_norm_match_embedding_sums(data):
    alg = data.draw(fields)
    e = data.draw(element_of(alg))
    vals = [numeric(e, m) for m in embeddings(alg)]
    with mpmath.workdps(60):
        tr = sum(vals)
        nm = mpmath.fprod(vals)
        assert close(tr, trace_abs(e))
        assert close(nm, norm_abs(e))


@given(st.data())
def test_automorphism_commutes_with_embedding(data):
    alg = data.draw(fields)
    e = data.draw(element_of(alg))
    s = data.draw(st.sampled_from(embeddings(alg)))
    t = data.draw(st.sampled_from(embeddings(alg)))
    # evaluating sigma_s(e) at t equals evaluating e at t o s
    assert close(numeric(apply_automorphism(e, s), t), numeric(e, compose(t, s, alg.N)))


@pytest.mark.parametrize("a,N,N1", [(1, 12, 3), (1, 12, 4), (2, 6, 2), (2, 6, 3), (3, 3, 1),
                                    (2, 4, 2)])
def test_relative_trace_lands_in_sublevel_and_matches_numeric(a, N, N1):
    alg = make_algebra(a, N)
    e = alg.element(range(1, alg.dim + 1))
    rt = relative_trace(e, N1)
    r = restrict(rt, N1)
    assert include(r, alg) == rt
    ref = Embedding(1, 0)
    with mpmath.workdps(60):
        direct = sum(numeric(e, compose(ref, s, N)) for s in relative_embeddings(alg, N1))
        assert close(direct, numeric(rt, ref))
    assert len(relative_embeddings(alg, N1)) == alg.dim // make_algebra(a, N1).dim


def test_small_traces():
    assert trace_abs(make_algebra(1, 3).x) == -1
    assert trace_abs(make_algebra(2, 2).y) == 0
    assert trace_abs(make_algebra(2, 2).y * make_algebra(2, 2).y) == 4
    assert norm_abs(make_algebra(2, 2).y) == -2


@given(st.data())
def test_invert(data):
    alg = data.draw(fields)
    e = data.draw(element_of(alg))
    if norm_abs(e) == 0:
        with pytest.raises(ZeroDivisionError):
            invert(e)
    else:
        assert e * invert(e) == alg.one


@given(st.data())
def test_characteristic_polynomial_annihilates(data):
    alg = data.draw(st.sampled_from([(1, 5), (2, 2), (2, 3), (3, 2)]).map(lambda p: make_algebra(*p)))
    e = data.draw(element_of(alg))
    cp = char_poly(e)
    acc = alg.zero
    for c in reversed(cp):
        acc = acc * e + alg.scalar(c)
    assert acc == alg.zero


def test_algebraic_integers():
    Q5 = make_algebra(5, 2)
    assert is_algebraic_integer(parse_element(Q5, "(1 + r)/2"))
    assert not is_algebraic_integer(parse_element(Q5, "r/2"))
    Q2 = make_algebra(2, 2)
    assert not is_algebraic_integer(parse_element(Q2, "(1 + r)/2"))
    assert is_algebraic_integer(parse_element(make_algebra(1, 3), "z^2 - 7*z"))


@given(st.data())
def test_include_restrict_round_trip(data):
    a, N, M = data.draw(st.sampled_from([(1, 12, 4), (1, 12, 6), (2, 6, 3), (2, 6, 2), (2, 4, 2)]))
    sub = make_algebra(a, M)
    e = data.draw(element_of(sub))
    top = make_algebra(a, N)
    assert restrict(include(e, top), M) == e
    for emb in embeddings(top):
        low = Embedding(emb.l % M, emb.k % M if sub.rad > 1 else 0)
        assert close(numeric(include(e, top), emb), numeric(e, low))


def test_restrict_rejects_outside_elements():
    top = make_algebra(1, 12)
    with pytest.raises(ValueError):
        restrict(top.x, 4)


@given(st.data())
def test_parse_format_round_trip(data):
    alg = data.draw(fields)
    e = data.draw(element_of(alg))
    half = e / 2
    assert parse_element(alg, format_element(e)) == e
    assert parse_element(alg, format_element(half)) == half


def test_parser_semantics_and_errors():
    alg = make_algebra(2, 3)
    assert parse_element(alg, "r^3") == alg.scalar(2)
    assert parse_element(alg, "z^3") == alg.one
    assert parse_element(alg, "1 + z + z^2") == alg.zero
    assert parse_element(alg, "(1 + z)*(1 - z)") == alg.one - alg.x * alg.x
    with pytest.raises(ExpressionError) as info:
        parse_element(alg, "1 + * z")
    assert info.value.position == 4
    with pytest.raises(ExpressionError):
        parse_element(alg, "1 / 0")


def test_perfect_power_radicand_and_mixing():
    with pytest.raises(PerfectPowerRadicand):
        make_algebra(4, 3)
    with pytest.raises(MixedAlgebraError):
        make_algebra(2, 3).one + make_algebra(3, 3).one


def test_field_status():
    assert field_degree_check(make_algebra(1, 12)) == FieldStatus.CERTIFIED_FIELD
    assert field_degree_check(make_algebra(2, 3)) == FieldStatus.CERTIFIED_FIELD
    # sqrt(2) lies in Q(zeta_8)
    assert field_degree_check(make_algebra(2, 8)) == FieldStatus.DEGREE_DROP_DETECTED
    assert field_degree_check(make_algebra(2, 2)) == FieldStatus.CERTIFIED_FIELD
