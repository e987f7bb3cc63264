"""Terms, tower-step decompositions and minimal representation counts.

A term is ``sign * x^i * y^j``: a root of unity times a positive real radical.
``min_rep_count(e)`` is the least number of terms, with repetition, summing to
``delta * e``.  Terms with different ``j`` live in linearly independent blocks,
so the problem splits into one cyclotomic problem per radical power: write an
element of Z[zeta_N] as a shortest sum of units ``+-zeta_N^i``.

Two exact block solvers are provided.  When N is a prime power or twice one,
the integer relations among the ``zeta_N^i`` are spanned by disjoint class
sums, and the shortest sum is an L1 minimisation solved by a median per class.
Otherwise (and on request) an iterative-deepening search over nonincreasing
term sequences is used.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .algebra import (
    AlgebraElement,
    KummerAlgebra,
    include,
    is_algebraic_integer,
    make_algebra,
)
from .exact import RationalMatrix, factorize, inverse
from .measures import TowerStep, delta, step_basis, step_scale


class NotInSpan(ValueError):
    """``delta * e`` is not an integer combination of terms."""


class Exhausted(LookupError):
    def __init__(self, bound: int):
        super().__init__(f"no representation with at most {bound} terms")
        self.bound = bound


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True, order=True)
class Term:
    sign: int
    i: int
    j: int

    def value(self, alg: KummerAlgebra) -> AlgebraElement:
        m = alg.monomial(self.i, self.j)
        return m if self.sign > 0 else -m

    def to_json(self) -> dict:
        return {"sign": self.sign, "i": self.i, "j": self.j}


def canonical_term(alg: KummerAlgebra, sign: int, i: int, j: int) -> Term:
    """Normal form: for even N, ``-x^i`` is written ``x^(i + N/2)``."""
    N = alg.N
    i %= N
    if sign < 0 and N % 2 == 0:
        return Term(1, (i + N // 2) % N, j)
    return Term(1 if sign > 0 else -1, i, j)


def term_set(alg: KummerAlgebra) -> list[Term]:
    """Distinct terms, ordered by radical power, then sign (+ first), then ``i``."""
    seen = set()
    out = []
    for j in alg.radical_exponents:
        for sign in (1, -1):
            for i in range(alg.N):
                t = canonical_term(alg, sign, i, j)
                if t not in seen:
                    seen.add(t)
                    out.append(t)
    return out


@dataclass(frozen=True)
class Representation:
    """A multiset of terms; ``terms`` is sorted and multiplicities are positive."""

    terms: tuple[tuple[Term, int], ...] = ()

    @classmethod
    def from_counts(cls, counts: Mapping[Term, int]) -> "Representation":
        return cls(tuple(sorted((t, m) for t, m in counts.items() if m > 0)))

    @property
    def total(self) -> int:
        return sum(m for _, m in self.terms)

    def value(self, alg: KummerAlgebra) -> AlgebraElement:
        out = alg.zero
        for t, m in self.terms:
            out = out + t.value(alg).scalar_mul(m)
        return out

    def to_json(self) -> list[dict]:
        return [{**t.to_json(), "mult": m} for t, m in self.terms]

    @classmethod
    def from_json(cls, data: Iterable[Mapping]) -> "Representation":
        return cls.from_counts({Term(d["sign"], d["i"], d["j"]): d["mult"] for d in data})


# ---------------------------------------------------------------------------
# step decompositions


@dataclass(frozen=True)
class StepDecomposition:
    step: TowerStep
    a: int
    coefficients: dict  # (l, k) -> alpha in the sub level
    scale: Fraction

    def reassemble(self) -> AlgebraElement:
        top = make_algebra(self.a, self.step.top_level)
        out = top.zero
        for (pair, b) in zip(self.step.index_pairs(self.a), step_basis(self.a, self.step)):
            alpha = self.coefficients.get(pair)
            if alpha is not None and not alpha.is_zero():
                out = out + include(alpha, top) * b
        return out.scalar_mul(self.scale)

    def scaled(self, pair) -> AlgebraElement:
        """``alpha * r`` for one basis index, in the sub level."""
        return self.coefficients[pair].scalar_mul(self.scale)


@lru_cache(maxsize=None)
def _step_inverse(a: int, step: TowerStep) -> RationalMatrix:
    top = make_algebra(a, step.top_level)
    sub = make_algebra(a, step.sub_level)
    sub_basis = [include(sub.monomial(i, j), top)
                 for i in range(sub.phi) for j in range(sub.rad)]
    cols = [(s * b).coeffs for b in step_basis(a, step) for s in sub_basis]
    if len(cols) != top.dim:
        raise ArithmeticError("step basis does not match the relative degree")
    m = RationalMatrix(top.dim, top.dim, tuple(cols[c][r] for r in range(top.dim)
                                               for c in range(top.dim)))
    return inverse(m)


def decompose_step(e: AlgebraElement, step: TowerStep, check_integrality: bool = True
                   ) -> StepDecomposition:
    """Coordinates of ``e`` over the step basis with sub-level coefficients."""
    alg = e.algebra
    if alg.N != step.top_level:
        raise ValueError(f"element lives at level {alg.N}, step tops out at {step.top_level}")
    sub = make_algebra(alg.a, step.sub_level)
    coords = _step_inverse(alg.a, step).apply(e.coeffs)
    r = step_scale(alg.a, step)
    coeffs = {}
    for u, pair in enumerate(step.index_pairs(alg.a)):
        block = coords[u * sub.dim:(u + 1) * sub.dim]
        coeffs[pair] = sub.element(c / r for c in block)
    dec = StepDecomposition(step, alg.a, coeffs, r)
    if check_integrality and is_algebraic_integer(e):
        for pair, alpha in coeffs.items():
            if not is_algebraic_integer(alpha):
                raise ArithmeticError(f"coefficient {pair} of an algebraic integer is not integral")
    return dec


# ---------------------------------------------------------------------------
# minimal representation counts


def scaled_target(e: AlgebraElement) -> list[int]:
    """Integer coordinates of ``delta * e``; ``NotInSpan`` otherwise."""
    d = delta(e.algebra)
    out = []
    for c in e.coeffs:
        v = c * d
        if v.denominator != 1:
            raise NotInSpan("delta * e has non-integral coordinates")
        out.append(v.numerator)
    return out


def _blocks(alg: KummerAlgebra, target: Sequence[int]) -> list[tuple[int, tuple[int, ...]]]:
    R = alg.rad
    out = []
    for j in range(R):
        col = tuple(target[i * R + j] for i in range(alg.phi))
        if any(col):
            out.append((j, col))
    return out


@lru_cache(maxsize=None)
def _units(N: int) -> tuple[tuple[tuple[int, int], tuple[int, ...]], ...]:
    """Distinct units ``sign * zeta_N^i`` with their power-basis coordinates."""
    alg = make_algebra(1, N)
    seen = {}
    for sign in (1, -1):
        for i in range(N):
            v = tuple(sign * c for c in alg._xpow[i])
            if v not in seen:
                seen[v] = (sign, i)
    return tuple((si, v) for v, si in seen.items())


def _closed_form_shape(N: int) -> tuple[int, int, int] | None:
    """``(p, k, m)`` with ``m = p^k`` and ``N in {m, 2m}``, or ``None``."""
    if N <= 2:
        return (1, 0, 1)
    odd = N // 2 if N % 2 == 0 and (N // 2) % 2 == 1 else N
    fac = factorize(odd)
    if len(fac) != 1:
        return None
    p, k = fac[0]
    return (p, k, odd)


def _block_closed_form(N: int, col: Sequence[int]) -> list[tuple[int, int, int]]:
    """Shortest unit sum for one block, as ``(sign, i, mult)`` at level N."""
    shape = _closed_form_shape(N)
    assert shape is not None
    p, k, m = shape
    # signed multiplicities over zeta_m^0 .. zeta_m^(m-1)
    w = [0] * m
    if m == N:
        for i, c in enumerate(col):
            w[i] += c
        to_level = 1
    else:
        h = (m + 1) // 2
        for i, c in enumerate(col):
            w[(i * h) % m] += c if i % 2 == 0 else -c
        to_level = 2
    if m > 1:
        step = m // p
        for r in range(step):
            idx = [r + u * step for u in range(p)]
            vals = sorted(w[t] for t in idx)
            shift = vals[(p - 1) // 2]
            for t in idx:
                w[t] -= shift
    return [(1 if c > 0 else -1, (pos * to_level) % N, abs(c)) for pos, c in enumerate(w) if c]


class _BlockSearch:
    """Iterative deepening over nondecreasing unit indices with exact state."""

    def __init__(self, N: int, target: Sequence[int]):
        self.units = _units(N)
        self.vecs = [v for _, v in self.units]
        self.target = tuple(target)
        dim = len(target)
        self.coord_max = [max(abs(v[c]) for v in self.vecs) for c in range(dim)]
        self.l1_max = max(sum(abs(x) for x in v) for v in self.vecs)
        self.failed: set = set()

    def lower_bound(self, rem: Sequence[int]) -> int:
        l1 = sum(abs(x) for x in rem)
        lb = -(-l1 // self.l1_max)
        for x, cm in zip(rem, self.coord_max):
            lb = max(lb, -(-abs(x) // cm))
        return lb

    def _dfs(self, rem: tuple[int, ...], depth: int, start: int, path: list[int]) -> bool:
        if depth == 0:
            return not any(rem)
        if self.lower_bound(rem) > depth:
            return False
        key = (rem, depth, start)
        if key in self.failed:
            return False
        for u in range(start, len(self.vecs)):
            v = self.vecs[u]
            nxt = tuple(a - b for a, b in zip(rem, v))
            path.append(u)
            if self._dfs(nxt, depth - 1, u, path):
                return True
            path.pop()
        self.failed.add(key)
        return False

    def solve(self, limit: int) -> list[int] | None:
        if not any(self.target):
            return []
        for d in range(max(1, self.lower_bound(self.target)), limit + 1):
            path: list[int] = []
            if self._dfs(self.target, d, 0, path):
                return path
        return None


def _block_search(N: int, col: Sequence[int], limit: int) -> list[tuple[int, int, int]] | None:
    path = _BlockSearch(N, col).solve(limit)
    if path is None:
        return None
    units = _units(N)
    counts: dict[tuple[int, int], int] = {}
    for u in path:
        counts[units[u][0]] = counts.get(units[u][0], 0) + 1
    return [(s, i, m) for (s, i), m in counts.items()]


def _block_lower_bound(N: int, col: Sequence[int]) -> int:
    return _BlockSearch(N, col).lower_bound(col) if any(col) else 0


def min_rep_count(e: AlgebraElement, bound: int | None = None, method: str = "auto"
                  ) -> tuple[int, Representation]:
    """Least number of terms summing to ``delta * e``, with a witness.

    ``method`` is ``"auto"`` (closed form when available, else search),
    ``"search"`` or ``"closed"``.  ``bound=None`` is only allowed when every
    block has a closed form.  Raises ``NotInSpan`` or ``Exhausted(bound)``.
    """
    alg = e.algebra
    target = scaled_target(e)
    blocks = _blocks(alg, target)
    closed = _closed_form_shape(alg.N) is not None
    if method == "closed" and not closed:
        raise ValueError(f"no closed form for N={alg.N}")
    use_closed = closed and method in ("auto", "closed")
    if not use_closed and bound is None:
        raise ValueError("the search solver needs a bound")

    counts: dict[Term, int] = {}
    total = 0
    if use_closed:
        for j, col in blocks:
            for s, i, m in _block_closed_form(alg.N, col):
                t = canonical_term(alg, s, i, j)
                counts[t] = counts.get(t, 0) + m
                total += m
        if bound is not None and total > bound:
            raise Exhausted(bound)
    else:
        lbs = [_block_lower_bound(alg.N, col) for _, col in blocks]
        if sum(lbs) > bound:
            raise Exhausted(bound)
        for n, (j, col) in enumerate(blocks):
            limit = bound - total - sum(lbs[n + 1:])
            found = _block_search(alg.N, col, limit)
            if found is None:
                raise Exhausted(bound)
            for s, i, m in found:
                t = canonical_term(alg, s, i, j)
                counts[t] = counts.get(t, 0) + m
                total += m
    rep = Representation.from_counts(counts)
    if rep.total != total or rep.value(alg).coeffs != tuple(Fraction(v) for v in target):
        raise ArithmeticError("witness failed exact re-verification")
    return total, rep


def verify_witness(e: AlgebraElement, rep: Representation) -> bool:
    target = scaled_target(e)
    return rep.value(e.algebra).coeffs == tuple(Fraction(v) for v in target)


@lru_cache(maxsize=16)
def _oracle_table(a: int, N: int, bound: int) -> dict[tuple[int, ...], int]:
    alg = make_algebra(a, N)
    vecs = []
    for t in term_set(alg):
        v = t.value(alg).coeffs
        vecs.append(tuple(int(c) for c in v))
    table: dict[tuple[int, ...], int] = {}
    zero = (0,) * alg.dim
    for size in range(bound + 1):
        for combo in itertools.combinations_with_replacement(range(len(vecs)), size):
            s = list(zero)
            for u in combo:
                for c, x in enumerate(vecs[u]):
                    s[c] += x
            table.setdefault(tuple(s), size)
    return table


def min_rep_oracle(e: AlgebraElement, bound: int) -> int | None:
    """Brute force over all multisets of terms with at most ``bound`` members."""
    target = tuple(scaled_target(e))
    alg = e.algebra
    return _oracle_table(alg.a, alg.N, bound).get(target)


# ---------------------------------------------------------------------------
# additivity over a step


@dataclass
class AdditivityReport:
    step: TowerStep
    index_set: list
    n: int | None
    m: dict = field(default_factory=dict)
    hypothesis: bool = True
    note: str = ""

    @property
    def conclusive(self) -> bool:
        return self.n is not None and all(v is not None for v in self.m.values())

    @property
    def holds(self) -> bool | None:
        if not self.conclusive:
            return None
        return self.n == sum(self.m.values())


def additive_element(alg: KummerAlgebra, step: TowerStep,
                     b: Mapping[tuple[int, int], AlgebraElement]) -> AlgebraElement:
    """The element whose scaled form is ``sum b_ij * delta(sub) * zeta^i * a^(j/p)``.

    ``b`` is keyed by step-basis pairs and valued in the sub level; the result
    satisfies ``delta(alg) * beta = sum delta(sub) b_ij * basis_ij``.
    """
    sub = make_algebra(alg.a, step.sub_level)
    pairs = step.index_pairs(alg.a)
    basis = dict(zip(pairs, step_basis(alg.a, step)))
    total = alg.zero
    for pair, coeff in b.items():
        total = total + include(coeff.scalar_mul(delta(sub)), alg) * basis[pair]
    return total / delta(alg)


def additivity_check(alg: KummerAlgebra, step: TowerStep, I: Iterable[tuple[int, int]],
                     b: Mapping[tuple[int, int], AlgebraElement], bound: int,
                     column_limit: bool = False) -> AdditivityReport:
    """Compare ``n = M(beta)`` with ``sum_ij M(b_ij)`` for a supported sum.

    The hypothesis checked is ``|I| <= p(p-1)/2``; with ``column_limit`` also
    ``|I_j| <= p/2`` for each radical power ``j``.
    """
    I = sorted(set(I))
    p = step.p
    hyp = 2 * len(I) <= p * (p - 1)
    if column_limit:
        per_col: dict[int, int] = {}
        for _, j in I:
            per_col[j] = per_col.get(j, 0) + 1
        hyp = hyp and all(2 * c <= p for c in per_col.values())
    if not hyp:
        raise ValueError("index set violates the size hypothesis")
    if alg.N != step.top_level:
        raise ValueError("step must end at the algebra's level")
    support = {pair: b[pair] for pair in I}
    beta = additive_element(alg, step, support)
    report = AdditivityReport(step, I, None, hypothesis=hyp)
    try:
        report.n = min_rep_count(beta, bound)[0]
    except Exhausted:
        report.n = None
    for pair in I:
        try:
            report.m[pair] = min_rep_count(b[pair], bound)[0]
        except Exhausted:
            report.m[pair] = None
    return report
