"""Rigorous numerics for conjugate values, plus the exact tower discriminant.

Complex values are enclosed in rectangles of mpmath intervals (``ComplexBall``).
Every routine that takes a tolerance doubles the working precision until the
enclosure is narrower than the tolerance, or gives up at ``precision_cap``.
"""

from __future__ import annotations

import enum
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from mpmath import iv, libmp

from .algebra import (
    AlgebraElement,
    Embedding,
    FieldStatus,
    KummerAlgebra,
    compose,
    embeddings,
    field_degree_check,
    include,
    invert,
    make_algebra,
    norm_abs,
    relative_embeddings,
    relative_trace,
    restrict,
)
from .exact import berkowitz_det, euler_phi, factorize

DEFAULT_TOL = Fraction(1, 2**64)
DEFAULT_CAP = 1 << 14


class NonConvergence(RuntimeError):
    """The requested width was not reached below the precision cap."""


# ---------------------------------------------------------------------------
# intervals

# mpmath's interval context keeps its precision in global state
_PREC_LOCK = threading.RLock()


@contextmanager
def working_precision(bits: int):
    with _PREC_LOCK:
        saved = iv.prec
        iv.prec = bits
        try:
            yield
        finally:
            iv.prec = saved


def to_fractions(v) -> tuple[Fraction, Fraction]:
    """Exact endpoints of an mpmath real interval."""
    lo, hi = v._mpi_
    return Fraction(*libmp.to_rational(lo)), Fraction(*libmp.to_rational(hi))


def interval(q) -> "iv.mpf":
    """Enclosure of an exact rational (or int) at the current precision."""
    q = Fraction(q)
    if q.denominator == 1:
        return iv.mpf(q.numerator)
    return iv.mpf(q.numerator) / q.denominator


def width(v) -> Fraction:
    lo, hi = to_fractions(v)
    return hi - lo


@dataclass(frozen=True)
class ComplexBall:
    """Rectangle ``re + i*im`` of real intervals; arithmetic rounds outward."""

    re: object
    im: object

    @classmethod
    def exact(cls, re, im=0) -> "ComplexBall":
        return cls(interval(re), interval(im))

    @property
    def real_mid(self) -> Fraction:
        lo, hi = to_fractions(self.re)
        return (lo + hi) / 2

    @property
    def imag_mid(self) -> Fraction:
        lo, hi = to_fractions(self.im)
        return (lo + hi) / 2

    @property
    def radius(self) -> Fraction:
        return max(width(self.re), width(self.im)) / 2

    def __add__(self, other: "ComplexBall") -> "ComplexBall":
        return ComplexBall(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "ComplexBall") -> "ComplexBall":
        return ComplexBall(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "ComplexBall":
        return ComplexBall(-self.re, -self.im)

    def __mul__(self, other) -> "ComplexBall":
        if isinstance(other, ComplexBall):
            return ComplexBall(self.re * other.re - self.im * other.im,
                               self.re * other.im + self.im * other.re)
        return ComplexBall(self.re * other, self.im * other)

    __rmul__ = __mul__

    def abs2(self):
        return self.re * self.re + self.im * self.im

    def abs(self):
        return iv.sqrt(self.abs2())

    def contains(self, re, im=0) -> bool:
        return re in self.re and im in self.im

    def __str__(self) -> str:
        return (f"{float(self.real_mid):.17g} + {float(self.imag_mid):.17g}i"
                f" (radius {float(self.radius):.3g})")


# ---------------------------------------------------------------------------
# conjugate values


@lru_cache(maxsize=256)
def _roots_of_unity(N: int, prec: int) -> tuple[ComplexBall, ...]:
    with working_precision(prec):
        tau = 2 * iv.pi
        return tuple(ComplexBall(iv.cos(tau * m / N), iv.sin(tau * m / N)) for m in range(N))


@lru_cache(maxsize=256)
def _radical_powers(a: int, N: int, prec: int) -> tuple:
    with working_precision(prec):
        if a == 1:
            return (iv.mpf(1),)
        log_a = iv.log(iv.mpf(a))
        return tuple(iv.exp(log_a * j / N) for j in range(N))


def real_radical(a: int, num: int, den: int, prec: int):
    """Enclosure of the positive real a^(num/den)."""
    with working_precision(prec):
        if a == 1 or num == 0:
            return iv.mpf(1)
        return iv.exp(iv.log(iv.mpf(a)) * num / den)


def embed_values(e: AlgebraElement, embs: Sequence[Embedding], prec: int) -> list[ComplexBall]:
    """Enclosures of ``sigma(e)`` for each embedding, in the given order."""
    alg = e.algebra
    N = alg.N
    roots = _roots_of_unity(N, prec)
    rho = _radical_powers(alg.a, N, prec)
    with working_precision(prec):
        cols: dict[int, list[tuple[int, object]]] = {}
        for i, j, c in e.terms():
            cols.setdefault(j, []).append((i, interval(c)))
        zero = ComplexBall(iv.mpf(0), iv.mpf(0))
        inner: dict[tuple[int, int], ComplexBall] = {}
        out = []
        for emb in embs:
            total = zero
            for j, col in cols.items():
                key = (emb.l, j)
                if key not in inner:
                    acc = zero
                    for i, c in col:
                        acc = acc + roots[(i * emb.l) % N] * c
                    inner[key] = acc
                total = total + inner[key] * roots[(j * emb.k) % N] * rho[j]
            out.append(total)
        return out


def embed_value(e: AlgebraElement, emb: Embedding, precision_bits: int = 128) -> ComplexBall:
    if precision_bits < 32:
        raise ValueError("precision_bits must be at least 32")
    return embed_values(e, [emb], precision_bits)[0]


def refine(evaluate: Callable[[int], Sequence], tol: Fraction, start: int = 0,
           cap: int = DEFAULT_CAP) -> tuple[list, int]:
    """Call ``evaluate(prec)`` at doubling precision until every interval is ``tol``-narrow."""
    tol = Fraction(tol)
    if tol <= 0:
        raise ValueError("tol must be positive")
    prec = max(start, 64, tol.denominator.bit_length() - tol.numerator.bit_length() + 32)
    while True:
        values = list(evaluate(prec))
        if all(width(v) < tol for v in values):
            return values, prec
        if prec >= cap:
            raise NonConvergence(f"width {tol} not reached at {prec} bits")
        prec = min(2 * prec, cap)


# ---------------------------------------------------------------------------
# house and mean square


@dataclass(frozen=True)
class Enclosure:
    low: Fraction
    high: Fraction

    def overlaps(self, other: "Enclosure") -> bool:
        return self.low <= other.high and other.low <= self.high

    @property
    def width(self) -> Fraction:
        return self.high - self.low

    def to_json(self) -> dict:
        return {"low": str(self.low), "high": str(self.high)}


@dataclass(frozen=True)
class MeasureReport:
    house_low: Fraction
    house_high: Fraction
    msq_low: Fraction
    msq_high: Fraction
    precision_bits: int
    field_status: FieldStatus

    @property
    def house(self) -> Enclosure:
        return Enclosure(self.house_low, self.house_high)

    @property
    def msq(self) -> Enclosure:
        return Enclosure(self.msq_low, self.msq_high)


def _house_and_msq(e: AlgebraElement, prec: int):
    alg = e.algebra
    vals = embed_values(e, embeddings(alg), prec)
    with working_precision(prec):
        sq = [v.abs2() for v in vals]
        top = max(iv.sqrt(s).b for s in sq)
        low = max(iv.sqrt(s).a for s in sq)
        house = iv.mpf([low, top])
        total = iv.mpf(0)
        for s in sq:
            total = total + s
        msq = total / alg.dim
        # squared moduli are nonnegative; intersect to drop spurious negative parts
        if msq.a < 0:
            msq = iv.mpf([0, msq.b])
        return house, msq


def measure(e: AlgebraElement, tol=DEFAULT_TOL, cap: int = DEFAULT_CAP) -> MeasureReport:
    """House and mean square of ``e``, both enclosed to width below ``tol``."""
    if e.is_zero():
        z = Fraction(0)
        return MeasureReport(z, z, z, z, 0, field_degree_check(e.algebra))
    (house, msq), prec = refine(lambda p: _house_and_msq(e, p), tol, cap=cap)
    hl, hh = to_fractions(house)
    ml, mh = to_fractions(msq)
    return MeasureReport(max(hl, Fraction(0)), hh, max(ml, Fraction(0)), mh, prec,
                         field_degree_check(e.algebra))


def house(e: AlgebraElement, tol=DEFAULT_TOL, cap: int = DEFAULT_CAP) -> MeasureReport:
    return measure(e, tol, cap)


def mean_square(e: AlgebraElement, tol=DEFAULT_TOL, cap: int = DEFAULT_CAP) -> MeasureReport:
    return measure(e, tol, cap)


def relative_conjugate_embeddings(alg: KummerAlgebra, N1: int,
                                  reference: Embedding = Embedding(1, 0)) -> list[Embedding]:
    """Relative conjugates over level ``N1``, each followed by ``reference``."""
    return [compose(reference, s, alg.N) for s in relative_embeddings(alg, N1)]


def mean_square_relative(e: AlgebraElement, N1: int, tol=DEFAULT_TOL,
                         reference: Embedding = Embedding(1, 0),
                         cap: int = DEFAULT_CAP) -> Enclosure:
    """Mean of ``|tau(sigma(e))|^2`` over relative conjugates ``sigma`` of level ``N1``."""
    alg = e.algebra
    embs = relative_conjugate_embeddings(alg, N1, reference)
    if e.is_zero():
        return Enclosure(Fraction(0), Fraction(0))

    def evaluate(prec):
        vals = embed_values(e, embs, prec)
        with working_precision(prec):
            total = iv.mpf(0)
            for v in vals:
                total = total + v.abs2()
            return [total / len(embs)]

    (v,), _ = refine(evaluate, tol, cap=cap)
    lo, hi = to_fractions(v)
    return Enclosure(max(lo, Fraction(0)), hi)


# ---------------------------------------------------------------------------
# tower steps and the discriminant scale


class StepCase(str, enum.Enum):
    FIRST = "first_case"
    SECOND = "second_case"


@dataclass(frozen=True)
class TowerStep:
    """Passage from level ``sub_level`` to ``top_level = p * sub_level``.

    ``t`` is the exponent of ``p`` in ``top_level``.  The step basis is
    ``zeta_{p^t}^l * a^(k/p^t)`` with ``l <= p-2`` when ``t = 1`` and ``l <= p-1``
    otherwise, ``k <= p-1`` (only ``k = 0`` when ``a = 1``).
    """

    p: int
    t: int
    sub_level: int
    top_level: int

    @property
    def case_tag(self) -> StepCase:
        return StepCase.FIRST if self.t == 1 else StepCase.SECOND

    def index_pairs(self, a: int) -> list[tuple[int, int]]:
        ls = range(self.p - 1) if self.t == 1 else range(self.p)
        ks = range(1) if a == 1 else range(self.p)
        return [(l, k) for l in ls for k in ks]


def make_step(sub_level: int, top_level: int) -> TowerStep:
    if sub_level < 1 or top_level % sub_level:
        raise ValueError(f"{sub_level} does not divide {top_level}")
    p = top_level // sub_level
    fac = factorize(p) if p > 1 else []
    if len(fac) != 1 or fac[0][1] != 1:
        raise ValueError(f"{top_level}/{sub_level} is not prime")
    t = 0
    n = top_level
    while n % p == 0:
        n //= p
        t += 1
    return TowerStep(p, t, sub_level, top_level)


def tower_steps(alg_or_N) -> list[TowerStep]:
    """Steps ordered by ascending prime, exponent inner, from level 1 up to ``N``."""
    N = alg_or_N if isinstance(alg_or_N, int) else alg_or_N.N
    steps = []
    level = 1
    for p, e in (factorize(N) if N > 1 else []):
        for t in range(1, e + 1):
            steps.append(TowerStep(p, t, level, level * p))
            level *= p
    return steps


def step_basis(a: int, step: TowerStep) -> list[AlgebraElement]:
    """The step basis as elements of the top level of the step."""
    top = make_algebra(a, step.top_level)
    q = step.p ** step.t
    m = step.top_level // q
    my = top.rad // q if top.rad > 1 else 0
    return [top.monomial(l * m, k * my) for l, k in step.index_pairs(a)]


def _det_over(rows: list[list[AlgebraElement]], alg: KummerAlgebra) -> AlgebraElement:
    """Determinant over the algebra; elimination on invertible pivots, else Berkowitz."""
    m = [list(r) for r in rows]
    n = len(m)
    result = alg.one
    for c in range(n):
        piv = None
        inv = None
        for r in range(c, n):
            if m[r][c].is_zero():
                continue
            try:
                inv = invert(m[r][c])
            except ZeroDivisionError:
                continue
            piv = r
            break
        if piv is None:
            if all(m[r][c].is_zero() for r in range(c, n)):
                return alg.zero
            return berkowitz_det(rows, alg.zero, alg.one)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            result = -result
        result = result * m[c][c]
        for r in range(c + 1, n):
            if m[r][c].is_zero():
                continue
            f = m[r][c] * inv
            m[r] = [m[r][j] - f * m[c][j] if j > c else m[r][j].algebra.zero
                    for j in range(n)]
    return result


@lru_cache(maxsize=None)
def _step_discriminant_sub(a: int, step: TowerStep) -> AlgebraElement:
    basis = step_basis(a, step)
    n = len(basis)
    sub = make_algebra(a, step.sub_level)
    entries: dict[tuple[int, int], AlgebraElement] = {}
    for u in range(n):
        for v in range(u, n):
            tr = relative_trace(basis[u] * basis[v], step.sub_level)
            entries[u, v] = entries[v, u] = restrict(tr, step.sub_level)
    rows = [[entries[u, v] for v in range(n)] for u in range(n)]
    return _det_over(rows, sub)


def step_discriminant(alg: KummerAlgebra, step: TowerStep) -> AlgebraElement:
    """Discriminant of the step basis, returned inside ``alg``."""
    if alg.N % step.top_level:
        raise ValueError(f"step to level {step.top_level} is not inside {alg!r}")
    return include(_step_discriminant_sub(alg.a, step), alg)


@lru_cache(maxsize=None)
def step_norm(a: int, step: TowerStep, N: int) -> int:
    """``|Nm_{Q_a(N)/Q}|`` of the step discriminant, via the sub-level norm."""
    d = _step_discriminant_sub(a, step)
    sub = d.algebra
    big = make_algebra(a, N)
    nm = abs(norm_abs(d)) ** (big.dim // sub.dim)
    if nm.denominator != 1 or nm == 0:
        raise ArithmeticError(f"degenerate step discriminant for a={a}, {step}")
    return nm.numerator


@lru_cache(maxsize=None)
def _delta(a: int, N: int) -> int:
    if a == 1:
        return 1
    out = 1
    for step in tower_steps(N):
        out *= step_norm(a, step, N)
    return out


def delta(alg: KummerAlgebra) -> int:
    """The tower discriminant scale; 1 when ``a = 1`` or ``N = 1``."""
    return _delta(alg.a, alg.N)


def step_scale(a: int, step: TowerStep) -> Fraction:
    """Common coefficient scale ``r`` of a step decomposition (1 when ``a = 1``)."""
    if a == 1:
        return Fraction(1)
    return Fraction(1, step_norm(a, step, step.top_level))


__all__ = [
    "ComplexBall", "Enclosure", "MeasureReport", "NonConvergence", "StepCase", "TowerStep",
    "delta", "embed_value", "embed_values", "house", "make_step", "mean_square",
    "mean_square_relative", "measure", "real_radical", "refine", "relative_conjugate_embeddings",
    "step_basis", "step_discriminant", "step_norm", "step_scale", "to_fractions", "tower_steps",
    "working_precision",
]
