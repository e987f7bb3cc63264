"""The algebra Q[x, y] / (Phi_N(x), y^N - a) and its (l, k) embeddings.

``x`` is the class of a primitive N-th root of unity and ``y`` the class of the
real root a^(1/N).  Elements are exact rational coordinate vectors over the
basis ``x^i y^j`` (``0 <= i < phi(N)``, ``0 <= j < R``), flattened with ``i``
as the outer index.  ``R`` is the radical degree: ``N`` for ``a > 1``, and 1
for ``a = 1``, where the positive real root is 1 and the algebra is Q(zeta_N).
When X^N - a is reducible over Q(zeta_N) the algebra is a product of fields
rather than a field; every construction below is stated for the algebra and
coincides with the field version otherwise.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Iterator, Sequence

from .exact import (
    Poly,
    RationalMatrix,
    common_denominator,
    cyclotomic_poly,
    det,
    euler_phi,
    factorize,
    is_perfect_power,
    newton_charpoly,
    SingularMatrixError,
    ramanujan_sum,
    solve_linear,
    squarefree_part,
)


class PerfectPowerRadicand(ValueError):
    """The radicand is a perfect power, outside the supported family of fields."""


class MixedAlgebraError(ValueError):
    pass


class ExpressionError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class FieldStatus(str, enum.Enum):
    CERTIFIED_FIELD = "certified_field"
    DEGREE_DROP_DETECTED = "degree_drop_detected"
    UNVERIFIED = "unverified"


@dataclass(frozen=True, order=True)
class Embedding:
    """x -> zeta_N^l, y -> zeta_N^k * a^(1/N)."""

    l: int
    k: int


class KummerAlgebra:
    def __init__(self, a: int, N: int):
        if a < 1 or N < 1:
            raise ValueError("a and N must be positive")
        if is_perfect_power(a):
            raise PerfectPowerRadicand(f"a={a} is a perfect power")
        self.a = a
        self.N = N
        self.phi = euler_phi(N)
        self.rad = N if a > 1 else 1
        self.dim = self.rad * self.phi
        self.factorization = tuple(factorize(N)) if N > 1 else ()
        self.cyclo: Poly = cyclotomic_poly(N)
        # x^e reduced mod Phi_N for 0 <= e < N (x^N = 1 in the algebra)
        self._xpow = _reduced_powers(self.cyclo, N)
        self._trace_weights = tuple(self.rad * ramanujan_sum(i, N) for i in range(self.phi))

    def __repr__(self) -> str:
        return f"KummerAlgebra(a={self.a}, N={self.N})"

    def __reduce__(self):
        return make_algebra, (self.a, self.N)

    # -- constructors -------------------------------------------------------

    def element(self, coeffs: Iterable) -> "AlgebraElement":
        return AlgebraElement(self, tuple(Fraction(c) for c in coeffs))

    @property
    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, (Fraction(0),) * self.dim)

    @property
    def one(self) -> "AlgebraElement":
        return self.scalar(1)

    def scalar(self, c) -> "AlgebraElement":
        v = [Fraction(0)] * self.dim
        v[0] = Fraction(c)
        return AlgebraElement(self, tuple(v))

    @property
    def x(self) -> "AlgebraElement":
        return self.monomial(1, 0)

    @property
    def y(self) -> "AlgebraElement":
        return self.monomial(0, 1)

    def monomial(self, i: int, j: int) -> "AlgebraElement":
        """``x^i y^j`` for any integers ``i`` and ``j >= 0``, reduced."""
        if j < 0:
            raise ValueError("negative power of y")
        q, j = divmod(j, self.rad)
        scale = Fraction(self.a) ** q
        v = [Fraction(0)] * self.dim
        for t, c in enumerate(self._xpow[i % self.N]):
            if c:
                v[t * self.rad + j] = scale * c
        return AlgebraElement(self, tuple(v))

    def index(self, i: int, j: int) -> int:
        return i * self.rad + j

    @property
    def radical_exponents(self) -> range:
        return range(self.rad)

    def sublevel(self, M: int) -> "KummerAlgebra":
        if self.N % M:
            raise ValueError(f"{M} does not divide N={self.N}")
        return make_algebra(self.a, M)


@lru_cache(maxsize=None)
def make_algebra(a: int, N: int) -> KummerAlgebra:
    return KummerAlgebra(a, N)


def _reduced_powers(cyclo: Poly, N: int) -> tuple[tuple[int, ...], ...]:
    phi = cyclo.degree
    cur = [0] * phi
    cur[0] = 1
    out = []
    for _ in range(N):
        out.append(tuple(cur))
        # multiply by x and reduce by the monic Phi_N
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for t in range(phi):
                cur[t] -= top * cyclo.coeffs[t]
    return tuple(out)


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    algebra: KummerAlgebra
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.algebra.dim:
            raise ValueError(f"expected {self.algebra.dim} coordinates, got {len(self.coeffs)}")

    # -- structure ----------------------------------------------------------

    def _check(self, other: "AlgebraElement") -> None:
        if other.algebra is not self.algebra and (
            other.algebra.a != self.algebra.a or other.algebra.N != self.algebra.N
        ):
            raise MixedAlgebraError(f"{self.algebra!r} vs {other.algebra!r}")

    def _coerce(self, other) -> "AlgebraElement | None":
        if isinstance(other, AlgebraElement):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return self.algebra.scalar(other)
        return None

    def coeff(self, i: int, j: int) -> Fraction:
        return self.coeffs[i * self.algebra.rad + j]

    def terms(self) -> Iterator[tuple[int, int, Fraction]]:
        """Nonzero ``(i, j, coefficient)`` triples."""
        R = self.algebra.rad
        for idx, c in enumerate(self.coeffs):
            if c:
                yield idx // R, idx % R, c

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.algebra.a, self.algebra.N, self.coeffs))

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return AlgebraElement(self.algebra, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement(self.algebra, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return AlgebraElement(self.algebra, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def scalar_mul(self, c) -> "AlgebraElement":
        c = Fraction(c)
        return AlgebraElement(self.algebra, tuple(c * v for v in self.coeffs))

    def __truediv__(self, c):
        if isinstance(c, (int, Fraction)):
            return self.scalar_mul(1 / Fraction(c))
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scalar_mul(other)
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        self._check(other)
        return _multiply(self, other)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not supported")
        result = self.algebra.one
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __repr__(self) -> str:
        return f"<{format_element(self)} in Q_{self.algebra.a}({self.algebra.N})>"


def _int_vector(e: AlgebraElement) -> tuple[int, list[int]]:
    d = common_denominator(e.coeffs)
    return d, [int(c * d) for c in e.coeffs]


def _multiply(e1: AlgebraElement, e2: AlgebraElement) -> AlgebraElement:
    alg = e1.algebra
    N, R, phi, a = alg.N, alg.rad, alg.phi, alg.a
    d1, v1 = _int_vector(e1)
    d2, v2 = _int_vector(e2)
    cols1 = [[(i, v1[i * R + j]) for i in range(phi) if v1[i * R + j]] for j in range(R)]
    cols2 = [[(i, v2[i * R + j]) for i in range(phi) if v2[i * R + j]] for j in range(R)]
    width = 2 * phi - 1
    acc = [[0] * width for _ in range(R)]
    for j1, c1 in enumerate(cols1):
        if not c1:
            continue
        for j2, c2 in enumerate(cols2):
            if not c2:
                continue
            j = j1 + j2
            f = 1
            if j >= R:
                j -= R
                f = a
            row = acc[j]
            for i1, u in c1:
                fu = f * u
                for i2, w in c2:
                    row[i1 + i2] += fu * w
    out = [0] * alg.dim
    xpow = alg._xpow
    for j, row in enumerate(acc):
        for d, c in enumerate(row):
            if not c:
                continue
            if d < phi:
                out[d * R + j] += c
            else:
                for t, r in enumerate(xpow[d % N]):
                    if r:
                        out[t * R + j] += c * r
    den = d1 * d2
    return AlgebraElement(alg, tuple(Fraction(c, den) for c in out))


def add(e1: AlgebraElement, e2: AlgebraElement) -> AlgebraElement:
    return e1 + e2


def mul(e1: AlgebraElement, e2: AlgebraElement) -> AlgebraElement:
    return e1 * e2


# ---------------------------------------------------------------------------
# embeddings and automorphisms


def embeddings(alg: KummerAlgebra) -> list[Embedding]:
    """All ``(l, k)``, ``l`` ascending then ``k``; ``k = 0`` only when ``a = 1``."""
    N = alg.N
    return [Embedding(l, k) for l in range(N) if gcd(l, N) == 1 for k in range(alg.rad)]


def relative_embeddings(alg: KummerAlgebra, N1: int) -> list[Embedding]:
    """Embeddings fixing the image of Q_a(N1) pointwise."""
    if N1 < 1 or alg.N % N1:
        raise ValueError(f"N1={N1} does not divide N={alg.N}")
    return [e for e in embeddings(alg) if (e.l - 1) % N1 == 0 and e.k % N1 == 0]


def compose(outer: Embedding, inner: Embedding, N: int) -> Embedding:
    """The embedding ``outer o inner`` (apply the automorphism ``inner`` first)."""
    return Embedding(outer.l * inner.l % N, (outer.l * inner.k + outer.k) % N)


def apply_automorphism(e: AlgebraElement, emb: Embedding) -> AlgebraElement:
    """Image under x -> x^l, y -> x^k y."""
    alg = e.algebra
    if emb.l == 1 and emb.k == 0:
        return e
    N, R = alg.N, alg.rad
    out = [Fraction(0)] * alg.dim
    for i, j, c in e.terms():
        for t, r in enumerate(alg._xpow[(i * emb.l + j * emb.k) % N]):
            if r:
                out[t * R + j] += c * r
    return AlgebraElement(alg, tuple(out))


# ---------------------------------------------------------------------------
# sub-levels


def include(e: AlgebraElement, alg: KummerAlgebra) -> AlgebraElement:
    """Image of ``e`` under Q_a(M) -> Q_a(N): x_M -> x^(N/M), y_M -> y^(N/M)."""
    sub = e.algebra
    if sub.a != alg.a or alg.N % sub.N:
        raise ValueError(f"{sub!r} is not a sub-level of {alg!r}")
    if sub.N == alg.N:
        return e
    m = alg.N // sub.N
    my = alg.rad // sub.rad
    N, R = alg.N, alg.rad
    out = [Fraction(0)] * alg.dim
    for i, j, c in e.terms():
        for t, r in enumerate(alg._xpow[(i * m) % N]):
            if r:
                out[t * R + j * my] += c * r
    return AlgebraElement(alg, tuple(out))


@lru_cache(maxsize=None)
def _x_inclusion_matrix(a: int, N: int, M: int) -> RationalMatrix:
    alg = make_algebra(a, N)
    sub = make_algebra(a, M)
    m = N // M
    cols = [alg._xpow[(i * m) % N] for i in range(sub.phi)]
    return RationalMatrix(alg.phi, sub.phi, tuple(cols[c][r] for r in range(alg.phi)
                                                  for c in range(sub.phi)))


def restrict(e: AlgebraElement, M: int) -> AlgebraElement:
    """Preimage of ``e`` in Q_a(M); raises ``ValueError`` if ``e`` is not in the image."""
    alg = e.algebra
    sub = alg.sublevel(M)
    if M == alg.N:
        return e
    my = alg.rad // sub.rad
    R = alg.rad
    mat = _x_inclusion_matrix(alg.a, alg.N, M)
    out = [Fraction(0)] * sub.dim
    for j in range(R):
        col = [e.coeffs[i * R + j] for i in range(alg.phi)]
        if not any(col):
            continue
        if j % my:
            raise ValueError("element has radical components outside the sub-level")
        sol = solve_linear(mat, col)
        if sol is None:
            raise ValueError("element is not in the cyclotomic sub-level")
        for i, c in enumerate(sol):
            out[i * sub.rad + j // my] = c
    return AlgebraElement(sub, tuple(out))


# ---------------------------------------------------------------------------
# trace, norm, characteristic polynomial


def trace_abs(e: AlgebraElement) -> Fraction:
    """Trace of multiplication by ``e`` (sum over all embeddings)."""
    alg = e.algebra
    return sum((w * e.coeffs[i * alg.rad] for i, w in enumerate(alg._trace_weights)), Fraction(0))


def regular_matrix(e: AlgebraElement) -> RationalMatrix:
    """Matrix of multiplication by ``e``; column ``b`` holds the coordinates of ``e * b``."""
    alg = e.algebra
    R, dim = alg.rad, alg.dim
    cols: list[tuple[Fraction, ...]] = [()] * dim
    ex = e
    x = alg.x
    for i in range(alg.phi):
        exy = ex
        for j in range(R):
            cols[i * R + j] = exy.coeffs
            exy = _times_y(exy)
        ex = ex * x
    return RationalMatrix(dim, dim, tuple(cols[c][r] for r in range(dim) for c in range(dim)))


def _times_y(e: AlgebraElement) -> AlgebraElement:
    alg = e.algebra
    R = alg.rad
    out = list(e.coeffs)
    for i in range(alg.phi):
        row = e.coeffs[i * R:(i + 1) * R]
        out[i * R:(i + 1) * R] = (alg.a * row[-1],) + row[:-1]
    return AlgebraElement(alg, tuple(out))


def norm_abs(e: AlgebraElement) -> Fraction:
    """Determinant of multiplication by ``e`` (product over all embeddings)."""
    return det(regular_matrix(e))


def invert(e: AlgebraElement) -> AlgebraElement:
    """Multiplicative inverse; ``ZeroDivisionError`` for zero divisors."""
    alg = e.algebra
    try:
        sol = solve_linear(regular_matrix(e), alg.one.coeffs)
    except SingularMatrixError:
        sol = None
    if sol is None:
        raise ZeroDivisionError("element is not invertible")
    return AlgebraElement(alg, tuple(sol))


def char_poly(e: AlgebraElement) -> list[Fraction]:
    """Characteristic polynomial of multiplication by ``e``, lowest degree first.

    Computed from the power traces Tr(e^m) by Newton's identities, which agrees
    with det(X - M_e) for the regular representation M_e.
    """
    n = e.algebra.dim
    sums = []
    p = e
    for m in range(n):
        if m:
            p = p * e
        sums.append(trace_abs(p))
    return newton_charpoly(sums, n)


def is_algebraic_integer(e: AlgebraElement) -> bool:
    # the trace form test is cheap and rules out most non-integers
    if trace_abs(e).denominator != 1:
        return False
    return all(c.denominator == 1 for c in char_poly(e))


def relative_trace(e: AlgebraElement, N1: int) -> AlgebraElement:
    alg = e.algebra
    out = alg.zero
    for emb in relative_embeddings(alg, N1):
        out = out + apply_automorphism(e, emb)
    return out


# ---------------------------------------------------------------------------
# degree validation


def quadratic_discriminant(s: int) -> int:
    """Discriminant of Q(sqrt(s)) for squarefree ``s > 1``."""
    return s if s % 4 == 1 else 4 * s


def field_degree_check(alg: KummerAlgebra) -> FieldStatus:
    a, N = alg.a, alg.N
    if a == 1 or N % 2 == 1:
        return FieldStatus.CERTIFIED_FIELD
    s = squarefree_part(a)
    if s == 1:
        return FieldStatus.UNVERIFIED
    if N % quadratic_discriminant(s) == 0:
        return FieldStatus.DEGREE_DROP_DETECTED
    if N % 4:
        return FieldStatus.CERTIFIED_FIELD
    return FieldStatus.UNVERIFIED


# ---------------------------------------------------------------------------
# expression grammar:  expr := term (('+'|'-') term)* ; term := factor ('*' factor | '/' factor)*
#                      factor := ('-'|'+') factor | atom ('^' int)? ; atom := int | 'z' | 'r' | '(' expr ')'

_TOKEN = re.compile(r"\s*(?:(\d+)|(.))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.group(1) is not None:
            tokens.append(("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            ch = m.group(2)
            if ch not in "+-*/^()zr":
                raise ExpressionError(f"unexpected character {ch!r}", m.start(2))
            tokens.append(("op", ch, m.start(2)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, alg: KummerAlgebra, text: str):
        self.alg = alg
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, value: str | None = None):
        tok = self.tokens[self.i]
        if value is not None and tok[1] != value:
            raise ExpressionError(f"expected {value!r}", tok[2])
        self.i += 1
        return tok

    def parse(self):
        val = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ExpressionError(f"unexpected {tok[1]!r}", tok[2])
        return val

    def expr(self):
        val = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term(self):
        val = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            _, op, pos = self.take()
            rhs = self.factor()
            if op == "*":
                val = _mul_values(val, rhs)
            else:
                if isinstance(rhs, AlgebraElement):
                    raise ExpressionError("division by a non-rational", pos)
                if rhs == 0:
                    raise ExpressionError("division by zero", pos)
                val = val / Fraction(rhs)
        return val

    def factor(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            val = self.factor()
            return -val if tok[1] == "-" else val
        base = self.atom()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            self.take()
            exp_tok = self.peek()
            if exp_tok[0] != "int":
                raise ExpressionError("exponent must be a nonnegative integer", exp_tok[2])
            self.take()
            n = int(exp_tok[1])
            base = base ** n if isinstance(base, AlgebraElement) else Fraction(base) ** n
        return base

    def atom(self):
        tok = self.take()
        kind, val, pos = tok
        if kind == "int":
            return Fraction(int(val))
        if val == "z":
            return self.alg.x
        if val == "r":
            return self.alg.y
        if val == "(":
            inner = self.expr()
            self.take(")")
            return inner
        raise ExpressionError(f"unexpected {val or 'end of input'!r}", pos)


def _mul_values(a, b):
    if isinstance(a, AlgebraElement) or isinstance(b, AlgebraElement):
        return a * b
    return Fraction(a) * Fraction(b)


def parse_element(alg: KummerAlgebra, text: str) -> AlgebraElement:
    """Parse e.g. ``"1 + 3*z^2*r - r^2/2"`` with ``z`` = zeta_N and ``r`` = a^(1/N)."""
    val = _Parser(alg, text).parse()
    if isinstance(val, AlgebraElement):
        return val
    return alg.scalar(val)


def format_element(e: AlgebraElement) -> str:
    parts = []
    for i, j, c in e.terms():
        mono = "*".join(
            s for s in (
                "" if i == 0 else ("z" if i == 1 else f"z^{i}"),
                "" if j == 0 else ("r" if j == 1 else f"r^{j}"),
            ) if s
        )
        mag = abs(c)
        if mono:
            body = mono if mag == 1 else f"{mag}*{mono}"
        else:
            body = str(mag)
        parts.append(("-" if c < 0 else "+", body))
    if not parts:
        return "0"
    s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        s += f" {sign} {body}"
    return s
