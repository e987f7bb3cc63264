"""Exact integers, rationals, dense polynomials and rational linear algebra.

Rationals are :class:`fractions.Fraction`; everything here is immutable and pure.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")


class SingularMatrixError(ArithmeticError):
    """The system has no unique solution."""


# ---------------------------------------------------------------------------
# integers


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorisation of ``n >= 1`` as ascending ``(prime, exponent)`` pairs."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def euler_phi(n: int) -> int:
    result = n
    for p, _ in factorize(n):
        result -= result // p
    return result


def mobius(n: int) -> int:
    fac = factorize(n)
    if any(e > 1 for _, e in fac):
        return 0
    return -1 if len(fac) % 2 else 1


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def integer_root(n: int, e: int) -> int | None:
    """Return ``m`` with ``m**e == n`` if it exists."""
    if n < 0:
        return None
    lo, hi = 0, 1
    while hi**e <= n:
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if mid**e < n:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo**e == n else None


def is_perfect_power(n: int) -> bool:
    """True when ``n = m**e`` for integers ``m >= 2``, ``e >= 2``."""
    if n < 4:
        return False
    return any(integer_root(n, e) is not None for e in range(2, n.bit_length() + 1))


def squarefree_part(n: int) -> int:
    s = 1
    for p, e in factorize(n):
        if e % 2:
            s *= p
    return s


def common_denominator(values: Iterable[Fraction]) -> int:
    d = 1
    for v in values:
        d = lcm(d, v.denominator)
    return d


def ramanujan_sum(n: int, q: int) -> int:
    """Sum of ``zeta_q**(n*l)`` over ``l`` coprime to ``q``."""
    g = gcd(n, q)
    m = q // g
    return mobius(m) * euler_phi(q) // euler_phi(m)


# ---------------------------------------------------------------------------
# polynomials


@dataclass(frozen=True)
class Poly:
    """Dense univariate polynomial, coefficients lowest degree first.

    Coefficients may be ``int`` or ``Fraction``; trailing zeros are stripped so
    the leading coefficient is nonzero unless the polynomial is zero.
    """

    coeffs: tuple

    def __post_init__(self):
        c = list(self.coeffs)
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def x_power_minus(cls, n: int, c) -> "Poly":
        """``X**n - c``."""
        return cls((-c,) + (0,) * (n - 1) + (1,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "Poly") -> "Poly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return Poly(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self) -> "Poly":
        return Poly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        if self.is_zero() or other.is_zero():
            return Poly(())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Poly(tuple(out))

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        """Euclidean division; exact integer arithmetic when ``other`` is monic."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        lead = other.coeffs[-1]
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return Poly(()), self
        quo = [0] * (dq + 1)
        for k in range(dq, -1, -1):
            c = rem[k + len(other.coeffs) - 1]
            if c:
                q = c if lead == 1 else Fraction(c) / lead
                quo[k] = q
                for i, b in enumerate(other.coeffs):
                    rem[k + i] -= q * b
        return Poly(tuple(quo)), Poly(tuple(rem))

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = -c if c < 0 else c
            mono = "" if i == 0 else ("X" if i == 1 else f"X^{i}")
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"{mag}*{mono}"
            else:
                body = str(mag)
            parts.append((sign, body))
        first_sign, first = parts[0]
        s = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s


_cyclo_cache: dict[int, Poly] = {}
_cyclo_lock = threading.Lock()


def cyclotomic_poly(n: int) -> Poly:
    """The ``n``-th cyclotomic polynomial, by exact division of ``X^n - 1``."""
    if n < 1:
        raise ValueError("N must be positive")
    with _cyclo_lock:
        cached = _cyclo_cache.get(n)
    if cached is not None:
        return cached
    prod = Poly((1,))
    for d in divisors(n)[:-1]:
        prod = prod * cyclotomic_poly(d)
    quo, rem = Poly.x_power_minus(n, 1).divmod(prod)
    assert rem.is_zero()
    with _cyclo_lock:
        _cyclo_cache.setdefault(n, quo)
    return quo


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class RationalMatrix:
    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entries length must equal rows*cols")
        object.__setattr__(self, "entries", tuple(Fraction(e) for e in self.entries))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "RationalMatrix":
        r = len(rows)
        c = len(rows[0]) if r else 0
        if any(len(row) != c for row in rows):
            raise ValueError("ragged rows")
        return cls(r, c, tuple(x for row in rows for x in row))

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(
            self.cols, self.rows,
            tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)),
        )

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        out = []
        ocols = [other.entries[j::other.cols] for j in range(other.cols)]
        for i in range(self.rows):
            r = self.row(i)
            out.extend(sum(a * b for a, b in zip(r, col)) for col in ocols)
        return RationalMatrix(self.rows, other.cols, tuple(out))

    def apply(self, v: Sequence[Fraction]) -> list[Fraction]:
        if len(v) != self.cols:
            raise ValueError("dimension mismatch")
        return [sum((a * b for a, b in zip(self.row(i), v) if a), Fraction(0))
                for i in range(self.rows)]


def _integer_rows(rows: Sequence[Sequence[Fraction]]) -> tuple[list[list[int]], list[int]]:
    """Scale each row to integers; returns the rows and the per-row multipliers."""
    out, mults = [], []
    for row in rows:
        d = common_denominator(Fraction(x) for x in row)
        out.append([int(Fraction(x) * d) for x in row])
        mults.append(d)
    return out, mults


def _bareiss_det_int(m: list[list[int]]) -> int:
    n = len(m)
    if n == 0:
        return 1
    m = [row[:] for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        rk = m[k]
        for i in range(k + 1, n):
            ri = m[i]
            f = ri[k]
            for j in range(k + 1, n):
                ri[j] = (pivot * ri[j] - f * rk[j]) // prev
            ri[k] = 0
        prev = pivot
    return sign * m[n - 1][n - 1]


def det(a: RationalMatrix) -> Fraction:
    """Exact determinant by Bareiss fraction-free elimination."""
    if a.rows != a.cols:
        raise ValueError(f"determinant of non-square {a.rows}x{a.cols} matrix")
    rows, mults = _integer_rows(a.to_rows())
    scale = 1
    for m in mults:
        scale *= m
    return Fraction(_bareiss_det_int(rows), scale)


def _echelon(rows: list[list[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    """Fraction-free row echelon form over the first ``ncols`` columns.

    Returns the reduced rows and pivot columns; rows beyond ``len(pivots)`` are
    zero on the first ``ncols`` columns.
    """
    m = [r[:] for r in rows]
    pivots = []
    prev = 1
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        rr = m[r]
        for i in range(r + 1, len(m)):
            ri = m[i]
            f = ri[c]
            for j in range(len(ri)):
                ri[j] = (p * ri[j] - f * rr[j]) // prev
        prev = p
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def solve_linear(a: RationalMatrix, b: Sequence[Fraction]) -> list[Fraction] | None:
    """Solve ``a @ x = b`` exactly; ``None`` when the system is inconsistent.

    Square or overdetermined systems of full column rank only: a consistent
    rank-deficient system raises :class:`SingularMatrixError`.
    """
    if len(b) != a.rows:
        raise ValueError(f"right-hand side has length {len(b)}, expected {a.rows}")
    rows, _ = _integer_rows([list(a.row(i)) + [Fraction(b[i])] for i in range(a.rows)])
    m, pivots = _echelon(rows, a.cols)
    rank = len(pivots)
    if any(m[i][a.cols] for i in range(rank, len(m))):
        return None
    if rank < a.cols:
        raise SingularMatrixError(f"rank {rank} < {a.cols} unknowns")
    x = [Fraction(0)] * a.cols
    for i in range(rank - 1, -1, -1):
        row = m[i]
        s = Fraction(row[a.cols])
        for j in range(i + 1, a.cols):
            if row[j]:
                s -= row[j] * x[j]
        x[i] = s / row[i]
    return x


def kernel(a: RationalMatrix) -> list[list[Fraction]]:
    """A basis of the right null space of ``a``."""
    rows, _ = _integer_rows(a.to_rows())
    m, pivots = _echelon(rows, a.cols) if rows else ([], [])
    free = [c for c in range(a.cols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * a.cols
        x[f] = Fraction(1)
        for i in range(len(pivots) - 1, -1, -1):
            c = pivots[i]
            row = m[i]
            s = sum((row[j] * x[j] for j in range(c + 1, a.cols) if row[j]), Fraction(0))
            x[c] = -s / row[c]
        basis.append(x)
    return basis


def inverse(a: RationalMatrix) -> RationalMatrix:
    if a.rows != a.cols:
        raise ValueError("inverse of non-square matrix")
    n = a.rows
    rows, _ = _integer_rows([list(a.row(i)) + [int(i == j) for j in range(n)]
                             for i in range(n)])
    m, pivots = _echelon(rows, n)
    if len(pivots) < n:
        raise SingularMatrixError("matrix is singular")
    cols = []
    for k in range(n):
        x = [Fraction(0)] * n
        for i in range(n - 1, -1, -1):
            row = m[i]
            s = Fraction(row[n + k])
            for j in range(i + 1, n):
                if row[j]:
                    s -= row[j] * x[j]
            x[i] = s / row[i]
        cols.append(x)
    return RationalMatrix(n, n, tuple(cols[j][i] for i in range(n) for j in range(n)))


def berkowitz_det(m: Sequence[Sequence[T]], zero: T, one: T) -> T:
    """Division-free determinant over any commutative ring (Berkowitz)."""
    n = len(m)
    if n == 0:
        return one
    # characteristic polynomial coefficients, highest degree first
    poly = [one, -m[0][0]]
    for k in range(1, n):
        # build the Toeplitz column for the leading (k+1)x(k+1) block
        r = [m[k][j] for j in range(k)]
        c = [m[i][k] for i in range(k)]
        a_sub = [[m[i][j] for j in range(k)] for i in range(k)]
        col = [one, -m[k][k]]
        vec = c
        for _ in range(k):
            col.append(-_dot(r, vec, zero))
            vec = [_dot(a_sub[i], vec, zero) for i in range(k)]
        new = []
        for i in range(k + 2):
            acc = zero
            for j in range(min(i, k) + 1):
                if i - j < len(col):
                    acc = acc + col[i - j] * poly[j]
            new.append(acc)
        poly = new
    return poly[-1] if n % 2 == 0 else -poly[-1]


def _dot(a, b, zero):
    acc = zero
    for x, y in zip(a, b):
        acc = acc + x * y
    return acc


def newton_charpoly(power_sums: Sequence[Fraction], n: int) -> list[Fraction]:
    """Monic characteristic polynomial (lowest degree first) from ``p_1..p_n``."""
    e = [Fraction(1)]
    for m in range(1, n + 1):
        s = Fraction(0)
        for i in range(1, m + 1):
            term = e[m - i] * power_sums[i - 1]
            s += term if i % 2 else -term
        e.append(s / m)
    # X^n - e1 X^{n-1} + e2 X^{n-2} - ...
    coeffs = [Fraction(0)] * (n + 1)
    for m in range(n + 1):
        coeffs[n - m] = e[m] if m % 2 == 0 else -e[m]
    return coeffs


def map_entries(a: RationalMatrix, f: Callable[[Fraction], Fraction]) -> RationalMatrix:
    return RationalMatrix(a.rows, a.cols, tuple(f(x) for x in a.entries))
