"""The comparison functions f and g and their constants.

    f(t) = t * exp(-k log t / log log t)        (f(0) = 0, f(1) = 1)
    g(t) = t * exp(-k log t' / log log t'),     t' = t + c1

g is total on [0, oo) once log log c1 >= 2.  Everything here is evaluated
with mpmath interval arithmetic; ``g_iv`` is the hot path used by the suites.

The constants c3 and c4 are thresholds beyond which two asymptotic
inequalities hold.  For moderate k they are astronomically large (c3 for
k = 1, delta = 1/5 is around exp(exp(67))), so the search runs over a grid
that is uniform in v = log log t, and the thresholds are stored through v.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction
from functools import lru_cache

from mpmath import iv, libmp, mp, mpf

from .measures import ComplexBall, interval, to_fractions, working_precision


class DomainError(ValueError):
    """f is only defined at 0, 1 and for t > e."""


class SearchExhausted(RuntimeError):
    """No grid point below the search cap certified the inequality."""


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, float)):
        return Fraction(x)
    if isinstance(x, mpf):
        return Fraction(*libmp.to_rational(x._mpf_))
    return Fraction(str(x))


# ---------------------------------------------------------------------------
# f and g


def _h(x):
    """log x / log log x for an interval x > e."""
    L = iv.log(x)
    return L / iv.log(L)


def f_iv(t, k, prec: int = 128):
    with working_precision(prec):
        if isinstance(t, (int, float, str, Fraction, mpf)):
            t = interval(as_fraction(t))
        else:
            t = iv.mpf(t)
        kk = interval(as_fraction(k))
        lo, _ = to_fractions(t)
        if t.a == 0 and t.b == 0:
            return iv.mpf(0)
        if t.a == 1 and t.b == 1:
            return iv.mpf(1)
        if t.a < 0:
            raise DomainError(f"f is undefined at t = {lo}")
        # defined only where log log t > 0 is certain
        if not iv.log(t).a > 1:
            raise DomainError(f"f is undefined at t = {lo}")
        return t * iv.exp(-kk * _h(t))


def f_val(t, k, precision_bits: int = 128) -> ComplexBall:
    """Real enclosure of f(t); raises ``DomainError`` on (0, 1) and (1, e]."""
    v = f_iv(t, k, precision_bits)
    with working_precision(precision_bits):
        return ComplexBall(v, iv.mpf(0))


def g_iv(t, k, c1, prec: int = 64):
    """Enclosure of g(t) for an exact or interval argument ``t >= 0``."""
    with working_precision(prec):
        t = t if isinstance(t, iv.mpf) else interval(t)
        if t.b == 0:
            return iv.mpf(0)
        kk = k if isinstance(k, iv.mpf) else interval(k)
        return t * iv.exp(-kk * _h(t + c1))


def g_val(t, cfg: "BoundConfig", precision_bits: int | None = None) -> ComplexBall:
    prec = precision_bits or cfg.precision_bits
    if as_fraction(t) < 0:
        raise ValueError("g is defined for t >= 0")
    v = g_iv(as_fraction(t), as_fraction(cfg.k), cfg.c1, prec)
    with working_precision(prec):
        return ComplexBall(v, iv.mpf(0))


def g_derivatives(t, k, c1, prec: int = 128):
    """Enclosures of (g'(t), g''(t)) from the closed forms."""
    with working_precision(prec):
        t = t if isinstance(t, iv.mpf) else interval(t)
        kk = interval(k)
        x = t + c1
        L = iv.log(x)
        LL = iv.log(L)
        E = iv.exp(-kk * L / LL)
        h1 = (1 / LL - 1 / LL**2) / x
        h2 = -(1 / LL - 1 / LL**2) / x**2 + (-1 / LL**2 + 2 / LL**3) / (x**2 * L)
        d1 = E * (1 - t * kk * h1)
        d2 = E * (-2 * kk * h1 + t * (kk**2 * h1**2 - kk * h2))
        return d1, d2


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class BoundConfig:
    k: Fraction
    delta: Fraction | None
    c1: int
    c2: Fraction
    c3_loglog: Fraction | None = None
    c4_loglog: Fraction | None = None
    cap_loglog: Fraction | None = None
    grid_step: Fraction = Fraction(1, 64)
    precision_bits: int = 64
    notes: tuple[str, ...] = ()

    @property
    def c3(self):
        return None if self.c3_loglog is None else loglog_to_mpf(self.c3_loglog)

    @property
    def c4(self):
        return None if self.c4_loglog is None else loglog_to_mpf(self.c4_loglog)

    def to_json(self) -> dict:
        out = {}
        for key, val in asdict(self).items():
            if isinstance(val, Fraction):
                out[key] = str(val)
            elif isinstance(val, tuple):
                out[key] = list(val)
            else:
                out[key] = val
        out["c3"] = describe_loglog(self.c3_loglog)
        out["c4"] = describe_loglog(self.c4_loglog)
        return out


def loglog_to_mpf(v: Fraction):
    with mp.workprec(128):
        return mp.exp(mp.exp(mpf(v.numerator) / v.denominator))


def describe_loglog(v: Fraction | None) -> str | None:
    """Human-readable value of exp(exp(v))."""
    if v is None:
        return None
    with mp.workprec(128):
        vv = mpf(v.numerator) / v.denominator
        T = mp.exp(vv)
        if T < 1000:
            return mp.nstr(mp.exp(T), 12)
        return f"exp({mp.nstr(T, 12)})"


def check_k_delta(k: Fraction, delta: Fraction | None) -> None:
    with working_precision(128):
        log2 = iv.log(iv.mpf(2))
        if not interval(k) > log2:
            raise ValueError(f"k = {k} must exceed log 2")
        if delta is not None:
            if delta <= 0:
                raise ValueError("delta must be positive")
            if not (1 - log2 / interval(k)) > interval(delta):
                raise ValueError(f"delta = {delta} must be below 1 - log(2)/k")


def _shape_grid(upper: int = 1 << 40):
    """Points where g' >= 0 and g'' <= 0 are checked.

    All integers up to 2048, then a geometric tail.
    """
    pts = list(range(0, 2049))
    t = 2048
    while t < upper:
        t = t * 33 // 32 + 1
        pts.append(t)
    return pts


@lru_cache(maxsize=None)
def certify_c1(k: Fraction, max_doublings: int = 16) -> int:
    """Smallest power of 2 >= exp(e^2) for which g' >= 0 and g'' <= 0 on the grid."""
    c1 = 1
    with working_precision(128):
        bound = iv.exp(iv.exp(iv.mpf(2)))
        while not iv.mpf(c1) >= bound:
            c1 *= 2
    for _ in range(max_doublings):
        ok = True
        for t in _shape_grid():
            d1, d2 = g_derivatives(t, k, c1)
            if not (d1.a >= 0 and d2.b <= 0):
                ok = False
                break
        if ok:
            return c1
        c1 *= 2
    raise SearchExhausted("no c1 certified on the grid")


def make_config(k, delta=None, c1: int | None = None, precision_bits: int = 64) -> BoundConfig:
    """Config with c1 certified (or given) and c2 exact; c3, c4 left unset."""
    k = as_fraction(k)
    check_k_delta(k, None if delta is None else as_fraction(delta))
    if c1 is None:
        c1 = certify_c1(k)
    c2 = k / (2 * (1 + c1))
    return BoundConfig(k=k, delta=as_fraction(delta) if delta is not None else None,
                       c1=c1, c2=c2, precision_bits=precision_bits)


# ---------------------------------------------------------------------------
# thresholds c3 and c4


def _ivq(q: Fraction):
    return interval(q)


def first_display_sides(v, cfg: BoundConfig, prec: int):
    """Logarithms of both sides of g(t / (log t)^delta) <= c2 g(t) / (2 log log t').

    Evaluated at t = exp(exp(v)); logarithms keep the magnitudes manageable.
    """
    with working_precision(prec):
        vv = v if isinstance(v, iv.mpf) else _ivq(v)
        k = _ivq(cfg.k)
        d = _ivq(cfg.delta)
        T = iv.exp(vv)             # log t
        t = iv.exp(T)
        x = t / iv.exp(d * vv)     # t / T^delta
        log_x = T - d * vv
        lhs = log_x - k * _h(x + cfg.c1)
        tp = t + cfg.c1
        Lp = iv.log(tp)
        rhs = iv.log(_ivq(cfg.c2)) + T - k * Lp / iv.log(Lp) - iv.log(2 * iv.log(Lp))
        return lhs, rhs


def first_display(v, cfg: BoundConfig, prec: int) -> bool | None:
    """True when the first display certainly holds at t = exp(exp(v)), False when
    it certainly fails, None when the enclosures overlap."""
    lhs, rhs = first_display_sides(v, cfg, prec)
    if lhs.b <= rhs.a:
        return True
    if lhs.a > rhs.b:
        return False
    return None


def third_display_margin(v, cfg: BoundConfig, prec: int):
    """``k (h(s') - h(s/t0 + c1)) - log 2`` at s = exp(exp(v)), t0 = (log s)^(1-delta)/4.

    t * g(s/t) is increasing in t, so t0 is the worst case of the display;
    a positive margin means t * g(s/t) >= 2 g(s) on the whole t range.
    Returns ``None`` when t0 exceeds sqrt(s) (empty range).
    """
    with working_precision(prec):
        vv = v if isinstance(v, iv.mpf) else _ivq(v)
        k = _ivq(cfg.k)
        d = _ivq(cfg.delta)
        T = iv.exp(vv)
        s = iv.exp(T)
        t0 = iv.exp((1 - d) * vv) / 4
        if not t0.b <= iv.exp(T / 2).a:
            return None
        return k * (_h(s + cfg.c1) - _h(s / t0 + cfg.c1)) - iv.log(iv.mpf(2))


def _decide(fn, v, cfg, start_prec: int, cap: int = 4096):
    prec = start_prec
    while True:
        r = fn(v, cfg, prec)
        if r is not None or prec >= cap:
            return r
        prec *= 2


def _loglog_grid(lo: Fraction, hi: Fraction, step: Fraction) -> list[Fraction]:
    pts = []
    v = lo
    while v <= hi:
        pts.append(v)
        v += step
    return pts


def _threshold(check, cfg: BoundConfig, grid: list[Fraction]) -> Fraction:
    """Smallest grid point from which ``check`` holds at every larger grid point."""
    found = None
    for v in reversed(grid):
        bits = 64 + int(2 * max(float(v), 1) * 1.4427) + 8
        if check(v, bits):
            found = v
        else:
            break
    if found is None:
        raise SearchExhausted("no grid point below the cap verified")
    return found


def derive_constants(k, delta, search_cap=None, *, cap_loglog=None,
                     grid_step: Fraction = Fraction(1, 64), c1: int | None = None
                     ) -> BoundConfig:
    """Certify c1, set c2, and search thresholds c3 and c4 up to the cap.

    The cap is given either as a number ``search_cap`` or through
    ``cap_loglog = log log(cap)``.  The grid is uniform in log log t with
    spacing ``grid_step``, starting at log log 16; values between grid points
    and above the cap are not verified, which is recorded in ``notes``.
    """
    base = make_config(k, delta, c1)
    if cap_loglog is None:
        if search_cap is None:
            raise ValueError("give search_cap or cap_loglog")
        with mp.workprec(128):
            cap = mpf(str(search_cap)) if not isinstance(search_cap, mpf) else search_cap
            if cap <= 16:
                raise SearchExhausted("search cap below the grid start")
            cap_loglog = Fraction(str(mp.nstr(mp.log(mp.log(cap)), 30)))
    cap_loglog = as_fraction(cap_loglog)
    with mp.workprec(128):
        start = Fraction(str(mp.nstr(mp.log(mp.log(16)), 30)))
    grid = _loglog_grid(start, cap_loglog, grid_step)
    if not grid:
        raise SearchExhausted("empty search grid")
    cfg = base

    def first(v, bits):
        return _decide(first_display, v, cfg, bits) is True

    def third(v, bits):
        m = _decide(lambda vv, c, p: _sign(third_display_margin(vv, c, p)), v, cfg, bits)
        return m is True

    c3 = _threshold(first, cfg, grid)
    c4 = _threshold(third, cfg, grid)
    notes = (
        f"grid uniform in log log t, spacing {grid_step}, from {start} to {cap_loglog}",
        "points between grid nodes and beyond the cap are not verified",
        "the third display is checked at t = (log s)^(1-delta)/4 only; t*g(s/t) increases in t",
    )
    return BoundConfig(k=cfg.k, delta=cfg.delta, c1=cfg.c1, c2=cfg.c2, c3_loglog=c3,
                       c4_loglog=c4, cap_loglog=cap_loglog, grid_step=grid_step,
                       precision_bits=cfg.precision_bits, notes=notes)


def _sign(x):
    if x is None:
        return False
    if x.a > 0:
        return True
    if x.b < 0:
        return False
    return None


# delta values used throughout the suites, one per tested k
SUGGESTED_DELTA = {Fraction(4, 5): Fraction(1, 10), Fraction(1): Fraction(1, 5),
                   Fraction(2): Fraction(1, 2)}
