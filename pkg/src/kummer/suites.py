"""Randomized verification suites.

Every suite is a pair ``generate(params, rng) -> list of inputs`` and
``evaluate(inputs, params) -> TrialRecord``.  Inputs are plain JSON values
(elements are written in the ``z``/``r`` expression syntax), so any record in a
report can be replayed with :func:`replay`.

Verdicts:

``pass``          the inequality is certain, or both sides of an identity
                  agree within the tolerance
``fail``          the enclosures certainly contradict the claim
``inconclusive``  overlapping enclosures, or a bounded search gave up
``vacuous``       the sampled instance does not meet the claim's hypothesis
``skipped``       the instance is outside the scope of the check

Suites run in ``strict`` mode (a failure is a build failure) or ``report``
mode (failures are findings).
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable

from mpmath import iv

from .algebra import (AlgebraElement, Embedding, format_element, include, make_algebra,
                      parse_element)
from .bounds import (SUGGESTED_DELTA, BoundConfig, _h, derive_constants, first_display_sides,
                     g_iv, make_config)
from .exact import factorize
from .measures import (DEFAULT_TOL, Enclosure, embed_values, interval, make_step, measure,
                       real_radical, refine, relative_conjugate_embeddings, to_fractions,
                       tower_steps, delta, width, working_precision)
from .representations import Exhausted, decompose_step, min_rep_count, term_set

__all__ = ["TrialRecord", "SuiteReport", "SUITES", "check_lemma", "replay", "UnknownSuite"]


class UnknownSuite(KeyError):
    pass


@dataclass
class TrialRecord:
    inputs: dict
    verdict: str
    lhs: Enclosure | None = None
    rhs: Enclosure | None = None
    note: str = ""

    @property
    def conclusive(self) -> bool:
        return self.verdict in ("pass", "fail")

    def to_json(self) -> dict:
        out = {"inputs": self.inputs,
               "lhs": None if self.lhs is None else self.lhs.to_json(),
               "rhs": None if self.rhs is None else self.rhs.to_json()}
        if self.note:
            out["note"] = self.note
        return out


def _fmt_num(q: Fraction | None) -> str:
    if q is None:
        return ""
    try:
        return repr(float(q))
    except OverflowError:
        return str(q)


@dataclass
class SuiteReport:
    suite: str
    params: dict
    seed: int
    mode: str
    records: list[TrialRecord]
    summary: dict = field(default_factory=dict)

    @property
    def trials(self) -> int:
        return len(self.records)

    @property
    def conclusive(self) -> int:
        return sum(r.conclusive for r in self.records)

    @property
    def passes(self) -> int:
        return sum(r.verdict == "pass" for r in self.records)

    @property
    def failures(self) -> list[TrialRecord]:
        return [r for r in self.records if r.verdict == "fail"]

    def count(self, verdict: str) -> int:
        return sum(r.verdict == verdict for r in self.records)

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "params": self.params,
            "seed": self.seed,
            "trials": self.trials,
            "conclusive": self.conclusive,
            "passes": self.passes,
            "failures": [r.to_json() for r in self.failures],
            "mode": self.mode,
            "inconclusive": self.count("inconclusive"),
            "vacuous": self.count("vacuous"),
            "skipped": self.count("skipped"),
            "summary": self.summary,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", "verdict", "lhs_low", "lhs_high", "rhs_low", "rhs_high", "inputs"])
        for n, r in enumerate(self.records):
            lhs = r.lhs or Enclosure(None, None)
            rhs = r.rhs or Enclosure(None, None)
            w.writerow([n, r.verdict, _fmt_num(lhs.low), _fmt_num(lhs.high),
                        _fmt_num(rhs.low), _fmt_num(rhs.high),
                        json.dumps(r.inputs, sort_keys=True)])
        return buf.getvalue()

    def exit_code(self) -> int:
        """0 all good, 1 conclusive failure (strict mode), 3 nothing conclusive."""
        if self.mode == "strict" and self.failures:
            return 1
        judged = [r for r in self.records if r.verdict not in ("vacuous", "skipped")]
        if judged and not any(r.conclusive for r in judged):
            return 3
        if self.mode == "strict" and any(r.verdict == "inconclusive" for r in judged):
            return 3
        return 0


@dataclass(frozen=True)
class Suite:
    generate: Callable[[dict, random.Random], list[dict]]
    evaluate: Callable[[dict, dict], TrialRecord]
    mode: str
    defaults: dict
    finalize: Callable[[list[TrialRecord], dict], dict] | None = None
    description: str = ""


SUITES: dict[str, Suite] = {}


def _suite(name: str, mode: str, defaults: dict, description: str, finalize=None):
    def register(gen):
        def wrap(evaluate):
            SUITES[name] = Suite(gen, evaluate, mode, defaults, finalize, description)
            return evaluate
        return wrap
    return register


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    return v


def check_lemma(suite_id: str, params: dict | None = None, trials: int | None = None,
                seed: int = 0) -> SuiteReport:
    """Run one suite; ``trials`` is per configuration (per field, per k, ...)."""
    if suite_id not in SUITES:
        raise UnknownSuite(suite_id)
    suite = SUITES[suite_id]
    merged = dict(suite.defaults)
    merged.update(params or {})
    if trials is not None:
        merged["trials"] = trials
    merged = _jsonable(merged)
    rng = random.Random(seed)
    records = [suite.evaluate(inp, merged) for inp in suite.generate(merged, rng)]
    summary = suite.finalize(records, merged) if suite.finalize else {}
    return SuiteReport(suite_id, merged, seed, suite.mode, records, summary)


def replay(suite_id: str, inputs: dict, params: dict | None = None) -> TrialRecord:
    suite = SUITES[suite_id]
    merged = _jsonable({**suite.defaults, **(params or {})})
    return suite.evaluate(inputs, merged)


# ---------------------------------------------------------------------------
# comparison helpers


def _encl(v) -> Enclosure:
    lo, hi = to_fractions(v)
    return Enclosure(lo, hi)


def _exact(q) -> Enclosure:
    q = Fraction(q)
    return Enclosure(q, q)


def _judge(lhs, rhs, op: str) -> str | None:
    """Verdict of ``lhs op rhs`` on intervals, or None when undecided."""
    if op == "<=":
        if lhs.b <= rhs.a:
            return "pass"
        if lhs.a > rhs.b:
            return "fail"
    elif op == "<":
        if lhs.b < rhs.a:
            return "pass"
        if lhs.a >= rhs.b:
            return "fail"
    else:
        raise ValueError(op)
    return None


_PRECS = (64, 128, 256, 512, 1024)


def _claims(build, inputs: dict, precs=_PRECS) -> TrialRecord:
    """``build(prec)`` returns a list of ``(lhs, rhs, op)``; all must hold."""
    for prec in precs:
        claims = build(prec)
        verdicts = [_judge(l, r, op) for l, r, op in claims]
        for v, (l, r, _) in zip(verdicts, claims):
            if v == "fail":
                return TrialRecord(inputs, "fail", _encl(l), _encl(r))
        if all(v == "pass" for v in verdicts):
            l, r, _ = claims[0]
            return TrialRecord(inputs, "pass", _encl(l), _encl(r))
    undecided = next(c for c, v in zip(claims, verdicts) if v is None)
    return TrialRecord(inputs, "inconclusive", _encl(undecided[0]), _encl(undecided[1]))


def _tolerant(lhs: Enclosure, rhs: Enclosure, tol: Fraction, inputs: dict,
              op: str = "<=") -> TrialRecord:
    """``lhs op rhs`` where equality is attainable: narrow overlaps pass."""
    if op == "==":
        ok = lhs.overlaps(rhs)
        return TrialRecord(inputs, "pass" if ok else "fail", lhs, rhs)
    if lhs.high <= rhs.low:
        return TrialRecord(inputs, "pass", lhs, rhs)
    if lhs.low > rhs.high:
        return TrialRecord(inputs, "fail", lhs, rhs)
    if lhs.width < tol and rhs.width < tol:
        return TrialRecord(inputs, "pass", lhs, rhs, "equal within tolerance")
    return TrialRecord(inputs, "inconclusive", lhs, rhs)


def _q(s) -> Fraction:
    return Fraction(str(s))


def _rand_rational(rng: random.Random, max_exp: int = 6, den: int = 1000) -> Fraction:
    scale = 10 ** rng.randint(0, max_exp)
    return Fraction(rng.randint(0, scale * den), den)


def _rand_unit(rng: random.Random, bits: int = 24) -> Fraction:
    return Fraction(rng.randrange((1 << bits) + 1), 1 << bits)


@lru_cache(maxsize=None)
def _config(k: Fraction, delta: Fraction | None = None) -> BoundConfig:
    return make_config(k, delta)


@lru_cache(maxsize=None)
def _certified(k: Fraction, delta: Fraction, cap_loglog: Fraction, grid_step: Fraction
               ) -> BoundConfig:
    return derive_constants(k, delta, cap_loglog=cap_loglog, grid_step=grid_step)


def _g(t, cfg: BoundConfig, prec: int):
    return g_iv(t, cfg.k, cfg.c1, prec)


def _gsum(values, cfg, prec):
    with working_precision(prec):
        total = iv.mpf(0)
        for v in values:
            total = total + _g(v, cfg, prec)
        return total


# ---------------------------------------------------------------------------
# properties of g

_K_DEFAULT = ["4/5", "1", "2"]


def _per_k(params, rng, sample):
    out = []
    for k in params["k"]:
        for _ in range(params["trials"]):
            inp = sample(rng)
            out.append({"k": str(_q(k)), **inp})
    return out


def _gen_31(params, rng):
    def sample(rng):
        nu = rng.randint(1, params["max_nu"])
        return {"values": [str(_rand_rational(rng)) for _ in range(nu)]}
    return _per_k(params, rng, sample)


@_suite("lemma3.1", "strict", {"k": _K_DEFAULT, "trials": 10000, "max_nu": 6},
        "mean of g(a_r) <= g(mean of a_r) for nonnegative reals")(_gen_31)
def _eval_31(inp, params):
    cfg = _config(_q(inp["k"]))
    vals = [_q(v) for v in inp["values"]]
    nu = len(vals)
    if len(set(vals)) == 1:
        return TrialRecord(inp, "pass", note="all values equal: identity")
    mean = sum(vals) / nu

    def build(prec):
        with working_precision(prec):
            return [(_gsum(vals, cfg, prec) / nu, _g(mean, cfg, prec), "<=")]
    return _claims(build, inp)


def _extremal_split(vals, lam, mu, a):
    nu = len(vals)
    u = math.floor((mu * nu - a) / (mu - lam))
    sigma = a - u * lam - (nu - u - 1) * mu
    return u, sigma


def _gen_32(params, rng):
    def sample(rng):
        nu = rng.randint(1, params["max_nu"])
        while True:
            lam = _rand_rational(rng, 4)
            mu = lam + _rand_rational(rng, 4) + Fraction(1, 1000)
            vals = [lam + (mu - lam) * _rand_unit(rng, 16) for _ in range(nu)]
            top = min(sum(vals), nu * mu)
            lo = nu * lam
            if top > lo:
                a = lo + (top - lo) * (1 - _rand_unit(rng, 16) * Fraction(65535, 65536))
                if a > lo:
                    break
        return {"lambda": str(lam), "mu": str(mu), "a": str(a),
                "values": [str(v) for v in vals]}
    return _per_k(params, rng, sample)


@_suite("lemma3.2", "strict", {"k": _K_DEFAULT, "trials": 10000, "max_nu": 6},
        "extremal lower bound for concave sums with box constraints")(_gen_32)
def _eval_32(inp, params):
    cfg = _config(_q(inp["k"]))
    lam, mu, a = _q(inp["lambda"]), _q(inp["mu"]), _q(inp["a"])
    vals = [_q(v) for v in inp["values"]]
    nu = len(vals)
    u, sigma = _extremal_split(vals, lam, mu, a)
    inp = {**inp, "u": u, "sigma": str(sigma)}
    if not (0 <= u <= nu - 1 and lam <= sigma <= mu):
        return TrialRecord(inp, "vacuous", note="u or sigma outside the admissible range")
    extremal = sorted([lam] * u + [mu] * (nu - u - 1) + [sigma])
    if sorted(vals) == extremal:
        return TrialRecord(inp, "pass", note="values are the extremal configuration")

    def build(prec):
        with working_precision(prec):
            rhs = u * _g(lam, cfg, prec) + (nu - u - 1) * _g(mu, cfg, prec) + _g(sigma, cfg, prec)
            return [(rhs, _gsum(vals, cfg, prec), "<=")]
    return _claims(build, inp)


def _gen_33(params, rng):
    out = []
    for k in params["k"]:
        c1 = _config(_q(k)).c1
        for _ in range(params["trials"]):
            out.append({"k": str(_q(k)), "t": rng.randint(c1, params["span"] * c1)})
    return out


@_suite("lemma3.3", "strict", {"k": _K_DEFAULT, "trials": 10000, "span": 10},
        "0 < log f(t) - log g(t) < c1 k / (t log log t) for integers t >= c1")(_gen_33)
def _eval_33(inp, params):
    k = _q(inp["k"])
    cfg = _config(k)
    t = int(inp["t"])

    def build(prec):
        with working_precision(prec):
            kk, tt = interval(k), iv.mpf(t)
            diff = kk * (_h(tt + cfg.c1) - _h(tt))
            bound = cfg.c1 * kk / (tt * iv.log(iv.log(tt)))
            return [(iv.mpf(0), diff, "<"), (diff, bound, "<")]
    return _claims(build, inp)


def _gen_34(params, rng):
    out = []
    for k in params["k"]:
        for _ in range(params["trials"]):
            s, t = rng.randint(0, params["max"]), rng.randint(0, params["max"])
            out.append({"k": str(_q(k)), "s": s, "t": t})
    return out


@_suite("lemma3.4", "strict", {"k": _K_DEFAULT, "trials": 10000, "max": 10**6},
        "subadditivity of g and its quantitative form for 1 <= t <= s")(_gen_34)
def _eval_34(inp, params):
    cfg = _config(_q(inp["k"]))
    s, t = int(inp["s"]), int(inp["t"])
    s, t = max(s, t), min(s, t)
    if t == 0:
        return TrialRecord(inp, "pass", note="t = 0: identity")

    def build(prec):
        with working_precision(prec):
            gs, gt, gu = _g(s, cfg, prec), _g(t, cfg, prec), _g(s + t, cfg, prec)
            tp = iv.mpf(t + cfg.c1)
            extra = interval(cfg.c2) * gt / iv.log(iv.log(tp))
            return [(gu, gs + gt, "<="), (gu + extra, gs + gt, "<=")]
    return _claims(build, inp)


def _gen_35(params, rng):
    def sample(rng):
        nu = rng.randint(1, params["max_nu"])
        vals = [0 if rng.random() < 0.1 else rng.randint(0, params["max"]) for _ in range(nu)]
        return {"values": vals}
    return _per_k(params, rng, sample)


@_suite("lemma3.5", "strict", {"k": _K_DEFAULT, "trials": 10000, "max_nu": 6, "max": 10**6},
        "sum of g(a_r) >= g(sum of a_r) for nonnegative integers")(_gen_35)
def _eval_35(inp, params):
    cfg = _config(_q(inp["k"]))
    vals = [int(v) for v in inp["values"] if int(v) != 0]
    if len(vals) <= 1:
        return TrialRecord(inp, "pass", note="at most one nonzero value: identity")

    def build(prec):
        return [(_g(sum(vals), cfg, prec), _gsum(vals, cfg, prec), "<=")]
    return _claims(build, inp)


def _cfg36(params, k) -> BoundConfig:
    k = _q(k)
    d = params.get("delta", {}).get(str(k))
    d = _q(d) if d is not None else SUGGESTED_DELTA[k]
    return _certified(k, d, _q(params["cap_loglog"]), _q(params["grid_step"]))


def _gen_36(params, rng):
    out = []
    for k in params["k"]:
        cfg = _cfg36(params, k)
        for n in range(params["trials"]):
            display = n % 3 + 1
            lo = cfg.c3_loglog if display < 3 else cfg.c4_loglog
            v = lo + (cfg.cap_loglog - lo) * _rand_unit(rng)
            out.append({"k": str(_q(k)), "display": display, "v": str(v),
                        "w": str(_rand_unit(rng))})
    return out


def _prec36(v: Fraction) -> int:
    return 96 + int(1.45 * float(v)) + 32


@_suite("lemma3.6", "strict",
        {"k": _K_DEFAULT, "trials": 300, "cap_loglog": "200", "grid_step": "1/16", "delta": {}},
        "the three displays above the certified thresholds; t = exp(exp(v))")(_gen_36)
def _eval_36(inp, params):
    cfg = _cfg36(params, inp["k"])
    v, w, display = _q(inp["v"]), _q(inp["w"]), int(inp["display"])
    base = _prec36(v)
    precs = (base, 2 * base, 4 * base)
    if display == 1:
        def build(prec):
            lhs, rhs = first_display_sides(v, cfg, prec)
            return [(lhs, rhs, "<=")]
        return _claims(build, inp, precs)

    def build(prec):
        with working_precision(prec):
            vv, ww = interval(v), interval(w)
            k, d = interval(cfg.k), interval(cfg.delta)
            T = iv.exp(vv)                       # log t (or log s)
            if display == 2:
                # s = lambda t with 1 <= lambda <= exp(v(1-delta) - 1)
                t = iv.exp(T)
                s = t * iv.exp(ww * (vv * (1 - d) - 1))
                u = s + t
                logu = iv.log(u)
                hyp = (logu + (d - 1) * iv.log(logu), T, "<=")
                lhs = _g(s, cfg, prec) + _g(t, cfg, prec)
                rhs = _g(u, cfg, prec) + _g(u / logu, cfg, prec)
                return [(iv.log(rhs), iv.log(lhs), "<="), hyp]
            # display 3: log t between log t0 and log s / 2
            s = iv.exp(T)
            log_t0 = (1 - d) * vv - iv.log(iv.mpf(4))
            log_t = log_t0 + ww * (T / 2 - log_t0)
            x = s / iv.exp(log_t)
            lhs = log_t + iv.log(x) - k * _h(x + cfg.c1)
            rhs = iv.log(iv.mpf(2)) + T - k * _h(s + cfg.c1)
            return [(rhs, lhs, "<=")]
    return _claims(build, inp, precs)


# ---------------------------------------------------------------------------
# mean-square identities


def _random_integer_element(alg, rng: random.Random, H: int) -> AlgebraElement:
    return alg.element(rng.randint(-H, H) for _ in range(alg.dim))


def _gen_identity(params, rng):
    out = []
    for a, N, N1 in params["configs"]:
        alg = make_algebra(a, N)
        for _ in range(params["trials"]):
            e = _random_integer_element(alg, rng, params["H"])
            out.append({"a": a, "N": N, "N1": N1, "beta": format_element(e)})
    return out


def _rel_msq(vals, prec):
    with working_precision(prec):
        total = iv.mpf(0)
        for v in vals:
            total = total + v.abs2()
        return total / len(vals)


def _identity_sides(inp, params, form: str) -> TrialRecord:
    a, N, N1 = int(inp["a"]), int(inp["N"]), int(inp["N1"])
    top = make_algebra(a, N)
    beta = parse_element(top, inp["beta"])
    step = make_step(N1, N)
    dec = decompose_step(beta, step)
    q = step.p ** step.t
    p = step.p
    embs = relative_conjugate_embeddings(top, N1)
    zero = make_algebra(a, N1).zero
    cols: dict[int, dict[int, AlgebraElement]] = {}
    for (l, k) in step.index_pairs(a):
        cols.setdefault(k, {})[l] = dec.scaled((l, k))
    # (weight exponent 2k/q, divisor, element) triples summed on the right
    terms = []
    for k, col in sorted(cols.items()):
        if form == "second" or (form == "literal" and k != 0):
            terms += [(k, 1, include(c, top)) for _, c in sorted(col.items())]
        else:
            full = [col.get(i, zero) for i in range(p)]
            terms += [(k, 2 * (p - 1), include(full[i] - full[n], top))
                      for i in range(p) for n in range(p) if i != n]
    tol = _q(params["tol"])

    def evaluate(prec):
        lhs = _rel_msq(embed_values(beta, embs, prec), prec)
        with working_precision(prec):
            rhs = iv.mpf(0)
            for k, div, el in terms:
                if not el.is_zero():
                    rhs = rhs + real_radical(a, 2 * k, q, prec) * _rel_msq(
                        embed_values(el, embs, prec), prec) / div
        return [lhs, rhs]

    (lhs, rhs), _ = refine(evaluate, tol)
    return _tolerant(_encl(lhs), _encl(rhs), tol, inp, "==")


_ID_DEFAULTS = {"trials": 50, "H": 3, "tol": str(DEFAULT_TOL)}


@_suite("lemma2.1", "strict",
        {**_ID_DEFAULTS, "configs": [[2, 6, 2], [2, 6, 3], [3, 6, 2], [1, 15, 5]]},
        "relative mean square over a first-case step, as displayed")(_gen_identity)
def _eval_21(inp, params):
    return _identity_sides(inp, params, "literal")


@_suite("lemma2.1.blockwise", "strict",
        {**_ID_DEFAULTS, "configs": [[2, 6, 2], [2, 6, 3], [3, 6, 2], [1, 15, 5]]},
        "relative mean square over a first-case step, pairwise differences in every column"
        )(_gen_identity)
def _eval_21b(inp, params):
    return _identity_sides(inp, params, "blockwise")


@_suite("lemma2.2", "report", {**_ID_DEFAULTS, "configs": [[2, 4, 2], [1, 9, 3]]},
        "relative mean square over a second-case step")(_gen_identity)
def _eval_22(inp, params):
    return _identity_sides(inp, params, "second")


# ---------------------------------------------------------------------------
# minimal representation counts over a first-case step


def _top_step(alg):
    step = tower_steps(alg)[-1]
    if step.t != 1:
        raise ValueError(f"the last step of N={alg.N} is not a first-case step")
    return step


def _random_sum_of_terms(alg, rng: random.Random, lo: int, hi: int) -> AlgebraElement:
    """A nonzero element whose scaled form is a sum of lo..hi random terms."""
    terms = term_set(alg)
    while True:
        n = rng.randint(lo, hi)
        total = alg.zero
        for _ in range(n):
            total = total + rng.choice(terms).value(alg)
        if not total.is_zero():
            return total / delta(alg)


def _gen_additive(params, rng, columnwise: bool):
    out = []
    for a, N in params["fields"]:
        alg = make_algebra(a, N)
        step = _top_step(alg)
        sub = make_algebra(a, step.sub_level)
        pairs = step.index_pairs(a)
        p = step.p
        for _ in range(params["trials"]):
            if columnwise:
                I = []
                for j in sorted({k for _, k in pairs}):
                    col = [pr for pr in pairs if pr[1] == j]
                    I += rng.sample(col, rng.randint(0, min(len(col), p // 2)))
                if not I:
                    I = [rng.choice(pairs)]
            else:
                size = rng.randint(1, min(len(pairs), p * (p - 1) // 2))
                I = rng.sample(pairs, size)
            I = sorted(I)
            b = {f"{l},{k}": format_element(_random_sum_of_terms(sub, rng, 1, params["max_terms"]))
                 for l, k in I}
            out.append({"a": a, "N": N, "coefficients": b})
    return out


def _additive_instance(inp):
    a, N = int(inp["a"]), int(inp["N"])
    alg = make_algebra(a, N)
    step = _top_step(alg)
    sub = make_algebra(a, step.sub_level)
    b = {tuple(int(x) for x in key.split(",")): parse_element(sub, v)
         for key, v in inp["coefficients"].items()}
    basis = dict(zip(step.index_pairs(a), _basis(a, step)))
    total = alg.zero
    for pair, coeff in b.items():
        total = total + include(coeff.scalar_mul(delta(sub)), alg) * basis[pair]
    return alg, step, sub, b, total / delta(alg)


@lru_cache(maxsize=None)
def _basis(a, step):
    from .measures import step_basis
    return tuple(step_basis(a, step))


def _eval_additive(inp, params):
    alg, step, sub, b, beta = _additive_instance(inp)
    bound = int(params["bound"])
    try:
        m = {pair: min_rep_count(v, bound)[0] for pair, v in b.items()}
    except Exhausted:
        return TrialRecord(inp, "inconclusive", note="a coefficient count exceeds the bound")
    total = sum(m.values())
    try:
        n = min_rep_count(beta, total)[0]
    except Exhausted:
        # the search up to sum(m) is exhaustive, so n > sum(m)
        rec = {**inp, "m": total, "n": f">{total}"}
        return TrialRecord(rec, "fail", Enclosure(Fraction(total + 1), Fraction(total + 1)),
                           _exact(total), "n exceeds the sum of the coefficient counts")
    rec = {**inp, "m": total, "n": n}
    return TrialRecord(rec, "pass" if n == total else "fail", _exact(n), _exact(total))


_ADD_DEFAULTS = {"fields": [[2, 3], [1, 15]], "trials": 50, "bound": 4, "max_terms": 2}


@_suite("lemma4.1", "strict", _ADD_DEFAULTS,
        "n equals the sum of coefficient counts when |I| <= p(p-1)/2")(
    lambda params, rng: _gen_additive(params, rng, False))
def _eval_41(inp, params):
    return _eval_additive(inp, params)


@_suite("lemma4.1.columnwise", "strict", _ADD_DEFAULTS,
        "n equals the sum of coefficient counts when every column holds at most p/2 indices")(
    lambda params, rng: _gen_additive(params, rng, True))
def _eval_41c(inp, params):
    return _eval_additive(inp, params)


@_suite("lemma4.2", "report", {**_ADD_DEFAULTS, "k": "1", "bound": 8},
        "(p^2-|I|) sum g(m_ij) + 1/2 sum g(m_ijkl) >= p(p-1) g(n); size hypothesis without c2")(
    lambda params, rng: _gen_additive(params, rng, False))
def _eval_42(inp, params):
    alg, step, sub, b, beta = _additive_instance(inp)
    bound = int(params["bound"])
    cfg = _config(_q(params["k"]))
    p = step.p
    try:
        n = min_rep_count(beta, bound)[0]
        m = {pair: min_rep_count(v, bound)[0] for pair, v in b.items()}
        diffs = [min_rep_count(b[x] - b[y], bound)[0] for x in b for y in b]
    except Exhausted:
        return TrialRecord(inp, "inconclusive", note="count exceeds the bound")
    rec = {**inp, "n": n, "m": [m[x] for x in sorted(m)]}

    def build(prec):
        with working_precision(prec):
            lhs = (p * p - len(b)) * _gsum(m.values(), cfg, prec) + _gsum(diffs, cfg, prec) / 2
            rhs = p * (p - 1) * _g(n, cfg, prec)
            return [(rhs, lhs, "<=")]
    r = _claims(build, rec)
    return TrialRecord(r.inputs, r.verdict, r.rhs, r.lhs, r.note)


def _gen_terms(params, rng):
    out = []
    for a, N in params["fields"]:
        alg = make_algebra(a, N)
        for _ in range(params["trials"]):
            e = _random_sum_of_terms(alg, rng, 1, params["max_terms"])
            out.append({"a": a, "N": N, "beta": format_element(e)})
    return out


def _alpha_grid(beta, step, a):
    """Coefficients alpha_ij for 0 <= i <= p-1 and every radical index j (row p-1 is 0)."""
    dec = decompose_step(beta, step, check_integrality=False)
    sub = make_algebra(a, step.sub_level)
    js = sorted({k for _, k in step.index_pairs(a)})
    return [dec.coefficients.get((i, j), sub.zero) for i in range(step.p) for j in js]


def _pair_counts(alphas, bound):
    return [min_rep_count(x - y, bound)[0] for x in alphas for y in alphas]


@_suite("lemma4.3", "report",
        {"fields": [[2, 3], [2, 5]], "trials": 50, "max_terms": 4, "bound": 12, "k": "1"},
        "sum of g(n_ijlk) >= 2p(p-1) g(n) when every alpha_ij differs from enough alpha_lk"
        )(_gen_terms)
def _eval_43(inp, params):
    alg = make_algebra(int(inp["a"]), int(inp["N"]))
    beta = parse_element(alg, inp["beta"])
    step = _top_step(alg)
    cfg = _config(_q(params["k"]))
    bound = int(params["bound"])
    alphas = _alpha_grid(beta, step, alg.a)
    try:
        n = min_rep_count(beta, bound)[0]
        diffs = _pair_counts(alphas, bound)
    except Exhausted:
        return TrialRecord(inp, "inconclusive", note="count exceeds the bound")
    need = 2 * _g(n, cfg, 128) / _g(1, cfg, 128)
    row = len(alphas)
    nonzero = min(sum(1 for d in diffs[r * row:(r + 1) * row] if d) for r in range(row))
    rec = {**inp, "n": n, "min_nonzero_differences": nonzero}
    if not nonzero >= need.b:
        return TrialRecord(rec, "vacuous", note="too few nonzero differences")
    p = step.p

    def build(prec):
        return [(2 * p * (p - 1) * _g(n, cfg, prec), _gsum(diffs, cfg, prec), "<=")]
    r = _claims(build, rec)
    return TrialRecord(r.inputs, r.verdict, r.rhs, r.lhs, r.note)


@_suite("thm4.4", "report",
        {"fields": [[2, 5], [1, 7]], "trials": 50, "max_terms": 8, "bound": 16, "k": "1",
         "p_min": 5},
        "sum of g(M(alpha_ij - alpha_lk)) >= 2p(p-1) g(M(beta)) for p >= p_min")(_gen_terms)
def _eval_44(inp, params):
    alg = make_algebra(int(inp["a"]), int(inp["N"]))
    beta = parse_element(alg, inp["beta"])
    step = _top_step(alg)
    p = step.p
    if p < int(params["p_min"]):
        return TrialRecord(inp, "skipped", note="p below the stand-in threshold")
    cfg = _config(_q(params["k"]))
    bound = int(params["bound"])
    alphas = _alpha_grid(beta, step, alg.a)
    try:
        n = min_rep_count(beta, bound)[0]
        diffs = _pair_counts(alphas, bound)
    except Exhausted:
        return TrialRecord(inp, "inconclusive", note="count exceeds the bound")
    rec = {**inp, "n": n}
    if n > 0 and math.log(n) > p * (p - 1):
        return TrialRecord(rec, "vacuous", note="log n exceeds p(p-1)")

    def build(prec):
        return [(2 * p * (p - 1) * _g(n, cfg, prec), _gsum(diffs, cfg, prec), "<=")]
    r = _claims(build, rec)
    return TrialRecord(r.inputs, r.verdict, r.rhs, r.lhs, r.note)


# ---------------------------------------------------------------------------
# decomposition bounds and the main inequality


def _odd_prime_rank(N: int) -> int:
    """mu with N = p_1 ... p_mu, the product of the first mu odd primes."""
    primes = [p for p, _ in factorize(N)] if N > 1 else []
    expected = []
    q = 3
    while len(expected) < len(primes):
        if all(q % d for d in range(2, int(q ** 0.5) + 1)):
            expected.append(q)
        q += 2
    if primes != expected or any(e != 1 for _, e in factorize(N)):
        raise ValueError(f"N={N} is not a product of the first odd primes")
    return len(primes)


@_suite("lemma5.2", "strict",
        {"fields": [[1, 3], [2, 3], [1, 15], [2, 15]], "trials": 50, "max_terms": 4, "bound": 4,
         "tol": str(DEFAULT_TOL)},
        "delta^2 * mean square >= 2^-mu * M for N the product of the first mu odd primes"
        )(_gen_terms)
def _eval_52(inp, params):
    alg = make_algebra(int(inp["a"]), int(inp["N"]))
    beta = parse_element(alg, inp["beta"])
    mu = _odd_prime_rank(alg.N)
    try:
        count = min_rep_count(beta, int(params["bound"]))[0]
    except Exhausted:
        return TrialRecord(inp, "inconclusive", note="count exceeds the bound")
    # delta^2 M(beta) = M(delta beta), and delta beta is a sum of terms
    rep = measure(beta.scalar_mul(delta(alg)), _q(params["tol"]))
    rhs = Fraction(count, 2 ** mu)
    r = _tolerant(_exact(rhs), rep.msq, _q(params["tol"]), {**inp, "count": count, "mu": mu})
    return TrialRecord(r.inputs, r.verdict, r.rhs, r.lhs, r.note)


_CORPUS = [[1, 3], [1, 4], [1, 5], [2, 2], [2, 3], [3, 2], [5, 2]]


def _gen_corpus(params, rng):
    out = []
    for a, N in params["fields"]:
        alg = make_algebra(a, N)
        for _ in range(params["trials"]):
            e = _random_integer_element(alg, rng, params["H"])
            out.append({"a": a, "N": N, "beta": format_element(e)})
    return out


def _eval_measures(inp, params):
    alg = make_algebra(int(inp["a"]), int(inp["N"]))
    beta = parse_element(alg, inp["beta"])
    tol = _q(params["tol"])
    if beta.is_zero():
        return TrialRecord(inp, "pass", _exact(0), _exact(0), "zero element")
    rep = measure(beta, tol)
    house2 = Enclosure(rep.house_low ** 2, rep.house_high ** 2)
    first = _tolerant(rep.msq, house2, tol, inp)
    if first.verdict != "pass":
        return first
    second = _tolerant(_exact(1), rep.msq, tol, inp)
    if second.verdict != "pass":
        return second
    return first


SUITES["measures"] = Suite(
    _gen_corpus, _eval_measures, "strict",
    {"fields": _CORPUS, "trials": 200, "H": 3, "tol": str(DEFAULT_TOL)}, None,
    "house^2 >= mean square, and mean square >= 1 for nonzero algebraic integers")


def _eval_thm11(inp, params):
    alg = make_algebra(int(inp["a"]), int(inp["N"]))
    beta = parse_element(alg, inp["beta"])
    tol = _q(params["tol"])
    k = _q(params["k"])
    try:
        M = min_rep_count(beta, None if _has_closed(alg.N) else int(params["bound"]))[0]
    except Exhausted:
        return TrialRecord(inp, "inconclusive", note="count exceeds the bound")
    rec = {**inp, "M": M}
    if M in (0, 1):
        return TrialRecord(rec, "skipped", note="M is 0 or 1")
    rep = measure(beta, tol)
    D = delta(alg)
    prec = 128
    with working_precision(prec):
        LM = iv.log(iv.mpf(M))
        factor = iv.exp(interval(k) * LM / iv.log(LM)) / M
        lhs = interval(D * D * rep.house_low ** 2) * factor
        hi = interval(D * D * rep.house_high ** 2) * factor
        ratio = iv.mpf([lhs.a, hi.b])
    enc = _encl(ratio)
    verdict = "pass" if enc.low > 0 else "fail"
    return TrialRecord(rec, verdict, enc, _exact(0))


def _has_closed(N):
    from .representations import _closed_form_shape
    return _closed_form_shape(N) is not None


def _finalize_thm11(records, params):
    ratios = [(r.lhs.low, n) for n, r in enumerate(records) if r.verdict in ("pass", "fail")]
    if not ratios:
        return {"infimum_low": None}
    low, n = min(ratios)
    return {"infimum_low": str(low), "infimum_float": _fmt_num(low),
            "argmin_trial": n, "argmin_inputs": records[n].inputs,
            "positive": low > 0, "scanned": len(ratios)}


SUITES["thm1.1"] = Suite(
    _gen_corpus, _eval_thm11, "strict",
    {"fields": _CORPUS, "trials": 200, "H": 3, "tol": str(DEFAULT_TOL), "k": "1", "bound": 6},
    _finalize_thm11,
    "infimum of delta^2 house^2 exp(k log M / log log M) / M over the corpus")


def _eval_growth(inp, params):
    alg = make_algebra(int(inp["a"]), int(inp["N"]))
    beta = parse_element(alg, inp["beta"])
    try:
        M = min_rep_count(beta, None if _has_closed(alg.N) else int(params["bound"]))[0]
    except Exhausted:
        return TrialRecord(inp, "inconclusive", note="count exceeds the bound")
    if M == 0:
        return TrialRecord({**inp, "M": 0}, "skipped", note="zero element")
    rep = measure(beta, _q(params["tol"]))
    D = delta(alg)
    x = Enclosure(D * rep.house_low, D * rep.house_high)
    return TrialRecord({**inp, "M": M}, "pass", _exact(M), x)


def _finalize_growth(records, params):
    pts = [(r.lhs.low, r.rhs.low) for r in records
           if r.verdict == "pass" and r.rhs.low > 1]
    if not pts:
        return {"points": 0}
    exps = [math.log(M) / math.log(x) for M, x in pts if M > 1]
    return {"points": len(pts),
            "max_log_M_over_log_x": round(max(exps), 12) if exps else None,
            "max_M_over_x_squared": _fmt_num(max(M / (x * x) for M, x in pts))}


SUITES["remark5.4"] = Suite(
    _gen_corpus, _eval_growth, "report",
    {"fields": _CORPUS, "trials": 200, "H": 3, "tol": str(DEFAULT_TOL), "bound": 6},
    _finalize_growth,
    "growth of M against x = delta * house; exponents log M / log x")
