"""Command-line front end: ``kummer <subcommand> [flags]``.

Exit codes: 0 success, 1 conclusive suite failure, 2 usage error,
3 nothing conclusive (an exhausted search, or only inconclusive trials).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from fractions import Fraction

from .algebra import (ExpressionError, PerfectPowerRadicand, embeddings,
                      field_degree_check, format_element, make_algebra, parse_element)
from .bounds import SearchExhausted, derive_constants, make_config
from .measures import (DEFAULT_TOL, embed_values, make_step, measure, tower_steps, delta,
                       to_fractions)
from .representations import Exhausted, NotInSpan, decompose_step, min_rep_count
from .suites import SUITES, check_lemma

OK, FAILURE, USAGE, INCONCLUSIVE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_rational(text: str) -> Fraction:
    """Accepts ``3``, ``4/5``, ``0.8``, ``1e-20`` and powers such as ``2^-64``."""
    text = str(text).strip()
    m = re.fullmatch(r"(-?\d+)\s*(?:\^|\*\*)\s*(-?\d+)", text)
    if m:
        return Fraction(int(m.group(1))) ** int(m.group(2))
    try:
        return Fraction(text)
    except ValueError:
        raise UsageError(f"not a rational number: {text!r}") from None


def read_config(path: str) -> dict[str, str]:
    """Line-oriented ``key = value`` file; ``#`` starts a comment."""
    out = {}
    try:
        lines = open(path, encoding="utf-8").read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


# option name -> (converter, default); flags override the config file, which overrides these
_OPTIONS = {
    "a": (int, None),
    "N": (int, None),
    "expr": (str, None),
    "precision_bits": (int, 128),
    "tol": (parse_rational, DEFAULT_TOL),
    "search_bound": (int, 6),
    "k": (parse_rational, None),
    "delta": (parse_rational, None),
    "c1": (int, None),
    "seed": (int, 0),
    "trials": (int, None),
    "format": (str, "text"),
    "output": (str, None),
    "json": (str, None),
    "csv": (str, None),
    "suite": (str, None),
    "step": (str, None),
    "cap_loglog": (parse_rational, None),
    "search_cap": (parse_rational, None),
    "grid_step": (parse_rational, Fraction(1, 16)),
}
_ALIASES = {"prec": "precision_bits", "precision": "precision_bits", "bound": "search_bound",
            "output_format": "format", "output_path": "output"}


def _resolve(ns: argparse.Namespace) -> dict:
    conf = read_config(ns.config) if ns.config else {}
    conf = {_ALIASES.get(k, k): v for k, v in conf.items()}
    out = {}
    for name, (conv, default) in _OPTIONS.items():
        flag = getattr(ns, name, None)
        if flag is not None:
            out[name] = conv(flag) if isinstance(flag, str) and conv is not str else flag
        elif name in conf:
            try:
                out[name] = conv(conf[name])
            except (TypeError, ValueError):
                raise UsageError(f"bad config value for {name}: {conf[name]!r}") from None
        else:
            out[name] = default
    out["param"] = list(getattr(ns, "param", None) or [])
    out["param"] += [f"{k[6:]}={v}" for k, v in conf.items() if k.startswith("param.")]
    if out["format"] not in ("text", "json", "csv"):
        raise UsageError(f"unknown format {out['format']!r}")
    return out


def _parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key=value file; flags take precedence")
    common.add_argument("--format", choices=["text", "json", "csv"], default=None)
    common.add_argument("--output", "-o", help="write the output here instead of stdout")

    field = _Parser(add_help=False)
    field.add_argument("--a", type=int)
    field.add_argument("--N", type=int)

    expr = _Parser(add_help=False)
    expr.add_argument("--expr", help="element in z (zeta_N) and r (a^(1/N)), e.g. '1 + 2*z*r^2'")

    p = _Parser(prog="kummer", description=__doc__,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("field", parents=[common, field], help="dimension, phi(N), factorization, status")
    s = sub.add_parser("eval", parents=[common, field, expr], help="embedding values")
    s.add_argument("--prec", dest="precision_bits", type=int)
    s = sub.add_parser("measure", parents=[common, field, expr], help="house and mean square")
    s.add_argument("--tol")
    sub.add_parser("delta", parents=[common, field], help="the discriminant scale")
    s = sub.add_parser("minrep", parents=[common, field, expr], help="least number of terms")
    s.add_argument("--bound", dest="search_bound", type=int)
    s = sub.add_parser("decompose", parents=[common, field, expr], help="step decomposition")
    s.add_argument("--step", help="SUB:TOP levels (default: the last step of the tower)")
    s = sub.add_parser("verify", parents=[common], help="run a verification suite")
    s.add_argument("--suite", choices=sorted(SUITES))
    s.add_argument("--trials", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--json", help="write the JSON report here")
    s.add_argument("--csv", help="write the per-trial CSV here")
    s.add_argument("--param", action="append", metavar="KEY=VALUE",
                   help="suite parameter; VALUE is parsed as JSON when possible")
    s.add_argument("--k")
    s = sub.add_parser("constants", parents=[common], help="derive c1..c4 for k and delta")
    s.add_argument("--k")
    s.add_argument("--delta")
    s.add_argument("--c1", type=int)
    s.add_argument("--cap-loglog", dest="cap_loglog")
    s.add_argument("--search-cap", dest="search_cap")
    s.add_argument("--grid-step", dest="grid_step")
    return p


# ---------------------------------------------------------------------------
# output helpers


def _emit(opts: dict, text: str) -> None:
    if opts["output"]:
        with open(opts["output"], "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _approx(lo: Fraction, hi: Fraction) -> str:
    """Midpoint with its half-width, or the exact value."""
    if lo == hi:
        return str(lo)
    return f"{float((lo + hi) / 2):.17g} ± {float((hi - lo) / 2):.2g}"


def _interval_json(lo: Fraction, hi: Fraction) -> dict:
    return {"low": str(lo), "high": str(hi)}


def _algebra(opts):
    if opts["a"] is None or opts["N"] is None:
        raise UsageError("--a and --N are required")
    try:
        return make_algebra(opts["a"], opts["N"])
    except (PerfectPowerRadicand, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _element(opts):
    alg = _algebra(opts)
    if opts["expr"] is None:
        raise UsageError("--expr is required")
    try:
        return parse_element(alg, opts["expr"])
    except ExpressionError as exc:
        raise UsageError(f"{exc}\n  {opts['expr']}\n  {' ' * exc.position}^") from None


# ---------------------------------------------------------------------------
# subcommands


def cmd_field(opts) -> int:
    alg = _algebra(opts)
    status = field_degree_check(alg)
    info = {"a": alg.a, "N": alg.N, "dim": alg.dim, "phi": alg.phi,
            "factorization": [[p, e] for p, e in alg.factorization],
            "radical_exponents": alg.rad, "status": status.value}
    if opts["format"] == "json":
        _emit(opts, _json(info))
    elif opts["format"] == "csv":
        _emit(opts, _csv(list(info), [[json.dumps(v) if isinstance(v, list) else v
                                       for v in info.values()]]))
    else:
        fac = " * ".join(f"{p}^{e}" if e > 1 else str(p) for p, e in alg.factorization) or "1"
        _emit(opts, f"a = {alg.a}, N = {alg.N}\ndim = {alg.dim}\nphi(N) = {alg.phi}\n"
                    f"N = {fac}\nstatus = {status.value}\n")
    return OK


def cmd_eval(opts) -> int:
    e = _element(opts)
    prec = opts["precision_bits"]
    if prec < 32:
        raise UsageError("precision must be at least 32 bits")
    embs = embeddings(e.algebra)
    vals = embed_values(e, embs, prec)
    rows = []
    for emb, v in zip(embs, vals):
        rl, rh = to_fractions(v.re)
        il, ih = to_fractions(v.im)
        rows.append((emb, rl, rh, il, ih))
    if opts["format"] == "json":
        _emit(opts, _json([{"l": m.l, "k": m.k, "re": _interval_json(rl, rh),
                            "im": _interval_json(il, ih)} for m, rl, rh, il, ih in rows]))
    elif opts["format"] == "csv":
        _emit(opts, _csv(["l", "k", "re_low", "re_high", "im_low", "im_high"],
                         [[m.l, m.k, repr(float(rl)), repr(float(rh)), repr(float(il)),
                           repr(float(ih))] for m, rl, rh, il, ih in rows]))
    else:
        _emit(opts, "".join(f"({m.l},{m.k})  re {_approx(rl, rh)}  im {_approx(il, ih)}\n"
                            for m, rl, rh, il, ih in rows))
    return OK


def cmd_measure(opts) -> int:
    e = _element(opts)
    rep = measure(e, opts["tol"])
    if opts["format"] == "json":
        _emit(opts, _json({"house": _interval_json(rep.house_low, rep.house_high),
                           "msq": _interval_json(rep.msq_low, rep.msq_high),
                           "precision_bits": rep.precision_bits,
                           "field_status": rep.field_status.value}))
    elif opts["format"] == "csv":
        _emit(opts, _csv(["house_low", "house_high", "msq_low", "msq_high", "precision_bits"],
                         [[str(rep.house_low), str(rep.house_high), str(rep.msq_low),
                           str(rep.msq_high), rep.precision_bits]]))
    else:
        _emit(opts, f"house = {_approx(rep.house_low, rep.house_high)}\n"
                    f"msq = {_approx(rep.msq_low, rep.msq_high)}\n"
                    f"precision = {rep.precision_bits} bits\n"
                    f"status = {rep.field_status.value}\n")
    return OK


def cmd_delta(opts) -> int:
    alg = _algebra(opts)
    d = delta(alg)
    if opts["format"] == "json":
        _emit(opts, _json({"a": alg.a, "N": alg.N, "delta": str(d)}))
    elif opts["format"] == "csv":
        _emit(opts, _csv(["a", "N", "delta"], [[alg.a, alg.N, d]]))
    else:
        _emit(opts, f"{d}\n")
    return OK


def cmd_minrep(opts) -> int:
    e = _element(opts)
    bound = opts["search_bound"]
    try:
        count, rep = min_rep_count(e, bound)
    except NotInSpan as exc:
        raise UsageError(f"not representable: {exc}") from None
    except Exhausted:
        if opts["format"] == "json":
            _emit(opts, _json({"exhausted": bound}))
        else:
            _emit(opts, f"exhausted: no representation with at most {bound} terms\n")
        return INCONCLUSIVE
    witness = rep.to_json()
    if opts["format"] == "json":
        _emit(opts, _json({"count": count, "witness": witness}))
    elif opts["format"] == "csv":
        _emit(opts, _csv(["sign", "i", "j", "mult"],
                         [[w["sign"], w["i"], w["j"], w["mult"]] for w in witness]))
    else:
        lines = [f"count {count}"]
        for w in witness:
            sign = "+" if w["sign"] > 0 else "-"
            lines.append(f"  {w['mult']} x ({sign}z^{w['i']}*r^{w['j']})")
        _emit(opts, "\n".join(lines) + "\n")
    return OK


def cmd_decompose(opts) -> int:
    e = _element(opts)
    alg = e.algebra
    if opts["step"]:
        try:
            sub_level, top_level = (int(x) for x in opts["step"].split(":"))
            step = make_step(sub_level, top_level)
        except ValueError as exc:
            raise UsageError(f"bad --step {opts['step']!r}: {exc}") from None
    else:
        steps = tower_steps(alg)
        if not steps:
            raise UsageError("N = 1 has no tower steps")
        step = steps[-1]
    if step.top_level != alg.N:
        raise UsageError(f"the step must end at N = {alg.N}")
    dec = decompose_step(e, step, check_integrality=False)
    coeffs = {f"{l},{k}": format_element(v) for (l, k), v in dec.coefficients.items()}
    info = {"step": {"p": step.p, "t": step.t, "sub": step.sub_level, "top": step.top_level,
                     "case": step.case_tag.value},
            "scale": str(dec.scale), "coefficients": coeffs}
    if opts["format"] == "json":
        _emit(opts, _json(info))
    elif opts["format"] == "csv":
        _emit(opts, _csv(["l", "k", "alpha"],
                         [[*key.split(","), v] for key, v in coeffs.items()]))
    else:
        head = (f"step {step.sub_level} -> {step.top_level} (p = {step.p}, t = {step.t}, "
                f"{step.case_tag.value}), scale r = {dec.scale}\n")
        body = "".join(f"  alpha[{key}] = {v}\n" for key, v in coeffs.items())
        _emit(opts, head + body)
    return OK


def _suite_params(opts) -> dict:
    params = {}
    for item in opts["param"]:
        if "=" not in item:
            raise UsageError(f"--param expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        try:
            params[key.strip()] = json.loads(value)
        except json.JSONDecodeError:
            params[key.strip()] = value
    if opts["k"] is not None:
        params.setdefault("k", [str(opts["k"])] if "k" in _list_k_suites() else str(opts["k"]))
    return params


def _list_k_suites():
    return {name for name, s in SUITES.items() if isinstance(s.defaults.get("k"), list)}


def cmd_verify(opts) -> int:
    if not opts["suite"]:
        raise UsageError("--suite is required; one of " + ", ".join(sorted(SUITES)))
    if opts["suite"] not in SUITES:
        raise UsageError(f"unknown suite {opts['suite']!r}")
    report = check_lemma(opts["suite"], _suite_params(opts), opts["trials"], opts["seed"])
    if opts["json"]:
        with open(opts["json"], "w", encoding="utf-8") as fh:
            fh.write(report.dumps())
    if opts["csv"]:
        with open(opts["csv"], "w", encoding="utf-8") as fh:
            fh.write(report.to_csv())
    if opts["format"] == "json":
        _emit(opts, report.dumps())
    elif opts["format"] == "csv":
        _emit(opts, report.to_csv())
    else:
        line = (f"{report.suite} [{report.mode}]: trials {report.trials}, conclusive "
                f"{report.conclusive}, passes {report.passes}, failures {len(report.failures)}, "
                f"inconclusive {report.count('inconclusive')}, vacuous {report.count('vacuous')}, "
                f"skipped {report.count('skipped')}\n")
        if report.summary:
            line += _json(report.summary)
        _emit(opts, line)
    return report.exit_code()


def cmd_constants(opts) -> int:
    if opts["k"] is None:
        raise UsageError("--k is required")
    try:
        if opts["delta"] is None and opts["search_cap"] is None and opts["cap_loglog"] is None:
            # without delta only c1 and c2 are defined
            cfg = make_config(opts["k"], None, opts["c1"])
        else:
            if opts["delta"] is None:
                raise UsageError("--delta is required to derive c3 and c4")
            kw = {"grid_step": opts["grid_step"], "c1": opts["c1"]}
            if opts["search_cap"] is not None:
                cfg = derive_constants(opts["k"], opts["delta"], opts["search_cap"], **kw)
            else:
                cfg = derive_constants(opts["k"], opts["delta"],
                                       cap_loglog=opts["cap_loglog"] or Fraction(200), **kw)
    except SearchExhausted as exc:
        _emit(opts, _json({"search_exhausted": str(exc)}) if opts["format"] == "json"
              else f"search exhausted: {exc}\n")
        return INCONCLUSIVE
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    data = cfg.to_json()
    if opts["format"] == "json":
        _emit(opts, _json(data))
    elif opts["format"] == "csv":
        _emit(opts, _csv(list(data), [[json.dumps(v) if isinstance(v, list) else v
                                       for v in data.values()]]))
    else:
        _emit(opts, "".join(f"{k} = {v}\n" for k, v in data.items()
                            if k not in ("notes",)) + "".join(f"# {n}\n" for n in cfg.notes))
    return OK


COMMANDS = {"field": cmd_field, "eval": cmd_eval, "measure": cmd_measure, "delta": cmd_delta,
            "minrep": cmd_minrep, "decompose": cmd_decompose, "verify": cmd_verify,
            "constants": cmd_constants}


def run(argv: list[str] | None = None) -> int:
    try:
        ns = _parser().parse_args(argv)
        opts = _resolve(ns)
        return COMMANDS[ns.command](opts)
    except UsageError as exc:
        print(f"kummer: error: {exc}", file=sys.stderr)
        return USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
