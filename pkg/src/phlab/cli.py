"""Command-line interface: ``phlab prob | sweep | verify | spectral``.

Probability commands write CSV (``t,P_standard,P_psi,P_phi``) with the
literal token ``divergent`` where a metric norm does not exist.  Exit codes:
0 success, 1 verification failure, 2 bad input, 3 every requested value
divergent.
"""

from __future__ import annotations

import argparse
import math
import re
import sys
from typing import Sequence

import numpy as np

from . import acceptance
from .dynamics import DEFAULT_NMAX, Metric, StateExpansion, Term, probability_curve, spectral_coefficients
from .errors import DIVERGENT, InvalidParameter, WrongFamily
from .models import MODELS

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DIVERGENT = 0, 1, 2, 3
METRIC_ORDER = (Metric.STANDARD, Metric.PSI, Metric.PHI)
COLUMN = {Metric.STANDARD: "P_standard", Metric.PSI: "P_psi", Metric.PHI: "P_phi"}
MODEL_PARAMS = {"eqho": ("nu",), "swanson": ("theta",), "landau": ("k1", "k2")}


class UsageError(ValueError):
    """Bad command-line input; reported on one line with exit code 2."""


# -- state expressions ----------------------------------------------------

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COEF = re.compile(
    rf"\s*(?P<coef>(?P<re>{_NUM})(?P<im>[+-](?:{_NUM})?i)?|(?P<pure>(?:{_NUM})?i))\s*\*"
)
_STATE = re.compile(r"\s*(?P<fam>phi|psi)\s*:\s*(?P<n>\d+)(?:\s*,\s*(?P<l>\d+))?")
_SIGN = re.compile(r"\s*(?P<sign>[+-])")


def _imag(text: str) -> float:
    body = text[:-1]
    if body in ("", "+", "-"):
        body += "1"
    return float(body)


def parse_state(expr: str, model) -> StateExpansion:
    """Parse ``term (("+"|"-") term)*`` into an expansion; duplicates merge."""
    pos, first = 0, True
    acc: dict = {}
    order = []
    while True:
        sign = 1.0
        m = _SIGN.match(expr, pos)
        if m:
            sign = -1.0 if m["sign"] == "-" else 1.0
            pos = m.end()
        elif not first:
            raise UsageError(f"expected '+' or '-' at position {pos} in {expr!r}")
        coef = 1.0 + 0j
        m = _COEF.match(expr, pos)
        if m:
            if m["pure"] is not None:
                coef = complex(0.0, _imag(m["pure"]))
            else:
                coef = complex(float(m["re"]), _imag(m["im"]) if m["im"] else 0.0)
            pos = m.end()
        m = _STATE.match(expr, pos)
        if not m:
            raise UsageError(f"expected phi:<n> or psi:<n> at position {pos} in {expr!r}")
        pos = m.end()
        parts = (int(m["n"]),) if m["l"] is None else (int(m["n"]), int(m["l"]))
        try:
            index = model.parse_index(parts)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        key = (m["fam"], index)
        if key not in acc:
            order.append(key)
            acc[key] = 0j
        acc[key] += sign * coef
        first = False
        if expr[pos:].strip() == "":
            break
    terms = tuple(Term(acc[k], k[1], k[0]) for k in order if acc[k] != 0)
    if not terms:
        raise UsageError(f"state {expr!r} is identically zero")
    return StateExpansion(model, terms)


def _format_coef(c: complex) -> str:
    if c.imag == 0:
        return repr(c.real)
    if c.real == 0:
        return f"{c.imag!r}i"
    sign = "-" if math.copysign(1.0, c.imag) < 0 else "+"
    return f"{c.real!r}{sign}{abs(c.imag)!r}i"


def format_state(s: StateExpansion) -> str:
    """Inverse of :func:`parse_state` (exact for finite coefficients)."""
    out = []
    for k, t in enumerate(s.terms):
        c = t.coef
        lead = c.real if c.real != 0 else c.imag
        neg = lead < 0
        if neg:
            c = -c
        idx = f"{t.index[0]},{t.index[1]}" if isinstance(t.index, tuple) else str(t.index)
        body = f"{t.family}:{idx}" if c == 1 else f"{_format_coef(c)}*{t.family}:{idx}"
        out.append(("-" if neg else ("+" if k else "")) + body)
    return "".join(out)


# -- argument handling ----------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_model_args(p):
    p.add_argument("--model", required=True, choices=sorted(MODELS))
    p.add_argument("--nu", type=float, help="eqho frequency (> 0)")
    p.add_argument("--theta", type=float, help="swanson angle in radians, 0 < |theta| < pi/4")
    p.add_argument("--k1", type=float, help="landau parameter, |k1| < 1/2")
    p.add_argument("--k2", type=float, help="landau parameter, |k2| < 1/2")


def _add_pair_args(p):
    p.add_argument("--initial", required=True, help='state expression, e.g. "phi:0+phi:1"')
    p.add_argument("--final", required=True, help='state expression, e.g. "psi:0"')
    p.add_argument("--metric", default="all", choices=["standard", "psi", "phi", "all"])
    p.add_argument("--method", default="closed_form", choices=["closed_form", "spectral", "oracle"])
    p.add_argument("--nmax", type=int, default=DEFAULT_NMAX)
    p.add_argument("--output", "-o", help="write CSV here instead of standard output")
    p.add_argument("--gnuplot", metavar="SCRIPT", help="also write a gnuplot script plotting the CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="phlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("prob", help="probability curves on a time grid")
    _add_model_args(p)
    _add_pair_args(p)
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--t1", type=float, default=None, help="default: one period")
    p.add_argument("--steps", type=int, default=100, help="number of time points")

    p = sub.add_parser("sweep", help="probabilities across a parameter range")
    _add_model_args(p)
    _add_pair_args(p)
    p.add_argument("--param", required=True, choices=["nu", "theta", "k1", "k2"])
    p.add_argument("--values", required=True,
                   help="comma list 'a,b,c' or linear range 'start:stop:count'")
    p.add_argument("--t", type=float, default=0.0, help="evaluation time")

    p = sub.add_parser("verify", help="run the acceptance suite")
    p.add_argument("--tol", type=float, default=None, help="replace every comparison tolerance")
    p.add_argument("--only", default=None, help="comma list of criterion numbers")

    p = sub.add_parser("spectral", help="expansion coefficients and tail diagnostics")
    _add_model_args(p)
    p.add_argument("--state", required=True)
    p.add_argument("--family", default="psi", choices=["phi", "psi"])
    p.add_argument("--nmax", type=int, default=DEFAULT_NMAX)
    return parser


def make_model(name: str, args, override: dict | None = None):
    values = {k: getattr(args, k) for k in MODEL_PARAMS[name]}
    values.update(override or {})
    missing = [k for k, v in values.items() if v is None]
    if missing:
        raise UsageError(f"model {name} needs --{' --'.join(missing)}")
    try:
        return MODELS[name](**values)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _metrics(choice: str):
    return METRIC_ORDER if choice == "all" else (Metric(choice),)


def _cell(v) -> str:
    return "divergent" if v is DIVERGENT else repr(float(v))


def parse_values(text: str) -> list[float]:
    try:
        if ":" in text:
            start, stop, count = text.split(":")
            return [float(v) for v in np.linspace(float(start), float(stop), int(count))]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"cannot parse values {text!r}") from None


def _emit(lines: Sequence[str], args, key: str, metrics) -> None:
    text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.gnuplot:
        with open(args.gnuplot, "w", newline="\n") as fh:
            fh.write(gnuplot_script(args.output or "phlab.csv", key, metrics))


def gnuplot_script(csv_path: str, key: str, metrics) -> str:
    plots = ", ".join(
        f"'{csv_path}' using 1:{k + 2} with lines title '{COLUMN[m]}'" for k, m in enumerate(metrics)
    )
    return (
        "set datafile separator ','\n"
        "set datafile missing 'divergent'\n"
        "set key autotitle columnhead\n"
        f"set xlabel '{key}'\n"
        "set ylabel 'probability'\n"
        "set yrange [0:1]\n"
        f"plot {plots}\n"
    )


def _curve_rows(key_values, curves_by_key, metrics):
    """Rows of the probability CSV plus a flag for 'everything divergent'."""
    rows, any_finite = [], False
    for kv, (curve, j) in zip(key_values, curves_by_key):
        cells = [curve.values[m][j] for m in metrics]
        any_finite = any_finite or any(c is not DIVERGENT for c in cells)
        rows.append(",".join([repr(float(kv))] + [_cell(c) for c in cells]))
    return rows, any_finite


def cmd_prob(args) -> int:
    model = make_model(args.model, args)
    a, b = parse_state(args.initial, model), parse_state(args.final, model)
    if args.steps < 1:
        raise UsageError("--steps must be at least 1")
    t1 = model.period if args.t1 is None else args.t1
    times = np.linspace(args.t0, t1, args.steps)
    metrics = _metrics(args.metric)
    curve = _curve(a, b, times, metrics, args)
    rows, finite = _curve_rows(times, [(curve, j) for j in range(len(times))], metrics)
    _emit(["t," + ",".join(COLUMN[m] for m in metrics)] + rows, args, "t", metrics)
    return EXIT_OK if finite else EXIT_DIVERGENT


def cmd_sweep(args) -> int:
    values = parse_values(args.values)
    if not values:
        raise UsageError("--values is empty")
    if args.param not in MODEL_PARAMS[args.model]:
        raise UsageError(f"model {args.model} has no parameter {args.param}")
    metrics = _metrics(args.metric)
    pairs = []
    for v in values:
        model = make_model(args.model, args, {args.param: v})
        a, b = parse_state(args.initial, model), parse_state(args.final, model)
        pairs.append((_curve(a, b, [args.t], metrics, args), 0))
    rows, finite = _curve_rows(values, pairs, metrics)
    _emit([args.param + "," + ",".join(COLUMN[m] for m in metrics)] + rows, args, args.param, metrics)
    return EXIT_OK if finite else EXIT_DIVERGENT


def _curve(a, b, times, metrics, args):
    if args.nmax < 1:
        raise UsageError("--nmax must be positive")
    return probability_curve(a, b, times, metrics, args.method, args.nmax)


def cmd_verify(args) -> int:
    only = None
    if args.only:
        try:
            only = {int(v) for v in args.only.split(",")}
        except ValueError:
            raise UsageError(f"cannot parse --only {args.only!r}") from None
    results = acceptance.run_all(tol=args.tol, only=only)
    print(acceptance.format_report(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def cmd_spectral(args) -> int:
    model = make_model(args.model, args)
    s = parse_state(args.state, model)
    if args.nmax < 1:
        raise UsageError("--nmax must be positive")
    rep = spectral_coefficients(s, args.family, args.nmax)
    head = "n,l,re,im,partial_tail" if model.dim == 2 else "n,re,im,partial_tail"
    lines = [head]
    for idx, c, tail in zip(rep.indices, rep.coefficients, rep.partial_sums):
        key = f"{idx[0]},{idx[1]}" if model.dim == 2 else str(idx)
        lines.append(f"{key},{float(c.real)!r},{float(c.imag)!r},{float(tail)!r}")
    sys.stdout.write("\n".join(lines) + "\n")
    sys.stderr.write(f"{rep.status}\n")
    return EXIT_OK


COMMANDS = {"prob": cmd_prob, "sweep": cmd_sweep, "verify": cmd_verify, "spectral": cmd_spectral}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits for --help and for malformed arguments.
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except (UsageError, WrongFamily, InvalidParameter) as exc:
        sys.stderr.write(f"phlab: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
