"""Command-line front end.

Every command writes a leading ``#`` comment line recording the program
version, the command and its configuration (JSON outputs carry the same
information in a leading ``meta`` object instead).

Exit status: 0 success, 1 invalid arguments, 2 resource limits,
3 a checked identity or bound failed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .divisors import divisor_summatory, save_table, sieve_tau_k, tau_k_at
from .errors import InvariantViolation, ResourceError
from .exppair import ExponentPair, apply_word, case_ledger, fmt, lwy_theta, pair_record, parse_rational, search_theta, theta
from .fracsum import (
    block_sum,
    cutoff_points,
    decomposition_check,
    error_scan,
    fracsum_naive,
    main_constant,
)
from .report import (
    SCAN_COLUMNS,
    VAALER_COLUMNS,
    header_line,
    scan_json,
    scan_rows,
    sig,
    to_csv,
    vaaler_rows,
)
from .vaaler import (
    TripleSumSpec,
    expsum_single,
    random_triple_spec,
    triple_sum_eval,
    vaaler_gap_scan,
    vdc_bound,
)

CACHE_ENV = "FRACDIV_CACHE_DIR"
VAALER_TOL = 1e-9
DELTA_FLOOR = -1e-12


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _int(text: str) -> int:
    """Integer argument; accepts 1e7 style when the value is integral."""
    try:
        return int(text)
    except ValueError:
        pass
    try:
        f = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not f.is_integer():
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(f)


def _int_list(text: str) -> list[int]:
    return [_int(t) for t in text.split(",") if t.strip()]


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _decades(text: str) -> list[int]:
    lo, _, hi = text.partition(":")
    a, b = int(lo), int(hi or lo)
    if a < 0 or b < a:
        raise argparse.ArgumentTypeError(f"bad decade range {text!r}")
    return [10**e for e in range(a, b + 1)]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "csv", "json"], default=None)
    common.add_argument("--out", default=None, help="output path (default: stdout)")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1)

    p = _Parser(prog="fracdiv", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"fracdiv {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("sieve", parents=[common], help="sieve tau_k and dump the table")
    s.add_argument("--k", type=_int, required=True)
    s.add_argument("--limit", type=_int, required=True)
    s.add_argument("--dump", default=None, help="binary table file to write")

    s = sub.add_parser("tau", parents=[common], help="tau_k at a single n")
    s.add_argument("--k", type=_int, required=True)
    s.add_argument("--n", type=_int, required=True)

    s = sub.add_parser("fracsum", parents=[common], help="S_k(x) exactly")
    s.add_argument("--k", type=_int, required=True)
    s.add_argument("--x", type=_int, required=True)
    s.add_argument("--algo", choices=["naive", "blocks", "both"], default="blocks")

    s = sub.add_parser("constant", parents=[common], help="main-term constant C_k")
    s.add_argument("--k", type=_int, required=True)
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--tail", type=float)
    g.add_argument("--trunc", type=_int)
    s.add_argument("--digits", type=int, default=40)

    s = sub.add_parser("errscan", parents=[common], help="measure E(x) = S_k(x) - C_k x")
    s.add_argument("--k", type=_int, required=True)
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--xs", type=_int_list)
    g.add_argument("--decades", type=_decades, help="e.g. 4:7 for 1e4..1e7")
    s.add_argument("--tail", type=float, default=1e-5, help="target tail for C_k")
    s.add_argument("--no-timing", action="store_true", help="leave elapsed_s empty")

    s = sub.add_parser("decomp-check", parents=[common], help="exact block decomposition identity")
    s.add_argument("--k", type=_int, required=True)
    s.add_argument("--x", type=_int, required=True)
    s.add_argument("--N", type=_int, default=None, help="cutoff (default: 1, x^(9/19), x/2)")

    s = sub.add_parser("vaaler-scan", parents=[common], help="|psi* - psi| <= delta on a grid")
    s.add_argument("--H", type=_int_list, required=True)
    s.add_argument("--grid", type=_int, default=10**4)

    s = sub.add_parser("expsum", parents=[common], help="single exponential sum vs van der Corput")
    s.add_argument("--h", type=_int, required=True)
    s.add_argument("--x", type=_int, required=True)
    s.add_argument("--D", type=_int_list, required=True)
    s.add_argument("--shift", type=int, choices=[0, 1], default=0)
    s.add_argument("--kappa", type=_rational, default=Fraction(1, 2))
    s.add_argument("--lambda", dest="lam", type=_rational, default=Fraction(1, 2))

    s = sub.add_parser("triple-sum", parents=[common], help="triple exponential sum diagnostics")
    s.add_argument("--samples", type=_int, default=None, help="random specs instead of one explicit spec")
    s.add_argument("--seed", type=_int, default=0)
    for name, default in (("X", 1000.0), ("alpha", 1.0), ("beta", 1.0), ("gamma", 1.0), ("shift", 0.0)):
        s.add_argument(f"--{name}", type=float, default=default)
    for name in ("H", "M", "N"):
        s.add_argument(f"--{name}", type=_int, default=4 if name == "H" else 32)

    s = sub.add_parser("exppair", parents=[common], help="exponent-pair processes and theta")
    s.add_argument("--kappa", type=_rational, default=Fraction(1, 2))
    s.add_argument("--lambda", dest="lam", type=_rational, default=Fraction(1, 2))
    s.add_argument("--word", default=None)
    s.add_argument("--search", type=_int, default=None, metavar="LEN")
    s.add_argument("--lwy", type=_int, default=None, metavar="K")

    s = sub.add_parser("ledger", parents=[common], help="Cases I-III exponent ledger")
    s.add_argument("--nu", type=_rational, required=True)
    return p


# ---------------------------------------------------------------------------


def _config(args) -> dict:
    # threads and output location never change results, so they are left out
    skip = {"command", "out", "threads"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _emit(args, text: str = "", payload=None, default_fmt: str = "text"):
    fmtn = args.format or default_fmt
    if fmtn == "json":
        body = json.dumps(
            {"meta": {"program": "fracdiv", "version": __version__, "command": args.command, "config": _config(args)},
             "result": payload},
            indent=2,
            default=str,
        ) + "\n"
    else:
        body = header_line(args.command, _config(args)) + "\n" + text
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)


def cmd_sieve(args) -> int:
    tab = sieve_tau_k(args.k, args.limit)
    total = divisor_summatory(tab, args.limit)
    if args.dump:
        save_table(tab, args.dump)
    _emit(args, f"k\t{args.k}\nlimit\t{args.limit}\nsummatory\t{total}\n",
          {"k": args.k, "limit": args.limit, "summatory": total, "dump": args.dump})
    return 0


def cmd_tau(args) -> int:
    v = tau_k_at(args.k, args.n)
    _emit(args, f"{v}\n", {"k": args.k, "n": args.n, "tau": v})
    return 0


def cmd_fracsum(args) -> int:
    res = {}
    if args.algo in ("naive", "both"):
        res["naive"] = fracsum_naive(args.k, args.x)
    if args.algo in ("blocks", "both"):
        b = block_sum(args.k, args.x)
        res["blocks"] = b.value
        res["evaluations"] = b.evaluations
    text = "".join(f"{name}\t{res[name]}\n" for name in ("naive", "blocks") if name in res)
    _emit(args, text, res)
    if "naive" in res and "blocks" in res and res["naive"] != res["blocks"]:
        raise InvariantViolation(f"naive {res['naive']} != blocks {res['blocks']}")
    return 0


def cmd_constant(args) -> int:
    c = main_constant(args.k, args.tail, truncation_N=args.trunc, cache_dir=os.environ.get(CACHE_ENV))
    val = sig(c.value, args.digits)
    payload = {"k": c.k, "truncation_N": c.truncation_N, "value": val, "tail_bound": float(c.tail_bound)}
    text = f"k\t{c.k}\ntruncation_N\t{c.truncation_N}\nvalue\t{val}\ntail_bound\t{float(c.tail_bound):.6e}\n"
    _emit(args, text, payload)
    return 0


def cmd_errscan(args) -> int:
    xs = args.xs if args.xs is not None else args.decades
    scan = error_scan(args.k, xs, args.tail, workers=max(1, args.threads), cache_dir=os.environ.get(CACHE_ENV))
    timing = not args.no_timing
    if (args.format or "csv") == "json":
        _emit(args, payload=scan_json(scan, timing), default_fmt="csv")
        return 0
    if args.format == "text":
        lines = [f"x={s.x}\tS={s.S}\tE={sig(s.E, 15)}\t{s.flag}" for s in scan.samples]
        slope = "n/a" if scan.slope is None else f"{scan.slope:.6f}"
        lines.append(f"slope\t{slope}")
        _emit(args, "\n".join(lines) + "\n")
        return 0
    _emit(args, to_csv(SCAN_COLUMNS, scan_rows(scan, timing)), default_fmt="csv")
    return 0


def cmd_decomp(args) -> int:
    Ns = [args.N] if args.N is not None else cutoff_points(args.x)
    reports = [decomposition_check(args.k, args.x, N) for N in Ns]
    rows = [[str(r.N), str(r.lhs), fmt(r.rhs), fmt(r.main_part), fmt(r.psi_part), str(r.equal).lower()] for r in reports]
    cols = ["N", "lhs", "rhs", "main_part", "psi_part", "equal"]
    if (args.format or "text") == "json":
        _emit(args, payload=[dict(zip(cols, r)) for r in rows])
    elif args.format == "csv":
        _emit(args, to_csv(cols, rows))
    else:
        _emit(args, "".join("\t".join(r) + "\n" for r in rows))
    bad = [r for r in reports if not r.equal]
    if bad:
        raise InvariantViolation(f"decomposition mismatch at N={bad[0].N}: {bad[0].lhs} != {bad[0].rhs}")
    return 0


def cmd_vaaler(args) -> int:
    scans = [vaaler_gap_scan(H, args.grid) for H in args.H]
    summary = [
        {"H": s.H, "grid_points": int(s.x.size), "max_violation": s.max_violation, "argmax": s.argmax, "min_delta": s.min_delta}
        for s in scans
    ]
    fmtn = args.format or "csv"
    if fmtn == "json":
        _emit(args, payload=summary)
    elif fmtn == "text":
        _emit(args, "".join(f"H={d['H']}\tmax_violation={d['max_violation']:.3e}\targmax={d['argmax']!r}\tmin_delta={d['min_delta']:.3e}\n" for d in summary))
    else:
        rows = [r for s in scans for r in vaaler_rows(s)]
        _emit(args, to_csv(VAALER_COLUMNS, rows))
    for s in scans:
        if s.max_violation > VAALER_TOL or s.min_delta < DELTA_FLOOR:
            raise InvariantViolation(f"Vaaler inequality fails for H={s.H}: {s.max_violation:.3e} at x={s.argmax!r}")
    return 0


def cmd_expsum(args) -> int:
    pair = ExponentPair(args.kappa, args.lam)
    recs = []
    for D in args.D:
        mag = expsum_single(args.h, args.x, D, args.shift)
        bound = vdc_bound(args.h, args.x, D, pair)
        if mag > D * (1 + 1e-12):
            raise InvariantViolation(f"|sum| = {mag} exceeds the interval length {D}")
        recs.append({"h": args.h, "x": args.x, "D": D, "shift": args.shift, "magnitude": mag, "vdc_bound": bound, "ratio": mag / bound})
    cols = ["h", "x", "D", "shift", "magnitude", "vdc_bound", "ratio"]
    fmtn = args.format or "csv"
    if fmtn == "json":
        _emit(args, payload=recs)
    else:
        _emit(args, to_csv(cols, [[repr(r[c]) if isinstance(r[c], float) else str(r[c]) for c in cols] for r in recs]))
    return 0


def cmd_triple(args) -> int:
    if args.samples is not None:
        rng = np.random.default_rng(args.seed)
        specs = [random_triple_spec(rng) for _ in range(args.samples)]
    else:
        specs = [TripleSumSpec(X=args.X, H=args.H, M=args.M, N=args.N, alpha=args.alpha, beta=args.beta, gamma=args.gamma, shift=args.shift)]
    recs = [triple_sum_eval(s).record() for s in specs]
    if (args.format or "json") == "json":
        _emit(args, payload=recs, default_fmt="json")
    else:
        _emit(args, "".join(json.dumps(r, sort_keys=True) + "\n" for r in recs))
    return 0


def cmd_exppair(args) -> int:
    out = []
    if args.lwy is not None:
        th = lwy_theta(args.lwy)
        out.append(("lwy_theta", {"k": args.lwy, "theta": fmt(th), "decimal": float(th)}))
    seed = ExponentPair(args.kappa, args.lam)
    if args.search is not None:
        res = search_theta(args.search, [seed])
        rec = pair_record(res.word, res.pair)
        rec["explored"] = res.explored
        out.append(("search", rec))
    word = args.word or ""
    pair = apply_word(word, seed) if word else seed
    out.append(("pair", pair_record(word, pair)))

    if (args.format or "text") == "json":
        _emit(args, payload=dict(out))
        return 0
    lines = []
    for name, rec in out:
        if name == "lwy_theta":
            lines.append(f"lwy_theta({rec['k']})\t{rec['theta']}")
        elif name == "search":
            lines.append(f"search\tword={rec['word'] or '-'}\t{rec['kappa']} {rec['lambda']}\ttheta={rec['theta']}")
        else:
            k, l = pair.kappa, pair.lam
            den = math.lcm(k.denominator, l.denominator)
            lines.append(f"pair\t{k.numerator * (den // k.denominator)}/{den} {l.numerator * (den // l.denominator)}/{den}")
            lines.append(f"kappa\t{rec['kappa']}")
            lines.append(f"lambda\t{rec['lambda']}")
            lines.append(f"theta\t{rec['theta']}\t{rec['decimal']:.12f}")
            lines.append(f"theta_below_9/19\t{str(theta(pair) < Fraction(9, 19)).lower()}")
    _emit(args, "\n".join(lines) + "\n")
    return 0


def cmd_ledger(args) -> int:
    rep = case_ledger(args.nu)
    if (args.format or "text") == "json":
        _emit(args, payload=rep.to_dict())
        return 0
    lines = [f"nu_N\t{fmt(rep.nu_N)}"]
    for c in rep.cases:
        m = "-" if c.maximum is None else fmt(c.maximum)
        lines.append(f"case {c.label}\t{m}\t[{c.constraint}]")
    lines.append(f"H_threshold\t{fmt(rep.h_threshold)}\tfeasible={str(rep.h_feasible).lower()}")
    lines.append(f"overall\t{fmt(rep.overall)}")
    _emit(args, "\n".join(lines) + "\n")
    return 0


COMMANDS = {
    "sieve": cmd_sieve,
    "tau": cmd_tau,
    "fracsum": cmd_fracsum,
    "constant": cmd_constant,
    "errscan": cmd_errscan,
    "decomp-check": cmd_decomp,
    "vaaler-scan": cmd_vaaler,
    "expsum": cmd_expsum,
    "triple-sum": cmd_triple,
    "exppair": cmd_exppair,
    "ledger": cmd_ledger,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"fracdiv: error: {exc}", file=sys.stderr)
        return 1
    if args.command is None:
        parser.print_help(sys.stderr)
        return 1
    try:
        return COMMANDS[args.command](args)
    except InvariantViolation as exc:
        print(f"fracdiv: invariant violated: {exc}", file=sys.stderr)
        return 3
    except (ResourceError, OverflowError, MemoryError) as exc:
        print(f"fracdiv: resource error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"fracdiv: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
