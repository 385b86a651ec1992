"""Command line front end: ``dsres solve | correlator | flows | verify``.

Exit codes: 0 success, 1 usage error, 2 invariant failure, 3 verify failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

from .correlators import (
    CSV_HEADER,
    ResolventSet,
    correlator,
    correlator_table,
    ds_flow,
    miura_inverse,
    normal_coordinates,
    parse_insertions,
)
from .dressing import lowest_weight_slice
from .exact import fmt_rational, parse_rational
from .lie import AlgebraSpec, InvariantError, UnsolvableError
from .topo import _cache_name, cached_solve, ode_residual

EXIT_OK, EXIT_USAGE, EXIT_INVARIANT, EXIT_VERIFY = 0, 1, 2, 3
DEFAULTS = {"cache_dir": None, "format": "text", "depth_guard": 4}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _rational(text):
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cache-dir", default=argparse.SUPPRESS, help="directory for solved series")
    common.add_argument("--format", choices=["text", "json", "csv"], default=argparse.SUPPRESS)
    common.add_argument("--depth-guard", type=int, default=argparse.SUPPRESS,
                        help="largest rank allowed for symbolic (dressing) work, default 4")
    common.add_argument("--config", default=argparse.SUPPRESS,
                        help="JSON file with defaults for cache_dir, format and depth_guard")

    p = _Parser(prog="dsres", description=__doc__.splitlines()[0], parents=[common])
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("solve", parents=[common], help="solve the topological ODE for M_a")
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--index", type=int, required=True)
    s.add_argument("--floor", type=_rational, required=True)

    c = sub.add_parser("correlator", parents=[common], help="exact r-spin correlators")
    c.add_argument("--r", type=int, required=True)
    c.add_argument("--insertions", help="a:k list, e.g. '1:4' or '1:0;2:3'")
    c.add_argument("--table", action="store_true", help="emit the whole grid")
    c.add_argument("--max-k", type=int, default=2)
    c.add_argument("--max-N", type=int, default=2)
    c.add_argument("--nonzero", action="store_true", help="with --table, skip vanishing entries")

    f = sub.add_parser("flows", parents=[common], help="DS flows in normal coordinates")
    f.add_argument("--r", type=int, required=True)
    f.add_argument("--a", type=int, help="coordinate index (default: all)")
    f.add_argument("--b", type=int, default=1)
    f.add_argument("--k", type=int, default=0)

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite")
    v.add_argument("--r", type=int)
    v.add_argument("--max-k", type=int)
    v.add_argument("--trials", type=int)
    return p


def _settings(args):
    cfg = dict(DEFAULTS)
    path = getattr(args, "config", None)
    if path:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {path}: {exc}")
        for key, val in data.items():
            key = key.replace("-", "_")
            if key not in cfg:
                raise UsageError(f"unknown config key {key!r}")
            cfg[key] = val
    for key in DEFAULTS:
        if hasattr(args, key):
            cfg[key] = getattr(args, key)
    if cfg["format"] not in ("text", "json", "csv"):
        raise UsageError(f"unknown format {cfg['format']!r}")
    return cfg


def _spec(r):
    if r is None or r < 2:
        raise UsageError("--r must be at least 2")
    return AlgebraSpec(r - 1)


def _csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in rows:
        w.writerow(row)
    return buf.getvalue().rstrip("\n")


def _matrix_text(m):
    return [[fmt_rational(x) for x in row] for row in m]


# ---------------------------------------------------------------- commands

def cmd_solve(args, cfg):
    spec = _spec(args.r)
    if not 1 <= args.index <= spec.n:
        raise UsageError(f"--index must lie in 1..{spec.n}")
    bound = Fraction(-spec.m(args.index), spec.h)
    if args.floor >= bound:
        raise UsageError(f"floor must be < {fmt_rational(bound)}")
    stats = {}
    sol = cached_solve(spec, args.index, args.floor, cfg["cache_dir"], stats)
    ok = ode_residual(sol).is_zero()
    if not ok:
        raise InvariantError("ODE residual does not vanish")
    exps = sol.series.exponents()[:2]
    lead = [{"exponent": fmt_rational(e), "matrix": _matrix_text(sol.series.coefficient(e))} for e in exps]
    cache = "hit" if stats.get("hit") else "miss"
    path = os.path.join(cfg["cache_dir"], _cache_name(spec, args.index, "kappa1")) if cfg["cache_dir"] else None
    fmt = cfg["format"]
    if fmt == "json":
        return json.dumps({"r": spec.r, "index": args.index, "floor": fmt_rational(sol.floor),
                           "terms": len(sol.series.terms), "residual": "ok", "cache": cache,
                           "path": path, "leading": lead}, indent=1)
    if fmt == "csv":
        rows = [["exponent", "row", "col", "value"]]
        for item in lead:
            for i, row in enumerate(item["matrix"]):
                for j, x in enumerate(row):
                    if x != "0":
                        rows.append([item["exponent"], i + 1, j + 1, x])
        return _csv(rows)
    lines = [f"M_{args.index} for r={spec.r}: {len(sol.series.terms)} exponents down to lambda^{fmt_rational(sol.floor)}"]
    for item in lead:
        lines.append(f"lambda^{item['exponent']}: {item['matrix']}")
    lines.append("residual: OK")
    lines.append(f"cache: {cache}" + (f" ({path})" if path else ""))
    return "\n".join(lines)


def cmd_correlator(args, cfg):
    spec = _spec(args.r)
    if args.table:
        if args.max_k < 0 or args.max_N < 1:
            raise UsageError("--max-k must be >= 0 and --max-N >= 1")
        recs = correlator_table(spec, args.max_k, args.max_N, cfg["cache_dir"], args.nonzero)
    else:
        if not args.insertions:
            raise UsageError("give --insertions or --table")
        try:
            ins = parse_insertions(args.insertions)
        except ValueError as exc:
            raise UsageError(f"bad --insertions: {exc}")
        for a, k in ins:
            if not 1 <= a <= spec.r - 1 or k < 0:
                raise UsageError(f"insertion {a}:{k} out of range for r={spec.r}")
        recs = [correlator(spec, ins, cfg["cache_dir"])]
    fmt = cfg["format"]
    if fmt == "json":
        data = [r.to_json() for r in recs]
        return json.dumps(data if args.table else data[0], indent=1)
    if fmt == "csv":
        return _csv([CSV_HEADER] + [r.csv_row() for r in recs])
    if not args.table:
        return fmt_rational(recs[0].value)
    return "\n".join(" ".join(r.csv_row()) for r in recs)


def cmd_flows(args, cfg):
    spec = _spec(args.r)
    if spec.n > cfg["depth_guard"]:
        raise UsageError(f"rank {spec.n} exceeds the depth guard {cfg['depth_guard']}")
    if not 1 <= args.b <= spec.n or args.k < 0:
        raise UsageError("need 1 <= b <= r-1 and k >= 0")
    targets = [args.a] if args.a else list(spec.exponents)
    if any(not 1 <= a <= spec.n for a in targets):
        raise UsageError(f"--a must lie in 1..{spec.n}")
    rs = ResolventSet(lowest_weight_slice(spec), -args.k - 1)
    umap = miura_inverse(spec, normal_coordinates(rs))
    flows = [(a, ds_flow(rs, a, args.b, args.k, umap)) for a in targets]
    fmt = cfg["format"]
    if fmt == "json":
        return json.dumps([{"a": a, "b": args.b, "k": args.k, "flow": f.render()} for a, f in flows], indent=1)
    if fmt == "csv":
        return _csv([["a", "b", "k", "flow"]] + [[a, args.b, args.k, f.render()] for a, f in flows])
    return "\n".join(f"dr{a}/dT^({args.b},{args.k}) = {f.render()}" for a, f in flows)


def cmd_verify(args, cfg):
    from .verify import SUITES

    if args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    kwargs = {}
    if args.r is not None:
        if args.suite in ("oracle-equality", "string-identity", "gauge-invariance"):
            kwargs["r"] = args.r
        elif args.suite == "key-lemma":
            kwargs["rmax"] = args.r
        elif args.suite in ("two-point",):
            kwargs["n"] = args.r - 1
        else:
            raise UsageError(f"suite {args.suite} does not take --r")
    if args.max_k is not None:
        if args.suite == "string-identity":
            kwargs["max_k"] = args.max_k
        elif args.suite in ("two-point", "gauge-invariance"):
            kwargs["kmax"] = args.max_k
        else:
            raise UsageError(f"suite {args.suite} does not take --max-k")
    if args.trials is not None:
        if args.suite != "gauge-invariance":
            raise UsageError("--trials only applies to gauge-invariance")
        kwargs["trials"] = args.trials
    checks = SUITES[args.suite](**kwargs)
    if args.suite == "appendix-a-frame":
        from .verify import appendix_report

        _, report = appendix_report()
    else:
        report = []
    passed = all(c.ok for c in checks)
    fmt = cfg["format"]
    if fmt == "json":
        out = json.dumps({"suite": args.suite, "passed": passed,
                          "checks": [{"name": c.name, "ok": c.ok, "detail": c.detail} for c in checks],
                          "report": report}, indent=1)
    elif fmt == "csv":
        out = _csv([["suite", "check", "status", "detail"]] +
                   [[args.suite, c.name, "PASS" if c.ok else "FAIL", c.detail] for c in checks])
    else:
        lines = [c.line() for c in checks] + report
        lines.append(f"{args.suite}: {'PASS' if passed else 'FAIL'} ({sum(c.ok for c in checks)}/{len(checks)})")
        out = "\n".join(lines)
    return out, passed


def _join_negative_values(argv):
    """argparse takes '-25/3' for an option; glue such values to their flag."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok in ("--floor",):
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None):
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(_join_negative_values(argv))
    except SystemExit as exc:  # --help (0) or a usage error (1)
        return exc.code
    try:
        cfg = _settings(args)
        if args.command == "verify":
            out, passed = cmd_verify(args, cfg)
            print(out)
            return EXIT_OK if passed else EXIT_VERIFY
        handler = {"solve": cmd_solve, "correlator": cmd_correlator, "flows": cmd_flows}[args.command]
        print(handler(args, cfg))
        return EXIT_OK
    except UsageError as exc:
        print(f"dsres: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvariantError, UnsolvableError) as exc:
        print(f"dsres: invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
