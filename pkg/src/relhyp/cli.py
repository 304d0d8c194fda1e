"""relhyp command line: ``audit``, ``seps`` and ``report``.

Exit codes for ``audit``: 0 when every check passes, 2 when some check
fails, 3 when nothing fails but some window could not be certified.
Usage and config errors exit with 1.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

from . import __version__, config, reports
from .errors import RelhypError
from .workspace import ENV_VAR, Workspace

FAULTS = ("tilde-sign",)


def _number(text):
    x = float(text)
    return int(x) if x.is_integer() else x


def _dump(doc, out=None):
    text = json.dumps(doc, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _workspace(args):
    return Workspace(args.cache_dir, enabled=not args.no_cache)


def cmd_audit(args) -> int:
    fx = config.load(args.config)
    t = time.perf_counter()
    doc = reports.audit_document(fx, args.radius, args.rho, args.d_threshold, args.inject_fault,
                                 args.quick, _workspace(args))
    for c in doc["checks"]:
        secs = doc["run"].get("seconds", {}).get(c["name"])
        tail = f" ({secs:.1f}s)" if secs is not None else ""
        print(f"[{c['status'].upper():>11}] {c['name']}{tail}")
    if args.out:
        _dump(doc, args.out)
    code = doc["exit_code"]
    extra = ""
    if doc["failing"]:
        extra = " failing: " + ", ".join(doc["failing"])
    elif doc["uncertified"]:
        extra = " uncertified: " + ", ".join(doc["uncertified"])
    print(f"{fx.name}: exit {code} in {time.perf_counter() - t:.1f}s (cache {doc['run'].get('cache')}){extra}")
    return code


def cmd_seps(args) -> int:
    fx = config.load(args.config)
    doc = reports.seps_document(fx, args.f, args.g, args.lam, args.d_threshold, ws=_workspace(args))
    _dump(doc, args.out)
    return 0


def cmd_report(args) -> int:
    fx = config.load(args.config)
    doc = reports.array_document(fx, args.array, tuple(args.levels), args.lam, args.radius, args.window,
                                 args.elements, D=args.d_threshold, ws=_workspace(args))
    _dump(doc, args.out)
    if args.csv:
        reports.write_csv(doc, args.csv)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="relhyp", description="Brute-force audits of separating cosets and arrays "
                                "for relatively hyperbolic groups given as free products.")
    p.add_argument("--version", action="version", version=f"relhyp {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", help=f"config JSON path or fixture name ({', '.join(config.FIXTURES)})")
    common.add_argument("--d-threshold", type=_number, default=None, metavar="D",
                        help="separation threshold D (default 3*C with C calibrated)")
    common.add_argument("--out", default=None, help="write the JSON document here")
    common.add_argument("--no-cache", action="store_true", help="ignore and do not write the cache")
    common.add_argument("--cache-dir", default=None, help=f"cache directory (default ${ENV_VAR} or ~/.cache/relhyp)")
    sub = p.add_subparsers(dest="cmd", required=True)

    a = sub.add_parser("audit", parents=[common], help="run the invariant suite on a fixture")
    a.add_argument("--radius", type=int, default=4)
    a.add_argument("--rho", type=int, default=None, help="H-letter cutoff for the BFS oracle (default 2*radius)")
    a.add_argument("--quick", action="store_true", help="shrink the exhaustive scans to radius 3")
    a.add_argument("--inject-fault", choices=FAULTS, default=None,
                   help="negative control: run with a deliberately broken component")
    a.set_defaults(func=cmd_audit)

    s = sub.add_parser("seps", parents=[common], help="list separating cosets for a pair of elements")
    s.add_argument("f")
    s.add_argument("g")
    s.add_argument("--lambda", dest="lam", default=None, help="peripheral label (default: all)")
    s.set_defaults(func=cmd_seps)

    r = sub.add_parser("report", parents=[common], help="norm tables and sub-level sets of Q, R or P")
    r.add_argument("--array", choices=("Q", "R", "P"), default="P")
    r.add_argument("--lambda", dest="lam", default=None, help="peripheral label for R")
    r.add_argument("--levels", type=_number, nargs="+", default=[1, 2, 3, 4])
    r.add_argument("--radius", type=int, default=4, help="ball for axiom checks and the norm table")
    r.add_argument("--window", type=int, default=8, help="ball for the sub-level sets")
    r.add_argument("--elements", nargs="+", default=None, help="words for the norm table (default: whole ball)")
    r.add_argument("--csv", default=None, help="also write the norm table as CSV")
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (RelhypError, ValueError) as e:
        print(f"relhyp: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
