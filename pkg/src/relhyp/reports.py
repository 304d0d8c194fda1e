"""JSON documents produced by the command line.

Every document carries a ``schema`` id matching a file in
``relhyp/schemas``.  Timing and timestamps live under ``run`` so that the
rest of a document is reproducible byte for byte.
"""
from __future__ import annotations

import csv
import datetime as _dt
import math
from fractions import Fraction
from importlib import resources

from . import __version__, kernels
from .arrays import PArray, QArray, RArray
from .bicombing import TreeBicombing
from .chains import L2_TOL
from .audit import Context, check_bicombing_generic, exit_code, fit_alpha, run_audit
from .cosets import Constants, Separation
from .groups import ball as make_ball
from .relative import RelGraph

SCHEMAS = ("audit", "seps", "report", "chain")


def schema_id(kind):
    return f"relhyp.{kind}/1"


def load_schema(kind):
    import json
    return json.loads(resources.files("relhyp.schemas").joinpath(f"{kind}.v1.json").read_text())


def _num(x):
    """JSON-friendly number: exact fractions as strings, floats rounded for stable output."""
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else str(x)
    if isinstance(x, float):
        if math.isinf(x):
            return "inf"
        return round(x, 12)
    return x


def constants_from_json(d) -> Constants:
    return Constants(d["C"], d["D"], d.get("C_raw", 0.0), d.get("polygons", 0), d.get("isolated_components", 0),
                     d.get("note", ""))


def calibrated_constants(fx, radius, rho, D, ws):
    """Calibrated C (and D) for a fixture, through the cache when one is given."""
    parts = {"fixture": fx.digest, "radius": radius, "rho": rho, "D": D}

    def compute():
        return Context(fx, radius, rho, D).constants.to_json()

    raw = ws.cached("constants", parts, compute) if ws is not None else compute()
    return constants_from_json(raw)


def constants_block(ctx: Context, alpha=None):
    out = {"C": ctx.C, "D": ctx.D, "K": {lam: _num(ctx.R(lam).constants.K) for lam in ctx.fx.fam.labels}}
    T = 0
    if not isinstance(ctx.q, TreeBicombing):
        T = check_bicombing_generic(ctx)[1]["T_emp"]
    out["T_emp"] = _num(T)
    out["alpha"] = _num(fit_alpha(ctx) if alpha is None else alpha)
    return out


def _run_block(seconds=None):
    out = {"version": __version__, "backend": kernels.BACKEND,
           "generated": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")}
    if seconds is not None:
        out["seconds"] = seconds
    return out


# -- audit ------------------------------------------------------------------

def audit_document(fx, radius=4, rho=None, D=None, fault=None, quick=False, ws=None):
    rho = 2 * radius if rho is None else rho
    parts = {"fixture": fx.digest, "radius": radius, "rho": rho, "D": D, "fault": fault, "quick": quick}
    cached = ws.get("audit", parts) if ws is not None else None
    if cached is not None:
        cached["run"] = _run_block()
        cached["run"]["cache"] = "hit"
        return cached
    const = calibrated_constants(fx, radius, rho, D, ws)
    ctx = Context(fx, radius, rho, D, corrupt_tilde=(fault == "tilde-sign"), constants=const)
    checks = run_audit(ctx, quick=quick)
    doc = {
        "schema": schema_id("audit"),
        "fixture": fx.name,
        "config_digest": fx.digest,
        "radius": radius,
        "rho": rho,
        "fault": fault,
        "constants": constants_block(ctx),
        "checks": [c.to_json() for c in checks],
        "failing": [c.name for c in checks if c.status == "fail"],
        "uncertified": [c.name for c in checks if c.status == "uncertified"],
        "exit_code": exit_code(checks),
    }
    doc = _jsonable(doc)
    if ws is not None:
        ws.put("audit", parts, doc)
    doc = dict(doc)
    doc["run"] = _run_block({c.name: round(c.seconds, 3) for c in checks})
    doc["run"]["cache"] = "miss" if ws is not None and ws.enabled else "off"
    return doc


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, int, str)) or x is None:
        return x
    if isinstance(x, (float, Fraction)):
        return _num(x)
    return str(x)


def strip_run(doc):
    return {k: v for k, v in doc.items() if k != "run"}


# -- seps -------------------------------------------------------------------

def seps_document(fx, f, g, lam=None, D=None, radius=None, ws=None):
    f_el, g_el = fx.parse(f), fx.parse(g)
    rel = RelGraph(fx.mg, fx.fam, 1)
    if not rel.exact:
        # the BFS route needs a ball holding both words
        if radius is None:
            radius = max(1, fx.group.word_length(f_el.nf), fx.group.word_length(g_el.nf))
        rel = RelGraph(fx.mg, fx.fam, radius)
    if D is None:
        const = calibrated_constants(fx, 4, 8, None, ws)
        D = const.D
    sep = Separation(rel, D)
    labels = [lam] if lam is not None else list(fx.fam.labels)
    for l in labels:
        if l not in fx.fam.labels:
            from .errors import ConfigError
            raise ConfigError(f"unknown peripheral label {l!r}; have {list(fx.fam.labels)}")
    return _jsonable({
        "schema": schema_id("seps"),
        "fixture": fx.name,
        "D": D,
        "distance": rel.distance(f_el, g_el),
        "lists": [sep.separating(f_el, g_el, l).to_json() for l in labels],
    })


# -- array reports ----------------------------------------------------------

def _array(ctx: Context, which, lam=None):
    if which == "Q":
        return ctx.Q
    if which == "R":
        labels = ctx.fx.fam.labels
        if not labels:
            from .errors import ConfigError
            raise ConfigError("fixture has no peripheral subgroups, so R is not defined")
        return ctx.R(lam or labels[0])
    return ctx.P


def _defect_bound(ctx, arr, g):
    e = ctx.e
    if isinstance(arr, QArray):
        T = 0 if isinstance(ctx.q, TreeBicombing) else Fraction(check_bicombing_generic(ctx)[1]["T_emp"])
        return arr.defect_bound(g, T)
    if isinstance(arr, RArray):
        return arr.tilde(e, g).norm() + arr.area_bound(g)
    q = _defect_bound(ctx, arr.Q, g) ** 2
    return math.sqrt(q + sum(_defect_bound(ctx, R, g) ** 2 for R in arr.Rs))


def array_document(fx, which="P", levels=(1, 2, 3, 4), lam=None, radius=4, window=8, elements=None,
                   g_radius=2, h_radius=4, D=None, ws=None):
    const = calibrated_constants(fx, radius, 2 * radius, D, ws)
    ctx = Context(fx, radius, constants=const)
    arr = _array(ctx, which, lam)
    B = ctx.ball()
    els = [fx.parse(w) for w in elements] if elements else list(B)

    ax1 = all(arr.axiom1(g) for g in B)
    axiom2 = []
    Bh = make_ball(fx.mg, h_radius)
    for g in ctx.ball(g_radius):
        d = max(arr.defect(g, h) for h in Bh)
        bound = _defect_bound(ctx, arr, g)
        axiom2.append({"g": str(g), "defect": _num(d), "bound": _num(bound), "ok": d <= bound + L2_TOL})

    W = make_ball(fx.mg, window)
    top = max(levels) if levels else 0
    norms = {}
    for g in W:
        if isinstance(arr, (QArray, PArray)):
            qn = arr.norm_sq(g) if isinstance(arr, QArray) else arr.Q.norm_sq(g)
            if qn > top * top:
                continue  # ||P||^2 >= ||Q||^2 already above every level
        norms[g] = arr.norm_sq(g)
    properness = []
    for N in levels:
        S = sorted(g for g, n in norms.items() if n <= N * N + L2_TOL)
        row = {"N": N, "count": len(S), "window": window,
               "window_complete": all(W.length[g] < window for g in S)}
        if len(S) <= 60:
            row["elements"] = [str(g) for g in S]
        properness.append(row)

    table = []
    for g in els:
        row = {"g": str(g), "norm_sq": _num(arr.norm_sq(g))}
        if isinstance(arr, PArray):
            row["parts"] = [_num(x) for x in arr.norm_sq_parts(g)]
        table.append(row)
    doc = {
        "schema": schema_id("report"),
        "fixture": fx.name,
        "array": arr.name,
        "representation": _rep_descriptor(ctx, arr),
        "axiom1": "exact-pass" if ax1 else "fail",
        "axiom2": axiom2,
        "properness": properness,
        "constants": constants_block(ctx),
        "norms": table,
    }
    if isinstance(arr, PArray):
        doc["parts_labels"] = [arr.Q.name] + [R.name for R in arr.Rs]
    return _jsonable(doc)


def _rep_descriptor(ctx, arr):
    if isinstance(arr, QArray):
        return "edge representation on the subdivided coned-off graph"
    if isinstance(arr, RArray):
        return arr.parr.rep_descriptor()
    reps = "; ".join(f"{R.name}: {R.parr.rep_descriptor()}" for R in arr.Rs)
    return "edge representation on the subdivided coned-off graph" + (f" plus ({reps})" if reps else "")


def write_csv(doc, path):
    rows = doc["norms"]
    labels = doc.get("parts_labels", [])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["g", "norm_sq"] + [f"norm_sq_{x}" for x in labels])
        for r in rows:
            w.writerow([r["g"], r["norm_sq"]] + list(r.get("parts", [])))
