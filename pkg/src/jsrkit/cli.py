"""Command-line frontend.

Subcommands: bounds, graph, oracle, trace, check, random.  Reports go to
stdout (json by default, aligned text with --format table), warnings to
stderr.  Exit codes: 0 success, 2 invalid input, 3 a guard or overflow
refused the computation.

Every json report carries a reproducibility header: schema version, tool
version, sha256 of the input file, and the effective flag values.  Output
is a deterministic function of (input bytes, flags).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .bounds import best_bracket
from .errors import ComputeError, InputError, JsrkitError
from .graph import UNREACHABLE, build_graph, condense, is_radius_trivially_zero, periods
from .matset import load, random_set
from .oracle import ENUM_GUARD, generalized_lower
from .products import DEFAULT_CAP, NEG_INF, norm_table
from .sequences import bounded_ratio_check, fekete_check_log, growth_fit, trace_limit

DEFAULT_MAX_LEN = 16


def _thread_setting() -> int:
    """JSRKIT_THREADS, 0 meaning auto.  Recorded for reproducibility;
    computation is single-threaded either way, so results never depend
    on it."""
    raw = os.environ.get("JSRKIT_THREADS", "0")
    try:
        v = int(raw)
    except ValueError:
        return 0
    return max(v, 0)


def _sanitize(obj):
    """Make a structure json-safe: non-finite floats become None."""
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _header(command: str, input_path: str | None, flags: dict) -> dict:
    digest = None
    if input_path is not None:
        with open(input_path, "rb") as fh:
            digest = hashlib.sha256(fh.read()).hexdigest()
    return {
        "schema": 1,
        "version": __version__,
        "command": command,
        "input_digest": digest,
        "threads": _thread_setting(),
        "flags": flags,
    }


def _emit(report: dict, fmt: str, render_table) -> None:
    if fmt == "json":
        print(json.dumps(_sanitize(report), sort_keys=True, allow_nan=False,
                         separators=(",", ":")))
    else:
        render_table(report)


def _root(v: float | None) -> str:
    return "absent" if v is None else f"{v:.12g}"


# -- bounds ------------------------------------------------------------


def _cert_dict(cert) -> dict | None:
    if cert is None:
        return None
    return {
        "kind": cert.kind,
        "k": cert.k,
        "index": cert.index,
        "word": list(cert.word) if cert.word is not None else None,
    }


def _run_bounds(args) -> int:
    S = load(args.input)
    flags = {
        "input": args.input,
        "max_len": args.max_len,
        "cap": args.cap,
        "witness": args.witness,
        "format": args.format,
        "dump_frontier": args.dump_frontier,
    }
    table = norm_table(
        S, args.max_len, cap=args.cap, keep_witness=args.witness,
        dump_frontier_at=args.dump_frontier,
    )
    report = best_bracket(
        S, args.max_len, cap=args.cap, keep_witness=args.witness, table=table
    )
    doc = {
        "header": _header("bounds", args.input, flags),
        "dim": report.dim,
        "size": len(S),
        "trivial_zero": report.trivial_zero,
        "curves": [
            {
                "k": k,
                "diag_lower": report.diag_lower[k - 1],
                "comp_lower": report.comp_lower[k - 1],
                "spectral_lower": report.spectral_lower[k - 1],
                "comp_upper": report.comp_upper[k - 1],
                "submult_upper": report.submult_upper[k - 1],
                "exact": report.exact[k - 1],
            }
            for k in range(1, report.N + 1)
        ],
        "best_lower": report.best_lower,
        "best_upper": report.best_upper,
        "lower_certificate": _cert_dict(report.lower_certificate),
        "upper_certificate": _cert_dict(report.upper_certificate),
        "m_indices": list(report.m_indices),
        "K_hat": list(report.K_hat),
        "graph": {
            "delta_i": list(report.delta_i),
            "Delta": report.Delta,
        },
    }
    if table.frontier_dump is not None:
        doc["frontier"] = table.frontier_dump

    def render(doc):
        print(f"dim {doc['dim']}  matrices {doc['size']}")
        print(f"trivial_zero {doc['trivial_zero']}")
        print(f"best_lower  {_root(doc['best_lower'])}")
        print(f"best_upper  {_root(doc['best_upper'])}")
        print(f"{'k':>4} {'diag_lower':>16} {'comp_lower':>16} "
              f"{'spec_lower':>16} {'comp_upper':>16} {'sub_upper':>16} exact")
        for row in doc["curves"]:
            print(f"{row['k']:>4} {_root(row['diag_lower']):>16} "
                  f"{_root(row['comp_lower']):>16} "
                  f"{_root(row['spectral_lower']):>16} "
                  f"{_root(row['comp_upper']):>16} "
                  f"{_root(row['submult_upper']):>16} {row['exact']}")

    _emit(doc, args.format, render)
    return 0


# -- graph -------------------------------------------------------------


def _run_graph(args) -> int:
    S = load(args.input)
    flags = {"input": args.input, "format": args.format}
    G = build_graph(S)
    C = condense(G)
    P = periods(G)
    delta_table = [
        ["unreachable" if v is UNREACHABLE else int(v) for v in row]
        for row in C.delta
    ]
    doc = {
        "header": _header("graph", args.input, flags),
        "dim": S.dim,
        "components": [list(c) for c in C.components],
        "is_connected": list(C.is_connected),
        "dag_edges": [list(e) for e in C.dag_edges],
        "delta": delta_table,
        "delta_i": list(P.delta_i),
        "Delta": P.Delta,
        "trivially_zero": is_radius_trivially_zero(C),
    }

    def render(doc):
        print(f"dim {doc['dim']}")
        for cid, comp in enumerate(doc["components"]):
            tag = "connected" if doc["is_connected"][cid] else "acyclic"
            print(f"component {cid}: vertices {comp} ({tag})")
        print(f"dag_edges {doc['dag_edges']}")
        print("delta table:")
        for row in doc["delta"]:
            print("  " + " ".join(str(v) for v in row))
        print(f"delta_i {doc['delta_i']}")
        print(f"Delta {doc['Delta']}")
        print(f"trivially_zero {doc['trivially_zero']}")

    _emit(doc, args.format, render)
    return 0


# -- oracle ------------------------------------------------------------


def _run_oracle(args) -> int:
    S = load(args.input)
    flags = {"input": args.input, "max_len": args.max_len, "format": args.format}
    m = len(S)
    horizon = args.max_len
    trimmed = False
    if m >= 2:
        bound = int(math.floor(math.log(ENUM_GUARD) / math.log(m)))
        if horizon > bound:
            horizon = bound
            trimmed = True
            print(
                f"warning: horizon trimmed to {horizon} "
                f"({m}**{args.max_len} words exceed the enumeration guard)",
                file=sys.stderr,
            )
    est = generalized_lower(S, horizon)
    doc = {
        "header": _header("oracle", args.input, flags),
        "value": est.value,
        "horizon": est.horizon,
        "requested_horizon": args.max_len,
        "trimmed": trimmed,
        "achieving_word": list(est.achieving_word),
    }

    def render(doc):
        print(f"value {_root(doc['value'])}")
        print(f"horizon {doc['horizon']} (requested {doc['requested_horizon']})")
        print(f"achieving_word {doc['achieving_word']}")

    _emit(doc, args.format, render)
    return 0


# -- trace -------------------------------------------------------------


def _run_trace(args) -> int:
    S = load(args.input)
    flags = {
        "input": args.input, "max_len": args.max_len,
        "cap": args.cap, "format": args.format,
    }
    table = norm_table(S, args.max_len, cap=args.cap)
    report = best_bracket(S, args.max_len, cap=args.cap, table=table)
    bracket = None
    if report.best_upper is not None:
        bracket = (report.best_lower, report.best_upper)
    tl = trace_limit(S, args.max_len, cap=args.cap, table=table, bracket=bracket)
    doc = {
        "header": _header("trace", args.input, flags),
        "Delta": tl.Delta,
        "trace_roots": [[k, r] for k, r in tl.trace_roots],
        "subsequence": [[k, r] for k, r in tl.subsequence],
        "diag_roots": [[k, r] for k, r in tl.diag_roots],
        "sandwich_ok": tl.sandwich_ok,
        "within_bracket": tl.within_bracket,
        "bracket": list(bracket) if bracket else None,
    }

    def render(doc):
        print(f"Delta {doc['Delta']}")
        print(f"sandwich_ok {doc['sandwich_ok']}  "
              f"within_bracket {doc['within_bracket']}")
        print(f"{'k':>4} {'trace_root':>16}")
        for k, r in doc["trace_roots"]:
            mark = " *" if k % doc["Delta"] == 0 else ""
            print(f"{k:>4} {_root(r):>16}{mark}")

    _emit(doc, args.format, render)
    return 0


# -- check -------------------------------------------------------------


def _run_check(args) -> int:
    S = load(args.input)
    flags = {
        "input": args.input, "max_len": args.max_len,
        "cap": args.cap, "format": args.format,
    }
    table = norm_table(S, args.max_len, cap=args.cap)
    report = best_bracket(S, args.max_len, cap=args.cap, table=table)
    horizon = table.exact_horizon()
    fekete = []
    ratio_checks = []
    for i in range(S.dim):
        if horizon == 0:
            fekete.append({"i": i, "note": "no exact lengths"})
            continue
        diag = table.diag_sequence(i)[:horizon]
        diagnosis = fekete_check_log(diag)
        fekete.append({
            "i": i,
            "sup_root": diagnosis.sup_root,
            "converged": diagnosis.converged,
            "support_period": diagnosis.support_period,
            "tail": [[k, r] for k, r in diagnosis.tail_estimates[-5:]],
            "horizon_limited": True,
        })
        rc = bounded_ratio_check(table, i, report.delta_i[i], (1, horizon))
        ratio_checks.append(
            None if rc is None else
            {"i": rc.i, "gap": rc.gap, "max_ratio": rc.max_ratio, "at_n": rc.at_n}
        )
    fit = None
    if report.best_lower > 0 and horizon >= 3:
        try:
            fit = growth_fit(
                table, report.best_lower, (max(2, horizon // 2), horizon)
            )
        except ComputeError:
            fit = None
    doc = {
        "header": _header("check", args.input, flags),
        "fekete": fekete,
        "ratio_checks": ratio_checks,
        "growth_fit": fit,
        "growth_fit_rho_hat": report.best_lower if fit is not None else None,
        "bracket": [report.best_lower, report.best_upper],
    }

    def render(doc):
        for f in doc["fekete"]:
            if "note" in f:
                print(f"i={f['i']}: {f['note']}")
            else:
                print(f"i={f['i']}: sup_root {_root(f['sup_root'])} "
                      f"converged {f['converged']} "
                      f"support_period {f['support_period']}")
        for rc in doc["ratio_checks"]:
            if rc:
                print(f"ratio i={rc['i']} gap={rc['gap']}: "
                      f"max {_root(rc['max_ratio'])} at n={rc['at_n']}")
        print(f"growth_fit {_root(doc['growth_fit'])}")

    _emit(doc, args.format, render)
    return 0


# -- random ------------------------------------------------------------


def _run_random(args) -> int:
    S = random_set(
        args.dim, args.size, args.density, (args.lo, args.hi), args.seed
    )
    text = S.to_json()
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


# -- dispatch ----------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jsrkit",
        description="Certified bounds on the joint spectral radius of "
                    "finite sets of nonnegative matrices.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, cap=True, max_len=True):
        p.add_argument("--input", required=True, help="matrix set (.json or .csv)")
        if max_len:
            p.add_argument("--max-len", type=int, default=DEFAULT_MAX_LEN,
                           help=f"product-length horizon (default {DEFAULT_MAX_LEN})")
        if cap:
            p.add_argument("--cap", type=int, default=DEFAULT_CAP,
                           help=f"frontier capacity (default {DEFAULT_CAP})")
        p.add_argument("--format", choices=["json", "table"], default="json")

    p_bounds = sub.add_parser("bounds", help="certified bracket on the radius")
    common(p_bounds)
    p_bounds.add_argument("--witness", action="store_true",
                          help="record achieving words")
    p_bounds.add_argument("--dump-frontier", type=int, metavar="K",
                          help="include the length-K frontier in the report")
    p_bounds.set_defaults(run=_run_bounds)

    p_graph = sub.add_parser("graph", help="dependency graph structure")
    common(p_graph, cap=False, max_len=False)
    p_graph.set_defaults(run=_run_graph)

    p_oracle = sub.add_parser("oracle", help="exhaustive lower bound")
    common(p_oracle, cap=False)
    p_oracle.set_defaults(run=_run_oracle)

    p_trace = sub.add_parser("trace", help="trace roots along the period")
    common(p_trace)
    p_trace.set_defaults(run=_run_trace)

    p_check = sub.add_parser("check", help="sequence diagnostics")
    common(p_check)
    p_check.set_defaults(run=_run_check)

    p_random = sub.add_parser("random", help="generate a random matrix set")
    p_random.add_argument("--dim", type=int, required=True)
    p_random.add_argument("--size", type=int, required=True)
    p_random.add_argument("--density", type=float, default=0.5)
    p_random.add_argument("--lo", type=float, default=0.1)
    p_random.add_argument("--hi", type=float, default=2.0)
    p_random.add_argument("--seed", type=int, default=0)
    p_random.add_argument("--output", help="write here instead of stdout")
    p_random.set_defaults(run=_run_random)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "max_len", 1) < 1:
        print("error: --max-len must be >= 1", file=sys.stderr)
        return 2
    if getattr(args, "cap", 1) < 1:
        print("error: --cap must be >= 1", file=sys.stderr)
        return 2
    try:
        return args.run(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ComputeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except JsrkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())
