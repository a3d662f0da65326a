"""Command-line interface: ``mdpq <command> --model FILE ...``.

Every command prints one JSON document (or ``key: value`` lines with
``--output text``). Exit status is 0 on success, 1 for semantic failures
(invalid query, undefined measure, no witness found) and 2 for I/O or parse
errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .graph import model_diagnostics
from .model import (
    ModelError,
    Query,
    builtin_model,
    format_fraction,
    load_model,
    mdp_to_dict,
    parse_policy,
    resolve_states,
    validate_query,
)
from .prcheck import GprConfig, check_gpr, check_spr
from .quality import EstimateError, MEASURES, average_measure, causal_volume, confusion, measure
from .transform import canonical, star, two_copy

SCHEMA_VERSION = 1
EXIT_OK, EXIT_SEMANTIC, EXIT_IO = 0, 1, 2
BUILTIN_PREFIX = "builtin:"


class InputError(Exception):
    """Raised for unreadable or unparsable inputs (exit status 2)."""


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _seed(text):
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned value")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mdpq", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, query=True):
        p.add_argument("--model", required=True, help=f"model JSON file, or {BUILTIN_PREFIX}network / {BUILTIN_PREFIX}suzy_billy")
        p.add_argument("--predictor", required=query, help="comma-separated cause states or labels")
        p.add_argument("--effect", required=query, help="comma-separated effect states or labels")
        p.add_argument("--output", choices=("json", "text"), default="json")

    def sampling(p):
        p.add_argument("--samples", type=_positive, default=100_000)
        p.add_argument("--seed", type=_seed, default=0)
        p.add_argument("--threads", type=_positive, default=1)

    p = sub.add_parser("validate", help="check a model and, optionally, a query")
    common(p, query=False)

    p = sub.add_parser("measure", help="quality measure of one policy, or its average over all MR policies")
    common(p)
    p.add_argument("--measure", choices=MEASURES, default="fscore")
    p.add_argument("--policy", help="policy JSON file; without it the Monte-Carlo average is reported")
    sampling(p)

    p = sub.add_parser("causal-volume", help="estimate the SPR or GPR share of the policy polytope")
    common(p)
    p.add_argument("--mode", choices=("spr", "gpr"), default="spr")
    sampling(p)

    p = sub.add_parser("check", help="decide existence of an SPR policy or search for a GPR policy")
    common(p)
    p.add_argument("--mode", choices=("spr", "gpr"), default="spr")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--starts", type=_positive, default=GprConfig.starts)
    p.add_argument("--enumeration-cap", type=int, default=GprConfig.enumeration_cap)
    p.add_argument("--threads", type=_positive, default=1)

    p = sub.add_parser("transform", help="dump the two-copy, canonical or star model")
    common(p)
    p.add_argument("--kind", choices=("two-copy", "canonical", "star"), default="canonical")
    p.add_argument("--p", help="parameter of the star model (default: p*)")

    p = sub.add_parser("confusion", help="exact confusion matrix and measures of one policy")
    common(p)
    p.add_argument("--policy", required=True)
    return parser


# -- helpers ----------------------------------------------------------------------------

def _load(path):
    try:
        if path.startswith(BUILTIN_PREFIX):
            return builtin_model(path[len(BUILTIN_PREFIX):])
        return load_model(path)
    except (OSError, ModelError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot load model {path!r}: {exc}") from exc


def _load_policy(m, path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read policy {path!r}: {exc}") from exc
    try:
        return parse_policy(m, text)
    except ModelError as exc:
        raise InputError(f"invalid policy {path!r}: {exc}") from exc


def _split(text):
    return [part for part in (text or "").split(",") if part.strip()]


def _query(m, args) -> Query:
    q = Query(resolve_states(m, _split(args.predictor)), resolve_states(m, _split(args.effect)))
    problems = validate_query(m, q)
    if problems:
        raise ModelError("; ".join(problems))
    return q


def _value(v):
    if v is None:
        return None
    if isinstance(v, Fraction):
        return format_fraction(v)
    return float(v)


def _emit(doc, fmt, out):
    doc = {"schema_version": SCHEMA_VERSION, **doc}
    if fmt == "json":
        out.write(json.dumps(doc) + "\n")
        return
    for key, val in doc.items():
        out.write(f"{key}: {json.dumps(val) if isinstance(val, (dict, list)) else val}\n")


# -- commands ---------------------------------------------------------------------------

def cmd_validate(args):
    m = _load(args.model)
    doc = {
        "command": "validate",
        "states": len(m.states),
        "pairs": len(m.stact),
        "diagnostics": model_diagnostics(m),
        "problems": [],
    }
    if args.predictor or args.effect:
        q = Query(resolve_states(m, _split(args.predictor)), resolve_states(m, _split(args.effect)))
        doc["problems"] = validate_query(m, q)
    doc["ok"] = not doc["problems"]
    return doc, EXIT_OK if doc["ok"] else EXIT_SEMANTIC


def cmd_measure(args):
    m = _load(args.model)
    q = _query(m, args)
    doc = {"command": "measure", "measure": args.measure}
    if args.policy:
        x = _load_policy(m, args.policy)
        val = measure(confusion(m, q, x), args.measure)
        doc.update(policy=args.policy, value=_value(val), defined=val is not None)
        return doc, EXIT_OK if val is not None else EXIT_SEMANTIC
    report = average_measure(m, q, args.measure, args.samples, args.seed, args.threads)
    doc.update(report.to_json(), threads=args.threads)
    return doc, EXIT_OK


def cmd_causal_volume(args):
    m = _load(args.model)
    q = _query(m, args)
    report = causal_volume(m, q, args.mode, args.samples, args.seed, args.threads)
    doc = {"command": "causal-volume", "mode": args.mode, **report.to_json(), "threads": args.threads}
    return doc, EXIT_OK


def cmd_check(args):
    m = _load(args.model)
    q = _query(m, args)
    if args.mode == "spr":
        verdict = check_spr(m, q)
        doc = {"command": "check", "mode": "spr", **verdict.to_json()}
        return doc, EXIT_OK
    cfg = GprConfig(starts=args.starts, enumeration_cap=args.enumeration_cap, seed=args.seed, threads=args.threads)
    verdict = check_gpr(m, q, cfg)
    doc = {"command": "check", "mode": "gpr", "exists": verdict.found, **verdict.to_json()}
    return doc, EXIT_OK


def cmd_transform(args):
    m = _load(args.model)
    q = _query(m, args)
    if args.kind == "two-copy":
        t = two_copy(m, q)
    else:
        cm = canonical(m, q)
        if args.kind == "canonical":
            t = cm
        else:
            try:
                p = Fraction(args.p) if args.p is not None else cm.p_star
            except (ValueError, ZeroDivisionError) as exc:
                raise ModelError(f"invalid --p value {args.p!r}") from exc
            t = star(cm, p)
    doc = {"command": "transform", "kind": args.kind, "model": mdp_to_dict(t.mdp), "sidecar": t.sidecar()}
    return doc, EXIT_OK


def cmd_confusion(args):
    m = _load(args.model)
    q = _query(m, args)
    x = _load_policy(m, args.policy)
    cm = confusion(m, q, x)
    doc = {
        "command": "confusion",
        "policy": args.policy,
        "confusion": cm.to_json(),
        "measures": {k: _value(measure(cm, k)) for k in MEASURES},
    }
    return doc, EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "measure": cmd_measure,
    "causal-volume": cmd_causal_volume,
    "check": cmd_check,
    "transform": cmd_transform,
    "confusion": cmd_confusion,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_IO if exc.code else EXIT_OK
    fmt = getattr(args, "output", "json")
    try:
        doc, status = COMMANDS[args.command](args)
    except InputError as exc:
        doc, status = {"command": args.command, "error": str(exc)}, EXIT_IO
    except (ModelError, EstimateError, ValueError) as exc:
        doc, status = {"command": args.command, "error": str(exc)}, EXIT_SEMANTIC
    _emit(doc, fmt, out)
    return status


if __name__ == "__main__":
    sys.exit(main())
