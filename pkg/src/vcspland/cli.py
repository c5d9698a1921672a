"""Command-line interface.

Every subcommand that consumes an instance reads it from ``--input`` or, by
default, standard input, so subcommands compose with pipes. Results are JSON
unless noted. Errors go to standard error as one JSON object with an
``error`` code; the exit status is 1 for invalid input, 2 for an exceeded
budget and 3 when a property check fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import checks, gen
from .core import (
    evaluate,
    format_assignment,
    from_dict,
    iter_assignments,
    parse,
    parse_assignment,
    serialize,
)
from .dynamics import (
    DEFAULT_STEP_LIMIT,
    POLICIES,
    SearchPolicy,
    TraceAnalysis,
    format_flip,
    run_search,
    trace_from_jsonl,
    verify_trace_properties,
)
from .errors import BudgetError, ValidationError, VcspError
from .graph import DEFAULT_MAX_VERTICES, build_fitness_graph, check_budget, longest_improving_path, sign_depends, stats
from .normal import magnitude_equivalent, sign_equivalent, simplify, trim_report
from .span import minimize_span_report, span, span_by_arity

EXIT_OK, EXIT_INVALID, EXIT_BUDGET, EXIT_PROPERTY = 0, 1, 2, 3
UNBOUNDED = 2**62


class PropertyFailure(Exception):
    """Raised after output is written when a checked property does not hold."""


# -- io helpers ----------------------------------------------------------------------


def _read_text(path):
    if path in (None, "-"):
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}", code="IO", path=path) from None


def _read_instance(path):
    """Instance JSON, or any JSON object carrying one under ``"instance"``."""
    text = _read_text(path)
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        return parse(text)
    if isinstance(data, dict) and isinstance(data.get("instance"), dict):
        data = data["instance"]
    return from_dict(data)


def _instance_dict(instance) -> dict:
    return json.loads(serialize(instance))


def _emit(args, payload):
    """Write ``payload`` (text, or JSON-able data) to ``--output`` or stdout."""
    if not isinstance(payload, str):
        if args.format == "csv":
            payload = _to_csv(payload)
        else:
            payload = json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
    if args.output in (None, "-"):
        sys.stdout.write(payload)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(payload)


def _to_csv(payload) -> str:
    rows = payload if isinstance(payload, list) else [payload]
    if not rows or not all(isinstance(r, dict) for r in rows):
        raise ValidationError("this output has no CSV projection", code="UNSUPPORTED_FORMAT")
    cols = list(rows[0])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for r in rows:
        writer.writerow([" ".join(map(str, v)) if isinstance(v, list) else v for v in (r.get(c) for c in cols)])
    return buf.getvalue()


def _budget(args) -> int:
    return UNBOUNDED if args.force else args.max_vertices


def _parse_int_list(text, what):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ValidationError(f"{what} must be comma-separated integers", code="BAD_PARAMETER") from None


# -- subcommands ---------------------------------------------------------------------


def cmd_eval(args):
    inst = _read_instance(args.input)
    if args.assignments:
        rows = []
        for text in args.assignments:
            x = parse_assignment(text, inst)
            rows.append({"assignment": format_assignment(x, inst.domains), "fitness": evaluate(inst, x)})
    else:
        check_budget(inst, _budget(args))
        rows = [
            {"assignment": format_assignment(x, inst.domains), "fitness": evaluate(inst, x)}
            for x in iter_assignments(inst.domains)
        ]
    _emit(args, rows[0] if len(args.assignments or ()) == 1 else rows)


def cmd_simplify(args):
    _emit(args, serialize(simplify(_read_instance(args.input)).to_instance()))


def _trim_payload(args):
    inst = _read_instance(args.input)
    rep = trim_report(simplify(inst), _budget(args))
    report = {
        "removed": [list(e) for e in rep.removed],
        "kept": [
            {"edge": list(e), "depends": w["depends"], "on": w["on"], "witness": format_assignment(w["x"])}
            for e, w in sorted(rep.witnesses.items())
        ],
    }
    return rep.instance, report


def cmd_trim(args):
    t, _ = _trim_payload(args)
    _emit(args, serialize(t.to_instance()))


def cmd_normalize(args):
    t, report = _trim_payload(args)
    _emit(args, {"instance": _instance_dict(t.to_instance()), "report": report})


def cmd_span(args):
    inst = _read_instance(args.input)
    by = span_by_arity(inst)
    _emit(args, {"span": span(inst), "span1": by.get(1, 0), "span2": by.get(2, 0),
                 "by_arity": {str(k): v for k, v in sorted(by.items())}})


def cmd_minspan(args):
    rep = minimize_span_report(_read_instance(args.input), _budget(args))
    out = rep.to_dict()
    out["instance"] = _instance_dict(rep.instance.to_instance())
    _emit(args, out)


def cmd_graph_stats(args):
    g = build_fitness_graph(_read_instance(args.input), _budget(args))
    st = stats(g)
    if args.format == "csv":
        st["witness"] = " ".join(st["witness"])
    _emit(args, st)


def cmd_longest_path(args):
    g = build_fitness_graph(_read_instance(args.input), _budget(args))
    length, path = longest_improving_path(g)
    if args.witness:
        _emit(args, {"length": length, "witness": [g.label(c) for c in path]})
    else:
        _emit(args, f"{length}\n")


def _policy(args):
    order = tuple(_parse_int_list(args.order, "--order")) if args.order else None
    seed = args.seed if args.policy == "random" else None
    return SearchPolicy(args.policy, seed=seed, step_limit=args.step_limit, order=order)


def cmd_search(args):
    inst = _read_instance(args.input)
    start = parse_assignment(args.start, inst) if args.start else (0,) * inst.n
    _emit(args, run_search(inst, start, _policy(args)).to_jsonl())


def cmd_analyze_trace(args):
    inst = _read_instance(args.input)
    tr = trace_from_jsonl(_read_text(args.trace), inst)
    an = TraceAnalysis(tr)
    forest = an.forest()
    report = verify_trace_properties(tr, forest)
    flips = []
    for t, (i, b) in enumerate(tr.flips, start=1):
        flips.append({"t": t, "flip": format_flip((i, b)), "gain": an.gain(tr.x(t), i, b), "encourager": forest.parent(t)})
    _emit(args, {"steps": tr.T, "flips": flips, "forest": forest.to_dict(), "properties": report.to_dict()})
    if not report.passed:
        raise PropertyFailure("trace properties failed: " + ", ".join(c.name for c in report.failed()))


def cmd_equiv(args):
    a = _read_instance(args.first)
    b = _read_instance(args.second)
    fn = magnitude_equivalent if args.kind == "magnitude" else sign_equivalent
    rep = fn(a, b, _budget(args))
    div = rep.first_divergence
    if div is not None:
        if args.kind == "magnitude":
            div = {"assignment": format_assignment(div, a.domains)}
        else:
            div = {"assignment": format_assignment(div[0], a.domains), "variable": div[1], "value": div[2]}
    _emit(args, {"kind": rep.kind, "equal": rep.equal, "first_divergence": div})


def cmd_sign_interact(args):
    inst = _read_instance(args.input)
    out = {"i": args.i, "j": args.j}
    for key, (p, q) in (("i_depends_on_j", (args.i, args.j)), ("j_depends_on_i", (args.j, args.i))):
        dep, x = sign_depends(inst, p, q, max_vertices=_budget(args))
        out[key] = {"value": dep, "witness": format_assignment(x) if x is not None else None}
    out["interact"] = out["i_depends_on_j"]["value"] or out["j_depends_on_i"]["value"]
    _emit(args, out)


def cmd_gen(args):
    fam = args.family
    p = args.params
    try:
        if fam == "subsetsum_star":
            if len(p) != 2:
                raise ValidationError("usage: gen subsetsum_star VALUES TARGET", code="BAD_PARAMETER")
            inst = gen.subsetsum_star(_parse_int_list(p[0], "VALUES"), int(p[1]))
        elif fam == "random_instance":
            if len(p) != 1:
                raise ValidationError("usage: gen random_instance N [--shape ...]", code="BAD_PARAMETER")
            lo, hi = _parse_int_list(args.weights, "--weights")
            inst = gen.random_instance(int(p[0]), args.shape, (lo, hi), args.seed, args.density, args.form)
        else:
            if len(p) != 1:
                raise ValidationError(f"usage: gen {fam} N", code="BAD_PARAMETER")
            inst = gen.FAMILIES[fam](int(p[0]))
    except ValueError as exc:
        if isinstance(exc, VcspError):
            raise
        raise ValidationError(str(exc), code="BAD_PARAMETER") from None
    _emit(args, serialize(inst))


def cmd_verify_paper(args):
    only = set(_parse_int_list(args.only, "--only")) if args.only else None
    report = checks.run_all(args.seed if args.seed is not None else checks.DEFAULT_SEED, only)
    _emit(args, report)
    if not report["passed"]:
        bad = [str(c["id"]) for c in report["criteria"] if not c["passed"]]
        raise PropertyFailure("criteria failed: " + ", ".join(bad))


# -- parser --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-i", "--input", help="instance file (default: standard input)")
    common.add_argument("-o", "--output", help="output file (default: standard output)")
    common.add_argument("--seed", type=int, default=None, help="64-bit seed for randomised steps")
    common.add_argument("--max-vertices", type=int, default=DEFAULT_MAX_VERTICES,
                        help="largest fitness graph to enumerate (default 2^22)")
    common.add_argument("--step-limit", type=int, default=DEFAULT_STEP_LIMIT,
                        help="maximum number of assignments in a search trace (default 2^20)")
    common.add_argument("--policy", choices=POLICIES, default="first")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--force", action="store_true", help="ignore the vertex budget")

    parser = argparse.ArgumentParser(prog="vcspland", description="Fitness landscapes of valued constraint instances.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_, description=help_)
        p.set_defaults(func=fn)
        return p

    p = add("eval", cmd_eval, "fitness of the given assignments, or the whole table")
    p.add_argument("assignments", nargs="*", metavar="ASSIGNMENT")
    add("simplify", cmd_simplify, "magnitude-equivalent simple form")
    add("trim", cmd_trim, "sign-equivalent trim form")
    add("normalize", cmd_normalize, "trim form plus a report of removed and kept edges")
    add("span", cmd_span, "span of the instance, total and by arity")
    add("minspan", cmd_minspan, "minimum-span sign-equivalent simple instance")
    add("graph-stats", cmd_graph_stats, "fitness graph statistics")
    p = add("longest-path", cmd_longest_path, "length of the longest improving path")
    p.add_argument("--witness", action="store_true", help="emit JSON with a witness path")
    p = add("search", cmd_search, "run a local search and emit the trace as JSON lines")
    p.add_argument("--start", help="start assignment (default all zeros)")
    p.add_argument("--order", help="comma-separated variable scan order")
    p = add("analyze-trace", cmd_analyze_trace, "flips, gains, encouragement forest and property report")
    p.add_argument("--trace", required=True, help="trace file in JSON lines")
    p = add("equiv", cmd_equiv, "compare two instances exhaustively")
    p.add_argument("kind", choices=("magnitude", "sign"))
    p.add_argument("first")
    p.add_argument("second")
    p = add("sign-interact", cmd_sign_interact, "decide whether two variables sign-interact")
    p.add_argument("i", type=int)
    p.add_argument("j", type=int)
    p = add("gen", cmd_gen, "generate an instance family")
    p.add_argument("family", choices=sorted(gen.FAMILIES))
    p.add_argument("params", nargs="*")
    p.add_argument("--shape", choices=gen.SHAPES, default="tree")
    p.add_argument("--form", choices=("simple", "general"), default="simple")
    p.add_argument("--density", type=float, default=0.3)
    p.add_argument("--weights", default="-10,10", help="weight range LO,HI")
    p = add("verify-paper", cmd_verify_paper, "run every acceptance check and emit a report")
    p.add_argument("--only", help="comma-separated criterion numbers")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "gen" and args.family == "random_instance" and args.seed is None:
        args.seed = 0
    if args.command == "search" and args.seed is None:
        args.seed = 0
    try:
        args.func(args)
    except BudgetError as exc:
        return _fail(exc.to_dict(), EXIT_BUDGET)
    except VcspError as exc:
        return _fail(exc.to_dict(), exc.exit_status)
    except PropertyFailure as exc:
        return _fail({"error": "PROPERTY_FAILED", "message": str(exc)}, EXIT_PROPERTY)
    except BrokenPipeError:
        return EXIT_OK
    return EXIT_OK


def _fail(payload, status) -> int:
    sys.stderr.write(json.dumps(payload, ensure_ascii=False, default=str) + "\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
