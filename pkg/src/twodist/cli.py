"""Command-line front end.

Exit status: 0 on success, 1 for malformed input or invalid parameters,
2 when a search is infeasible (size limit, time budget, failed extension).
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any

from . import bounds, packings, search
from .core import (
    CodeError,
    Packing,
    TwoDistanceParams,
    classify_two_distance,
    constant_weight_translator,
    distance_set,
    weight_distribution,
)
from .formats import ParseError, block_line_numbers, format_code, format_packing, parse_code, parse_packing

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit 2, which we reserve
        raise UsageError(message)


class Infeasible(Exception):
    pass


def _json_default(x: Any) -> Any:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (set, frozenset, tuple)):
        return sorted(x) if isinstance(x, (set, frozenset)) else list(x)
    raise TypeError(f"cannot serialise {type(x).__name__}")


class Output:
    def __init__(self, fmt: str, stream=None):
        self.fmt = fmt
        self.stream = stream or sys.stdout

    def record(self, kind: str, data: dict, text: str | None = None) -> None:
        if self.fmt == "machine":
            line = json.dumps({"type": kind, **data}, sort_keys=True, default=_json_default)
            print(line, file=self.stream)
        elif text is not None:
            print(text, file=self.stream)


def _params(args) -> TwoDistanceParams:
    try:
        return TwoDistanceParams(args.n, args.d1, args.d2)
    except CodeError as exc:
        raise UsageError(str(exc)) from exc


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text)


def cmd_verify(args, out: Output) -> int:
    code = parse_code(_read(args.file))
    ds = sorted(distance_set(code))
    wd = weight_distribution(code)
    data: dict[str, Any] = {"n": code.n, "size": len(code), "distance_set": ds, "weight_distribution": wd}
    lines = [f"n={code.n} M={len(code)}", f"distance set: {ds}", f"weight distribution: {wd}"]
    if args.d1 is not None and args.d2 is not None:
        cls = classify_two_distance(code, TwoDistanceParams(code.n, args.d1, args.d2))
        data["classification"] = cls.value
        lines.append(f"two-distance {{{args.d1},{args.d2}}}: {cls.value}")
    if code.n <= args.max_n:
        y = constant_weight_translator(code, args.max_n)
        data["translator"] = None if y is None else str(y)
        lines.append("constant-weight translator: " + ("none" if y is None else str(y)))
    else:
        data["translator"] = "skipped"
        lines.append(f"constant-weight translator: skipped (n > {args.max_n})")
    out.record("verify", data, "\n".join(lines))
    return EXIT_OK


def _search_result_text(res: search.SearchResult, p: TwoDistanceParams) -> str:
    tag = "" if res.exact else " (budget exhausted, lower bound only)"
    lines = [f"A2({p.n},{{{p.d1},{p.d2}}}) = {res.value}{tag}",
             f"both distances realised: {res.both_distances_realized}",
             f"nodes explored: {res.nodes_explored}"]
    if res.code is not None:
        lines.append("certificate:")
        lines += ["  " + str(w) for w in res.code.words]
    return "\n".join(lines)


def cmd_search(args, out: Output) -> int:
    p = _params(args)
    try:
        if args.report:
            rep = search.optimality_report(p, args.time_budget, args.workers, args.engine)
            res = rep.search
            text = _search_result_text(res, p) + (
                f"\nsandwich: [{rep.bounds.lower} ({rep.bounds.lower_source}),"
                f" {rep.bounds.upper} ({rep.bounds.upper_source})]"
                f"\nconstant-weight translate: {rep.constant_weight_translate}"
            )
            out.record("optimality", rep.as_dict(), text)
        else:
            res = search.exact_a2(p, args.require_both, args.time_budget, args.workers, engine=args.engine)
            out.record("search", {"n": p.n, "d1": p.d1, "d2": p.d2, **res.as_dict()},
                       _search_result_text(res, p))
    except search.SearchLimitExceeded as exc:
        raise Infeasible(str(exc)) from exc
    if res.code is not None:
        _write(args.out, format_code(res.code, [f"A2({p.n},{{{p.d1},{p.d2}}}) certificate, size {len(res.code)}"]))
    return EXIT_OK if res.exact else EXIT_INFEASIBLE


def cmd_packing_verify(args, out: Output) -> int:
    text = _read(args.file)
    pk = parse_packing(text)
    rep = packings.verify_packing(pk)
    data: dict[str, Any] = {"v": pk.v, "k": pk.k, "blocks": len(pk), "valid": rep.valid}
    if rep.valid:
        formula = packings.packing_formula(pk.v, pk.k)
        data["exact_cover"] = rep.exact_cover
        data["formula"] = formula
        msg = f"valid 2-packing: v={pk.v} k={pk.k} blocks={len(pk)}"
        if rep.exact_cover:
            msg += " (every pair covered exactly once)"
        if formula is not None:
            msg += f"; D({pk.v},{pk.k},2) = {formula}"
        out.record("packing_verify", data, msg)
        return EXIT_OK
    pair, (b1, b2) = rep.violation
    lines = block_line_numbers(text)
    data.update(pair=list(pair), blocks_at=[list(b1), list(b2)], lines=[lines.get(b1), lines.get(b2)])
    out.record("packing_verify", data)
    print(f"pair {pair[0]} {pair[1]} covered twice: block {' '.join(map(str, b1))} (line {lines.get(b1)})"
          f" and block {' '.join(map(str, b2))} (line {lines.get(b2)})", file=sys.stderr)
    return EXIT_INPUT


def _emit_packing(args, out: Output, pk: Packing, kind: str, extra: dict, comments: list[str]) -> None:
    body = format_packing(pk, comments)
    data = {"v": pk.v, "k": pk.k, "blocks": [list(b) for b in pk.blocks], "size": len(pk), **extra}
    if args.out:
        _write(args.out, body)
        out.record(kind, data, f"wrote {len(pk)} blocks to {args.out}")
    else:
        out.record(kind, data, body.rstrip("\n"))


def cmd_packing_greedy(args, out: Output) -> int:
    pk = packings.greedy_packing(args.v, args.k, args.seed)
    _emit_packing(args, out, pk, "packing_greedy", {"seed": args.seed},
                  [f"greedy packing, seed {args.seed}, {len(pk)} blocks"])
    return EXIT_OK


def cmd_packing_bose(args, out: Output) -> int:
    pk = packings.bose_sts(args.v)
    _emit_packing(args, out, pk, "packing_bose", {}, [f"Bose Steiner triple system, {len(pk)} blocks"])
    return EXIT_OK


def cmd_packing_oracle(args, out: Output) -> int:
    try:
        res = search.packing_number_oracle(args.v, args.k, args.time_budget, args.workers, engine=args.engine)
    except search.SearchLimitExceeded as exc:
        raise Infeasible(str(exc)) from exc
    formula = packings.packing_formula(args.v, args.k) if args.v >= args.k else None
    data = {"v": args.v, "k": args.k, "formula": formula, **res.as_dict()}
    tag = "" if res.exact else " (budget exhausted, lower bound only)"
    text = f"D({args.v},{args.k},2) = {res.value}{tag}; formula: {formula}; nodes: {res.nodes_explored}"
    text += "\n" + "\n".join(" ".join(map(str, b)) for b in res.certificate)
    out.record("packing_oracle", data, text)
    if args.out and res.certificate:
        _write(args.out, format_packing(Packing(args.v, args.k, res.certificate)))
    return EXIT_OK if res.exact else EXIT_INFEASIBLE


def cmd_extend(args, out: Output) -> int:
    pk = parse_packing(_read(args.file))
    if not packings.verify_packing(pk).valid:
        raise ParseError(1, "input is not a 2-packing")
    res = packings.extend_packing(pk, args.d, args.max_attempts, args.seed)
    if res is None:
        raise Infeasible(f"no valid extension found in {args.max_attempts} attempts")
    comments = res.provenance()
    body = format_packing(res.output, comments)
    data = {
        "v": res.output.v, "k": res.output.k, "size": len(res.output), "input_size": res.input_blocks,
        "added_sets": [list(s) for s in res.added_sets], "attempts_used": res.attempts_used,
        "rewired": [[list(r.old), list(r.new)] for r in res.rewired],
        "blocks": [list(b) for b in res.output.blocks],
    }
    if args.out:
        _write(args.out, body)
        out.record("extend", data, "\n".join(comments) + f"\nwrote {args.out}")
    else:
        out.record("extend", data, body.rstrip("\n"))
    return EXIT_OK


def cmd_bounds(args, out: Output) -> int:
    p = _params(args)
    s = bounds.sandwich(p, args.seed)
    data = {"n": p.n, "d1": p.d1, "d2": p.d2, "lower": s.lower, "lower_source": s.lower_source,
            "upper": s.upper, "upper_source": s.upper_source, "parity_feasible": s.feasible,
            "upper_candidates": s.candidates}
    text = (f"A2({p.n},{{{p.d1},{p.d2}}}): lower {s.lower} ({s.lower_source}),"
            f" upper {s.upper} ({s.upper_source})")
    if not s.feasible:
        text += "\nno such code: d1 odd and d2 - d1 even"
    out.record("bounds", data, text)
    return EXIT_OK


def cmd_threshold(args, out: Output) -> int:
    rep = bounds.threshold_estimate(args.d)
    lines = [f"d={rep.d}: lower bound on M: {rep.lower_expression}"]
    for c in rep.cases:
        lines.append(f"  {c.case.case_id:<16} w={c.case.weight:<3} M <= {c.case.expression:<12}"
                     f" fails from n = {c.crossover}")
    lines.append(f"N({rep.d}) <= {rep.threshold}  (binding case: {rep.binding_case})")
    out.record("threshold", rep.as_dict(), "\n".join(lines))
    return EXIT_OK


def cmd_midpoint(args, out: Output) -> int:
    rep = search.midpoint_analysis(args.d, args.n)
    lines = [f"d={rep.d} n={rep.n} midpoints |B| = {rep.midpoints}",
             f"  {'class':<6}{'words':>8}  {'count':>8}  {'expected':>8}  constant"]
    for c in rep.classes:
        obs = ",".join(map(str, c.observed))
        lines.append(f"  {c.name:<6}{c.size:>8}  {obs:>8}  {c.expected:>8}  {c.constant}")
    out.record("midpoint", rep.as_dict(), "\n".join(lines))
    return EXIT_OK


def cmd_table(args, out: Output) -> int:
    if args.d % 2 or args.d < 2:
        raise UsageError("--d must be even and positive")
    lines = [f"{'n':>4} {'lower':>8} {'exact':>8} {'upper':>8}  sources"]
    for n in range(args.n_min, args.n_max + 1):
        if n < args.d + 2:
            continue
        p = TwoDistanceParams(n, args.d, args.d + 2)
        s = bounds.sandwich(p, args.seed)
        exact: int | None = None
        status = "skipped"
        try:
            res = search.exact_a2(p, True, args.time_budget, limit=args.exact_limit, engine=args.engine)
            exact = res.value if res.exact else None
            status = "exact" if res.exact else "timeout"
        except search.SearchLimitExceeded:
            pass
        out.record("table_row", {"n": n, "d1": p.d1, "d2": p.d2, "lower": s.lower, "upper": s.upper,
                                 "exact": exact, "status": status,
                                 "lower_source": s.lower_source, "upper_source": s.upper_source})
        shown = str(exact) if exact is not None else status
        lines.append(f"{n:>4} {str(s.lower):>8} {shown:>8} {s.upper:>8}  {s.lower_source}; {s.upper_source}")
    if out.fmt != "machine":
        print("\n".join(lines), file=out.stream)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="twodist", description="Binary codes with two distances and 2-packings.")
    parser.add_argument("--format", choices=("text", "machine"), default="text")
    # also accepted after the subcommand
    fmt = _Parser(add_help=False)
    fmt.add_argument("--format", choices=("text", "machine"), default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def search_opts(sp):
        sp.add_argument("--time-budget", type=float, default=search.DEFAULT_TIME_BUDGET)
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--engine", choices=search.ENGINES, default="compiled")

    sp = sub.add_parser("verify", parents=[fmt], help="analyse a code file")
    sp.add_argument("file")
    sp.add_argument("--d1", type=int)
    sp.add_argument("--d2", type=int)
    sp.add_argument("--max-n", type=int, default=24)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("search", parents=[fmt], help="exact A2(n,{d1,d2}) by clique search")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--d1", type=int, required=True)
    sp.add_argument("--d2", type=int, required=True)
    sp.add_argument("--no-require-both", dest="require_both", action="store_false")
    sp.add_argument("--report", action="store_true", help="add bounds and constant-weight check")
    sp.add_argument("--out")
    search_opts(sp)
    sp.set_defaults(func=cmd_search)

    pk = sub.add_parser("packing", parents=[fmt], help="packing utilities")
    psub = pk.add_subparsers(dest="packing_command", required=True, parser_class=_Parser)
    sp = psub.add_parser("verify", parents=[fmt])
    sp.add_argument("file")
    sp.set_defaults(func=cmd_packing_verify)
    sp = psub.add_parser("greedy", parents=[fmt])
    sp.add_argument("--v", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_packing_greedy)
    sp = psub.add_parser("bose", parents=[fmt])
    sp.add_argument("--v", type=int, required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_packing_bose)
    sp = psub.add_parser("oracle", parents=[fmt])
    sp.add_argument("--v", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--out")
    search_opts(sp)
    sp.set_defaults(func=cmd_packing_oracle)

    sp = sub.add_parser("extend", parents=[fmt], help="add two blocks using d/2 - 1 new points")
    sp.add_argument("file")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-attempts", type=int, default=100)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_extend)

    sp = sub.add_parser("bounds", parents=[fmt], help="lower and upper bounds on A2")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--d1", type=int, required=True)
    sp.add_argument("--d2", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("threshold", parents=[fmt], help="upper estimate of N(d) for d = 4, 6")
    sp.add_argument("--d", type=int, required=True, choices=(4, 6))
    sp.set_defaults(func=cmd_threshold)

    sp = sub.add_parser("midpoint", parents=[fmt], help="midpoint counting coefficients")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.set_defaults(func=cmd_midpoint)

    sp = sub.add_parser("table", parents=[fmt], help="sweep n with bounds and exact values where feasible")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--n-min", type=int, required=True)
    sp.add_argument("--n-max", type=int, required=True)
    sp.add_argument("--exact-limit", type=int, default=1000, help="max graph vertices for exact search")
    sp.add_argument("--seed", type=int, default=0)
    search_opts(sp)
    sp.set_defaults(func=cmd_table)
    return parser


def _check_ranges(args) -> None:
    for name in ("n", "v", "k", "d", "max_attempts", "workers"):
        val = getattr(args, name, None)
        if val is not None and val < 1:
            raise UsageError(f"--{name.replace('_', '-')} must be positive")
    budget = getattr(args, "time_budget", None)
    if budget is not None and budget <= 0:
        raise UsageError("--time-budget must be positive")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _check_ranges(args)
        return args.func(args, Output(args.format))
    except UsageError as exc:
        print(f"twodist: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ParseError, CodeError, ValueError) as exc:
        print(f"twodist: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Infeasible as exc:
        print(f"twodist: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
