"""Command-line front end.

Commands: rho, census, crosscheck, strata, counterexample.  Every command
is a pure function of its arguments; reports carry the full query and the
library version.  Exit codes: 0 verified, 1 verification failed, 2 invalid
input, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import random
import re
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .census import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    Mode,
    census,
    census_compactified,
    counterexample_report,
    redraw_seeds,
    strata_counts,
)
from .chordspace import ChordConfig, crosscheck
from .curvemodel import MultiDegree, degree_stability, make_polarization, quasistable_strata, random_curve
from .ramification import divisor_sequence, is_admissible, rho_terms

EXIT_OK, EXIT_FAILED, EXIT_INVALID, EXIT_BUDGET = 0, 1, 2, 3
RUN_SCHEMA = "binarybn.run/1"


class InvalidInput(ValueError):
    pass


@dataclass
class QuerySpec:
    """Everything that determines a run; identical specs give identical bytes."""

    command: str
    g: int | None = None
    r: int | None = None
    primes: list = field(default_factory=list)
    seeds: list = field(default_factory=list)
    dd: list | None = None
    d: int | None = None
    y: int | None = None
    P: int | None = None
    D: list | None = None
    a: list | None = None
    mode: str | None = None
    budget: int | None = None
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# argument parsing helpers


def parse_ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise InvalidInput(f"expected a comma-separated integer list, got {text!r}") from None


def parse_dd(text: str) -> MultiDegree:
    vals = parse_ints(text)
    if len(vals) != 2:
        raise InvalidInput(f"multidegree needs two integers, got {text!r}")
    return MultiDegree(*vals)


_PAIR = re.compile(r"^\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)$")


def parse_ram(text: str) -> tuple[list[int], list[tuple[int, int]]]:
    """Parse ``a0,a1,...@(x1,y1);(x2,y2);...`` into (a, D)."""
    if "@" not in text:
        raise InvalidInput("ramification must look like a0,a1,...@(x1,y1);(x2,y2);...")
    left, right = text.split("@", 1)
    a = parse_ints(left)
    D = []
    for part in right.split(";"):
        m = _PAIR.match(part.strip())
        if not m:
            raise InvalidInput(f"bad divisor step {part!r}")
        D.append((int(m.group(1)), int(m.group(2))))
    if not a:
        raise InvalidInput("empty ramification sequence")
    try:
        Ds = divisor_sequence(D)
    except ValueError as exc:
        raise InvalidInput(str(exc)) from None
    if not is_admissible(a, Ds):
        raise InvalidInput(f"sequence {a} is not admissible along {[str(s) for s in Ds]}")
    return a, [(s.a1, s.a2) for s in Ds]


def _primes(args, default: str) -> list[int]:
    ps = parse_ints(args.primes or default)
    if len(ps) < 1:
        raise InvalidInput("need at least one prime")
    return ps


def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _csv(rows: list[list]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\r\n").writerows(rows)
    return buf.getvalue()


def _emit(args, doc: dict, text: str, rows: list[list] | None, stem: str) -> None:
    js = _dump(doc)
    table = _csv(rows) if rows is not None else None
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{stem}.json").write_text(js, encoding="utf-8")
        if table is not None:
            (out / f"{stem}.csv").write_text(table, encoding="utf-8", newline="")
    if args.json:
        sys.stdout.write(js)
    elif args.csv and table is not None:
        sys.stdout.write(table)
    else:
        sys.stdout.write(text)


def _envelope(qs: QuerySpec, body: dict, verified: bool) -> dict:
    return {"schema": RUN_SCHEMA, "version": __version__, "query": qs.as_dict(), "verified": verified} | body


# ---------------------------------------------------------------------------
# commands


def cmd_rho(args) -> int:
    a, D = parse_ram(args.ram) if args.ram else (None, None)
    if a is not None and len(a) != args.r + 1:
        raise InvalidInput(f"ramification sequence has length {len(a)}, expected r+1 = {args.r + 1}")
    base, excess, reps = rho_terms(args.g, args.r, args.d, a or ())
    rho = base - excess - reps
    qs = QuerySpec("rho", g=args.g, r=args.r, d=args.d, D=D, a=a)
    doc = _envelope(qs, {"rho": rho, "rho_grd": base, "excess": excess, "repetition": reps}, True)
    text = (f"rho        {rho}\n"
            f"rho_grd    {base}\n"
            f"excess     {excess}\n"
            f"repetition {reps}\n")
    _emit(args, doc, text, [["rho", "rho_grd", "excess", "repetition"], [rho, base, excess, reps]], "rho")
    return EXIT_OK


def _counterexample_verdict(rep) -> bool:
    """The measured dimension strictly exceeds the expected one."""
    return all(n > 0 for n in rep.counts.values()) and rep.estimate.dim is not None and rep.estimate.dim > rep.expected


def _report_rows(reports) -> list[list]:
    rows = [["seed", "prime", "count", "log_q_count", "estimate", "confidence", "expected"]]
    for rep in reports:
        est = "empty" if rep.estimate.empty else rep.estimate.dim
        for q, n in sorted(rep.counts.items()):
            lg = f"{math.log(n) / math.log(q):.4f}" if n > 0 else ""
            rows.append([rep.query["seed"], q, n, lg, est, rep.estimate.confidence.value, rep.expected])
    return rows


def cmd_census(args) -> int:
    g, r = args.g, args.r
    primes = _primes(args, "7,11,13")
    seeds = parse_ints(args.seeds)
    if not seeds:
        raise InvalidInput("need at least one seed")
    a, D = parse_ram(args.ram) if args.ram else (None, None)
    mode = Mode(args.mode)
    compact = args.dd is None
    if compact:
        if args.d is None or args.y is None or args.P is None:
            raise InvalidInput("give --dd, or --d with --y and --P for the compactified locus")
        E = make_polarization(args.d, g, args.y)

        def run(seed):
            return census_compactified(g, args.d, E, args.P, r, primes, seed, D, a, mode, args.budget, args.workers)

        qs = QuerySpec("census", g=g, r=r, primes=primes, seeds=seeds, d=args.d, y=args.y, P=args.P,
                         D=D, a=a, mode=mode.value, budget=args.budget)
    else:
        dd = parse_dd(args.dd)

        def run(seed):
            return census(g, dd, r, primes, seed, D, a, mode, args.budget, args.workers)

        qs = QuerySpec("census", g=g, r=r, primes=primes, seeds=seeds, dd=list(dd), D=D, a=a,
                         mode=mode.value, budget=args.budget)
    if args.expect_counterexample:
        reports = [run(s) for s in seeds]
        discards, aborted = [], False
        verified = all(_counterexample_verdict(rep) for rep in reports)
    else:
        res = redraw_seeds(run, seeds)
        reports, discards, aborted = res.reports, res.discards, res.aborted
        verified = res.verified
    qs.extra = {"expect_counterexample": bool(args.expect_counterexample)}
    doc = _envelope(qs, {
        "reports": [rep.to_dict() for rep in reports],
        "discarded_seeds": discards,
        "aborted": aborted,
    }, verified)
    text = "".join(f"--- seed {rep.query['seed']}\n{rep.to_text()}" for rep in reports)
    if discards:
        text += f"discarded seeds {discards}\n"
    if aborted:
        text += f"aborted after {len(discards)} discards\n"
    text += f"verdict {'PASS' if verified else 'FAIL'}\n"
    _emit(args, doc, text, _report_rows(reports), "census")
    return EXIT_OK if verified else EXIT_FAILED


def cmd_crosscheck(args) -> int:
    dd = parse_dd(args.dd)
    if dd.d1 < 0 or dd.d2 < 0:
        raise InvalidInput("the chord model needs d1, d2 >= 0")
    primes = _primes(args, "11")
    seeds = parse_ints(args.seeds)
    rs = [args.r] if args.r is not None else list(range(0, max(0, dd.d - args.g) + 1))
    results = []
    rows = [["seed", "prime", "r", "planes", "skipped", "dictionary_draws", "failures"]]
    for seed in seeds:
        for q in primes:
            X = random_curve(args.g, q, seed)
            cfg = ChordConfig(X, dd)
            for r in rs:
                rng = random.Random(f"crosscheck/{args.g}/{dd.d1},{dd.d2}/{q}/{r}/{seed}")
                res = crosscheck(cfg, r, args.planes, args.draws, rng)
                results.append({"seed": seed, "prime": q, "r": r} | res.as_dict())
                rows.append([seed, q, r, res.planes, res.skipped, res.dictionary_draws, res.failures])
    failures = sum(x["failures"] for x in results)
    qs = QuerySpec("crosscheck", g=args.g, r=args.r, primes=primes, seeds=seeds, dd=list(dd),
                     extra={"planes": args.planes, "draws": args.draws})
    doc = _envelope(qs, {"results": results, "failures": failures}, failures == 0)
    lines = [f"{'seed':>5} {'q':>4} {'r':>3} {'planes':>7} {'skipped':>8} {'draws':>6} {'failures':>9}"]
    for x in results:
        lines.append(f"{x['seed']:>5} {x['prime']:>4} {x['r']:>3} {x['planes']:>7} {x['skipped']:>8} "
                     f"{x['dictionary_draws']:>6} {x['failures']:>9}")
    lines.append(f"total failures {failures}")
    _emit(args, doc, "\n".join(lines) + "\n", rows, "crosscheck")
    return EXIT_OK if failures == 0 else EXIT_FAILED


def cmd_strata(args) -> int:
    if args.P not in (1, 2):
        raise InvalidInput("--P must be 1 or 2")
    if args.g < 0:
        raise InvalidInput("genus must be nonnegative")
    E = make_polarization(args.d, args.g, args.y)
    strata = quasistable_strata(args.d, args.g, E, args.P)
    qs = QuerySpec("strata", g=args.g, d=args.d, y=args.y, P=args.P)
    entries = [{"J": list(J), "dd": [dd.d1, dd.d2], "stability": degree_stability(dd, E, args.P).value}
               for J, dd in strata]
    header = ["J", "d1", "d2", "stability"]
    verified = bool(strata)
    body: dict = {"polarization": [str(E.e1), str(E.e2)], "strata": entries}
    if args.count:
        primes = _primes(args, "7,11,13")
        seed = parse_ints(args.seeds)[0]
        a, D = parse_ram(args.ram) if args.ram else (None, None)
        mode = Mode(args.mode)
        qs.r, qs.primes, qs.seeds = args.r, primes, [seed]
        qs.D, qs.a, qs.mode, qs.budget = D, a, mode.value, args.budget
        totals = {}
        for q in primes:
            X = random_curve(args.g, q, seed)
            counts = strata_counts(X, args.d, E, args.P, args.r, D, a, mode, args.budget, args.workers)
            for entry, (_, _, n) in zip(entries, counts):
                entry[f"N({q})"] = n
            totals[q] = sum(n for _, _, n in counts)
        body["totals"] = {str(q): n for q, n in totals.items()}
        header += [f"N({q})" for q in primes]
    rows = [header] + [[" ".join(map(str, e["J"])) or "-", e["dd"][0], e["dd"][1], e["stability"]]
                       + [e[h] for h in header[4:]] for e in entries]
    widths = [max(len(str(row[i])) for row in rows) for i in range(len(header))]
    lines = [f"polarization ({E.e1}, {E.e2})  strata {len(entries)}"]
    lines += ["  ".join(str(v).rjust(w) for v, w in zip(row, widths)) for row in rows]
    if args.count:
        lines.append("total  " + "  ".join(f"N({q})={n}" for q, n in body["totals"].items()))
    _emit(args, _envelope(qs, body, verified), "\n".join(lines) + "\n", rows, "strata")
    return EXIT_OK if verified else EXIT_FAILED


def cmd_counterexample(args) -> int:
    dd = parse_dd(args.dd)
    primes = _primes(args, "5,7,11")
    seeds = parse_ints(args.seeds)
    reports = [counterexample_report(args.which, args.g, dd, args.r, primes, s, args.budget) for s in seeds]
    if args.which == "ex1":
        verified = all(rep.notes["exceeds_rho"] and rep.notes["prediction_matches"] for rep in reports)
    else:
        verified = all(rep.notes["nonempty_everywhere"] and rep.expected < 0 for rep in reports)
    qs = QuerySpec("counterexample", g=args.g, r=args.r, primes=primes, seeds=seeds, dd=list(dd),
                     budget=args.budget, extra={"which": args.which})
    doc = _envelope(qs, {"reports": [rep.to_dict() for rep in reports]}, verified)
    text = "".join(f"--- seed {rep.query['seed']}\n{rep.to_text()}" for rep in reports)
    text += f"counterexample {'reproduced' if verified else 'NOT reproduced'}\n"
    _emit(args, doc, text, _report_rows(reports), "counterexample")
    return EXIT_OK if verified else EXIT_FAILED


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="binarybn", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def output_flags(p):
        fmt = p.add_mutually_exclusive_group()
        fmt.add_argument("--json", action="store_true", help="print the JSON report")
        fmt.add_argument("--csv", action="store_true", help="print the CSV table")
        p.add_argument("--out", help="directory for <command>.json and <command>.csv")

    def run_flags(p):
        p.add_argument("--primes", help="comma-separated primes")
        p.add_argument("--seeds", default="0", help="comma-separated curve seeds")
        p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="max gluing-torus points per stratum")
        p.add_argument("--workers", type=int, default=1, help="worker processes (output does not depend on it)")

    def ram_flags(p):
        p.add_argument("--ram", help='ramification "a0,a1,...@(x1,y1);(x2,y2);..."')
        p.add_argument("--mode", default=Mode.AT_LEAST.value, choices=[m.value for m in Mode])

    p = sub.add_parser("rho", help="expected dimension and its summands")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--ram")
    output_flags(p)
    p.set_defaults(func=cmd_rho)

    p = sub.add_parser("census", help="point-count census against the expected dimension")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--dd", help="multidegree d1,d2")
    p.add_argument("--d", type=int, help="total degree (compactified census)")
    p.add_argument("--y", type=int, help="polarization parameter")
    p.add_argument("--P", type=int, help="component carrying the point P")
    p.add_argument("--expect-counterexample", action="store_true",
                   help="succeed iff the measured dimension exceeds the expected one")
    run_flags(p)
    ram_flags(p)
    output_flags(p)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("crosscheck", help="plane model versus section model")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--dd", required=True)
    p.add_argument("--r", type=int, help="default: every r from 0 to max(0, d-g)")
    p.add_argument("--planes", type=int, default=200)
    p.add_argument("--draws", type=int, default=100)
    p.add_argument("--primes", help="comma-separated primes")
    p.add_argument("--seeds", default="0")
    output_flags(p)
    p.set_defaults(func=cmd_crosscheck)

    p = sub.add_parser("strata", help="quasistable strata of the compactified locus")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--y", type=int, required=True)
    p.add_argument("--P", type=int, required=True)
    p.add_argument("--count", action="store_true", help="add per-stratum point counts")
    p.add_argument("--r", type=int, default=0)
    run_flags(p)
    ram_flags(p)
    output_flags(p)
    p.set_defaults(func=cmd_strata)

    p = sub.add_parser("counterexample", help="reproduce a failure of the dimension count")
    p.add_argument("which", choices=["ex1", "ex2"])
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--dd", required=True)
    p.add_argument("--r", type=int, default=0)
    run_flags(p)
    output_flags(p)
    p.set_defaults(func=cmd_counterexample)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
