"""Command-line entry point: ``hypergreedy <command> [options]``.

Standard output carries only machine-readable payloads (JSON, CSV, markdown
tables, hypergraph files); progress and error text goes to standard error.
Exit codes: 0 success, 2 bad usage or parameters, 3 computation failure.
"""
from __future__ import annotations

import argparse
import json
import math
import statistics
import sys
from concurrent.futures import ThreadPoolExecutor


from . import hypergraph as hg
from .errors import (
    AttemptsExhausted, BudgetExhausted, ConsistencyError, DegenerateState, InvalidParameters,
    InvariantViolation, ParseError, StepFailure,
)
from .ode import CORRECTED, MODES, PAPER_LITERAL, RateConfig, solve
from .oracle import DEFAULT_BUDGET, exact_max_independent, exact_max_matching
from .pairing import INDEPENDENT, KINDS, MATCHING, ReplicateSummary, replicate, simulate
from .reference import run_reference
from .tables import PRINTED, nearest_valid_n

EXIT_USAGE = 2
EXIT_COMPUTE = 3
COMPARE_TOL = 0.003

_USAGE_ERRORS = (InvalidParameters, ParseError, ConsistencyError, OSError)
_COMPUTE_ERRORS = (DegenerateState, StepFailure, AttemptsExhausted, BudgetExhausted,
                   InvariantViolation)


class UsageError(Exception):
    pass


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def parse_range(text: str) -> list[int]:
    """``"3"`` -> [3]; ``"3:5"`` -> [3, 4, 5] (inclusive)."""
    try:
        if ":" in text:
            lo, hi = (int(t) for t in text.split(":", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or lo:hi, got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return list(range(lo, hi + 1))


def truncate3(value: float) -> float:
    """Cut to three decimals toward zero, the way the published tables are printed."""
    return math.floor(value * 1000 + 1e-9) / 1000


def _single(values: list[int], flag: str) -> int:
    if len(values) != 1:
        raise UsageError(f"{flag} takes a single value for this command")
    return values[0]


def _rate_config(args, k: int, d: int, process: str, mode: str | None = None) -> RateConfig:
    if mode is None:
        mode = PAPER_LITERAL if args.paper_literal else CORRECTED
    return RateConfig(k=k, d=d, process=process, mode=mode, h=args.step, eps_end=args.eps_end)


def _checked_n(args, k: int, d: int) -> int:
    n = args.n
    if args.adjust_n:
        adjusted = nearest_valid_n(n, k, d)
        if adjusted != n:
            _note(f"n adjusted from {n} to {adjusted} so that k divides d*n")
        return adjusted
    if (d * n) % k:
        raise InvalidParameters(
            f"k={k} does not divide d*n={d * n}; try -n {nearest_valid_n(n, k, d)} or --adjust-n")
    return n


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text)


def _read_hypergraph(path: str | None) -> hg.Hypergraph:
    name = "<stdin>" if path in (None, "-") else path
    if name == "<stdin>":
        text = sys.stdin.read()
    else:
        with open(path, encoding="ascii") as fh:
            text = fh.read()
    try:
        return hg.decode(text)
    except (ParseError, ConsistencyError) as exc:
        raise type(exc)(f"{name}: {exc}") from None


# ---------------------------------------------------------------------------
# commands

def cmd_solve(args) -> int:
    k = _single(args.k, "-k")
    d = _single(args.d, "-d")
    res = solve(_rate_config(args, k, d, args.process))
    if args.trajectory:
        _write(args.trajectory, res.trajectory_csv())
    _write(None, res.to_json() + "\n")
    return 0


def _table_cells(args):
    mode = PAPER_LITERAL if args.paper_literal else CORRECTED
    cells = [(k, d) for k in args.k for d in args.d]

    def one(cell):
        k, d = cell
        try:
            return solve(_rate_config(args, k, d, args.process, mode)).value, None
        except (InvalidParameters, *_COMPUTE_ERRORS) as exc:
            return None, f"{type(exc).__name__}: {exc}"

    with ThreadPoolExecutor(max_workers=max(1, args.workers)) as pool:
        results = list(pool.map(one, cells))
    return mode, cells, results


def _format_table(args, fmt, mode, cells, results) -> str:
    printed = PRINTED[args.process]
    if fmt == "json":
        rows = []
        for (k, d), (value, err) in zip(cells, results):
            rows.append({"k": k, "d": d, "value": value,
                         "truncated": None if value is None else truncate3(value),
                         "printed": printed.get((k, d)), "error": err})
        payload = {"process": args.process,
                   "mode": mode if args.process == INDEPENDENT else None,
                   "solver": {"h": args.step, "eps_end": args.eps_end}, "cells": rows}
        return json.dumps(payload) + "\n"
    if fmt == "csv":
        lines = ["k,d,value,truncated,printed,error"]
        for (k, d), (value, err) in zip(cells, results):
            pv = printed.get((k, d))
            lines.append(",".join([str(k), str(d),
                                   "" if value is None else repr(value),
                                   "" if value is None else f"{truncate3(value):.3f}",
                                   "" if pv is None else f"{pv:.3f}",
                                   "" if err is None else err.replace(",", ";")]))
        return "\n".join(lines) + "\n"
    lookup = dict(zip(cells, results))
    head = "|   | " + " | ".join(f"d={d}" for d in args.d) + " |"
    sep = "|---|" + "---|" * len(args.d)
    body = []
    for k in args.k:
        vals = []
        for d in args.d:
            value, _ = lookup[(k, d)]
            vals.append("fail" if value is None else f"{truncate3(value):.3f}")
        body.append(f"| k={k} | " + " | ".join(vals) + " |")
    return "\n".join([head, sep, *body]) + "\n"


def cmd_table(args) -> int:
    mode, cells, results = _table_cells(args)
    _write(None, _format_table(args, args.format, mode, cells, results))
    if args.json:
        _write(args.json, _format_table(args, "json", mode, cells, results))
    failed = [(c, e) for c, (_, e) in zip(cells, results) if e is not None]
    for (k, d), err in failed:
        _note(f"cell k={k} d={d} failed: {err}")
    return EXIT_COMPUTE if failed else 0


def _simple_summary(args, k, d, n) -> ReplicateSummary:
    seeds = [args.seed + i for i in range(1, args.reps + 1)]
    values = []
    for s in seeds:
        h = hg.generate_simple(k, d, n, seed=s, max_attempts=args.max_attempts)
        values.append(run_reference(h, args.process, seed=s).fraction)
    std = statistics.stdev(values) if len(values) > 1 else 0.0
    return ReplicateSummary(args.process, k, d, n, args.reps, statistics.mean(values), std,
                            tuple(seeds), tuple(values))


def cmd_simulate(args) -> int:
    k = _single(args.k, "-k")
    d = _single(args.d, "-d")
    n = _checked_n(args, k, d)
    if args.reps < 1:
        raise InvalidParameters("--reps must be >= 1")
    if args.simple:
        summary = _simple_summary(args, k, d, n)
    else:
        summary = replicate(k, d, n, args.process, args.reps, base_seed=args.seed,
                            workers=args.workers)
        if args.trajectory:
            first = simulate(k, d, n, args.process, seed=summary.seeds[0])
            _write(args.trajectory, first.trajectory_csv())
    _write(None, summary.to_json() + "\n")
    return 0


def cmd_compare(args) -> int:
    k = _single(args.k, "-k")
    d = _single(args.d, "-d")
    n = _checked_n(args, k, d)
    summary = replicate(k, d, n, args.process, args.reps, base_seed=args.seed,
                        workers=args.workers)
    modes = MODES if args.process == INDEPENDENT else (None,)
    entries = []
    for mode in modes:
        value = solve(_rate_config(args, k, d, args.process, mode or CORRECTED)).value
        dev = abs(value - summary.mean)
        entries.append({"mode": mode, "value": value, "deviation": dev,
                        "within_tolerance": dev <= COMPARE_TOL})
    best = min(entries, key=lambda e: e["deviation"])
    report = {"process": args.process, "k": k, "d": d, "n": n, "reps": args.reps,
              "sim_mean": summary.mean, "sim_std": summary.std, "tolerance": COMPARE_TOL,
              "modes": entries, "adjudicated": best["mode"],
              "agrees": best["within_tolerance"]}
    for e in entries:
        label = e["mode"] or args.process
        _note(f"{label}: ode={e['value']:.6f} sim={summary.mean:.6f} |diff|={e['deviation']:.2e}")
    _write(None, json.dumps(report) + "\n")
    return 0


def cmd_gen(args) -> int:
    k = _single(args.k, "-k")
    d = _single(args.d, "-d")
    if args.simple:
        h = hg.generate_simple(k, d, args.n, seed=args.seed, max_attempts=args.max_attempts)
    else:
        h = hg.generate_configuration(k, d, args.n, seed=args.seed)
    _write(args.output, hg.encode(h))
    return 0


def cmd_girth(args) -> int:
    g = hg.girth(_read_hypergraph(args.file))
    _write(None, ("acyclic" if g is hg.ACYCLIC else str(g)) + "\n")
    return 0


def cmd_dual(args) -> int:
    _write(args.output, hg.encode(hg.dual(_read_hypergraph(args.file))))
    return 0


def cmd_oracle(args) -> int:
    h = _read_hypergraph(args.file)
    fn = exact_max_matching if args.kind == MATCHING else exact_max_independent
    res = fn(h, budget=args.budget)
    payload = {"kind": args.kind, **res.to_dict()}
    _write(None, json.dumps(payload) + "\n")
    return 0


# ---------------------------------------------------------------------------
# parser

def _add_process(p, required=False):
    p.add_argument("--process", choices=KINDS, default=None if required else MATCHING,
                   required=required, help="which greedy process (default: matching)")


def _add_solver(p):
    p.add_argument("--step", type=float, default=1e-5, help="RK4 step size h (default 1e-5)")
    p.add_argument("--eps-end", type=float, default=1e-6,
                   help="stop when the remaining point mass drops below this (default 1e-6)")
    p.add_argument("--paper-literal", action="store_true",
                   help="independent process: use the uncorrected edge-class rates "
                        "(default: conservation-corrected)")


def _add_sim(p):
    p.add_argument("-n", type=int, default=1_000_000, help="vertex count (default 10^6)")
    p.add_argument("--reps", type=int, default=5, help="number of runs (default 5)")
    p.add_argument("--seed", type=int, default=0, help="base seed; run i uses seed+i")
    p.add_argument("--workers", type=int, default=1, help="threads for independent runs")
    p.add_argument("--adjust-n", action="store_true",
                   help="round n down to the nearest value with k | d*n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypergreedy",
        description="Degree-greedy matchings and independent sets in random regular "
                    "hypergraphs: simulation, rate equations and exact oracles.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="integrate the rate equations for one (k, d)")
    _add_process(p)
    p.add_argument("-k", type=parse_range, required=True)
    p.add_argument("-d", type=parse_range, required=True)
    _add_solver(p)
    p.add_argument("--trajectory", metavar="PATH", help="write the trajectory CSV here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("table", help="solve a grid of (k, d) cells")
    _add_process(p)
    p.add_argument("-k", type=parse_range, default=[3, 4, 5], help="range lo:hi (default 3:5)")
    p.add_argument("-d", type=parse_range, default=[2, 3, 4, 5], help="range lo:hi (default 2:5)")
    _add_solver(p)
    p.add_argument("--format", choices=("json", "csv", "md"), default="md")
    p.add_argument("--json", metavar="PATH", help="also write full-precision JSON here")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("simulate", help="replicate the process on the pairing model")
    _add_process(p)
    p.add_argument("-k", type=parse_range, required=True)
    p.add_argument("-d", type=parse_range, required=True)
    _add_sim(p)
    p.add_argument("--simple", action="store_true",
                   help="run on explicit simple hypergraphs instead of the pairing model")
    p.add_argument("--max-attempts", type=int, default=1000)
    p.add_argument("--trajectory", metavar="PATH", help="write the first run's trajectory CSV")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="rate equations against simulation")
    _add_process(p)
    p.add_argument("-k", type=parse_range, required=True)
    p.add_argument("-d", type=parse_range, required=True)
    _add_sim(p)
    _add_solver(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("gen", help="write a random hypergraph file")
    p.add_argument("-k", type=parse_range, required=True)
    p.add_argument("-d", type=parse_range, required=True)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--simple", action="store_true", help="reject draws with loops or multi-edges")
    p.add_argument("--max-attempts", type=int, default=1000)
    p.add_argument("-o", "--output", metavar="PATH")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("girth", help="Berge girth of a hypergraph file")
    p.add_argument("file", nargs="?", help="input file (default stdin)")
    p.set_defaults(func=cmd_girth)

    p = sub.add_parser("dual", help="dual of a hypergraph file")
    p.add_argument("file", nargs="?", help="input file (default stdin)")
    p.add_argument("-o", "--output", metavar="PATH")
    p.set_defaults(func=cmd_dual)

    p = sub.add_parser("oracle", help="exact maximum matching or independent set")
    p.add_argument("file", nargs="?", help="input file (default stdin)")
    p.add_argument("--kind", choices=KINDS, default=INDEPENDENT)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="search node limit")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on bad usage
    try:
        return args.func(args)
    except (UsageError, *_USAGE_ERRORS) as exc:
        _note(f"error: {exc}")
        return EXIT_USAGE
    except _COMPUTE_ERRORS as exc:
        _note(f"computation failed: {type(exc).__name__}: {exc}")
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
