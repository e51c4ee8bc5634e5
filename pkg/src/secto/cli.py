"""Command line entry point: ``secto <subcommand> --input s.json --out r.json``."""
from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .harness import ScenarioError, dumps_report, load_scenario, run

SUBCOMMANDS = {
    "verify": "sectional-verify",
    "spectrum": "spectrum",
    "flow": "flow",
    "holonomy": "holonomy",
    "projective": "projective",
    "uniqueness": "uniqueness",
}


def _execute(args):
    path, kind, seed, timing = args
    try:
        sc = load_scenario(Path(path).read_text(), kind)
    except ScenarioError as exc:
        return path, None, exc.errors, 0.0
    if seed is not None:
        sc.seed = seed
    t0 = time.perf_counter()
    report = run(sc)
    elapsed = time.perf_counter() - t0
    if timing:
        report["runtime_s"] = elapsed
    return path, report, None, elapsed


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="secto", description="Run sectional-operator verification scenarios.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, kind in SUBCOMMANDS.items():
        sp = sub.add_parser(name, help=f"run a {kind} scenario")
        sp.add_argument("--input", nargs="+", required=True, help="scenario JSON file(s)")
        sp.add_argument("--out", help="report file; a JSON list when several inputs are given")
        sp.add_argument("--seed", type=int, help="override the scenario seed")
        sp.add_argument("--parallel", action="store_true", help="run several inputs in worker processes")
        sp.add_argument("--timing", action="store_true", help="include wall-clock runtime in the report")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    kind = SUBCOMMANDS[args.command]
    jobs = [(p, kind, args.seed, args.timing) for p in args.input]
    if args.parallel and len(jobs) > 1:
        with ProcessPoolExecutor() as pool:
            outcomes = list(pool.map(_execute, jobs))
    else:
        outcomes = [_execute(j) for j in jobs]
    code = 0
    reports = []
    for path, report, errors, elapsed in outcomes:
        if errors is not None:
            for where, msg in errors:
                print(f"SCHEMA {path} {where}: {msg}", file=sys.stderr)
            code = 2
            continue
        status = "PASS" if report["pass"] else "FAIL"
        failed = [k for k, ok in report["verdicts"].items() if not ok]
        extra = f" failed: {', '.join(failed)}" if failed else ""
        if "error" in report:
            extra = f" error: {report['error']['type']}: {report['error']['message']}"
        print(f"{status} {args.command} {path} ({elapsed:.2f} s){extra}")
        if not report["pass"] and code == 0:
            code = 1
        reports.append(report)
    if args.out and reports:
        body = reports[0] if len(args.input) == 1 else reports
        Path(args.out).write_text(dumps_report(body))
    return code


if __name__ == "__main__":
    sys.exit(main())
