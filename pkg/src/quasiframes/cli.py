"""Command line entry point: ``quasiframes run | scan-lambda | list-models``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import QuasiFramesError, SchemaError
from .scenario import (
    CHECKS,
    CONDITIONS,
    MODELS,
    bundled_scenarios,
    exit_code,
    load_scenario,
    report_csv,
    report_json,
    run_scenario,
    scan_csv,
    scan_scenario,
)

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def _resolve(path: str) -> Path:
    p = Path(path)
    if not p.exists():
        bundled = bundled_scenarios()
        key = p.name[:-5] if p.name.endswith(".json") else p.name
        if key in bundled:
            return bundled[key]
    return p


def _write(text: str, dest: str | None) -> None:
    if dest is None or dest == "-":
        sys.stdout.write(text)
    else:
        Path(dest).write_text(text)


def cmd_run(args) -> int:
    try:
        data = load_scenario(_resolve(args.file))
        report = run_scenario(data, timings=args.timings)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except QuasiFramesError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    _write(report_json(report), args.out)
    if args.csv:
        _write(report_csv(report), args.csv)
    if args.out not in (None, "-"):
        for r in report["checks"]:
            print(f"{r['status'].upper():5s} {r['name']}", file=sys.stderr)
    return exit_code(report)


def cmd_scan(args) -> int:
    try:
        data = load_scenario(_resolve(args.file))
        scan = data.get("scan", {})
        lo = float(args.lam_from if args.lam_from is not None else scan.get("from", "nan"))
        hi = float(args.lam_to if args.lam_to is not None else scan.get("to", "nan"))
        steps = args.steps if args.steps is not None else scan.get("steps")
        if steps is None or lo != lo or hi != hi:
            raise SchemaError("scan range needs --from, --to and --steps (or a 'scan' block in the scenario)")
        rows = scan_scenario(data, lo, hi, int(steps))
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except QuasiFramesError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    _write(scan_csv(rows), args.out)
    return EXIT_OK


def cmd_list(args) -> int:
    listing = {
        "models": {name: {"params": m.params, "spaces": list(m.spaces), "anchor": m.anchor} for name, m in MODELS.items()},
        "conditions": sorted(CONDITIONS),
        "checks": {k: v[1] for k, v in CHECKS.items()},
        "bundled_scenarios": sorted(bundled_scenarios()),
    }
    if args.json:
        sys.stdout.write(json.dumps(listing, indent=2, sort_keys=True) + "\n")
        return EXIT_OK
    for name, m in MODELS.items():
        params = ", ".join(f"{k}: {t}" for k, t in m.params.items())
        print(f"{name}  [{'/'.join(m.spaces)}]  ({params})")
        print(f"    {m.anchor}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="quasiframes", description="Verify perturbation scenarios for dual families.")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario and emit a JSON report")
    run.add_argument("file", help="scenario JSON (path or bundled scenario name)")
    run.add_argument("--out", help="report path (default: stdout)")
    run.add_argument("--csv", help="also write a flat CSV of the checks")
    run.add_argument("--timings", action="store_true", help="record per-check runtimes (breaks byte-identity)")
    run.set_defaults(func=cmd_run)

    scan = sub.add_parser("scan-lambda", help="tabulate alpha(lambda) on a real grid")
    scan.add_argument("file")
    scan.add_argument("--from", dest="lam_from", type=float)
    scan.add_argument("--to", dest="lam_to", type=float)
    scan.add_argument("--steps", type=int)
    scan.add_argument("--out", help="CSV path (default: stdout)")
    scan.set_defaults(func=cmd_scan)

    ls = sub.add_parser("list-models", help="list generators, conditions and check kinds")
    ls.add_argument("--json", action="store_true")
    ls.set_defaults(func=cmd_list)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
