"""Command line entry point: ``qmetro run|design|qfi-sweep|version``."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import __version__
from .errors import NumericalError, ScenarioError
from .runner import design_json, emit, gamma_tag, qfi_sweep, run, run_cell, sweep_csv
from .scenario import parse_scenario

EXIT_OK = 0
EXIT_SCENARIO = 1
EXIT_NUMERICAL = 2

log = logging.getLogger("qmetro")


def thread_count() -> int:
    raw = os.environ.get("QMETRO_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        log.warning("ignoring non-integer QMETRO_THREADS=%r", raw)
        return 1
    if n <= 0:
        return os.cpu_count() or 1
    return n


def cmd_run(args) -> int:
    scenario = parse_scenario(args.config)
    report = run(scenario, workers=thread_count())
    for path in emit(report, args.out):
        print(path)
    return EXIT_OK


def cmd_design(args) -> int:
    scenario = parse_scenario(args.config)
    workers = thread_count()
    out = []
    for g in scenario.gammas:
        for mode in scenario.modes:
            cell = run_cell(scenario, g, mode, workers)
            d, counts = (cell.ac, cell.counts_ac) if args.objective == "avg" else (cell.wc, cell.counts_wc)
            out.append({"gamma": g, "mode": mode, **design_json(d, counts)})
    print(json.dumps(out, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_qfi_sweep(args) -> int:
    scenario = parse_scenario(args.config)
    for g in scenario.gammas:
        print(f"# gamma={gamma_tag(g)}")
        sys.stdout.write(sweep_csv(qfi_sweep(scenario, g)))
    return EXIT_OK


def cmd_version(args) -> int:
    print(f"qmetro {__version__}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qmetro", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run every (gamma, mode) cell and write artifacts")
    r.add_argument("--config", required=True)
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_run)

    d = sub.add_parser("design", help="print optimal designs as JSON")
    d.add_argument("--config", required=True)
    d.add_argument("--objective", choices=("avg", "worst"), default="avg")
    d.set_defaults(func=cmd_design)

    q = sub.add_parser("qfi-sweep", help="print QFI against input angle as CSV")
    q.add_argument("--config", required=True)
    q.set_defaults(func=cmd_qfi_sweep)

    v = sub.add_parser("version")
    v.set_defaults(func=cmd_version)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"qmetro: invalid scenario: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    except NumericalError as exc:
        print(f"qmetro: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
