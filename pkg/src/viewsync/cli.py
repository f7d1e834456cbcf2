"""Command line: run a scenario file over one seed or a range, check, report.

Exit status is 0 when every non-vacuous check passed, 1 on any failure and
2 on a configuration error.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Optional

from .checker import check_trace
from .report import Report, build_report, emit_summary
from .runner import PROTOCOLS, run
from .scenario import ScenarioError, load_scenario
from .sim import ConfigError

log = logging.getLogger("viewsync")


def parse_seeds(text: str) -> list[int]:
    lo, sep, hi = text.partition("..")
    if not sep:
        raise ConfigError(f"--seeds expects A..B, got {text!r}")
    a, b = int(lo), int(hi)
    if b < a:
        raise ConfigError(f"empty seed range {text!r}")
    return list(range(a, b + 1))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="viewsync", description=__doc__.split("\n")[0])
    p.add_argument("--scenario", required=True, metavar="PATH", help="scenario YAML file")
    seeds = p.add_mutually_exclusive_group()
    seeds.add_argument("--seed", type=int, metavar="N", help="override the scenario seed")
    seeds.add_argument("--seeds", metavar="A..B", help="run every seed in the inclusive range")
    p.add_argument("--out", metavar="DIR", help="write traces and reports here")
    p.add_argument("--no-check", action="store_true", help="only run; skip trace checking")
    p.add_argument("--protocol", choices=sorted(PROTOCOLS), help="override the scenario protocol")
    return p


def run_one(scn, out: Optional[Path], check: bool) -> Report:
    result = run(scn)
    trace = result.trace
    seed = scn.config.seed
    if out is not None:
        trace.dump(out / f"trace-{scn.protocol}-{seed}.jsonl")
    res = check_trace(trace) if check else None
    rep = build_report(scn, result.status, res, trace)
    if out is not None:
        (out / f"report-{scn.protocol}-{seed}.json").write_text(rep.to_json() + "\n")
        (out / f"report-{scn.protocol}-{seed}.txt").write_text(rep.to_text() + "\n")
    log.info("seed %s: %s, %d trace records", seed, result.status, len(trace))
    return rep


def main(argv: Optional[list[str]] = None) -> int:
    logging.basicConfig(level=os.environ.get("VIEWSYNC_LOG", "WARNING").upper(),
                        format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        scn = load_scenario(args.scenario)
        if args.protocol:
            scn = scn.with_protocol(args.protocol)
            problems = scn.problems()
            if problems:
                raise ScenarioError(problems)
        seeds = parse_seeds(args.seeds) if args.seeds else [args.seed if args.seed is not None
                                                               else scn.config.seed]
    except OSError as exc:
        print(f"error: cannot read scenario: {exc}", file=sys.stderr)
        return 2
    except ScenarioError as exc:
        for e in exc.errors:
            print(f"error: {e}", file=sys.stderr)
        return 2
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    out = None
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
    reports = []
    try:
        for seed in seeds:
            reports.append(run_one(scn.with_seed(seed), out, not args.no_check))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if len(reports) == 1:
        print(reports[0].to_text())
    summary = emit_summary(reports)
    print(summary)
    if out is not None:
        (out / "summary.txt").write_text(summary + "\n")
    return max(r.exit_code for r in reports)


if __name__ == "__main__":
    sys.exit(main())
