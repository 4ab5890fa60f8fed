"""Command-line entry point: ``regfid sweep | props | describe``."""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .errors import RegfidError
from .experiments import (
    MODES,
    PRESETS,
    ExperimentConfig,
    describe_channel,
    format_csv,
    load_channel_source,
    monotone_violations,
    run_sweep,
)
from .optimize import OptimizerOptions
from .properties import format_report, run_properties


def _add_channel_flags(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--channel", metavar="PATH", help="channel description file (YAML)")
    src.add_argument("--preset", choices=sorted(PRESETS))


def _parse_modes(text: str) -> tuple[str, ...]:
    modes = tuple(m.strip() for m in text.split(",") if m.strip())
    bad = [m for m in modes if m not in MODES]
    if bad or not modes:
        raise argparse.ArgumentTypeError(f"unknown modes {bad}; choose from {','.join(MODES)}")
    return modes


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="regfid", description=__doc__)
    parser.add_argument("-q", "--quiet", action="store_true", help="suppress progress messages on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="regularised fidelities over a range of n, as CSV")
    _add_channel_flags(sweep)
    sweep.add_argument("--n-min", type=int)
    sweep.add_argument("--n-max", type=int)
    sweep.add_argument("--modes", type=_parse_modes, default=MODES, help="comma list from " + ",".join(MODES))
    sweep.add_argument("--full-max-n", type=int, default=6, help="largest n for the full-space route")
    sweep.add_argument("--restarts", type=int, default=OptimizerOptions.restarts)
    sweep.add_argument("--max-iters", type=int, default=OptimizerOptions.max_iters)
    sweep.add_argument("--grad-tol", type=float, default=OptimizerOptions.grad_tol)
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    sweep.add_argument("--no-timings", action="store_true", help="leave seconds_* columns empty")
    sweep.add_argument("--out", metavar="CSV", help="output path (default: stdout)")

    props = sub.add_parser("props", help="run the randomized property suite")
    props.add_argument("--seed", type=int, default=0)
    props.add_argument("--trials", type=int, help="override every property's trial count")
    props.add_argument("--only", action="append", metavar="NAME", help="run only this property (repeatable)")
    props.add_argument("--out", metavar="PATH", help="report path (default: stdout)")

    describe = sub.add_parser("describe", help="print a channel summary")
    _add_channel_flags(describe)
    return parser


def _write(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _sweep(args) -> int:
    channel, source = load_channel_source(args.preset, args.channel)
    opts = OptimizerOptions(restarts=args.restarts, max_iters=args.max_iters, grad_tol=args.grad_tol, seed=args.seed)
    common = dict(modes=args.modes, options=opts, full_max_n=args.full_max_n, jobs=args.jobs,
                  timings=not args.no_timings)
    if args.preset:
        config = ExperimentConfig.from_preset(args.preset, n_min=args.n_min, n_max=args.n_max, **common)
    else:
        config = ExperimentConfig(channel, n_min=args.n_min or 1, n_max=args.n_max or 6, source=source, **common)
    rows = run_sweep(config)
    _write(format_csv(rows, timings=config.timings), args.out)
    if args.preset:
        bad = monotone_violations(rows)
        if bad:
            print(f"error: F_symmetric decreases beyond 1e-7 at n={bad}", file=sys.stderr)
            return 3
    return 0


def _props(args) -> int:
    outcomes = run_properties(seed=args.seed, trials=args.trials, names=args.only)
    _write(format_report(outcomes), args.out)
    return 0 if all(o.passed for o in outcomes) else 1


def _describe(args) -> int:
    channel, _ = load_channel_source(args.preset, args.channel)
    sys.stdout.write(describe_channel(channel))
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, stream=sys.stderr,
                        format="%(asctime)s %(name)s: %(message)s")
    handler = {"sweep": _sweep, "props": _props, "describe": _describe}[args.command]
    try:
        return handler(args)
    except (RegfidError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
