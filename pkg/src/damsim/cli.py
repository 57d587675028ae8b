"""Command line front end for sweeps, convergence traces, and validation."""

from __future__ import annotations

import argparse
import logging
import sys

from .experiments import (
    SCHEMES,
    SweepSpec,
    default_config,
    load_config,
    run_convergence_trace,
    run_sweep,
    run_validate,
    write_trace_csv,
)

__all__ = ["main"]


def _parse_schemes(text: str) -> tuple[str, ...]:
    names = tuple(part.strip() for part in text.split(",") if part.strip())
    unknown = [n for n in names if n not in SCHEMES]
    if unknown:
        raise argparse.ArgumentTypeError(
            "unknown scheme(s) %s; choose from %s" % (", ".join(unknown), ", ".join(SCHEMES))
        )
    return names


def _parse_values(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON scenario config (powers in dBm)")
    sub.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    sub.add_argument("--out", default="-", help="output file, '-' for stdout (default)")


def _add_sweep_args(sub: argparse.ArgumentParser, default_values: str) -> None:
    _add_common(sub)
    sub.add_argument("--trials", type=int, default=200, help="trials per grid point (default 200)")
    sub.add_argument(
        "--schemes",
        type=_parse_schemes,
        default=SCHEMES,
        help="comma-separated schemes (default all: %s)" % ",".join(SCHEMES),
    )
    sub.add_argument("--workers", type=int, default=1, help="worker processes (default 1)")
    sub.add_argument(
        "--values",
        type=_parse_values,
        default=_parse_values(default_values),
        help="comma-separated sweep values (default %s)" % default_values,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="damsim",
        description="Multi-user delay alignment simulator for mmWave massive MIMO downlink",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sweep_power = subs.add_parser(
        "sweep-power", help="mean sum rate versus transmit power (dBm)"
    )
    _add_sweep_args(sweep_power, "10,20,30")

    sweep_paths = subs.add_parser(
        "sweep-paths", help="mean sum rate versus per-UE path count"
    )
    _add_sweep_args(sweep_paths, "1,2,3,4,5,6,7,8,9,10")

    convergence = subs.add_parser(
        "convergence", help="amplitude-optimization objective trace on one channel draw"
    )
    _add_common(convergence)

    validate = subs.add_parser(
        "validate", help="run internal consistency checks on random instances"
    )
    validate.add_argument("--config", help="JSON scenario config (powers in dBm)")
    validate.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    validate.add_argument("--trials", type=int, default=3, help="instances to check (default 3)")
    return parser


def _write(out: str, emit) -> None:
    if out == "-":
        emit(sys.stdout)
    else:
        emit(out)


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    config = load_config(args.config) if args.config else default_config()

    if args.command in ("sweep-power", "sweep-paths"):
        variable = "power_dbm" if args.command == "sweep-power" else "num_paths"
        values = args.values if variable == "power_dbm" else tuple(int(v) for v in args.values)
        spec = SweepSpec(
            variable=variable,
            values=values,
            base=config,
            trials=args.trials,
            master_seed=args.seed,
            schemes=args.schemes,
        )
        result = run_sweep(spec, workers=args.workers)
        _write(args.out, result.to_csv)
        return 0

    if args.command == "convergence":
        traces = run_convergence_trace(config, seed=args.seed)
        _write(args.out, lambda target: write_trace_csv(traces, target))
        return 0

    if args.command == "validate":
        checks = run_validate(config, seed=args.seed, trials=args.trials)
        failed = 0
        for check in checks:
            status = "PASS" if check.passed else "FAIL"
            if not check.passed:
                failed += 1
            print("%s %s (%s)" % (status, check.name, check.detail))
        print("%d/%d checks passed" % (len(checks) - failed, len(checks)))
        return 0 if failed == 0 else 1

    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
