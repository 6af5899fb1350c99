"""Command-line front end: screen, sweep, optimal-power, validate."""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .experiments import config_from_ini, find_optimal_power, run_screening, run_sweep
from .selection import SelectionResult
from .validation import run_validation


def _add_config(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", required=True, help="sectioned key = value config file")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="seqsel",
                                description="sequence-selection fiber capacity experiments")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("screen", help="run the screening burst, persist the result")
    _add_config(s)
    s.add_argument("--power-dbm", type=float, default=None,
                   help="screening launch power (default: config, else unselected optimum)")
    s.add_argument("--out", default=None, help="output archive (default: config)")

    s = sub.add_parser("sweep", help="run the (power, eta, equalization) sweep to CSV")
    _add_config(s)
    s.add_argument("--screening", default=None,
                   help="reuse a stored screening archive instead of re-screening")
    s.add_argument("--out", default=None, help="output CSV (default: config)")

    s = sub.add_parser("optimal-power", help="report the unselected optimal launch power")
    _add_config(s)

    sub.add_parser("validate", help="run the fast invariant battery")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "validate":
        return 0 if run_validation() else 1
    cfg = config_from_ini(args.config)
    if args.command == "optimal-power":
        p = find_optimal_power(cfg)
        print(f"{p:g}")
        return 0
    if args.command == "screen":
        power = args.power_dbm
        if power is None:
            power = cfg.screening_power_dbm
        if power is None:
            power = find_optimal_power(cfg)
        res = run_screening(cfg, power)
        out = args.out or cfg.screening_file
        res.save(out)
        print(f"screened {res.num_tested} sequences at {power:g} dBm -> {out}")
        return 0
    # sweep
    selres = None
    if args.screening is not None:
        selres = SelectionResult.load(args.screening)
    out = args.out or cfg.output_csv
    rows = run_sweep(cfg, selres=selres, csv_path=out)
    print(f"wrote {len(rows)} rows -> {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
