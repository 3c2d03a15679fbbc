"""Command line interface: ``qnep {run,perturbation,maxwellian,aoc}``.

Exit codes: 0 when every run completed, 2 on blow-up, 1 on any error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .errors import QnepError
from .harness import (
    experiment_aoc,
    experiment_maxwellian,
    experiment_perturbation,
    parse_config,
    write_aoc_csv,
    write_report,
)

EXIT_OK, EXIT_ERROR, EXIT_BLOWUP = 0, 1, 2

_OVERRIDES = {
    "eps": "eps",
    "n_cells": "n_cells",
    "scheme": "scheme",
    "tableau": "tableau",
    "t_end": "t_end",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qnep", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "run": "run the experiment named in the config (default: perturbation)",
        "perturbation": "small velocity perturbation of a quasineutral state",
        "maxwellian": "short-wavelength density perturbation of a fluid at rest",
        "aoc": "asymptotic order of convergence sweep over nested grids",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", type=Path, help="flat JSON config file")
        p.add_argument("--eps", type=float)
        p.add_argument("--n-cells", type=int, dest="n_cells",
                       help="cell count (for aoc: the coarsest N of the sweep)")
        p.add_argument("--scheme", choices=("si_ap", "classical"))
        p.add_argument("--tableau")
        p.add_argument("--t-end", type=float, dest="t_end")
        p.add_argument("--out", type=Path, help="output directory (default: $QNEP_OUT_DIR or .)")
    return parser


def _load(args) -> dict:
    raw = {}
    if args.config is not None:
        try:
            raw = json.loads(args.config.read_text())
        except OSError as exc:
            raise QnepError(f"cannot read {args.config}: {exc.strerror or exc}") from exc
        except json.JSONDecodeError as exc:
            raise QnepError(f"{args.config}: invalid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise QnepError(f"{args.config}: config must be a JSON object")
    if args.command != "run":
        raw["experiment"] = args.command
    for attr, key in _OVERRIDES.items():
        value = getattr(args, attr)
        if value is None:
            continue
        if key == "n_cells" and raw.get("experiment") == "aoc":
            length = len(raw.get("n_list", (80, 160, 320, 640)))
            raw["n_list"] = [value * 2**j for j in range(length)]
        raw[key] = value
    return raw


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = args.out or Path(os.environ.get("QNEP_OUT_DIR", "."))
    try:
        cfg = parse_config(_load(args))
        if cfg.experiment == "aoc":
            out.mkdir(parents=True, exist_ok=True)
            modes = ("fine_grid", "zero_potential") if cfg.reference == "both" else (cfg.reference,)
            for mode in modes:
                table = experiment_aoc(cfg, mode)
                name = "aoc.csv" if len(modes) == 1 else f"aoc_{mode}.csv"
                write_aoc_csv(table, out / name)
                for row in table.rows:
                    rate = "" if row.aoc is None else f"{row.aoc:.2f}"
                    print(f"{mode} N={row.n} l2_error_phi={row.error:.4e} aoc={rate}")
            return EXIT_OK
        driver = experiment_perturbation if cfg.experiment == "perturbation" else experiment_maxwellian
        report = driver(cfg)
        paths = write_report(report, out, cfg.experiment)
        if report.status == "blow_up":
            print(f"blow_up at t={report.blowup_time:.6g} after {report.n_steps} steps")
            return EXIT_BLOWUP
        if report.status != "completed":
            print(f"error: {report.message}", file=sys.stderr)
            return EXIT_ERROR
        print(f"completed t={report.final.t:.6g} steps={report.n_steps} wrote {', '.join(map(str, paths))}")
        return EXIT_OK
    except (QnepError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
