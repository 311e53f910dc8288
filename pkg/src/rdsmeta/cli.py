"""Command-line front end: ``rds <experiment> [options]``.

Exit codes: 0 all criteria pass, 1 a criterion fails, 2 configuration
error, 3 skipped for a missing prerequisite.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import EXPERIMENTS, ExperimentConfig, default_config_path
from .errors import ConfigError
from .io import format_number

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_SKIPPED = 0, 1, 2, 3

HELP = {
    "example2": "eigenfunction series for doubling-map cocycles",
    "example3": "metastable sets of a Markov interval-map cocycle (needs --map-spec)",
    "example4": "Lyapunov exponents and subshift decomposition of a random SFT",
    "escape": "doubling-map escape-rate oracle",
    "suite": "randomized escape-rate and random-SFT property suites",
}


def _fit_window(text):
    parts = text.replace(",", " ").split()
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected two integers LO,HI")
    try:
        return [int(parts[0]), int(parts[1])]
    except ValueError:
        raise argparse.ArgumentTypeError("expected two integers LO,HI") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rds", description="Random dynamical systems experiments.")
    sub = p.add_subparsers(dest="experiment", required=True, metavar="EXPERIMENT")
    for name in EXPERIMENTS:
        s = sub.add_parser(name, help=HELP[name], description=HELP[name])
        s.add_argument("--config", type=Path, help="JSON experiment config (default: packaged config)")
        s.add_argument("--system", type=Path, help="base/matrix/map system file")
        s.add_argument("--map-spec", dest="map_spec", type=Path, help="interval map-spec JSON")
        s.add_argument("--horizon", type=int)
        s.add_argument("-N", dest="N", type=int, help="backward window length")
        s.add_argument("-M", dest="M", type=int, help="forward window length")
        s.add_argument("--rho", type=float, nargs="+", help="target exponents")
        s.add_argument("--n-trunc", dest="n_trunc", type=int, help="series truncation index")
        s.add_argument("--samples", type=int, help="Monte Carlo sample count")
        s.add_argument("--seed", type=int)
        s.add_argument("--fit-window", dest="fit_window", type=_fit_window, metavar="LO,HI")
        s.add_argument("--instances", type=int, help="instances per randomized suite")
        s.add_argument("--entropy-horizon", dest="entropy_horizon", type=int)
        s.add_argument("--output-dir", dest="output_dir", type=Path, help="artifact directory")
        s.add_argument("--quiet", action="store_true", help="print only the status line")
    return p


def _summary(report) -> list:
    lines = []
    for name, q in sorted(report.quantities.items()):
        v = q["value"]
        if isinstance(v, (int, float)) and not isinstance(v, bool):
            lines.append(f"  {name:<40s} {format_number(v)}")
    for name, c in sorted(report.criteria.items()):
        lines.append(f"  [{'PASS' if c['passed'] else 'FAIL'}] {name}")
    return lines


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {k: getattr(args, k) for k in ("system", "map_spec", "horizon", "N", "M", "rho", "n_trunc",
                                               "samples", "seed", "fit_window", "instances",
                                               "entropy_horizon", "output_dir")}
    try:
        path = args.config or default_config_path(args.experiment)
        cfg = ExperimentConfig.load(path, **overrides)
        if cfg.experiment != args.experiment:
            raise ConfigError(f"config is for {cfg.experiment!r}, not {args.experiment!r}")
        from .pipelines import run

        report = run(cfg, cfg.output_dir)
    except ConfigError as exc:
        print(f"rds: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if not args.quiet:
        print("\n".join(_summary(report)))
    line = f"{report.experiment}: {report.status}"
    if report.reason:
        line += f" ({report.reason})"
    print(line)
    print(f"report: {Path(cfg.output_dir) / 'report.json'}")
    return report.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
