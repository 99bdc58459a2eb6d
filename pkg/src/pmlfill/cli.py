"""Command-line front end: experiments plus ad hoc Matrix Market factoring.

Exit status is 0 when the run succeeds, 1 when an experiment records
failures (e.g. a fill reduction that should be positive is not), and 2 for
configuration or usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .experiments import ExperimentConfig, run_experiment
from .lu import fill_report
from .sparse import read_matrix_market


def _parse_override(text: str):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"override must look like key=value, got {text!r}")
    key, raw = text.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


def _load_config(experiment: str, args) -> ExperimentConfig:
    data = {}
    if args.config:
        with open(args.config) as fh:
            data = json.load(fh)
    data["experiment"] = experiment
    for key, value in args.set or []:
        data[key] = value
    if args.out:
        data["output_dir"] = args.out
    return ExperimentConfig.from_dict(data)


def _add_experiment_parser(sub, name: str, help_text: str):
    p = sub.add_parser(name, help=help_text)
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--set", action="append", type=_parse_override, metavar="KEY=VALUE",
                   help="override a config key (value parsed as JSON when possible)")
    p.add_argument("--out", help="output directory (overrides config)")
    return p


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pmlfill",
        description="FDFD driven/eigen experiments measuring LU fill-in under "
                    "periodic, Dirichlet, and modified Dirichlet PML backings")
    parser.add_argument("--version", action="version", version=f"pmlfill {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    _add_experiment_parser(sub, "driven-compare",
                           "driven field comparison between PML backings")
    _add_experiment_parser(sub, "fill-scan",
                           "nnz(L) reduction across grid sizes")
    _add_experiment_parser(sub, "coupling-table",
                           "grid coupling counts vs analytic formulas")
    _add_experiment_parser(sub, "bands",
                           "waveguide band structures and pencil fill comparison")

    pf = sub.add_parser("factor", help="factor a Matrix Market file, print a fill report")
    pf.add_argument("matrix", help="path to a Matrix Market coordinate file")
    pf.add_argument("--ordering", default="amd",
                    choices=("natural", "exact_md", "amd"))
    pf.add_argument("--pivoting", default="none", choices=("none", "threshold"))
    pf.add_argument("--bc", default="", help="label recorded in the report")
    pf.add_argument("--out", help="write the report as JSON here")

    args = parser.parse_args(argv)

    if args.command == "factor":
        try:
            matrix = read_matrix_market(args.matrix)
            report = fill_report(matrix, args.ordering, bc=args.bc,
                                 pivoting=args.pivoting)
        except Exception as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        print(report.CSV_HEADER)
        print(report.csv_row())
        if args.out:
            with open(args.out, "w") as fh:
                json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
                fh.write("\n")
        return 0

    try:
        cfg = _load_config(args.command, args)
    except (ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    report = run_experiment(cfg)
    for key, value in sorted(report.metrics.items()):
        print(f"{key}: {value}")
    if report.failures:
        for failure in report.failures:
            print(f"FAIL: {failure}", file=sys.stderr)
        return 1
    print(f"report: {cfg.output_dir}/report.json")
    return 0


if __name__ == "__main__":
    sys.exit(main())
