"""Command line entry points.

Four verbs: ``run`` executes an experiment described by a TOML config,
``fronts`` precomputes analytical reference fronts into the disk cache,
``plot-data`` exports plot-ready CSVs, and ``rank`` prints Friedman mean
ranks for a finished experiment.  Exit status is 0 on success and 2 on any
error, including partially failed experiments.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .dynamics import Schedule
from .harness import (
    export_plot_data,
    load_config,
    run_experiment,
)
from .matrices import MatrixGroup
from .metrics import friedman
from .problems import make_instance, reference_front


def _add_instance_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--problem", required=True, help="selection string, e.g. GTS3:group2")
    parser.add_argument("--t", type=float, action="append", default=None,
                        metavar="T", help="time value; repeatable")
    parser.add_argument("--count", type=int, default=None, help="points per front")
    parser.add_argument("--dimension", type=int, default=10)
    parser.add_argument("--group", type=int, default=1, choices=(1, 2, 3))
    parser.add_argument("--schedule", default="regular",
                        choices=tuple(s.value for s in Schedule))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gtsbench",
        description="benchmark toolkit for continuous dynamic multiobjective optimization",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute an experiment from a TOML config")
    p_run.add_argument("--config", required=True, help="path to the TOML config")
    p_run.add_argument("--parallel", type=int, default=None,
                       help="worker processes; overrides the config")
    p_run.add_argument("--only", default=None,
                       help="run only cells whose id contains this substring")
    p_run.add_argument("--output-dir", default=None,
                       help="overrides the config's output directory")

    p_fronts = sub.add_parser("fronts", help="precompute analytical fronts into the cache")
    _add_instance_args(p_fronts)
    p_fronts.add_argument("--out", default=None,
                          help="also write the sampled points to this CSV")

    p_plot = sub.add_parser("plot-data", help="export plot-ready CSV data")
    p_plot.add_argument("--kind", required=True,
                        choices=("pf_cloud", "ps_cloud", "bar_dmigd", "bar_dmhv",
                                 "bar_dmms", "bar_runtime", "rank_chart"))
    p_plot.add_argument("--out", required=True, help="output CSV path")
    p_plot.add_argument("--results", default=None,
                        help="experiment output directory (bar/rank kinds)")
    p_plot.add_argument("--problem", default=None, help="selection string (cloud kinds)")
    p_plot.add_argument("--t", type=float, action="append", default=None,
                        metavar="T", help="time value; repeatable (cloud kinds)")
    p_plot.add_argument("--count", type=int, default=None)
    p_plot.add_argument("--dimension", type=int, default=10)
    p_plot.add_argument("--group", type=int, default=1, choices=(1, 2, 3))
    p_plot.add_argument("--schedule", default="regular",
                        choices=tuple(s.value for s in Schedule))

    p_rank = sub.add_parser("rank", help="Friedman mean ranks for a finished experiment")
    p_rank.add_argument("--input", required=True,
                        help="experiment output directory containing results.csv")
    p_rank.add_argument("--out", default=None, help="also write the table to this CSV")
    return parser


def _cmd_run(args) -> int:
    config = load_config(args.config)
    result = run_experiment(
        config,
        only=args.only,
        parallel=args.parallel,
        output_dir=args.output_dir,
    )
    print(f"completed {len(result.records)} runs -> {result.output_dir}")
    if result.failures:
        print(f"{len(result.failures)} cells failed:", file=sys.stderr)
        for cell, _ in result.failures:
            print(f"  {cell}", file=sys.stderr)
        print(f"tracebacks in {result.output_dir / 'failures.txt'}", file=sys.stderr)
        return 2
    return 0


def _cmd_fronts(args) -> int:
    inst = make_instance(
        args.problem,
        dimension=args.dimension,
        group=MatrixGroup(f"group{args.group}"),
        schedule=Schedule(args.schedule),
    )
    t_values = args.t if args.t else [0.0]
    rows = []
    for t in t_values:
        front = reference_front(inst, float(t), args.count)
        tag = " (degenerate)" if front.degenerate else ""
        print(f"{inst.selection} t={t:g}: {front.size} points{tag}")
        if args.out:
            for p in front.points:
                rows.append([float(t)] + [float(v) for v in p])
    if args.out:
        header = "t," + ",".join(f"f{j + 1}" for j in range(inst.n_objectives))
        body = "\n".join(",".join(repr(v) for v in row) for row in rows)
        Path(args.out).write_text(header + "\n" + body + "\n")
        print(f"wrote {args.out}")
    return 0


def _cmd_plot_data(args) -> int:
    path = export_plot_data(
        args.kind,
        args.out,
        results_dir=args.results,
        selection=args.problem,
        t_values=tuple(args.t) if args.t else (),
        dimension=args.dimension,
        group=args.group,
        schedule=args.schedule,
        count=args.count,
    )
    print(f"wrote {path}")
    return 0


def _cmd_rank(args) -> int:
    from .harness import _read_results_csv, _records_from_csv, _score_table

    records = _records_from_csv(
        _read_results_csv(Path(args.input) / "results.csv")
    )
    lines = []
    printed = False
    for metric, label, higher in (
        ("migd", "dmigd", False),
        ("mhv", "dmhv", True),
        ("mms", "dmms", True),
    ):
        table, _, algorithms = _score_table(records, metric)
        if table is None or len(algorithms) < 2:
            continue
        result = friedman(table, higher_better=higher)
        print(f"{label}: chi2={result.chi2:.4f} p={result.p_value:.4g}")
        order = np.argsort(result.mean_ranks, kind="stable")
        for j in order:
            print(f"  {algorithms[j]:<12} mean rank {result.mean_ranks[j]:.3f}")
            lines.append(
                f"{label},{algorithms[j]},{float(result.mean_ranks[j])!r},"
                f"{float(result.chi2)!r},{float(result.p_value)!r}"
            )
        printed = True
    if not printed:
        print("nothing to rank: need at least two algorithms with complete cells")
    if args.out:
        header = "metric,algorithm,mean_rank,chi2,p_value"
        Path(args.out).write_text(header + "\n" + "\n".join(lines) + "\n")
        print(f"wrote {args.out}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "fronts": _cmd_fronts,
        "plot-data": _cmd_plot_data,
        "rank": _cmd_rank,
    }
    try:
        return handlers[args.command](args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
