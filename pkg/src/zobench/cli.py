"""``zo-bench`` command line: run, all-functions, sweep-beta1, plot."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__, _backend
from .errors import UsageError, ZoBenchError
from .harness import (
    _Parser,
    add_run_arguments,
    beta1_sweep,
    config_from_namespace,
    execute,
    per_function_configs,
    load_traces,
)
from .plot import emit_plot


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="zo-bench", description="Zeroth-order optimizer benchmark")
    parser.add_argument("--version", action="version", version=f"zo-bench {__version__} ({_backend.BACKEND} kernels)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_run = sub.add_parser("run", help="run optimizers x seeds on one function")
    add_run_arguments(p_run)
    p_run.add_argument("--plot", type=Path, help="also write an SVG convergence plot here")

    p_all = sub.add_parser("all-functions", help="all four functions, one sub-directory each, with plots")
    add_run_arguments(p_all)

    p_sweep = sub.add_parser("sweep-beta1", help="R-AdaZO final gaps across beta1 values")
    add_run_arguments(p_sweep)
    p_sweep.add_argument("--values", required=True, help="comma-separated beta1 values, e.g. 0.1,0.5,0.9")

    p_plot = sub.add_parser("plot", help="SVG plot from a run directory")
    p_plot.add_argument("--in", dest="indir", type=Path, required=True)
    p_plot.add_argument("--out", type=Path, required=True)
    p_plot.add_argument("--title", default="")
    return parser


def _print_summary(summary, stream) -> None:
    print(f"{'optimizer':<12} {'seeds':>5} {'fail':>4} {'gap min':>12} {'gap median':>12} {'gap max':>12} {'secs':>8}",
          file=stream)
    for row in summary.rows.values():
        print(
            f"{row.optimizer:<12} {row.seeds:>5} {row.failures:>4} {row.final_gap_min:>12.4e} "
            f"{row.final_gap_median:>12.4e} {row.final_gap_max:>12.4e} {row.wall_seconds:>8.2f}",
            file=stream,
        )


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        if ns.command == "run":
            config = config_from_namespace(ns)
            result = execute(config)
            _print_summary(result.summary, sys.stdout)
            if ns.plot:
                emit_plot(result.by_optimizer(), ns.plot, title=config.function.value)
            print(f"wrote {len(result.paths)} files to {config.out}")
        elif ns.command == "all-functions":
            base = config_from_namespace(ns)
            for config in per_function_configs(base):
                print(f"== {config.function.value} (d={config.dim}, T={config.iters})")
                result = execute(config)
                _print_summary(result.summary, sys.stdout)
                emit_plot(result.by_optimizer(), config.out / "convergence.svg", title=config.function.value)
        elif ns.command == "sweep-beta1":
            config = config_from_namespace(ns)
            values = [float(v) for v in ns.values.split(",") if v.strip()]
            rows = beta1_sweep(config, values)
            print(f"{'beta1':>8} {'gap median':>12}")
            for row in rows:
                print(f"{row['beta1']:>8g} {row['final_gap_median']:>12.4e}")
        elif ns.command == "plot":
            emit_plot(load_traces(ns.indir), ns.out, title=ns.title)
            print(f"wrote {ns.out}")
    except UsageError as exc:
        print(f"zo-bench: usage error: {exc}", file=sys.stderr)
        return 2
    except (ZoBenchError, ValueError) as exc:
        print(f"zo-bench: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
