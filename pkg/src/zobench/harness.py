"""Experiment configuration, orchestration and persistence.

One *cell* is an (optimizer, seed) pair run on a single objective.  ``execute``
writes ``trace_<optimizer>_seed<seed>.csv`` per cell plus ``summary.csv`` into
the output directory; each trace header carries everything needed to replay
the run (package version, PRNG, kernel backend, resolved config, seed).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__, _backend
from .diagnostics import instrumented_run
from .errors import ArgumentError, UsageError, ZoBenchError
from .estimator import EstimatorConfig
from .objectives import NoiseModel, ObjectiveKind, ObjectiveSpec
from .optimizers import HyperParams, OptimizerKind, run
from .sampler import PRNG_NAME
from .trace import TraceRecord, format_real, read_trace, write_trace

LOG_FLOOR = 1e-16
TRACE_FORMAT = "zobench-trace/1"
SUMMARY_FILE = "summary.csv"


def trace_filename(optimizer: str, seed: int) -> str:
    return f"trace_{optimizer}_seed{seed}.csv"


@dataclass(frozen=True)
class ExperimentConfig:
    function: ObjectiveKind = ObjectiveKind.QUADRATIC
    dim: int = 1000
    optimizers: tuple[OptimizerKind, ...] = tuple(OptimizerKind)
    beta1: float = 0.9
    beta2: float = 0.99
    lr: float = 0.001
    zeta: float = 1e-8
    mu: float = 0.005
    k: int = 10
    iters: int = 10_000
    seeds: tuple[int, ...] = (1, 2, 3)
    theta0: str = "default"
    v0: float = 0.0
    sigma: float = 0.0
    diagnostics: bool = False
    out: Path = Path("zo-bench-out")
    jobs: int = 1

    def __post_init__(self):
        _set = object.__setattr__
        _set(self, "function", _coerce("function", ObjectiveKind, self.function))
        _set(self, "optimizers", tuple(_coerce("optimizer", OptimizerKind, o) for o in self.optimizers))
        _set(self, "seeds", tuple(int(s) for s in self.seeds))
        _set(self, "out", Path(self.out))
        _set(self, "theta0", str(self.theta0))
        if self.dim < 1:
            raise UsageError("dim", f"must be >= 1, got {self.dim}")
        if self.iters < 0:
            raise UsageError("iters", f"must be >= 0, got {self.iters}")
        if not self.optimizers:
            raise UsageError("optimizer", "at least one optimizer is required")
        if len(set(self.optimizers)) != len(self.optimizers):
            raise UsageError("optimizer", "duplicate optimizer")
        if not self.seeds:
            raise UsageError("seed", "at least one seed is required")
        if len(set(self.seeds)) != len(self.seeds):
            raise UsageError("seed", "seeds must be distinct")
        if any(not 0 <= s < 2**64 for s in self.seeds):
            raise UsageError("seed", "seeds must be 64-bit unsigned integers")
        if self.jobs < 1:
            raise UsageError("jobs", f"must be >= 1, got {self.jobs}")
        if not (self.v0 >= 0 and math.isfinite(self.v0)):
            raise UsageError("v0", f"must be finite and >= 0, got {self.v0}")
        if self.theta0 != "default":
            try:
                float(self.theta0)
            except ValueError:
                raise UsageError("theta0", f"must be 'default' or a number, got {self.theta0!r}") from None
        # Delegate the numeric invariants to the owning modules.
        try:
            self.hyperparams()
        except ArgumentError as exc:
            name = str(exc).split()[0]
            raise UsageError("lr" if name == "eta" else name, str(exc)) from None
        try:
            self.estimator()
        except ArgumentError as exc:
            raise UsageError(str(exc).split()[0], str(exc)) from None
        try:
            NoiseModel.uniform(self.sigma)
        except ValueError as exc:
            raise UsageError("sigma", str(exc)) from None

    def hyperparams(self) -> HyperParams:
        return HyperParams(self.beta1, self.beta2, self.lr, self.zeta)

    def estimator(self) -> EstimatorConfig:
        return EstimatorConfig(self.mu, self.k)

    def objective(self) -> ObjectiveSpec:
        return ObjectiveSpec(self.function, self.dim, NoiseModel.uniform(self.sigma))

    def initial_point(self) -> np.ndarray:
        spec = self.objective()
        if self.theta0 == "default":
            return spec.default_theta0()
        return np.full(self.dim, float(self.theta0))

    def resolved(self) -> dict:
        """Plain, JSON-ready view of every setting."""
        out = asdict(self)
        out["function"] = self.function.value
        out["optimizers"] = [o.value for o in self.optimizers]
        out["seeds"] = list(self.seeds)
        # Output location and parallelism do not affect results.
        del out["out"], out["jobs"]
        return out


def _coerce(name, enum_cls, value):
    try:
        return enum_cls(value)
    except ValueError:
        choices = "|".join(e.value for e in enum_cls)
        raise UsageError(name, f"unknown value {value!r} (choose {choices})") from None


# --- parsing -------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError("arguments", message)


def _csv_list(text):
    return [item.strip() for item in str(text).split(",") if item.strip()]


def add_run_arguments(parser: argparse.ArgumentParser) -> None:
    """Experiment flags shared by the run-like subcommands; all default to None."""
    a = parser.add_argument
    a("--config", type=Path, help="key=value file; flags override its values")
    a("--function", help="quadratic|cubic|levy|rosenbrock")
    a("--optimizer", action="append", help="repeatable: zo-sgd|zo-signsgd|zo-rmsprop|zo-adamm|r-adazo")
    a("--dim", type=int)
    a("--iters", type=int)
    a("--seed", action="append", type=int, help="repeatable")
    a("--beta1", type=float)
    a("--beta2", type=float)
    a("--lr", type=float)
    a("--mu", type=float)
    a("--k", type=int)
    a("--zeta", type=float)
    a("--sigma", type=float, help="std. dev. of additive uniform noise (0 = none)")
    a("--theta0", help="'default' or a fill value for every coordinate")
    a("--v0", type=float, help="initial second moment fill value")
    a("--diagnostics", action="store_true", default=None)
    a("--out", type=Path)
    a("--jobs", type=int)


_FILE_KEYS = {
    "function": str,
    "optimizer": _csv_list,
    "dim": int,
    "iters": int,
    "seed": lambda s: [int(x) for x in _csv_list(s)],
    "beta1": float,
    "beta2": float,
    "lr": float,
    "mu": float,
    "k": int,
    "zeta": float,
    "sigma": float,
    "theta0": str,
    "v0": float,
    "diagnostics": lambda s: s.strip().lower() in ("1", "true", "yes", "on"),
    "out": Path,
    "jobs": int,
}
_RENAMES = {"optimizer": "optimizers", "seed": "seeds"}


def read_config_file(path) -> dict:
    """Parse a flat ``key=value`` file (``#`` comments allowed) into config fields."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in _FILE_KEYS:
            raise UsageError(key or f"line {lineno}", f"unrecognized config entry {raw!r}")
        try:
            values[_RENAMES.get(key, key)] = _FILE_KEYS[key](value.strip())
        except ValueError as exc:
            raise UsageError(key, str(exc)) from None
    return values


def config_from_namespace(ns: argparse.Namespace, config_file=None) -> ExperimentConfig:
    values = {}
    path = config_file or getattr(ns, "config", None)
    if path is not None:
        values.update(read_config_file(path))
    for key in _FILE_KEYS:
        flag = getattr(ns, key, None)
        if flag is not None:
            values[_RENAMES.get(key, key)] = flag
    return ExperimentConfig(**values)


def parse_config(argv: list[str] | None = None, config_file=None) -> ExperimentConfig:
    """Build a config from CLI-style flags; defaults < config file < flags."""
    parser = _Parser(prog="zo-bench run")
    add_run_arguments(parser)
    ns = parser.parse_args(argv or [])
    return config_from_namespace(ns, config_file)


# --- execution -----------------------------------------------------------------------


@dataclass
class OptimizerSummary:
    optimizer: str
    seeds: int
    failures: int
    final_gap_min: float
    final_gap_median: float
    final_gap_max: float
    area_log_gap: float
    wall_seconds: float = 0.0


@dataclass
class RunSummary:
    rows: dict[str, OptimizerSummary] = field(default_factory=dict)

    def __getitem__(self, optimizer) -> OptimizerSummary:
        return self.rows[OptimizerKind(optimizer).value]


@dataclass
class ExecutionResult:
    config: ExperimentConfig
    traces: dict[tuple[str, int], list[TraceRecord]]
    summary: RunSummary
    paths: list[Path]

    def by_optimizer(self) -> dict[str, list[list[TraceRecord]]]:
        grouped: dict[str, list[list[TraceRecord]]] = {}
        for (opt, _seed), trace in self.traces.items():
            grouped.setdefault(opt, []).append(trace)
        return grouped


def area_log_gap(trace: list[TraceRecord]) -> float:
    """Trapezoidal area under ``log10(max(gap, 1e-16))`` against iteration."""
    area = 0.0
    for prev, cur in zip(trace, trace[1:]):
        lo = math.log10(max(prev.gap, LOG_FLOOR))
        hi = math.log10(max(cur.gap, LOG_FLOOR))
        area += 0.5 * (lo + hi) * (cur.iter - prev.iter)
    return area


def summarize_traces(optimizer: str, traces: list[list[TraceRecord]], wall_seconds: float = 0.0) -> OptimizerSummary:
    finals = [t[-1].gap for t in traces]
    return OptimizerSummary(
        optimizer=optimizer,
        seeds=len(traces),
        failures=sum(1 for t in traces if t[-1].error),
        final_gap_min=min(finals),
        final_gap_median=statistics.median(finals),
        final_gap_max=max(finals),
        area_log_gap=sum(area_log_gap(t) for t in traces) / len(traces),
        wall_seconds=wall_seconds,
    )


def mean_curve(traces: list[list[TraceRecord]]) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise mean gap over seeds, restricted to iterations every trace reached."""
    n = min(len(t) for t in traces)
    iters = np.array([rec.iter for rec in traces[0][:n]])
    gaps = np.array([[rec.gap for rec in t[:n]] for t in traces])
    return iters, gaps.mean(axis=0)


def _trace_header(config: ExperimentConfig, optimizer: str, seed: int) -> dict:
    return {
        "format": TRACE_FORMAT,
        "version": __version__,
        "prng": PRNG_NAME,
        "backend": _backend.BACKEND,
        "function": config.function.value,
        "optimizer": optimizer,
        "seed": str(seed),
        "config": json.dumps(config.resolved(), sort_keys=True),
    }


def run_cell(config: ExperimentConfig, optimizer, seed: int) -> tuple[list[TraceRecord], float]:
    """Execute one (optimizer, seed) cell; returns the trace and wall-clock seconds."""
    optimizer = OptimizerKind(optimizer)
    args = (optimizer, config.objective(), config.estimator(), config.hyperparams(), config.initial_point(), config.iters, seed)
    v0 = config.v0 if config.v0 else None
    start = time.perf_counter()
    if config.diagnostics:
        trace = [rec for rec, _ in instrumented_run(*args, v0=v0)]
    else:
        trace = run(*args, v0=v0)
    return trace, time.perf_counter() - start


def _cell_worker(payload):
    config, optimizer, seed = payload
    return run_cell(config, optimizer, seed)


def execute(config: ExperimentConfig) -> ExecutionResult:
    """Run every (optimizer, seed) cell and persist traces plus a summary."""
    out = config.out
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ZoBenchError(f"cannot create output directory {out}: {exc}") from exc

    cells = [(config, o.value, s) for o in config.optimizers for s in config.seeds]
    if config.jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_cell_worker, cells))
    else:
        results = [_cell_worker(c) for c in cells]

    traces: dict[tuple[str, int], list[TraceRecord]] = {}
    walls: dict[str, float] = {}
    paths: list[Path] = []
    # Single collector writes in config order; layout never depends on scheduling.
    for (_, opt, seed), (trace, wall) in zip(cells, results):
        traces[(opt, seed)] = trace
        walls[opt] = walls.get(opt, 0.0) + wall
        path = out / trace_filename(opt, seed)
        try:
            write_trace(path, trace, _trace_header(config, opt, seed), diagnostics=config.diagnostics)
        except OSError as exc:
            (out / "INCOMPLETE").write_text(f"failed writing {path.name}: {exc}\n")
            raise ZoBenchError(f"cannot write {path}: {exc}") from exc
        paths.append(path)

    summary = RunSummary()
    for opt in config.optimizers:
        per_seed = [traces[(opt.value, s)] for s in config.seeds]
        summary.rows[opt.value] = summarize_traces(opt.value, per_seed, walls[opt.value])
    summary_path = out / SUMMARY_FILE
    write_summary(summary_path, summary)
    paths.append(summary_path)
    return ExecutionResult(config, traces, summary, paths)


_SUMMARY_COLUMNS = (
    "optimizer",
    "seeds",
    "failures",
    "final_gap_min",
    "final_gap_median",
    "final_gap_max",
    "area_log_gap",
    "wall_seconds",
)


def write_summary(path, summary: RunSummary) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_SUMMARY_COLUMNS)
        for row in summary.rows.values():
            writer.writerow(
                [row.optimizer, row.seeds, row.failures]
                + [format_real(getattr(row, c)) for c in _SUMMARY_COLUMNS[3:]]
            )


def read_summary(path) -> RunSummary:
    summary = RunSummary()
    with open(path, encoding="utf-8", newline="") as fh:
        for rec in csv.DictReader(fh):
            summary.rows[rec["optimizer"]] = OptimizerSummary(
                optimizer=rec["optimizer"],
                seeds=int(rec["seeds"]),
                failures=int(rec["failures"]),
                **{c: float(rec[c]) for c in _SUMMARY_COLUMNS[3:]},
            )
    return summary


def load_traces(directory) -> dict[str, list[list[TraceRecord]]]:
    """Group the trace files of one output directory by optimizer, in config order."""
    directory = Path(directory)
    files = sorted(directory.glob("trace_*.csv"))
    if not files:
        raise ArgumentError(f"no trace files in {directory}")
    loaded = []
    order: list[str] = []
    seeds: list[int] = []
    for path in files:
        header, records = read_trace(path)
        loaded.append((header.get("optimizer"), int(header.get("seed", 0)), records))
        if not order and "config" in header:
            cfg = json.loads(header["config"])
            order = list(cfg.get("optimizers", []))
            seeds = list(cfg.get("seeds", []))
    rank = {name: i for i, name in enumerate(order)}
    seed_rank = {s: i for i, s in enumerate(seeds)}
    loaded.sort(key=lambda item: (rank.get(item[0], len(rank)), seed_rank.get(item[1], len(seed_rank)), item[1]))
    grouped: dict[str, list[list[TraceRecord]]] = {}
    for opt, _seed, records in loaded:
        grouped.setdefault(opt, []).append(records)
    return grouped


def summarize_directory(directory) -> dict[str, OptimizerSummary]:
    """Recompute per-optimizer statistics (wall-clock excluded) from trace files."""
    return {opt: summarize_traces(opt, traces) for opt, traces in load_traces(directory).items()}


# --- sweeps and presets --------------------------------------------------------------


def beta1_sweep(config: ExperimentConfig, values) -> list[dict]:
    """Run R-AdaZO once per ``beta1`` value; returns final-gap rows keyed by beta1."""
    values = [float(v) for v in values]
    if not values:
        raise ArgumentError("beta1 sweep needs at least one value")
    if len(set(values)) != len(values):
        raise ArgumentError("beta1 sweep values must be distinct")
    if OptimizerKind.R_ADAZO not in config.optimizers:
        raise ArgumentError("beta1 sweep requires r-adazo among the optimizers")
    rows = []
    for b1 in values:
        cell_cfg = replace(config, beta1=b1, optimizers=(OptimizerKind.R_ADAZO,), out=config.out / f"beta1_{b1:g}")
        result = execute(cell_cfg)
        s = result.summary[OptimizerKind.R_ADAZO]
        rows.append(
            {
                "beta1": b1,
                "final_gap_min": s.final_gap_min,
                "final_gap_median": s.final_gap_median,
                "final_gap_max": s.final_gap_max,
                "area_log_gap": s.area_log_gap,
            }
        )
    config.out.mkdir(parents=True, exist_ok=True)
    with open(config.out / "beta1_sweep.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(rows[0]))
        for row in rows:
            writer.writerow([format_real(v) for v in row.values()])
    return rows


def per_function_configs(base: ExperimentConfig) -> list[ExperimentConfig]:
    """One config per benchmark function, written to ``<out>/<function>/``."""
    return [replace(base, function=kind, out=base.out / kind.value) for kind in ObjectiveKind]
