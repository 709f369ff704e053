import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zobench.cli import main
from zobench.errors import ArgumentError, UsageError
from zobench.harness import (
    ExperimentConfig,
    area_log_gap,
    beta1_sweep,
    execute,
    per_function_configs,
    parse_config,
    read_summary,
    run_cell,
    summarize_directory,
)
from zobench.optimizers import OptimizerKind
from zobench.plot import emit_plot, render_svg
from zobench.trace import TraceRecord, dumps_trace, loads_trace, read_trace

reals = st.floats(allow_nan=False, allow_infinity=True)
maybe = st.none() | st.floats(allow_nan=True, allow_infinity=True)


# --- trace files ------------------------------------------------------------------------


@settings(max_examples=100, deadline=None)
@given(
    rows=st.lists(
        st.tuples(st.integers(0, 10**9), reals, st.floats(0, 1e300), st.floats(0, 1e300), maybe, maybe, maybe, maybe),
        min_size=1,
        max_size=10,
    ),
    diag=st.booleans(),
)
def test_trace_round_trip_is_exact(rows, diag):
    recs = [TraceRecord(*r) if diag else TraceRecord(*r[:4]) for r in rows]
    header, back = loads_trace(dumps_trace(recs, {"a": "1", "b": "x=y"}, diagnostics=diag))
    assert header == {"a": "1", "b": "x=y"}
    assert len(back) == len(recs)
    for a, b in zip(recs, back):
        for name in vars(a):
            x, y = getattr(a, name), getattr(b, name)
            if isinstance(x, float) and math.isnan(x):
                assert math.isnan(y)
            else:
                assert x == y


def test_error_marker_round_trip():
    recs = [TraceRecord(0, 1.0, 1.0, 0.0), TraceRecord(3, 2.0, 2.0, 0.0, error="iteration 3: boom\nmore")]
    text = dumps_trace(recs, {})
    assert text.rstrip().endswith("# error=iteration 3: boom more")
    _, back = loads_trace(text)
    assert back[0].error is None and back[1].error == "iteration 3: boom more"


def test_multiline_header_rejected():
    with pytest.raises(ValueError):
        dumps_trace([], {"k": "a\nb"})


# --- configuration ----------------------------------------------------------------------


def test_parse_defaults():
    cfg = parse_config([])
    assert cfg.dim == 1000 and cfg.iters == 10_000 and cfg.seeds == (1, 2, 3)
    assert (cfg.beta1, cfg.beta2, cfg.lr, cfg.mu, cfg.k, cfg.zeta) == (0.9, 0.99, 0.001, 0.005, 10, 1e-8)
    assert cfg.optimizers == tuple(OptimizerKind)


def test_parse_two_optimizers_and_seeds():
    cfg = parse_config(["--optimizer", "r-adazo", "--optimizer", "zo-adamm", "--seed", "4", "--seed", "5"])
    assert cfg.optimizers == (OptimizerKind.R_ADAZO, OptimizerKind.ZO_ADAMM)
    assert cfg.seeds == (4, 5)


@pytest.mark.parametrize(
    "argv,field",
    [
        (["--beta1", "1.5"], "beta1"),
        (["--beta2", "-0.1"], "beta2"),
        (["--lr", "0"], "lr"),
        (["--mu", "-1"], "mu"),
        (["--k", "0"], "k"),
        (["--function", "sphere"], "function"),
        (["--optimizer", "adam"], "optimizer"),
        (["--dim", "0"], "dim"),
        (["--seed", "1", "--seed", "1"], "seed"),
    ],
)
def test_invalid_values_name_their_field(argv, field):
    with pytest.raises(UsageError) as info:
        parse_config(argv)
    assert info.value.field == field


def test_unknown_flag_rejected():
    with pytest.raises(UsageError):
        parse_config(["--momentum", "0.5"])


def test_config_file_with_flag_override(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text("# comment\nfunction = levy\ndim=50\nbeta1=0.5\noptimizer=r-adazo,zo-sgd\nseed=7,8\n")
    cfg = parse_config(["--beta1", "0.7"], config_file=path)
    assert cfg.function.value == "levy" and cfg.dim == 50 and cfg.beta1 == 0.7
    assert [o.value for o in cfg.optimizers] == ["r-adazo", "zo-sgd"]
    assert cfg.seeds == (7, 8)
    assert parse_config(["--config", str(path)]).beta1 == 0.5


def test_config_file_unknown_key(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("dim=5\nmomentum=0.3\n")
    with pytest.raises(UsageError) as info:
        parse_config([], config_file=path)
    assert info.value.field == "momentum"


# --- execution --------------------------------------------------------------------------


def small(tmp_path, name="out", **kw):
    base = dict(
        function="rosenbrock",
        dim=12,
        iters=40,
        optimizers=("r-adazo", "zo-adamm"),
        seeds=(1, 2, 3),
        out=tmp_path / name,
    )
    base.update(kw)
    return ExperimentConfig(**base)


def test_execute_layout_and_byte_identical_rerun(tmp_path):
    r1 = execute(small(tmp_path, "a"))
    r2 = execute(small(tmp_path, "b"))
    names = sorted(p.name for p in r1.paths)
    assert len(names) == 7
    assert names == sorted(p.name for p in r2.paths)
    assert "summary.csv" in names
    for p in r1.paths:
        other = tmp_path / "b" / p.name
        if p.name == "summary.csv":
            continue  # carries wall-clock time
        assert p.read_bytes() == other.read_bytes()


def test_summary_recomputed_from_files(tmp_path):
    cfg = small(tmp_path)
    result = execute(cfg)
    stored = read_summary(cfg.out / "summary.csv")
    recomputed = summarize_directory(cfg.out)
    assert list(recomputed) == ["r-adazo", "zo-adamm"]
    for opt, row in recomputed.items():
        s = stored.rows[opt]
        assert (row.seeds, row.failures) == (s.seeds, s.failures) == (3, 0)
        for name in ("final_gap_min", "final_gap_median", "final_gap_max", "area_log_gap"):
            assert getattr(row, name) == getattr(s, name) == getattr(result.summary.rows[opt], name)


def test_trace_header_replays_cell(tmp_path):
    cfg = small(tmp_path, iters=25)
    execute(cfg)
    header, records = read_trace(cfg.out / "trace_zo-adamm_seed2.csv")
    assert header["prng"] == "numpy.PCG64"
    replay_cfg = ExperimentConfig(**json.loads(header["config"]))
    trace, _ = run_cell(replay_cfg, header["optimizer"], int(header["seed"]))
    assert trace == records


def test_failure_is_contained(tmp_path):
    # The huge radius blows up plain SGD; the normalized R-AdaZO step stays bounded.
    cfg = small(tmp_path, function="quadratic", dim=10, iters=50, mu=1e150, k=2, lr=1.0, optimizers=("zo-sgd", "r-adazo"))
    result = execute(cfg)
    assert result.summary["zo-sgd"].failures == 3
    assert result.summary["r-adazo"].failures == 0
    assert all(result.traces[("r-adazo", s)][-1].iter == 50 for s in cfg.seeds)
    assert "# error=" in (cfg.out / "trace_zo-sgd_seed1.csv").read_text()
    assert read_summary(cfg.out / "summary.csv").rows["zo-sgd"].failures == 3


def test_parallel_matches_serial(tmp_path):
    serial = execute(small(tmp_path, "s", iters=20))
    parallel = execute(small(tmp_path, "p", iters=20, jobs=2))
    assert serial.traces == parallel.traces
    for p in serial.paths[:-1]:
        assert p.read_bytes() == (tmp_path / "p" / p.name).read_bytes()


def test_diagnostic_columns_written(tmp_path):
    cfg = small(tmp_path, diagnostics=True, iters=10, seeds=(1,))
    execute(cfg)
    text = (cfg.out / "trace_r-adazo_seed1.csv").read_text()
    assert "iter,fval,gap,step_norm,cos_g,cos_m,relerr_v_ori,relerr_v_ours" in text


def test_area_log_gap():
    recs = [TraceRecord(0, 100.0, 100.0, 0.0), TraceRecord(2, 1.0, 1.0, 0.0), TraceRecord(3, 0.0, 0.0, 0.0)]
    # (2 + 0) / 2 * 2 + (0 - 16) / 2 * 1
    assert area_log_gap(recs) == 2.0 - 8.0


def test_per_function_configs(tmp_path):
    cfgs = per_function_configs(small(tmp_path))
    assert [c.function.value for c in cfgs] == ["quadratic", "cubic", "levy", "rosenbrock"]
    assert len({c.out for c in cfgs}) == 4


# --- plots ----------------------------------------------------------------------------


def _flat(gap, n=5):
    return [TraceRecord(i, gap, gap, 0.0) for i in range(n)]


def test_plot_flat_trace():
    svg = render_svg({"r-adazo": [_flat(1.0)]})
    assert svg.count('class="curve"') == 1


def test_plot_floors_zero_gap():
    svg = render_svg({"a": [_flat(0.0)], "b": [_flat(1.0)]})
    assert ">1e-16<" in svg
    points = " ".join(line for line in svg.splitlines() if "<polyline" in line)
    assert "nan" not in points and "inf" not in points


def test_plot_five_curves_in_legend_order(tmp_path):
    names = ["zo-sgd", "zo-signsgd", "zo-rmsprop", "zo-adamm", "r-adazo"]
    data = {name: [_flat(10.0**-i), _flat(2 * 10.0**-i)] for i, name in enumerate(names)}
    path = emit_plot(data, tmp_path / "p.svg", title="t")
    svg = path.read_text()
    assert svg.count("<polyline") == 5
    legend = [line.split(">")[1].split("<")[0] for line in svg.splitlines() if 'class="legend"' in line]
    assert legend == names


def test_plot_empty_input():
    with pytest.raises(ArgumentError):
        render_svg({})
    with pytest.raises(ArgumentError):
        render_svg({"x": [[]]})


# --- beta1 sweep ----------------------------------------------------------------------


def test_sweep_single_value(tmp_path):
    rows = beta1_sweep(small(tmp_path, seeds=(1,), iters=10), [0.9])
    assert len(rows) == 1 and rows[0]["beta1"] == 0.9


def test_sweep_rows_and_file(tmp_path):
    cfg = small(tmp_path, seeds=(1, 2), iters=15)
    rows = beta1_sweep(cfg, [0.1, 0.5, 0.9])
    assert [r["beta1"] for r in rows] == [0.1, 0.5, 0.9]
    lines = (cfg.out / "beta1_sweep.csv").read_text().splitlines()
    assert len(lines) == 4 and lines[0].startswith("beta1,")
    assert (cfg.out / "beta1_0.5" / "summary.csv").exists()


@pytest.mark.parametrize("values", [[], [0.5, 0.5]])
def test_sweep_bad_values(tmp_path, values):
    with pytest.raises(ArgumentError):
        beta1_sweep(small(tmp_path), values)


def test_sweep_requires_radazo(tmp_path):
    with pytest.raises(ArgumentError):
        beta1_sweep(small(tmp_path, optimizers=("zo-sgd",)), [0.5])


# --- command line ---------------------------------------------------------------------


def test_cli_run_and_plot(tmp_path, capsys):
    out = tmp_path / "cli"
    code = main(
        ["run", "--function", "cubic", "--dim", "8", "--iters", "20", "--seed", "1",
         "--optimizer", "r-adazo", "--optimizer", "zo-sgd", "--out", str(out), "--plot", str(tmp_path / "a.svg")]
    )
    assert code == 0
    assert "r-adazo" in capsys.readouterr().out
    assert (out / "trace_zo-sgd_seed1.csv").exists()
    assert (tmp_path / "a.svg").read_text().count("<polyline") == 2
    assert main(["plot", "--in", str(out), "--out", str(tmp_path / "b.svg")]) == 0
    assert (tmp_path / "b.svg").read_text().count("<polyline") == 2


def test_cli_usage_errors(tmp_path, capsys):
    assert main(["run", "--beta1", "1.5", "--out", str(tmp_path)]) == 2
    assert "beta1" in capsys.readouterr().err
    assert main(["run", "--bogus"]) == 2
    assert main([]) == 2


def test_cli_runtime_error_exit_code(tmp_path):
    assert main(["plot", "--in", str(tmp_path / "missing"), "--out", str(tmp_path / "x.svg")]) == 1


def test_cli_sweep(tmp_path, capsys):
    code = main(["sweep-beta1", "--values", "0.1,0.9", "--function", "quadratic", "--dim", "5",
                 "--iters", "10", "--seed", "1", "--out", str(tmp_path / "sw")])
    assert code == 0
    assert (tmp_path / "sw" / "beta1_sweep.csv").exists()


def test_cli_all_functions(tmp_path):
    code = main(["all-functions", "--dim", "4", "--iters", "5", "--seed", "1", "--optimizer", "r-adazo",
                 "--out", str(tmp_path / "f")])
    assert code == 0
    for kind in ("quadratic", "cubic", "levy", "rosenbrock"):
        assert (tmp_path / "f" / kind / "convergence.svg").exists()
