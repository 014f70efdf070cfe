import pytest

from btai_bf.bench import (
    CSV_HEADER,
    BenchmarkReport,
    BenchmarkSpec,
    emit_report,
    main,
    parse_config,
    read_config_file,
    run_benchmark,
)
from btai_bf.env import DeepRewardConfig
from btai_bf.errors import ConfigError


def report_for(p_goal=1.0, p_bad=0.0, p_timeout=0.0, runtime=2.2944, comparable=True):
    spec = BenchmarkSpec(DeepRewardConfig(2, 5, (5, 8)), planning_iterations=25)
    return BenchmarkReport(spec, p_goal, p_bad, p_timeout, runtime, runtime / 900, trials=[], comparable=comparable)


def test_defaults():
    spec = parse_config([])
    assert spec.env == DeepRewardConfig(2, 5, (5, 8))
    assert (spec.planning_iterations, spec.max_cycles, spec.trials) == (25, 20, 100)
    assert (spec.exploration_constant, spec.preference_strength, spec.trace_path) == (2.0, 0.9, None)


def test_flags():
    spec = parse_config(
        ["--n-good", "3", "--m-bad", "4", "--lengths", "6,5,8", "--planning-iters", "50", "--cycles", "10",
         "--trials", "7", "--exploration", "1.5", "--preference", "0.8", "--trace", "t.dot", "--invert-preferences"]
    )
    assert spec.env == DeepRewardConfig(3, 4, (6, 5, 8))
    assert (spec.planning_iterations, spec.max_cycles, spec.trials) == (50, 10, 7)
    assert (spec.exploration_constant, spec.preference_strength, spec.trace_path) == (1.5, 0.8, "t.dot")
    assert spec.invert_preferences


def test_n_good_inferred_from_lengths():
    assert parse_config(["--lengths", "6,5,8"]).env.n_good == 3


def test_config_file_and_override(tmp_path):
    path = tmp_path / "bench.cfg"
    path.write_text(
        "# three good paths, 50 iterations\n"
        "n_good = 3\n"
        "m_bad = 5\n"
        "lengths = 6,5,8\n"
        "\n"
        "planning_iterations = 50  # per cycle\n"
        "exploration_constant = 2.0\n"
    )
    values = read_config_file(path)
    assert values["lengths"] == [6, 5, 8]
    spec = parse_config(["--config", str(path), "--planning-iters", "100"])
    assert spec.env == DeepRewardConfig(3, 5, (6, 5, 8))
    assert spec.planning_iterations == 100
    assert spec.trials == 100


def test_unknown_key(tmp_path):
    path = tmp_path / "bench.cfg"
    path.write_text("n_good = 2\nplanning_iters = 25\n")
    with pytest.raises(ConfigError) as err:
        read_config_file(path)
    assert err.value.key == "planning_iters" and err.value.line == 2


@pytest.mark.parametrize(
    "text, key, line",
    [
        ("trials = many\n", "trials", 1),
        ("\nlengths = 5,x\n", "lengths", 2),
        ("exploration_constant = \n", "exploration_constant", 1),
        ("just words\n", None, 1),
    ],
)
def test_malformed_values(tmp_path, text, key, line):
    path = tmp_path / "bench.cfg"
    path.write_text(text)
    with pytest.raises(ConfigError) as err:
        read_config_file(path)
    assert (err.value.key, err.value.line) == (key, line)
    if key:
        assert key in str(err.value)


@pytest.mark.parametrize(
    "argv, key",
    [
        (["--planning-iters", "0"], "planning_iterations"),
        (["--trials", "0"], "trials"),
        (["--cycles", "0"], "max_cycles"),
        (["--preference", "0.4"], "preference_strength"),
        (["--exploration", "-1"], "exploration_constant"),
        (["--n-good", "3", "--lengths", "5,8"], "lengths"),
        (["--n-good", "3"], "lengths"),
        (["--m-bad", "0"], "m_bad"),
    ],
)
def test_validation_errors_name_the_key(argv, key):
    with pytest.raises(ConfigError) as err:
        parse_config(argv)
    assert err.value.key == key


def test_emit_csv():
    text = emit_report(report_for())
    assert text.splitlines() == [CSV_HEADER, "2,5,5;8,25,1.000,0.000,0.000,2.294"]
    assert CSV_HEADER == "n,m,lengths,planning_iters,p_goal,p_bad,p_timeout,runtime_seconds"


def test_emit_markdown_matches_csv():
    report = report_for(p_goal=0.25, p_bad=0.5, p_timeout=0.25, comparable=False)
    csv_row = emit_report(report, "csv").splitlines()[1].split(",")
    md_lines = emit_report(report, "markdown").splitlines()
    assert md_lines[0].startswith("| n | m | L_1, ..., L_n | # planning iterations | P(goal) | P(bad)")
    cells = [c.strip() for c in md_lines[2].strip("|").split("|")]
    assert cells[2].replace(", ", ";") == csv_row[2]
    assert cells[-1] == csv_row[-1] + " sec"
    assert [c for i, c in enumerate(cells) if i not in (2, 7)] == [c for i, c in enumerate(csv_row) if i not in (2, 7)]
    assert "not comparable" in md_lines[-1]


def test_emit_unknown_format():
    with pytest.raises(ValueError):
        emit_report(report_for(), "html")


def test_run_benchmark_small(tmp_path):
    trace = tmp_path / "tree.dot"
    spec = BenchmarkSpec(DeepRewardConfig(2, 5, (5, 8)), trials=3, trace_path=str(trace))
    report = run_benchmark(spec)
    assert (report.p_goal, report.p_bad, report.p_timeout) == (1.0, 0.0, 0.0)
    assert len(report.trials) == 3 and report.comparable
    assert report.total_runtime == pytest.approx(sum(t.planning_time for t in report.trials))
    assert report.mean_cycle_planning_time > 0
    dot = trace.read_text()
    assert dot.startswith("digraph") and dot.count("[label=") == 1 + 25 * 7
    assert '[label="a=-1 n=26 ' in dot


def test_inverted_preferences_go_bad():
    spec = BenchmarkSpec(DeepRewardConfig(2, 5, (5, 8)), trials=1, invert_preferences=True)
    report = run_benchmark(spec)
    assert (report.p_goal, report.p_bad) == (0.0, 1.0)


def test_probabilities_are_count_ratios():
    spec = BenchmarkSpec(DeepRewardConfig(2, 5, (5, 8)), trials=4, max_cycles=3)
    report = run_benchmark(spec, backend="numpy")
    assert (report.p_goal, report.p_bad, report.p_timeout) == (0.0, 0.0, 1.0)
    assert report.backend == "numpy"


def test_parallel_workers():
    spec = BenchmarkSpec(DeepRewardConfig(2, 5, (5, 8)), trials=4)
    report = run_benchmark(spec, workers=2)
    assert report.p_goal == 1.0 and not report.comparable


def test_main_csv(capsys):
    assert main(["--trials", "2", "--lengths", "5,8"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == CSV_HEADER
    assert out[1].startswith("2,5,5;8,25,1.000,0.000,0.000,")


def test_main_markdown(capsys):
    assert main(["--trials", "1", "--format", "markdown", "--backend", "numpy"]) == 0
    assert capsys.readouterr().out.startswith("| n | m |")


def test_main_config_error(capsys):
    assert main(["--planning-iters", "0"]) == 2
    assert "planning_iterations" in capsys.readouterr().err


def test_repeat_keeps_fastest_batch():
    spec = BenchmarkSpec(DeepRewardConfig(2, 5, (5, 8)), trials=2)
    report = run_benchmark(spec, repeat=3)
    assert report.p_goal == 1.0 and len(report.trials) == 2
    assert report.total_runtime == pytest.approx(sum(t.planning_time for t in report.trials))
    with pytest.raises(ConfigError):
        run_benchmark(spec, repeat=0)
