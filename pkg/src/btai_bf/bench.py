"""Batch trial runner and ``btai-bench`` command line interface.

Example::

    btai-bench --n-good 3 --m-bad 5 --lengths 6,5,8 --planning-iters 50 --format markdown
"""

from __future__ import annotations

import argparse
import gc
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _accel
from .agent import BAD, GOAL, TIMEOUT, AgentModel, TrialResult, plan, run_trial
from .env import DeepRewardConfig, DeepRewardEnv, build_model
from .errors import ConfigError
from .tree import PlannerConfig, to_dot

CSV_HEADER = "n,m,lengths,planning_iters,p_goal,p_bad,p_timeout,runtime_seconds"

CONFIG_KEYS = (
    "n_good",
    "m_bad",
    "lengths",
    "planning_iterations",
    "max_cycles",
    "trials",
    "exploration_constant",
    "preference_strength",
    "trace_path",
)


@dataclass(frozen=True)
class BenchmarkSpec:
    env: DeepRewardConfig
    planning_iterations: int = 25
    max_cycles: int = 20
    trials: int = 100
    exploration_constant: float = 2.0
    preference_strength: float = 0.9
    trace_path: str | None = None
    invert_preferences: bool = False

    def __post_init__(self):
        for key in ("planning_iterations", "max_cycles", "trials"):
            if getattr(self, key) < 1:
                raise ConfigError(f"must be a positive integer, got {getattr(self, key)!r}", key=key)
        if not self.exploration_constant >= 0:
            raise ConfigError("must be nonnegative", key="exploration_constant")
        if not 0.5 < self.preference_strength < 1:
            raise ConfigError("must lie strictly between 0.5 and 1", key="preference_strength")

    def model(self) -> AgentModel:
        A, B, C, D = build_model(self.env, self.preference_strength, self.invert_preferences)
        return AgentModel(A, B, C, D, PlannerConfig(self.exploration_constant, self.planning_iterations))


@dataclass
class BenchmarkReport:
    spec: BenchmarkSpec
    p_goal: float
    p_bad: float
    p_timeout: float
    # summed planning time over every cycle of every trial
    total_runtime: float
    mean_cycle_planning_time: float
    trials: list[TrialResult] = field(repr=False)
    wall_time: float = 0.0
    backend: str = _accel.BACKEND
    comparable: bool = True


def _warm_up(backend: str) -> None:
    """Trigger JIT compilation so it is not billed to the first trial."""
    if backend != _accel.NUMBA:
        return
    spec = BenchmarkSpec(DeepRewardConfig(1, 1, (1,)), planning_iterations=2, trials=1)
    model = spec.model()
    plan(model, model.new_root(model.D), backend=backend)


def _run_one(args) -> TrialResult:
    spec, backend, trace = args
    model = spec.model()
    env = DeepRewardEnv(spec.env)
    on_plan = None
    if trace:
        def on_plan(cycle, root):
            if cycle == 0:
                Path(spec.trace_path).write_text(to_dot(root))
    return run_trial(model, env, spec.max_cycles, backend=backend, on_plan=on_plan)


def _run_batch(jobs, workers):
    start = time.perf_counter()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        # as in timeit: keep collector pauses out of the timings
        gc_was_enabled = gc.isenabled()
        gc.disable()
        try:
            results = [_run_one(job) for job in jobs]
        finally:
            if gc_was_enabled:
                gc.enable()
    return results, time.perf_counter() - start


def run_benchmark(spec: BenchmarkSpec, backend: str | None = None, workers: int = 1,
                  repeat: int = 1) -> BenchmarkReport:
    """Run ``spec.trials`` independent trials and aggregate outcomes and timings.

    With ``repeat > 1`` the whole batch is rerun and the fastest batch is
    reported, as ``timeit`` does; outcomes must agree across repeats. With
    ``workers > 1`` trials run in separate processes and the report is flagged
    as not comparable with sequential timings.
    """
    backend = _accel.resolve_backend(backend)
    if repeat < 1:
        raise ConfigError("must be a positive integer", key="repeat")
    spec.model()  # validate before spending time
    _warm_up(backend)
    best = None
    for r in range(repeat):
        jobs = [(spec, backend, spec.trace_path is not None and r == 0 and k == 0) for k in range(spec.trials)]
        results, wall = _run_batch(jobs, workers)
        runtime = sum(t.planning_time for t in results)
        if best is not None and [t.actions for t in results] != [t.actions for t in best[0]]:
            raise RuntimeError("trial outcomes changed between repeats")
        if best is None or runtime < best[1]:
            best = (results, runtime, wall)
    results, runtime, wall = best

    outcomes = [r.outcome for r in results]
    total = len(results)
    cycle_times = [rec.planning_duration for r in results for rec in r.records]
    return BenchmarkReport(
        spec=spec,
        p_goal=outcomes.count(GOAL) / total,
        p_bad=outcomes.count(BAD) / total,
        p_timeout=outcomes.count(TIMEOUT) / total,
        total_runtime=float(runtime),
        mean_cycle_planning_time=float(np.mean(cycle_times)) if cycle_times else 0.0,
        trials=results,
        wall_time=wall,
        backend=backend,
        comparable=workers <= 1,
    )


def emit_report(report: BenchmarkReport, fmt: str = "csv") -> str:
    spec = report.spec
    cells = [
        str(spec.env.n_good),
        str(spec.env.m_bad),
        ";".join(map(str, spec.env.lengths)),
        str(spec.planning_iterations),
        f"{report.p_goal:.3f}",
        f"{report.p_bad:.3f}",
        f"{report.p_timeout:.3f}",
        f"{report.total_runtime:.3f}",
    ]
    if fmt == "csv":
        return CSV_HEADER + "\n" + ",".join(cells) + "\n"
    if fmt == "markdown":
        cells[2] = ", ".join(map(str, spec.env.lengths))
        cells[-1] += " sec"
        header = ["n", "m", "L_1, ..., L_n", "# planning iterations", "P(goal)", "P(bad)", "P(timeout)",
                  "Running time"]
        lines = [
            "| " + " | ".join(header) + " |",
            "|" + "|".join("---" for _ in header) + "|",
            "| " + " | ".join(cells) + " |",
        ]
        if not report.comparable:
            lines.append("")
            lines.append("_Trials ran in parallel; timings are not comparable with sequential runs._")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown report format {fmt!r}")


def _parse_value(key: str, raw: str, line: int | None = None):
    raw = raw.strip()
    try:
        if key in ("n_good", "m_bad", "planning_iterations", "max_cycles", "trials"):
            return int(raw)
        if key == "lengths":
            values = [int(x) for x in raw.split(",") if x.strip()]
            if not values:
                raise ValueError("empty list")
            return values
        if key in ("exploration_constant", "preference_strength"):
            return float(raw)
    except ValueError:
        raise ConfigError(f"malformed value {raw!r}", key=key, line=line) from None
    if key == "trace_path":
        return raw or None
    raise ConfigError("unknown key", key=key, line=line)


def read_config_file(path) -> dict:
    """Parse a ``key = value`` config file. Blank lines and ``#`` comments are ignored."""
    values = {}
    for lineno, text in enumerate(Path(path).read_text().splitlines(), start=1):
        text = text.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise ConfigError(f"expected 'key = value', got {text!r}", line=lineno)
        key, raw = (part.strip() for part in text.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError("unknown key", key=key, line=lineno)
        values[key] = _parse_value(key, raw, lineno)
    return values


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="btai-bench",
        description="Run branching-time active inference trials on the deep reward environment.",
    )
    p.add_argument("--config", help="key = value file; flags override its values")
    p.add_argument("--n-good", type=str, help="number of good paths (n)")
    p.add_argument("--m-bad", type=str, help="number of bad paths (m)")
    p.add_argument("--lengths", type=str, help="comma-separated good path lengths, e.g. 5,8")
    p.add_argument("--planning-iters", type=str, help="planning iterations per cycle (N)")
    p.add_argument("--cycles", type=str, help="maximum action-perception cycles per trial (M)")
    p.add_argument("--trials", type=str, help="number of trials (default 100)")
    p.add_argument("--exploration", type=str, help="UCT exploration constant (default 2.0)")
    p.add_argument("--preference", type=str, help="probability mass C puts on the preferred observation")
    p.add_argument("--invert-preferences", action="store_true", help="prefer the unpleasant observation")
    p.add_argument("--format", choices=("csv", "markdown"), default="csv")
    p.add_argument("--trace", help="write the first planning tree as DOT to this path")
    p.add_argument("--backend", choices=_accel.BACKENDS, default=None,
                   help="planning kernel (default: $BTAI_BF_BACKEND or numba)")
    p.add_argument("--repeat", type=int, default=1, help="rerun the batch and report the fastest timing")
    p.add_argument("--workers", type=int, default=1, help="parallel trial processes (timings not comparable)")
    return p


_FLAG_TO_KEY = {
    "n_good": "n_good",
    "m_bad": "m_bad",
    "lengths": "lengths",
    "planning_iters": "planning_iterations",
    "cycles": "max_cycles",
    "trials": "trials",
    "exploration": "exploration_constant",
    "preference": "preference_strength",
    "trace": "trace_path",
}


def parse_config(args: Sequence[str] | argparse.Namespace | None = None) -> BenchmarkSpec:
    """Merge defaults, an optional config file and command line flags into a spec."""
    if not isinstance(args, argparse.Namespace):
        args = build_parser().parse_args(args)
    values = read_config_file(args.config) if args.config else {}
    for flag, key in _FLAG_TO_KEY.items():
        raw = getattr(args, flag)
        if raw is not None:
            values[key] = _parse_value(key, raw)

    lengths = values.get("lengths")
    if lengths is None:
        lengths = [5, 8] if values.get("n_good", 2) == 2 else None
        if lengths is None:
            raise ConfigError("required when n_good differs from the default", key="lengths")
    n_good = values.get("n_good", len(lengths))
    if n_good != len(lengths):
        raise ConfigError(f"{len(lengths)} lengths given for n_good = {n_good}", key="lengths")
    env = DeepRewardConfig(n_good, values.get("m_bad", 5), tuple(lengths))
    spec = BenchmarkSpec(env)
    overrides = {k: values[k] for k in CONFIG_KEYS[3:] if k in values}
    return replace(spec, invert_preferences=bool(getattr(args, "invert_preferences", False)), **overrides)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        spec = parse_config(args)
        report = run_benchmark(spec, backend=args.backend, workers=args.workers, repeat=args.repeat)
    except ConfigError as exc:
        print(f"btai-bench: configuration error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(emit_report(report, args.format))
    return 0


if __name__ == "__main__":
    sys.exit(main())
