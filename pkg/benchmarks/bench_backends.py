"""Compare the numba and numpy planning kernels on the reference deep reward configurations.

Usage::

    python benchmarks/bench_backends.py [--trials 20] [--repeat 3]

Prints mean planning time per action-perception cycle for each backend and
the resulting speed-up. Both backends must reach identical outcomes.
"""

import argparse

from btai_bf.bench import BenchmarkSpec, run_benchmark
from btai_bf.env import DeepRewardConfig

ENVS = [DeepRewardConfig(2, 5, (5, 8)), DeepRewardConfig(3, 5, (6, 5, 8))]
ITERS = [25, 50, 100]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=20)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    print(f"{'L':>10} {'N':>4} {'numba us/cycle':>15} {'numpy us/cycle':>15} {'speed-up':>9}")
    for env in ENVS:
        for n_iter in ITERS:
            spec = BenchmarkSpec(env, planning_iterations=n_iter, trials=args.trials)
            reports = {b: run_benchmark(spec, backend=b, repeat=args.repeat) for b in ("numba", "numpy")}
            outcomes = {b: [t.actions for t in r.trials] for b, r in reports.items()}
            assert outcomes["numba"] == outcomes["numpy"], "backends disagree"
            per_cycle = {b: 1e6 * r.total_runtime / sum(t.cycles for t in r.trials) for b, r in reports.items()}
            lengths = ",".join(map(str, env.lengths))
            print(
                f"{lengths:>10} {n_iter:>4} {per_cycle['numba']:>15.1f} {per_cycle['numpy']:>15.1f} "
                f"{per_cycle['numpy'] / per_cycle['numba']:>8.1f}x"
            )


if __name__ == "__main__":
    main()
