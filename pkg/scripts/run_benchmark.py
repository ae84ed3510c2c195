"""Benchmark driver: solve seeded instance batches and print mean counts.

Writes results.csv, results_means.csv, and one trace CSV per run under
--out, then prints the per-(regime, algorithm) means that the CSV holds.

Examples
--------
python scripts/run_benchmark.py --out runs/default
python scripts/run_benchmark.py --regimes small --algorithms cd_const wa fwk \
    --reps 3 --max-iter 50000
"""

import argparse
import time

from mvee.harness import BenchmarkPlan, Regime, run_benchmark
from mvee.solvers import Algorithm, SolverConfig

PRESETS = {
    "small": Regime("small", n=10, m=500, repetitions=10),
    "moderate": Regime("moderate", n=30, m=1800, repetitions=10),
}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--regimes", nargs="+", default=["small", "moderate"],
                    choices=sorted(PRESETS))
    ap.add_argument("--algorithms", nargs="+", default=["cd_const", "wa"],
                    choices=[a.value for a in Algorithm])
    ap.add_argument("--reps", type=int, default=None,
                    help="override repetitions per regime")
    ap.add_argument("--eps", type=float, default=1e-7)
    ap.add_argument("--max-iter", type=int, default=200_000)
    ap.add_argument("--seed", type=int, default=1234)
    ap.add_argument("--parallelism", type=int, default=1)
    ap.add_argument("--no-traces", action="store_true")
    ap.add_argument("--out", default="runs/benchmark")
    args = ap.parse_args(argv)

    regimes = []
    for name in args.regimes:
        preset = PRESETS[name]
        reps = args.reps or preset.repetitions
        regimes.append(Regime(preset.label, preset.n, preset.m, reps))
    configs = [SolverConfig(algorithm=Algorithm(a), epsilon=args.eps,
                            max_iter=args.max_iter)
               for a in args.algorithms]
    plan = BenchmarkPlan(regimes=regimes, algorithms=configs,
                         seed=args.seed, output_dir=args.out)

    t0 = time.perf_counter()
    rows = run_benchmark(plan, parallelism=args.parallelism,
                         write_traces=not args.no_traces)
    wall = time.perf_counter() - t0

    groups = {}
    for row in rows:
        groups.setdefault((row.regime, row.algorithm), []).append(row)
    print(f"{'regime':<10} {'algorithm':<12} {'mean_iters':>10} "
          f"{'mean_s':>8} {'converged':>9}")
    for (regime, alg), rs in groups.items():
        iters = sum(r.iterations for r in rs) / len(rs)
        secs = sum(r.seconds for r in rs) / len(rs)
        conv = sum(r.converged for r in rs)
        print(f"{regime:<10} {alg:<12} {iters:>10.1f} {secs:>8.2f} "
              f"{conv:>6}/{len(rs)}")
    failed = [r for r in rows if r.error]
    if failed:
        print(f"{len(failed)} runs raised errors; see results.csv")
    print(f"total wall time {wall:.1f}s; outputs in {args.out}/")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
