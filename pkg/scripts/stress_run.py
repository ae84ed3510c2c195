"""One-off large instance run (defaults: n=100, m=30000).

Solves a single generated instance with each requested algorithm under a
hard iteration budget and prints what actually happened.  Unlike the
benchmark driver this keeps the full trace out of memory-pressure paths
by not writing trace CSVs.
"""

import argparse
import time

from mvee.harness import gen_sample
from mvee.problem import lift
from mvee.solvers import Algorithm, SolverConfig, solve


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--m", type=int, default=30_000)
    ap.add_argument("--seed", type=int, default=1234)
    ap.add_argument("--eps", type=float, default=1e-7)
    ap.add_argument("--max-iter", type=int, default=10_000)
    ap.add_argument("--algorithms", nargs="+", default=["cd_const", "wa"],
                    choices=[a.value for a in Algorithm])
    args = ap.parse_args(argv)

    t0 = time.perf_counter()
    instance = lift(gen_sample(args.n, args.m, args.seed))
    print(f"instance n={args.n} m={args.m} seed={args.seed} "
          f"(built in {time.perf_counter() - t0:.1f}s)")
    for name in args.algorithms:
        cfg = SolverConfig(algorithm=Algorithm(name), epsilon=args.eps,
                           max_iter=args.max_iter)
        report = solve(instance, cfg)
        support = int(report.u_final.support.sum())
        print(f"{name:<12} converged={str(report.converged):<5} "
              f"iters={report.iterations:>6} eps={report.final_eps:.3e} "
              f"h={report.final_h:.6f} support={support} "
              f"wall={report.wall_time:.1f}s")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
