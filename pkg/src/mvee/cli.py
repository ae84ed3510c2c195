"""Command-line entry point: solve, gen, bench, and curves subcommands.

Exit codes: 0 success, 1 usage or input error, 2 non-convergence (the
ellipsoid is still emitted with "converged": false).
"""

import argparse
import configparser
import sys
from pathlib import Path

from .errors import MveeError, PlanError, PointParseError
from .harness import BenchmarkPlan, Regime, emit_decrement_curves, run_benchmark
from .problem import (
    PointSet,
    lift,
    read_points,
    recover_ellipsoid,
    write_ellipsoid_json,
    write_points,
)
from .solvers import Algorithm, InitScheme, SolverConfig, solve, write_trace

# accepted names on the command line and in plan files
ALGORITHM_NAMES = {
    "fwk": Algorithm.FWK,
    "wa": Algorithm.WA,
    "cd": Algorithm.CD_CONST,
    "cd_const": Algorithm.CD_CONST,
    "cd_diminish": Algorithm.CD_DIMINISH,
    "cd_backtrack": Algorithm.CD_BACKTRACK,
    "rcd": Algorithm.RCD,
}

DEFAULT_PLAN = """\
[plan]
seed = 1234
epsilon = 1e-7
max_iter = 100000
init = kumar_yildirim
algorithms = cd_const, wa

[regime.small]
n = 10
m = 500
repetitions = 10

[regime.moderate]
n = 30
m = 1800
repetitions = 10
"""


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; the contract here is 1
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="mvee",
                     description="Minimum volume enclosing ellipsoid solvers")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve one instance from a point file")
    p_solve.add_argument("input", help="point file, one point per row")
    p_solve.add_argument("--algorithm", default="cd",
                         choices=sorted(ALGORITHM_NAMES))
    p_solve.add_argument("--epsilon", type=float, default=1e-7)
    p_solve.add_argument("--max-iter", type=int, default=100_000)
    p_solve.add_argument("--seed", type=int, default=0)
    p_solve.add_argument("--init", default="kumar_yildirim",
                         choices=[i.value for i in InitScheme])
    p_solve.add_argument("--symmetric", action="store_true",
                         help="rows are one representative per +-x pair")
    p_solve.add_argument("--trace-out", default=None,
                         help="write the per-iteration trace CSV here")
    p_solve.add_argument("--json-out", default=None,
                         help="write the ellipsoid JSON here instead of stdout")

    p_gen = sub.add_parser("gen", help="generate a random instance")
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--m", type=int, required=True)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--output", required=True)

    p_bench = sub.add_parser("bench", help="run a benchmark plan")
    p_bench.add_argument("--plan", default=None,
                         help="INI plan file; omitted runs the built-in default")
    p_bench.add_argument("--output-dir", default="benchmark_out")
    p_bench.add_argument("--parallelism", type=int, default=1)

    p_curves = sub.add_parser("curves",
                              help="emit the per-step decrement curves")
    p_curves.add_argument("--n-values", default="1,2,3",
                          help="comma-separated dimensions")
    p_curves.add_argument("--output", default="decrement_curves.csv")
    return parser


def _cmd_solve(args) -> int:
    rows = read_points(args.input)
    original = PointSet(rows.T, symmetric=args.symmetric)
    lifted = original if original.symmetric else lift(original)
    config = SolverConfig(algorithm=ALGORITHM_NAMES[args.algorithm],
                          epsilon=args.epsilon, max_iter=args.max_iter,
                          init=InitScheme(args.init), seed=args.seed)
    report = solve(lifted, config)
    ellipsoid = recover_ellipsoid(report.u_final, original, lifted)
    extra = {"converged": report.converged,
             "iterations": report.iterations,
             "final_eps": report.final_eps}
    if args.json_out:
        with open(args.json_out, "w") as fh:
            write_ellipsoid_json(ellipsoid, fh, extra)
    else:
        write_ellipsoid_json(ellipsoid, sys.stdout, extra)
    if args.trace_out:
        write_trace(report.trace, args.trace_out)
    return 0 if report.converged else 2


def _cmd_gen(args) -> int:
    from .harness import gen_sample

    if args.m < args.n + 1:
        raise MveeError(f"m must be at least n + 1 (got n={args.n}, m={args.m})")
    instance = gen_sample(args.n, args.m, args.seed)
    write_points(args.output, instance.points.T)
    return 0


def _load_plan(path) -> tuple[list[Regime], list[SolverConfig], int]:
    cp = configparser.ConfigParser()
    if path is None:
        cp.read_string(DEFAULT_PLAN)
    else:
        try:
            with open(path) as fh:
                cp.read_file(fh)
        except OSError as exc:
            raise PlanError(f"cannot read plan: {exc}") from None
        except configparser.Error as exc:
            raise PlanError(f"malformed plan: {exc}") from None
    if "plan" not in cp:
        raise PlanError("plan file needs a [plan] section")
    try:
        sec = cp["plan"]
        seed = sec.getint("seed", 1234)
        epsilon = sec.getfloat("epsilon", 1e-7)
        max_iter = sec.getint("max_iter", 100_000)
        init = InitScheme(sec.get("init", "kumar_yildirim"))
        names = [t.strip() for t in sec.get("algorithms", "cd_const,wa").split(",")
                 if t.strip()]
        algorithms = []
        for name in names:
            if name not in ALGORITHM_NAMES:
                raise PlanError(f"unknown algorithm {name!r}")
            algorithms.append(SolverConfig(algorithm=ALGORITHM_NAMES[name],
                                           epsilon=epsilon, max_iter=max_iter,
                                           init=init, seed=seed))
        regimes = []
        for section in cp.sections():
            if not section.startswith("regime."):
                continue
            rsec = cp[section]
            regimes.append(Regime(section.split(".", 1)[1],
                                  rsec.getint("n"), rsec.getint("m"),
                                  rsec.getint("repetitions", 1)))
    except (ValueError, TypeError) as exc:
        raise PlanError(f"malformed plan: {exc}") from None
    if not regimes:
        raise PlanError("plan file needs at least one [regime.<label>] section")
    return regimes, algorithms, seed


def _cmd_bench(args) -> int:
    regimes, algorithms, seed = _load_plan(args.plan)
    plan = BenchmarkPlan(regimes=regimes, algorithms=algorithms, seed=seed,
                         output_dir=Path(args.output_dir))
    rows = run_benchmark(plan, parallelism=max(1, args.parallelism))
    failed = [r for r in rows if r.error is not None]
    for r in failed:
        print(f"row ({r.regime}, {r.algorithm}, rep {r.rep}) failed: {r.error}",
              file=sys.stderr)
    print(f"wrote {len(rows)} rows to {args.output_dir}")
    return 2 if failed else 0


def _cmd_curves(args) -> int:
    try:
        n_values = [int(t) for t in args.n_values.split(",") if t.strip()]
    except ValueError:
        raise MveeError(f"bad dimension list {args.n_values!r}") from None
    if not n_values or any(n < 1 for n in n_values):
        raise MveeError("dimensions must be positive integers")
    emit_decrement_curves(n_values, args.output)
    print(f"wrote curves for n in {n_values} to {args.output}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "gen":
            return _cmd_gen(args)
        if args.command == "bench":
            return _cmd_bench(args)
        return _cmd_curves(args)
    except (PointParseError, PlanError) as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (MveeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
