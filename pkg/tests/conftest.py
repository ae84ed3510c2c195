import time

import pytest
from hypothesis import HealthCheck, settings

from mvee.harness import gen_sample
from mvee.problem import lift
from mvee.solvers import Algorithm, SolverConfig, solve

settings.register_profile(
    "ci",
    derandomize=True,
    max_examples=30,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")

# The benchmark plan's default seed; instance k of a regime uses seed + k.
PLAN_SEED = 1234
SMALL = (10, 500)
MODERATE = (30, 1800)

# Iteration ceilings asserted by the convergence acceptance criteria.
SMALL_CAP_CD = 1380
SMALL_CAP_WA = 1254
MODERATE_CAP_CD = 2929
MODERATE_CAP_WA = 2686


def capped_reports(instances, algorithm, cap):
    """Run one algorithm over lifted instances with an iteration ceiling.

    Returns ({seed: SolveReport}, elapsed_seconds).
    """
    cfg = SolverConfig(algorithm=algorithm, epsilon=1e-7, max_iter=cap, seed=0)
    t0 = time.perf_counter()
    reports = {seed: solve(ps, cfg) for seed, ps in instances.items()}
    return reports, time.perf_counter() - t0


@pytest.fixture(scope="session")
def small_instances():
    n, m = SMALL
    return {s: lift(gen_sample(n, m, s)) for s in range(PLAN_SEED, PLAN_SEED + 10)}


@pytest.fixture(scope="session")
def moderate_instances():
    n, m = MODERATE
    return {s: lift(gen_sample(n, m, s)) for s in range(PLAN_SEED, PLAN_SEED + 10)}


@pytest.fixture(scope="session")
def cd_small(small_instances):
    return capped_reports(small_instances, Algorithm.CD_CONST, SMALL_CAP_CD)


@pytest.fixture(scope="session")
def wa_small(small_instances):
    return capped_reports(small_instances, Algorithm.WA, SMALL_CAP_WA)


@pytest.fixture(scope="session")
def cd_moderate(moderate_instances):
    return capped_reports(moderate_instances, Algorithm.CD_CONST, MODERATE_CAP_CD)


@pytest.fixture(scope="session")
def wa_moderate(moderate_instances):
    return capped_reports(moderate_instances, Algorithm.WA, MODERATE_CAP_WA)
