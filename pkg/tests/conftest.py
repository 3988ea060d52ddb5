import numpy as np
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile(
    "suite",
    max_examples=25,
    deadline=None,
    derandomize=True,
    suppress_health_check=[
        HealthCheck.too_slow,
        HealthCheck.filter_too_much,
        HealthCheck.data_too_large,
    ],
)
settings.load_profile("suite")

from splineqi import PartitionSpec, SplineSpace, generate_partition  # noqa: E402


def space_from(family="random", m=2, n=16, seed=0, a=0.0, b=1.0, ratio=1.0):
    spec = PartitionSpec(family=family, a=a, b=b, n=n, ratio=ratio, seed=seed)
    return SplineSpace.from_knots(generate_partition(spec, m))


def partition_battery(m, random_count=200, n_lo=22, n_hi=40, base_seed=0,
                      a=0.0, b=1.0):
    """Seeded random partitions plus graded families; the bound-sweep set."""
    rng = np.random.default_rng(base_seed + 1000 * m)
    for _ in range(random_count):
        n = int(rng.integers(n_lo, n_hi + 1))
        yield space_from("random", m, n, seed=int(rng.integers(2**31 - 1)), a=a, b=b)
    yield space_from("arithmetic", m, 30, a=a, b=b, ratio=3.0)
    for r in (1.5, 2.0, 4.0):
        yield space_from("geometric", m, 24, a=a, b=b, ratio=r)


def spaces(m_lo=1, m_hi=4, n_lo=4, n_hi=12):
    """Hypothesis strategy over small random-partition spline spaces."""
    return st.builds(
        lambda m, n, seed: space_from("random", m, n, seed),
        st.integers(m_lo, m_hi),
        st.integers(n_lo, n_hi),
        st.integers(0, 10_000),
    )


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance pass/fail lines after the capture-happy test run."""
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
