import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from dudleylab.approx_lab import random_metric_space, random_probability

settings.register_profile("dev", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("dev")

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def random_space(seed, n_min=2, n_max=8):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(n_min, n_max + 1))
    return random_metric_space(n, rng), rng


def random_pair(seed, n_min=2, n_max=8, sparsity=0.0):
    space, rng = random_space(seed, n_min, n_max)
    return random_probability(space, rng, sparsity), random_probability(space, rng, sparsity), rng


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    lines = [
        value
        for key in ("passed", "failed")
        for rep in terminalreporter.stats.get(key, [])
        if rep.when == "call"
        for name, value in rep.user_properties
        if name == "criterion"
    ]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
