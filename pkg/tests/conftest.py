import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from dodge.data import Dataset, Split, version_split
from dodge.synthetic import SUITE, versions

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def make_blobs(n=80, p=3, seed=0, shift=2.0, with_loc=True, name="blobs"):
    rng = np.random.default_rng(seed)
    y = rng.random(n) < 0.4
    X = np.abs(rng.standard_normal((n, p)) + shift * y[:, None])
    loc = rng.integers(1, 500, n) if with_loc else None
    return Dataset(name, tuple(f"f{i}" for i in range(p)), X, y, loc)


@pytest.fixture
def blobs():
    return make_blobs()


@pytest.fixture
def blob_split():
    return Split(make_blobs(seed=1), make_blobs(seed=2))


@pytest.fixture(scope="session")
def syn_split():
    return version_split(versions(SUITE[3]))


# acceptance verdicts, collected by test_acceptance and echoed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
