import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from metallic import builtin
from metallic.manifold import default_sample

settings.register_profile(
    "repo", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("repo")

EXAMPLE_IDS = builtin.example_ids()


@pytest.fixture(params=EXAMPLE_IDS)
def example(request):
    return builtin.load_example(request.param)


@pytest.fixture
def sample(example):
    return default_sample(example)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def acceptance(request):
    """Collects one verdict line per acceptance criterion for the run summary."""
    return request.config.stash.setdefault(ACCEPTANCE, {})


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE, {})
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(lines):
        terminalreporter.write_line(lines[key])
