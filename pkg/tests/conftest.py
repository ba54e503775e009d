import numpy as np
import pytest

from fhspec import WORKING_PARAMS
from fhspec.disorder import classify_eigenpairs, sigma_sweep, standard_grid
from fhspec.spectral import eig_full, sort_by_momentum
from fhspec.toeplitz import build_toeplitz

WORKING_N = 160
WORKING_SEED = 42


@pytest.fixture(scope="session")
def params():
    return WORKING_PARAMS


@pytest.fixture(scope="session")
def T160():
    return build_toeplitz(WORKING_PARAMS, WORKING_N).entries


@pytest.fixture(scope="session")
def spec160(T160):
    return sort_by_momentum(eig_full(T160), WORKING_PARAMS)


@pytest.fixture(scope="session")
def working_sweep():
    """The fixed-seed sweep n=160, sigma in [0, 0.5] on 51 points."""
    sw = sigma_sweep(WORKING_PARAMS, WORKING_N, sigma_grid=standard_grid(0.5, 51), seed=WORKING_SEED)
    classify_eigenpairs(sw)
    return sw


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def acceptance_log(request):
    """Collects one PASS/FAIL line per acceptance criterion for the summary."""
    log = getattr(request.config, "_acceptance_lines", None)
    if log is None:
        log = request.config._acceptance_lines = []
    return log


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
