import numpy as np
import pytest

from sparsemm.csr import Triplet

# A 5x4 matrix whose rows hold one to three entries.
SMALL_DENSE = np.array(
    [
        [0, 0, 1, 2],
        [0, 0, 3, 0],
        [4, 5, 0, 0],
        [6, 0, 0, 0],
        [7, 0, 8, 9],
    ],
    dtype=np.float32,
)
SMALL_IA = [0, 2, 3, 5, 6, 9]
SMALL_JA = [2, 3, 2, 0, 1, 0, 0, 2, 3]
SMALL_VALUES = [1, 2, 3, 4, 5, 6, 7, 8, 9]


@pytest.fixture
def small_triplets():
    r, c = np.nonzero(SMALL_DENSE)
    trip = [Triplet(int(i), int(j), float(SMALL_DENSE[i, j])) for i, j in zip(r, c)]
    # Shuffle so build_csr has to sort.
    return [trip[i] for i in np.random.default_rng(3).permutation(len(trip))]


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


# -- acceptance reporting ----------------------------------------------------

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        number, title = marker.args
        # Parametrized criteria: any failing instance fails the criterion.
        prev = _criteria.get(number, (title, "passed"))[1]
        _criteria[number] = (title, report.outcome if prev == "passed" else prev)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, outcome = _criteria[number]
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status}  {title}")
