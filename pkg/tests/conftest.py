import time

import pytest

from helpers import BUSINESS_HEADER, POST_HEADER, write_csv


@pytest.fixture
def write_files(tmp_path):
    """Write businesses/posts CSVs and return their paths."""

    def _write(businesses, posts, name="data"):
        d = tmp_path / name
        d.mkdir(exist_ok=True)
        return (write_csv(d / "posts.csv", POST_HEADER, posts),
                write_csv(d / "businesses.csv", BUSINESS_HEADER, businesses))

    return _write


# one line per acceptance criterion at the end of the run
_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_call(item):
    t0 = time.perf_counter()
    yield
    item._elapsed = time.perf_counter() - t0


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        num, title = mark.args
        _ACCEPTANCE[num] = (title, rep.outcome, getattr(item, "_elapsed", 0.0))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_ACCEPTANCE):
        title, outcome, elapsed = _ACCEPTANCE[num]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{verdict}] {num}. {title} ({elapsed:.2f} s)")
