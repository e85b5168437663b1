import pytest

from k3aut.diagquartic import run_diagonal

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion this test belongs to")


@pytest.fixture(scope="session")
def diagonal_run():
    """Full chain for x^4 - y^4 = 3(z^4 - w^4); about 20 s, shared across files."""
    return run_diagonal(3, stages="certificate")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and not rep.failed):
        return
    n, title = mark.args
    entry = _CRITERIA.setdefault(n, {"title": title, "failed": [], "passed": []})
    (entry["failed"] if rep.failed else entry["passed"]).append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        e = _CRITERIA[n]
        verdict = "FAIL" if e["failed"] else "PASS"
        extra = f"  failing: {', '.join(e['failed'])}" if e["failed"] else ""
        terminalreporter.write_line(f"criterion {n} [{verdict}] {e['title']} "
                                    f"({len(e['passed'])} passed, {len(e['failed'])} failed){extra}")
