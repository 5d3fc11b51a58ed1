import pytest

# one line per acceptance criterion, printed after the run
_results = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    label = getattr(getattr(item, "function", None), "_criterion", None)
    if label and rep.when == "call":
        _results[label] = (rep.passed, rep.duration)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_results):
        passed, duration = _results[label]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{status}  {label}  [{duration:.1f}s]")
