import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile("default")

_VERDICTS = pytest.StashKey[list]()
_SUITES = pytest.StashKey[dict]()


def pytest_configure(config):
    config.addinivalue_line("markers", "suite(name): counts towards a named property suite")
    config.stash[_VERDICTS] = []
    config.stash[_SUITES] = {}


@pytest.fixture
def verdict(request):
    """Record one acceptance line: verdict(name, ok, detail)."""
    def record(name, ok, detail=""):
        request.config.stash[_VERDICTS].append((name, bool(ok), detail))
        return ok
    return record


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" or rep.failed:
        for m in item.iter_markers("suite"):
            passed, failed = item.config.stash[_SUITES].get(m.args[0], (0, 0))
            if rep.failed:
                failed += 1
            elif rep.passed:
                passed += 1
            item.config.stash[_SUITES][m.args[0]] = (passed, failed)


def pytest_terminal_summary(terminalreporter, config):
    verdicts = config.stash.get(_VERDICTS, [])
    suites = config.stash.get(_SUITES, {})
    if not verdicts and not suites:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in verdicts:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}".rstrip())
    for name in sorted(suites):
        passed, failed = suites[name]
        terminalreporter.write_line(
            f"{'FAIL' if failed else 'PASS'}  property suite: {name}  ({passed} passed, {failed} failed)")
