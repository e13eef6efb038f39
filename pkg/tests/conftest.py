import pytest

_VERDICTS: dict[str, tuple[str, str]] = {}


@pytest.fixture()
def verdict(request):
    """Record one line per acceptance criterion; printed in the terminal summary."""
    name = request.node.get_closest_marker("criterion").args[0]
    notes: list[str] = []
    _VERDICTS[name] = ("FAIL", "")
    yield notes.append
    detail = "; ".join(notes)
    rep = getattr(request.node, "rep_call", None)
    if rep is None:
        return
    status = "PASS" if rep.passed else "SKIP" if rep.skipped else "FAIL"
    _VERDICTS[name] = (status, detail)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" or (rep.when == "setup" and rep.skipped):
        item.rep_call = rep


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion label")


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_VERDICTS, key=lambda s: int(s.split()[0])):
        status, detail = _VERDICTS[name]
        terminalreporter.write_line(f"[{status}] {name}" + (f"  ({detail})" if detail else ""))
