import re

import pytest

_ACCEPTANCE = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = re.match(r"test_criterion_(\d+)", item.name)
    if m is None or not (rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed")):
        return
    status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[rep.outcome]
    doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
    _ACCEPTANCE[(int(m.group(1)), item.name)] = (status, doc)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for (n, name), (status, doc) in sorted(_ACCEPTANCE.items()):
        terminalreporter.write_line(f"criterion {n:>2}: {status}  {doc}  [{name}]")
