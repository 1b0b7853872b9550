"""Collects acceptance-criterion outcomes and prints one PASS/FAIL line per criterion."""
import pytest

_outcomes: dict[int, dict] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    entry = _outcomes.setdefault(number, {"title": title, "passed": True, "detail": ""})
    if rep.failed:
        entry["passed"] = False
    if rep.when == "call" or rep.failed:
        details = [v for k, v in item.user_properties if k == "detail"]
        if details:
            entry["detail"] = "; ".join(details)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_outcomes):
        e = _outcomes[number]
        status = "PASS" if e["passed"] else "FAIL"
        line = f"[{status}] AC{number:<2} {e['title']}"
        if e["detail"]:
            line += f" -- {e['detail']}"
        terminalreporter.write_line(line)
