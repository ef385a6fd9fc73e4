from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

SCENES = Path(__file__).resolve().parent.parent / "demos" / "scenes"

_acceptance = {}
_details = {}


@pytest.fixture
def scenes() -> Path:
    return SCENES


@pytest.fixture
def detail(request):
    """Record a measured value for the acceptance summary of the current criterion."""
    marker = request.node.get_closest_marker("acceptance")
    number = marker.args[0] if marker else None

    def record(text: str) -> None:
        _details.setdefault(number, []).append(text)

    return record


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    failed = rep.failed or (rep.when == "call" and rep.skipped)
    prev = _acceptance.get(number, (title, True))
    _acceptance[number] = (title, prev[1] and not failed)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        title, ok = _acceptance[number]
        terminalreporter.write_line(f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}")
        for text in _details.get(number, ()):
            terminalreporter.write_line(f"              {text}")
