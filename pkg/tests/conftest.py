import os

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


def pytest_collection_modifyitems(config, items):
    if os.environ.get("HESSBASIS_LONG"):
        return
    skip = pytest.mark.skip(reason="set HESSBASIS_LONG=1 to run (enumerates W(E7), ~3M elements)")
    for item in items:
        if "long" in item.keywords:
            item.add_marker(skip)


def pytest_configure(config):
    config.addinivalue_line("markers", "long: opt-in tests that need minutes and a few GB of memory")


_CRITERIA: list[tuple[str, bool, str]] = []


class _Recorder:
    def __call__(self, label: str, ok: bool, detail: str = ""):
        _CRITERIA.append((label, ok, detail))
        return ok


@pytest.fixture
def record():
    return _Recorder()


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in _CRITERIA:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  [{detail}]" if detail else ""))
