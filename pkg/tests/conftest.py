import pytest

_ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record one acceptance line: ``criterion(k, ok, summary)``."""

    def record(k: int, ok: bool, summary: str) -> bool:
        _ACCEPTANCE[k] = (ok, summary)
        print(f"criterion {k}: {'PASS' if ok else 'FAIL'} - {summary}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        ok, summary = _ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'} - {summary}")
