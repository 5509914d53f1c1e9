"""Shared fixtures and the acceptance-criteria summary hook.

Acceptance tests register one line each through the `acceptance` fixture;
the terminal summary prints them in criterion order so a single run shows
every criterion's PASS/FAIL verdict with the measured numbers.
"""

import pytest

_LINES = []


def _record(num: int, name: str, ok: bool, detail: str, seconds: float,
            limit_s: float) -> None:
    _LINES.append((num, name, ok, detail, seconds, limit_s))


@pytest.fixture(scope="session")
def acceptance():
    """Callable (num, name, ok, detail, seconds, limit_s) -> None."""
    return _record


@pytest.fixture(scope="session")
def panel_seed():
    # one seed for every fixed random panel in the suite
    return 20260816


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for num, name, ok, detail, secs, limit in sorted(_LINES):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(
            f"ACCEPTANCE {num:02d} {name}: {status} ({detail}) "
            f"[{secs:.1f}s, limit {limit:.0f}s]"
        )
