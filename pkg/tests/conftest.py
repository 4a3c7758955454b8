"""Shared fixtures; also prints the acceptance summary at the end of a run."""

from __future__ import annotations

import pytest

_ACCEPTANCE: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record a verdict: ``criterion("3", ok, "detail")``."""

    def record(key: str, ok: bool, detail: str = "") -> None:
        _ACCEPTANCE[key] = (ok, detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE, key=lambda k: (int(k[0]), k)):
        ok, detail = _ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}" + (f" -- {detail}" if detail else ""))
