from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oscgauss.potential import trace_scurve  # noqa: E402

ACCEPTANCE_LINES: list[str] = []
_CURVES: dict = {}


def get_curve(lam, step=1e-3):
    """Traced S-curves are shared across the whole session."""
    key = (str(lam), step)
    if key not in _CURVES:
        _CURVES[key] = trace_scurve(lam, step=step)
    return _CURVES[key]


@pytest.fixture(scope="session")
def curves():
    return get_curve


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
