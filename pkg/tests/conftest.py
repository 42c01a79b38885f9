import sys
from pathlib import Path

import pytest
from mpmath import mpf

sys.path.insert(0, str(Path(__file__).resolve().parent))

ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def record(criterion: str, ok: bool, detail: str = "") -> None:
    ACCEPTANCE[criterion] = (bool(ok), detail)


def rel_close(value: float, expected, rtol: float) -> bool:
    """|value - expected| <= rtol |expected|; an expected zero must be hit exactly.

    Oracle values below 1e-60 are its own rounding residue (80-digit working
    precision) and count as zero.
    """
    expected = mpf(expected)
    if abs(expected) < 1e-60:
        return value == 0
    return abs(mpf(value) - expected) <= rtol * abs(expected)


@pytest.fixture
def recorder():
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE, key=lambda k: int(k.split()[0][1:])):
        ok, detail = ACCEPTANCE[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
