import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import pytest


@pytest.fixture
def verdict(request, capsys):
    """verdict(n, label, ok, detail): log one PASS/FAIL line, then assert ok."""
    lines = request.config.__dict__.setdefault("_acceptance_lines", [])

    def record(n: int, label: str, ok: bool, detail: str = "") -> None:
        line = f"criterion {n:>2} {'PASS' if ok else 'FAIL'}  {label}" + (f"  ({detail})" if detail else "")
        lines.append((n, line))
        with capsys.disabled():
            print("\n" + line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.__dict__.get("_acceptance_lines")
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
