import shutil
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES = REPO_ROOT / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def workdir(tmp_path) -> Path:
    """Copy of the fixture tree to run pipelines in without polluting the repo."""
    target = tmp_path / "fixtures"
    shutil.copytree(FIXTURES, target)
    return target


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion."""
    lines = []
    for outcome in ("passed", "failed"):
        for report in terminalreporter.stats.get(outcome, []):
            if "test_acceptance" in report.nodeid:
                name = report.nodeid.split("::", 1)[-1]
                lines.append((name, outcome))
    if lines:
        terminalreporter.section("acceptance criteria")
        for name, outcome in sorted(lines):
            terminalreporter.write_line(f"[{'PASS' if outcome == 'passed' else 'FAIL'}] {name}")
