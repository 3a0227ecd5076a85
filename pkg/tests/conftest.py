import sys

import numpy as np
import pytest

from mdsplus import cli

# (criterion number, title, passed, detail) filled in by test_acceptance.py
ACCEPTANCE_RESULTS: list = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def run_cli(capsys):
    """Invoke the CLI in-process; returns (exit code, stdout, stderr)."""

    def _run(*argv):
        try:
            code = cli.main([str(a) for a in argv])
        except SystemExit as exc:  # argparse --help / usage errors
            code = exc.code
        out, err = capsys.readouterr()
        return code, out, err

    return _run


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, ok, detail in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} [{num}] {title}: {detail}")
