import numpy as np
import pytest

from gpconfound.covkernel import MaternParams


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def ts_noise():
    """Error-field parameters of the one-dimensional studies."""
    return MaternParams(kappa=1.0, sigma=0.1, nu=1.0)


def pytest_terminal_summary(terminalreporter):
    from acceptance_report import REPORT

    if not REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(REPORT, key=lambda k: int(k[2:])):
        ok, detail = REPORT[key]
        terminalreporter.write_line(f"{key} {'PASS' if ok else 'FAIL'}  {detail}")
