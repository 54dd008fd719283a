import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def rand_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def rand_density(rng, d, rank=None):
    g = rand_complex(rng, d, rank or d)
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


_criteria = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_criterion_" in report.nodeid:
        num = int(report.nodeid.split("test_criterion_")[1].split("_")[0])
        _criteria[num] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    import test_acceptance

    lines = {int(l.split()[1].rstrip(":")): l for l in test_acceptance.RESULTS}
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        terminalreporter.write_line(lines.get(num, f"criterion {num}: FAIL  (error: {_criteria[num]})"))
