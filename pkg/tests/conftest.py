import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_matrix(rng, m, n, rank=None):
    """Gaussian m x n matrix, optionally forced to the given rank."""
    if rank is None:
        return rng.standard_normal((m, n))
    if rank == 0:
        return np.zeros((m, n))
    return rng.standard_normal((m, rank)) @ rng.standard_normal((rank, n))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for label, check in mod.CRITERIA:
        if label in results:
            ok, detail = results[label]
            terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
