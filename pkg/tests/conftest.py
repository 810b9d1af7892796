import numpy as np
import pytest

from riesz_lab import linalg


def random_pd(rng, m, beta, cond=4.0):
    """Random Hermitian positive definite matrix in native form."""
    g = linalg.gaussian_matrix(rng, m, m, beta)
    return linalg.hermitize(linalg.adjoint(g) @ g / m + linalg.identity(m, beta) / cond)


def random_upper(rng, m, beta):
    """Upper triangular (native) with positive real diagonal."""
    g = linalg.gaussian_matrix(rng, m, m, beta)
    c = linalg.to_coords(g, beta)
    c = c * np.triu(np.ones((m, m)), 1)
    c[0] += np.diag(rng.uniform(0.5, 2.0, m))
    return linalg.from_coords(c, beta)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "SUMMARY", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.SUMMARY:
        terminalreporter.write_line(line)
