import numpy as np
import pytest

from robustar.model import ARSpec, ParameterSet, RegressionDataset


def simulate_ar_regression(rng, n=100, beta=(0.1, 0.5, 0.9), phi=(-0.7, 0.12), law="normal",
                           nu=3.0, burn=200):
    """Independent generator for tests (does not use robustar.simulation)."""
    beta = np.asarray(beta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    X = rng.standard_normal((n, beta.shape[0]))
    a = rng.standard_normal(n + burn) if law == "normal" else rng.standard_t(nu, n + burn)
    e = np.zeros(n + burn)
    for t in range(n + burn):
        e[t] = a[t] + sum(phi[j] * e[t - j - 1] for j in range(phi.shape[0]) if t - j - 1 >= 0)
    return RegressionDataset(X @ beta + e[burn:], X)


def random_params(rng, M, p, scale=0.5):
    return ParameterSet(rng.normal(0, scale, M), ARSpec(rng.uniform(-0.4, 0.4, p)),
                        float(rng.uniform(0.5, 2.0)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# One line per acceptance criterion, printed after the run.
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
