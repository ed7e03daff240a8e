import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from polystab import assemble_full, assemble_triangular

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ORACLES = json.loads((Path(__file__).parent / "oracles" / "frozen.json").read_text())


@pytest.fixture(scope="session")
def oracles():
    return ORACLES


def stable_block(rng, n, shift=0.5):
    """Random complex n x n matrix with spectral abscissa <= -shift."""
    m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    m /= np.sqrt(n)
    abscissa = np.max(np.linalg.eigvals(m).real)
    return m - (abscissa + shift) * np.eye(n)


def random_triangular(rng, max_n=8, max_p=2, shift=0.5):
    n1, n2 = rng.integers(1, max_n + 1, size=2)
    p = int(rng.integers(0, max_p + 1))
    b = rng.standard_normal((n1, p)) + 1j * rng.standard_normal((n1, p))
    c = rng.standard_normal((p, n2)) + 1j * rng.standard_normal((p, n2))
    return assemble_triangular(stable_block(rng, n1, shift), stable_block(rng, n2, shift), b, c)


def random_full(rng, max_n=8, max_p=2, shift=0.5, scale=1.0):
    n1, n2 = rng.integers(1, max_n + 1, size=2)
    p1, p2 = (int(x) for x in rng.integers(0, max_p + 1, size=2))

    def cplx(r, c):
        return scale * (rng.standard_normal((r, c)) + 1j * rng.standard_normal((r, c)))

    return assemble_full(stable_block(rng, n1, shift), stable_block(rng, n2, shift),
                         b1=cplx(n1, p1), c1=cplx(p2, n1), b2=cplx(n2, p2), c2=cplx(p1, n2))


def spectra_match(e1, e2, atol):
    """Largest distance under the best one-to-one pairing of two eigenvalue multisets."""
    from scipy.optimize import linear_sum_assignment
    cost = np.abs(np.asarray(e1)[:, None] - np.asarray(e2)[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max()) <= atol


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
