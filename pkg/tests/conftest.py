import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from bipres.core import BigradedMatrix
from bipres.presentation import FIRep

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'} - {detail}")


@pytest.fixture
def running_example():
    """Q at (0,0) modulo both variables: one generator, two relations."""
    d1 = BigradedMatrix.zeros(0, [(0, 0)])
    d2 = BigradedMatrix.from_dense([[1, 1]], [(1, 0), (0, 1)], [(0, 0)])
    return FIRep(d2, d1)


@st.composite
def bigraded_matrices(draw, max_rows=6, max_cols=7, primes=(2, 3, 5, 7), max_grade=3):
    """Random colex-sorted bigraded matrices (no row grades)."""
    p = draw(st.sampled_from(primes))
    m = draw(st.integers(0, max_rows))
    n = draw(st.integers(0, max_cols))
    grades = draw(st.lists(st.tuples(st.integers(0, max_grade), st.integers(0, max_grade)), min_size=n, max_size=n))
    grades.sort(key=lambda g: (g[1], g[0]))
    vals = draw(st.lists(st.integers(0, p - 1), min_size=m * n, max_size=m * n))
    dense = np.array(vals, dtype=np.int64).reshape(m, n)
    return BigradedMatrix.from_dense(dense, np.array(grades, dtype=np.int64).reshape(-1, 2), None, p)


@st.composite
def firep_seeds(draw):
    return np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
