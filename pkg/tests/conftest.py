from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from quadham.model import degenerate_diag_model, degenerate_full_model, oscillator_model
from quadham.poly import CoeffPoly

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

MODELS_DIR = Path(__file__).resolve().parent.parent / "models"


@pytest.fixture
def models_dir():
    return MODELS_DIR


@pytest.fixture
def m_reg():
    return oscillator_model()


@pytest.fixture
def m_deg1():
    return degenerate_diag_model()


@pytest.fixture
def m_deg2():
    return degenerate_full_model()


@pytest.fixture
def m_deg1_potential():
    q2 = CoeffPoly.var("q2", 2)
    return degenerate_diag_model(-(q2 * q2) / 2)


small_fracs = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))


@st.composite
def polys(draw, num_q=2, num_p=2, max_degree=3, max_terms=4):
    """Random CoeffPoly of total degree <= max_degree."""
    n = 1 + num_q + num_p
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        deg = draw(st.integers(0, max_degree))
        e = [0] * n
        for _ in range(deg):
            e[draw(st.integers(0, n - 1))] += 1
        terms[tuple(e)] = draw(small_fracs)
    return CoeffPoly(terms, num_q, num_p)


# acceptance lines, filled by test_acceptance.py and printed after the run
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[key])
