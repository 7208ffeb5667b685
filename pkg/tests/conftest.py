import sys
from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from wpbailey.qseries import Coefficient, QMonomial, QSeries

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

small_fractions = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def coefficients(draw, gaussian=True):
    re = draw(small_fractions)
    im = draw(small_fractions) if gaussian else Fraction(0)
    return Coefficient(re, im)


@st.composite
def nonzero_coefficients(draw):
    c = draw(coefficients())
    return c if c != 0 else Coefficient(1)


@st.composite
def series(draw, max_len=8, min_val=-2, max_val=3):
    val = draw(st.integers(min_val, max_val))
    body = draw(st.lists(coefficients(), min_size=0, max_size=max_len))
    extra = draw(st.integers(0, 3))
    return QSeries.from_list(val, body, val + len(body) + extra)


@st.composite
def monomials(draw, min_expo=-2, max_expo=3):
    return QMonomial(draw(nonzero_coefficients()), draw(st.integers(min_expo, max_expo)))


def q_series(order: int) -> QSeries:
    return QSeries.monomial(QMonomial(1, 1), order)


def coeffs(x: QSeries, lo: int, hi: int) -> list:
    return x.window(lo, hi)


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in acceptance.summary_lines():
        terminalreporter.write_line(line)
