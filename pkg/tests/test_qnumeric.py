import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import q_series
from wpbailey.errors import NonConvergent, PoleProximity
from wpbailey.identities import get_identity, identity_ids, identity_sides
from wpbailey.qnumeric import NumericConfig, eval_series_at, num_poch, num_sum
from wpbailey.qseries import poch_infinite, qm, series_invert

points = st.complex_numbers(max_magnitude=0.9, allow_nan=False, allow_infinity=False)
bases = st.complex_numbers(max_magnitude=0.8, allow_nan=False, allow_infinity=False)


def test_empty_product():
    assert num_poch(0.7 + 0.2j, 0.5, 0) == 1


def test_two_factor_product():
    assert num_poch(0.5, 0.5, 2) == pytest.approx(0.375, abs=1e-15)


def test_euler_product_at_tenth():
    direct = 1.0
    for j in range(1, 40):
        direct *= 1 - 0.1**j
    assert num_poch(0.1, 0.1, math.inf) == pytest.approx(direct, abs=1e-15)
    assert num_poch(0.1, 0.1, math.inf).real == pytest.approx(0.8900100999989990, abs=1e-13)


def test_pole_proximity():
    with pytest.raises(PoleProximity):
        num_poch(4.0, 0.5, 5)


def test_infinite_product_needs_unit_disc():
    with pytest.raises(ValueError):
        num_poch(0.1, 1.2)


@given(points, bases, st.integers(0, 30))
def test_poch_recurrence(x, q, n):
    lhs = num_poch(x, q, n + 1, check_poles=False)
    rhs = num_poch(x, q, n, check_poles=False) * (1 - x * q**n)
    assert abs(lhs - rhs) <= 1e-12 * max(1, abs(lhs))


def test_psi_partial_sum():
    assert num_sum(lambda n: 0.1 ** (n * (n + 1) // 2), start=0) == pytest.approx(1.1010010001, abs=1e-12)


def test_zero_sum():
    assert num_sum(lambda n: 0) == 0


def test_geometric_sum():
    assert num_sum(lambda n: 0.5**n) == pytest.approx(1.0, abs=1e-12)


def test_sum_nonconvergent():
    with pytest.raises(NonConvergent):
        num_sum(lambda n: 1.0, NumericConfig(max_terms=100))


@given(st.floats(0.05, 0.9))
def test_sum_stable_under_doubling_max_terms(r):
    small = NumericConfig(max_terms=2000)
    big = NumericConfig(max_terms=4000)
    try:
        x = num_sum(lambda n: r**n, small)
    except NonConvergent:
        return
    assert abs(x - num_sum(lambda n: r**n, big)) <= small.term_tol * max(1, abs(x))


def test_config_validation():
    with pytest.raises(ValueError):
        NumericConfig(term_tol=2)
    with pytest.raises(ValueError):
        NumericConfig(streak=0)
    with pytest.raises(ValueError):
        NumericConfig(pole_tol=0)


def test_eval_polynomial():
    assert eval_series_at(1 - q_series(4), 0.5) == pytest.approx(0.5)


def test_eval_geometric():
    assert eval_series_at(series_invert(1 - q_series(40)), 0.5) == pytest.approx(2.0, abs=1e-11)


def test_eval_matches_num_poch():
    x = eval_series_at(poch_infinite(qm(1, 1), 1, 40), 0.1)
    assert abs(x - num_poch(0.1, 0.1)) <= 1e-12


def test_eval_rejects_outside_disc():
    with pytest.raises(ValueError):
        eval_series_at(1 - q_series(4), 1.0)


# Both entries expand in powers of q/(radius 1/3); at q0 = 0.3 the tail beyond
# the stored window decays like 0.9^e and stays about twice the bound.
SLOW_TAIL = {("eq117", 0.3), ("cor2", 0.3)}


# double-precision evaluation leaves residues near 1e-15 even when the
# truncation term is far smaller
ROUNDING = 1e-12


def cross_backend_cases():
    for q0 in (0.3, 0.2 + 0.1j, -0.25):
        for ident in identity_ids():
            marks = ()
            if (ident, q0) in SLOW_TAIL:
                marks = pytest.mark.xfail(strict=True, reason="tail decays like 0.9^e")
            yield pytest.param(ident, q0, marks=marks, id=f"{ident}@{q0}")


@pytest.mark.parametrize("ident,q0", list(cross_backend_cases()))
def test_cross_backend(ident, q0):
    order = get_identity(ident).order
    exact = identity_sides(ident, order=order)
    numeric = identity_sides(ident, backend="numeric", q0=q0)
    for x, y in zip(exact, numeric):
        mass = sum(abs(complex(c)) for _, c in x.items())
        assert abs(eval_series_at(x, q0) - y) <= ROUNDING + 10 * abs(q0) ** order * mass
