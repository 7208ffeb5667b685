from fractions import Fraction

import pytest

from wpbailey.errors import NonConvergent, PoleDetected, UnknownIdentity
from wpbailey.expr import QSum, Term, prod
from wpbailey.identities import (
    F1_VARIANTS,
    REGISTRY,
    IdentityEntry,
    f1_series,
    f2_pair_expr,
    f2_series,
    f_series,
    first_mismatch,
    get_identity,
    identity_ids,
    identity_sides,
    theta_a,
    theta_psi,
    verify,
)
from wpbailey.qseries import Coefficient, QMonomial, QSeries, qm
from wpbailey.wppairs import DERIVED_IDS, PAIR_IDS, catalog_derived

THETA_ENTRIES = ("cor4.1", "cor4.2", "cor4.3", "cor4.4", "cor5.1", "cor5.2", "cor5.3", "psi2lambert", "eq25", "cor6", "eq27")


def lambert_oracle(c, e: int, base: int, order: int) -> list[Fraction]:
    """Coefficients 0..order-1 of sum_{n>=1} y/(1-y), y = c q^(e + base n), by geometric expansion.

    Blocks with negative valuation use y/(1-y) = -1 - sum_{m>=1} y^-m.
    """
    c = Fraction(c)
    out = [Fraction(0)] * order
    n = 1
    while True:
        v = e + base * n
        if v >= order:
            return out
        if v > 0:
            m = 1
            while m * v < order:
                out[m * v] += c**m
                m += 1
        elif v == 0:
            out[0] += c / (1 - c)
        else:
            out[0] -= 1
            m = 1
            while -m * v < order:
                out[-m * v] -= c ** (-m)
                m += 1
        n += 1


def combine(*blocks):
    total = [Fraction(0)] * len(blocks[0][1])
    for sign, block in blocks:
        total = [t + sign * b for t, b in zip(total, block)]
    return total


def lattice_oracle(order: int) -> list[int]:
    out = [0] * order
    for m in range(-order, order + 1):
        for n in range(-order, order + 1):
            e = m * m + m * n + n * n
            if e < order:
                out[e] += 1
    return out


# -- f1 -------------------------------------------------------------------


def test_f1_lambert_window():
    expected = combine((1, lambert_oracle(4, 2, 1, 5)), (-1, lambert_oracle(2, 1, 1, 5)))
    assert f1_series("lambert", qm(2, 1), 1, 5).window(0, 5) == expected
    assert expected == [0, 0, -2, 4 - 2, 4 - 2 - 4]


@pytest.mark.parametrize("variant", F1_VARIANTS)
def test_f1_pole_is_an_error(variant):
    # a = 1/q puts a q and a^2 q^2 on the unit
    with pytest.raises(PoleDetected):
        f1_series(variant, qm(1, -1), 1, 10)


def test_f1_at_one():
    # only the unit-pair form divides by 1 - a
    assert f1_series("lambert", qm(1, 0), 1, 10).is_zero
    with pytest.raises(PoleDetected):
        f1_series("unitpair", qm(1, 0), 1, 10)


@pytest.mark.parametrize("a,base", [(qm(2, 1), 1), (qm(3, 2), 1), (qm(1, -1), 3)], ids=["2q", "3q^2", "1/q base 3"])
def test_f1_three_forms_agree(a, base):
    forms = [f1_series(v, a, base, 60) for v in F1_VARIANTS]
    assert first_mismatch(forms[0], forms[1]) is None
    assert first_mismatch(forms[0], forms[2]) is None


def test_f1_unknown_variant():
    with pytest.raises(ValueError):
        f1_series("bogus", qm(2, 1), 1, 10)


# -- f2 -------------------------------------------------------------------


def test_f2_window():
    x = f2_series(qm(2, 1), 1, 6)
    assert x.window(0, 6) == [0, 0, -4, -4, -4, -4]
    assert f2_series(qm(2, 1), 1, 7)[6] == -4 - 16


@pytest.mark.parametrize("a", [qm(2, 1), qm(Fraction(5, 4), 0), qm(-3, 2)])
def test_f2_is_odd(a):
    assert (f2_series(a, 1, 40) + f2_series(-a, 1, 40)).is_zero


@pytest.mark.parametrize("a", [qm(2, 1), qm(Fraction(5, 4), 0)])
def test_f2_is_f1_difference(a):
    x = f1_series("lambert", a, 1, 40) - f1_series("lambert", -a, 1, 40)
    assert first_mismatch(x, f2_series(a, 1, 40)) is None


@pytest.mark.parametrize("derived_id", DERIVED_IDS)
@pytest.mark.parametrize("a", [qm(2, 1), qm(Fraction(5, 4), 0)], ids=["2q", "5/4"])
def test_f2_from_each_derived_pair(derived_id, a):
    x = f2_pair_expr(catalog_derived(derived_id), a).exact(40)
    assert first_mismatch(x, f2_series(a, 1, 40)) is None


# -- f --------------------------------------------------------------------


def test_f_vanishes_when_a_equals_k():
    assert f_series(qm(2, 1), qm(2, 1), qm(5, 1), 30).is_zero


def test_f_at_z_minus_one_is_f2_difference():
    a, b = qm(2, 1), qm(3, 2)
    x = f_series(a, b, qm(-1, 0), 40)
    assert first_mismatch(x, f2_series(a, 1, 40) - f2_series(b, 1, 40)) is None


def test_f_four_block_oracle():
    # a = 2q, k = 3q^2, z = 5q^3
    expected = combine(
        (1, lambert_oracle(3, 2, 1, 30)),
        (1, lambert_oracle(Fraction(2, 5), -2, 1, 30)),
        (-1, lambert_oracle(2, 1, 1, 30)),
        (-1, lambert_oracle(Fraction(3, 5), -1, 1, 30)),
    )
    assert f_series(qm(2, 1), qm(3, 2), qm(5, 3), 30).window(0, 30) == expected


# -- theta series ---------------------------------------------------------


def test_psi_triangular_exponents():
    x = theta_psi(1, 11)
    assert [e for e, _ in x.items()] == [0, 1, 3, 6, 10]
    assert all(c == 1 for _, c in x.items())


def test_psi_product_equals_sum():
    assert theta_psi(1, 40, "product") == theta_psi(1, 40, "sum")


def test_psi_base_two():
    assert [e for e, _ in theta_psi(2, 21).items()] == [0, 2, 6, 12, 20]


def test_a_of_q_lattice_window():
    assert theta_a(8).window(0, 8) == [1, 6, 0, 6, 6, 0, 0, 12]


def test_a_of_q_lattice_matches_brute_force():
    assert theta_a(60).window(0, 60) == lattice_oracle(60)


def test_a_of_q_lambert_form():
    assert theta_a(60, "lambert") == theta_a(60, "lattice")


def test_theta_forms_validated():
    with pytest.raises(ValueError):
        theta_psi(1, 10, "bogus")
    with pytest.raises(ValueError):
        theta_a(10, "bogus")


# -- registry -------------------------------------------------------------


def test_registry_contents():
    assert identity_ids() == [
        "qgauss", "eq03", "thm1", "thm2", "thm3", "eq117", "cor1.1", "cor1.2", "cor2", "cor3",
        "cor4.1", "cor4.2", "cor4.3", "cor4.4", "cor5.1", "cor5.2", "cor5.3",
        "psi2lambert", "eq25", "cor6", "eq27",
    ]  # fmt: skip
    assert all(REGISTRY[i].order == 60 for i in THETA_ENTRIES)


@pytest.mark.parametrize("ident", identity_ids())
def test_exact_defaults(ident):
    report = verify(ident)
    assert report.passed, report.first_mismatch
    assert report.order == get_identity(ident).order


@pytest.mark.parametrize("ident", identity_ids())
def test_exact_pass_implies_numeric_pass(ident):
    assert verify(ident, backend="numeric", q0=0.3).passed


def test_thm3_equal_parameters_vanish():
    lhs, rhs = identity_sides("thm3", {"a": qm(2, 1), "b": qm(2, 1)}, 40)
    assert lhs.is_zero and rhs.is_zero


def test_thm3_equal_constant_parameters_vanish():
    lhs, rhs = identity_sides("thm3", {"a": qm(Fraction(5, 4), 0), "b": qm(Fraction(5, 4), 0)}, 40)
    assert lhs.is_zero and rhs.is_zero


def test_qgauss_sides():
    lhs, rhs = identity_sides("qgauss", {"A": qm(1, 1), "B": qm(1, 2), "C": qm(1, 5)}, 30)
    assert lhs.order >= 30 - 5 and first_mismatch(lhs, rhs) is None


def test_cor6_left_side_is_psi_product():
    lhs, rhs = identity_sides("cor6", order=60)
    from wpbailey.qseries import substitute_power

    psi2 = substitute_power(theta_psi(1, 30), 2)
    psi6 = substitute_power(theta_psi(1, 10), 6)
    expected = (psi2 * psi6).scale(qm(2, 1))
    assert first_mismatch(lhs, expected) is None
    assert first_mismatch(lhs, rhs) is None


def test_cor4_1_example():
    assert verify("cor4.1", order=40).passed


def test_eq25_numeric_gaussian_point():
    report = verify("eq25", backend="numeric", q0=0.2 + 0.1j)
    assert report.passed
    assert abs(report.lhs - report.rhs) <= 1e-9


def test_eq117_example():
    assert verify("eq117", {"a": qm(2, 1), "k": qm(3, 2), "z": qm(5, 3)}, 40).passed


def test_cor4_3_other_rho():
    assert verify("cor4.3", {"rho1": qm(-2, 3), "rho2": qm(Fraction(1, 3), 6)}).passed


@pytest.mark.parametrize("pair_id", PAIR_IDS)
@pytest.mark.parametrize("ident", ["eq03", "thm1", "thm2"])
def test_pair_identities_for_each_pair(ident, pair_id):
    params = None
    if pair_id == "sqrtk":
        params = {"a": qm(2, 2), "k": qm(4, 2)} if ident == "eq03" else {"a": qm(3, 2), "k": qm(4, 2), "z": qm(5, 2)}
    assert verify(ident, params, 30, pair=pair_id).passed
    assert verify(ident, params, backend="numeric", pair=pair_id).passed


def test_thm2_collapses_for_unit_pair():
    lhs, rhs = identity_sides("thm2", order=30, pair="unit")
    assert lhs.is_zero and rhs.is_zero


@pytest.mark.parametrize("derived_id", DERIVED_IDS)
def test_thm3_each_derived_pair(derived_id):
    assert verify("thm3", pair=derived_id).passed


@pytest.mark.parametrize("derived_id", DERIVED_IDS)
def test_thm3_gaussian_sample(derived_id):
    params = {"a": qm(Fraction(5, 4), 0), "b": QMonomial(Coefficient(1, Fraction(1, 2)), 0)}
    assert verify("thm3", params, pair=derived_id).passed


def test_thm3_numeric_gaussian_point():
    assert verify("thm3", backend="numeric", q0=0.2 + 0.1j, pair="singh*").passed


def test_thm3_growing_parameters_do_not_converge(monkeypatch):
    # with a = 2q the summands of f2(1/a) have valuation -n, so the formal
    # sum never settles
    monkeypatch.setattr(QSum, "max_terms", 300)
    with pytest.raises(NonConvergent):
        verify("thm3", {"a": qm(2, 1), "b": qm(3, 2)}, 40, pair="trivial*")


def test_pole_names_factor():
    with pytest.raises(PoleDetected, match=r"1 - \(1\)\*q\^0"):
        verify("thm3", {"a": qm(1, 0)})


def test_unknown_identity():
    with pytest.raises(UnknownIdentity):
        verify("nope")


def test_unknown_parameter():
    with pytest.raises(ValueError):
        verify("cor1.1", {"x": qm(2, 1)})


def test_pair_rejected_for_pair_free_entry():
    with pytest.raises(ValueError):
        verify("cor2", pair="unit")


def test_unknown_backend():
    with pytest.raises(ValueError):
        identity_sides("cor1.1", backend="float")


def test_numeric_point_must_be_inside_disc():
    with pytest.raises(ValueError):
        identity_sides("cor1.1", backend="numeric", q0=1.5)


def bogus_entry():
    def build(p):
        return Term(prod(num=[qm(2, 1)])), Term(prod(num=[qm(2, 1)], den=[qm(1, 7)]))

    return IdentityEntry("bogus", "deliberately false", build, order=20)


def test_mismatch_is_reported(monkeypatch):
    monkeypatch.setitem(REGISTRY, "bogus", bogus_entry())
    report = verify("bogus")
    assert report.outcome == "fail" and not report.passed
    assert report.first_mismatch["exponent"] == 7
    assert report.first_mismatch["lhs"] == 0 and report.first_mismatch["rhs"] == 1
    numeric = verify("bogus", backend="numeric", q0=0.3)
    assert numeric.outcome == "fail"
    assert numeric.first_mismatch["difference"] > 1e-5
