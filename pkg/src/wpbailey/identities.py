"""Named q-series and a registry of verifiable series/product identities.

Every identity is two :class:`~wpbailey.expr.Expr` trees built from the same
parameters, so one transcription serves both backends. Parameters are
:class:`~wpbailey.qseries.QMonomial` values; identities that accept an
arbitrary WP-Bailey pair (or derived pair) take its catalog id as ``pair``.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from .errors import UnknownIdentity
from .expr import Custom, Expr, Inverse, Mul, Product, QSum, Term, poch, prod
from .qnumeric import DEFAULT_CONFIG, NumericConfig, as_cpoint
from .qseries import Coefficient, QMonomial, QSeries, qm
from .wppairs import DerivedPairSpec, PairSpec, catalog_derived, catalog_pair

__all__ = [
    "IdentityEntry",
    "VerificationReport",
    "REGISTRY",
    "f1_series",
    "f2_series",
    "f_series",
    "f1_expr",
    "f2_expr",
    "f2_pair_expr",
    "f_expr",
    "derived_f1_expr",
    "theta_a",
    "theta_a_expr",
    "theta_psi",
    "theta_psi_expr",
    "identity_ids",
    "identity_sides",
    "get_identity",
    "verify",
]

ONE = QMonomial(1, 0)
I = Coefficient(0, 1)
HALF = Fraction(1, 2)


def _q(base: int = 1) -> QMonomial:
    return qm(1, base)


def _mono(c, e: int = 0) -> QMonomial:
    return QMonomial(c, e)


def _as_list(t) -> list[Product]:
    return [t] if isinstance(t, Product) else list(t)


def _lambert(x: QMonomial, base: int = 1, label: str = "") -> QSum:
    """``sum_{n>=1} x q^n / (1 - x q^n)`` in base ``q**base``."""
    Q = _q(base)
    return QSum(lambda n: prod(x * Q**n, den=[x * Q**n]), 1, label or f"lambert({x})")


# -- f1, f2, f ------------------------------------------------------------


def derived_f1_expr(derived: DerivedPairSpec, a: QMonomial, base: int = 1, **aux) -> QSum:
    """``sum a^{2n} q^n beta*_n(a) - sum (q;q)_{2n-1}/(q a^2;q)_{2n} a^{2n} q^n alpha*_n(a)``."""
    Q = _q(base)
    aux = derived.aux(aux)

    def term(n):
        lead = a ** (2 * n) * Q**n
        out = [prod(lead) * p for p in _as_list(derived.beta_star(n, a, base, **aux))]
        w = prod(-lead, num=[poch(Q, 2 * n - 1, base)], den=[poch(Q * a * a, 2 * n, base)])
        out.extend(w * p for p in _as_list(derived.alpha_star(n, a, base, **aux)))
        return out

    return QSum(term, 1, f"derived-f1({derived.id})")


F1_VARIANTS = ("lambert", "qgauss", "unitpair")


def f1_expr(variant: str, a: QMonomial, base: int = 1) -> Expr:
    Q = _q(base)
    if variant == "lambert":
        return _lambert(a * a, base) - _lambert(a, base)
    if variant == "qgauss":
        return QSum(
            lambda n: prod(a ** (2 * n) * Q**n, num=[poch(1 / a, n, base)], den=[poch(a * Q, n, base), Q**n]),
            1,
            "f1-qgauss",
        )
    if variant == "unitpair":
        return derived_f1_expr(catalog_derived("unit*"), a, base)
    raise ValueError(f"unknown f1 variant {variant!r}; expected one of {F1_VARIANTS}")


def f1_series(variant: str, a: QMonomial, base_power: int, order: int) -> QSeries:
    return f1_expr(variant, a, base_power).exact(order)


def f2_expr(a: QMonomial, base: int = 1) -> Expr:
    """Closed Lambert form ``-sum 2 a q^n / (1 - a^2 q^{2n})``."""
    Q = _q(base)
    return QSum(lambda n: prod(-2 * a * Q**n, den=[a * a * Q ** (2 * n)]), 1, "f2")


def f2_pair_expr(derived: DerivedPairSpec, a: QMonomial, base: int = 1, **aux) -> Expr:
    return derived_f1_expr(derived, a, base, **aux) - derived_f1_expr(derived, -a, base, **aux)


def f2_series(a: QMonomial, base_power: int, order: int) -> QSeries:
    return f2_expr(a, base_power).exact(order)


def f_expr(a: QMonomial, k: QMonomial, z: QMonomial, base: int = 1) -> Expr:
    return _lambert(k, base) + _lambert(a / z, base) - _lambert(a, base) - _lambert(k / z, base)


def f_series(a: QMonomial, k: QMonomial, z: QMonomial, order: int) -> QSeries:
    return f_expr(a, k, z).exact(order)


# -- theta series ---------------------------------------------------------


def theta_psi_expr(base: int = 1, form: str = "sum") -> Expr:
    if form == "sum":
        return QSum(lambda n: prod(qm(1, base * n * (n + 1) // 2)), 0, f"psi(q^{base})")
    if form == "product":
        Q = _q(base)
        return Term(prod(num=[poch(Q * Q, None, 2 * base)], den=[poch(Q, None, 2 * base)]))
    raise ValueError(f"unknown psi form {form!r}")


def theta_psi(base_power: int, order: int, form: str = "sum") -> QSeries:
    return theta_psi_expr(base_power, form).exact(order)


def _lattice_bound(limit: float) -> int:
    # m^2 + mn + n^2 >= 3 m^2 / 4
    return int(math.isqrt(int(4 * max(limit, 0) / 3) + 1)) + 1


def _lattice_exact(order: int) -> QSeries:
    counts: dict[int, int] = {}
    b = _lattice_bound(order)
    for m in range(-b, b + 1):
        for n in range(-b, b + 1):
            e = m * m + m * n + n * n
            if e < order:
                counts[e] = counts.get(e, 0) + 1
    return QSeries(counts, order)


def _lattice_numeric(q0: complex, cfg: NumericConfig) -> complex:
    r = abs(q0)
    if r >= 1:
        raise ValueError("lattice sum needs |q| < 1")
    if r == 0:
        return 1 + 0j
    limit = math.log(cfg.term_tol * 1e-3) / math.log(r)
    b = _lattice_bound(limit)
    total = 0j
    for m in range(-b, b + 1):
        for n in range(-b, b + 1):
            e = m * m + m * n + n * n
            if e <= limit:
                total += q0**e
    return total


def theta_a_expr(form: str = "lattice") -> Expr:
    if form == "lattice":
        return Custom(_lattice_exact, _lattice_numeric, "a(q) lattice")
    if form == "lambert":
        return 1 + 6 * f1_expr("lambert", _mono(1, -1), 3)
    raise ValueError(f"unknown a(q) form {form!r}")


def theta_a(order: int, form: str = "lattice") -> QSeries:
    return theta_a_expr(form).exact(order)


# -- identity sides -------------------------------------------------------


def _pair_sum(weight: Callable[[int], Product], gen: Callable[[int], object], start: int = 1, label: str = "") -> QSum:
    """``sum_n weight(n) * gen(n)`` where ``gen`` may return several Products."""
    return QSum(lambda n: [weight(n) * p for p in _as_list(gen(n))], start, label)


def _qgauss(p):
    A, B, C = p["A"], p["B"], p["C"]
    Q = _q()
    lhs = QSum(
        lambda n: prod((C / (A * B)) ** n, num=[poch(A, n), poch(B, n)], den=[poch(C, n), poch(Q, n)]),
        0,
        "qgauss",
    )
    rhs = Term(prod(num=[poch(C / A), poch(C / B)], den=[poch(C), poch(C / (A * B))]))
    return lhs, rhs


def _eq03(p, pair: PairSpec, aux):
    a, k = p["a"], p["k"]
    Q = _q()
    t = Q * a * a / (k * k)
    lhs = _pair_sum(lambda n: prod(t**n), lambda n: pair.beta(n, a, k, 1, **aux), 0, "beta side")
    series = _pair_sum(
        lambda n: prod(t**n, num=[poch(k, 2 * n)], den=[poch(Q * a * a / k, 2 * n)]),
        lambda n: pair.alpha(n, a, k, 1, **aux),
        0,
        "alpha side",
    )
    front = Term(prod(num=[poch(Q * a / k), poch(Q * a * a / k)], den=[poch(Q * a), poch(t)]))
    return lhs, Mul(front, series)


def _theta_rhs(a, k, z) -> Expr:
    """Rational part plus the eight-over-eight infinite product shared by two identities."""
    Q = _q()
    rational = prod(a, num=[k / a, 1 / z, a * k / z], den=[a, k, a / z, k / z])
    top = [z, Q / z, k / a, Q * a / k, a * k / z, Q * z / (a * k), Q, Q]
    bottom = [z / k, Q * k / z, z / a, Q * a / z, a, Q / a, k, Q / k]
    product = prod(z / k, num=[poch(x) for x in top], den=[poch(x) for x in bottom])
    return Term(rational) + Term(product)


def _thm1(p, pair: PairSpec, aux):
    a, k, z = p["a"], p["k"], p["z"]
    Q = _q()
    ai, ki, zi = 1 / a, 1 / k, 1 / z

    def beta_weight(a_, k_, z_):
        return lambda n: prod(
            (Q * a_ / z_) ** n,
            num=[k_ * Q ** (2 * n), poch(z_, n), poch(Q, n - 1)],
            den=[k_, poch(Q * k_, n), poch(Q * k_ / z_, n)],
        )

    def alpha_weight(a_, z_):
        return lambda n: prod(
            (Q * a_ / z_) ** n,
            num=[poch(z_, n), poch(Q, n - 1)],
            den=[poch(Q * a_, n), poch(Q * a_ / z_, n)],
        )

    s1 = _pair_sum(beta_weight(a, k, z), lambda n: pair.beta(n, a, k, 1, **aux))
    s2 = _pair_sum(beta_weight(ai, ki, zi), lambda n: pair.beta(n, ai, ki, 1, **aux))
    s3 = _pair_sum(alpha_weight(a, z), lambda n: pair.alpha(n, a, k, 1, **aux))
    s4 = _pair_sum(alpha_weight(ai, zi), lambda n: pair.alpha(n, ai, ki, 1, **aux))
    return s1 - s2 - s3 + s4, _theta_rhs(a, k, z)


def _thm2(p, pair: PairSpec, aux):
    a, k, z = p["a"], p["k"], p["z"]

    def beta_weight(a_, k_, z_, base):
        Q = _q(base)
        return lambda n: prod(
            (Q * a_ / z_) ** n,
            num=[k_ * Q ** (2 * n), poch(z_, n, base), poch(Q, n - 1, base)],
            den=[k_, poch(Q * k_, n, base), poch(Q * k_ / z_, n, base)],
        )

    def alpha_weight(a_, z_, base):
        Q = _q(base)
        return lambda n: prod(
            (Q * a_ / z_) ** n,
            num=[poch(z_, n, base), poch(Q, n - 1, base)],
            den=[poch(Q * a_, n, base), poch(Q * a_ / z_, n, base)],
        )

    b1 = _pair_sum(beta_weight(a, k, z, 1), lambda n: pair.beta(n, a, k, 1, **aux))
    b2 = _pair_sum(beta_weight(-a, -k, z, 1), lambda n: pair.beta(n, -a, -k, 1, **aux))
    b3 = _pair_sum(beta_weight(a * a, k * k, z * z, 2), lambda n: pair.beta(n, a * a, k * k, 2, **aux))
    a1 = _pair_sum(alpha_weight(a, z, 1), lambda n: pair.alpha(n, a, k, 1, **aux))
    a2 = _pair_sum(alpha_weight(-a, z, 1), lambda n: pair.alpha(n, -a, -k, 1, **aux))
    a3 = _pair_sum(alpha_weight(a * a, z * z, 2), lambda n: pair.alpha(n, a * a, k * k, 2, **aux))
    return b1 + b2 - 2 * b3, a1 + a2 - 2 * a3


def _ab_rhs(a, b, scale) -> Expr:
    """``scale * [(a-b)(1+ab)/((1-a^2)(1-b^2)) - a * theta quotient]``."""
    Q = _q()
    Q2 = Q * Q
    rational = prod(scale * a, num=[b / a, -a * b], den=[a * a, b * b])
    product = prod(
        -scale * a,
        num=[poch(b / a), poch(Q * a / b), poch(-a * b), poch(-Q / (a * b)), poch(Q2, None, 2), poch(Q2, None, 2)],
        den=[poch(a * a, None, 2), poch(Q2 / (a * a), None, 2), poch(b * b, None, 2), poch(Q2 / (b * b), None, 2)],
    )
    return Term(rational) + Term(product)


def _thm3(p, derived: DerivedPairSpec, aux):
    a, b = p["a"], p["b"]
    built: dict[QMonomial, Expr] = {}

    def F(x):
        # one subtree per distinct parameter, so a == b cancels structurally
        if x not in built:
            built[x] = f2_pair_expr(derived, x, 1, **aux)
        return built[x]

    return F(a) - F(b) - F(1 / a) + F(1 / b), _ab_rhs(a, b, 2)


def _eq117(p):
    a, k, z = p["a"], p["k"], p["z"]
    return f_expr(a, k, z) - f_expr(1 / a, 1 / k, 1 / z), _theta_rhs(a, k, z)


def _tri(n: int, base: int = 1) -> QMonomial:
    return QMonomial((-1) ** n, base * n * (n + 1) // 2)


def _cor1_1(p):
    a = p["a"]
    Q = _q()
    first = QSum(lambda n: prod((-a) ** n * _mono(1, n * (n + 1) // 2), den=[Q**n]), 1, "theta-lambert")
    second = QSum(
        lambda n: prod(
            (-(a * a)) ** n * _mono(1, n * (n + 1) // 2),
            num=[a * Q ** (2 * n), poch(a, n), poch(Q, 2 * n - 1)],
            den=[a, poch(Q, n), poch(a * a * Q, 2 * n)],
        ),
        1,
    )
    return f1_expr("lambert", a), first - second


def _cor1_2(p):
    a = p["a"]
    Q = _q()
    first = QSum(
        lambda n: prod(HALF * a ** (2 * n) * Q**n, num=[poch(1 / (a * a), n)], den=[poch(Q, n), Q**n]),
        1,
    )
    second = QSum(
        lambda n: prod(
            a**n * Q**n,
            num=[a * Q ** (2 * n), poch(a, n), poch(a, n), poch(-a * Q, n), poch(1 / a, n), poch(Q * Q, n - 1, 2)],
            den=[a, poch(Q, n), poch(Q, n), poch(-ONE, n), poch(Q * a * a, n), poch(a * a * Q * Q, n, 2)],
        ),
        1,
    )
    return f1_expr("lambert", a), first - second


def _cor2(p):
    a, b = p["a"], p["b"]
    Q = _q()

    def head(n):
        m = 2 * n + 1
        w = _mono(1, 2 * n * n + 3 * n + 1)
        return [prod(w * s, den=[Q**m]) for s in (b**m, -(a**m), a ** (-m), -(b ** (-m)))]

    def g(x, n):
        return prod(x ** (2 * n), num=[x * Q ** (2 * n), poch(x, n)], den=[x, poch(Q * x * x, 2 * n)])

    signed = ((a, 1), (-a, -1), (b, -1), (-b, 1), (1 / a, -1), (-1 / a, 1), (1 / b, 1), (-1 / b, -1))

    def tail(n):
        w = prod(-HALF * _tri(n), num=[poch(Q, 2 * n - 1)], den=[poch(Q, n)])
        return [w * (g(x, n) if s > 0 else -g(x, n)) for x, s in signed]

    return QSum(head, 0, "cor2 head") + QSum(tail, 1, "cor2 tail"), _ab_rhs(a, b, 1)


def _cor3(p):
    a, b = p["a"], p["b"]
    Q = _q()

    def pieces(x, n, sign):
        up = prod(x ** (2 * n) * Q**n, num=[poch(1 / x, n)], den=[poch(Q * x, n), Q**n])
        up_neg = prod(-(x ** (2 * n)) * Q**n, num=[poch(-1 / x, n)], den=[poch(-Q * x, n), Q**n])
        down = prod(-(Q**n) / x ** (2 * n), num=[poch(x, n)], den=[poch(Q / x, n), Q**n])
        down_neg = prod(Q**n / x ** (2 * n), num=[poch(-x, n)], den=[poch(-Q / x, n), Q**n])
        return [sign * t for t in (up, up_neg, down, down_neg)]

    lhs = QSum(lambda n: pieces(a, n, 1) + pieces(b, n, -1), 1, "cor3")
    return lhs, _ab_rhs(a, b, 2)


# base q^3, a = 1/q


def _cor4_1(p):
    Q = _q(3)
    q = _q()
    s = QSum(lambda n: prod(q**n, num=[poch(q, n, 3)], den=[poch(q * q, n, 3), Q**n]), 1)
    return theta_a_expr("lattice"), 1 + 6 * s


def _cor4_2(p):
    Q = _q(3)
    q = _q()
    qi = 1 / q
    s = QSum(
        lambda n: prod(
            q ** (2 * n),
            num=[_mono(1, 6 * n - 1), poch(qi, n, 3), poch(qi, n, 3), poch(Q, 2 * n - 1, 3)],
            den=[qi, poch(Q, n, 3), poch(Q, n, 3), poch(q, 2 * n, 3)],
        ),
        1,
    )
    return theta_a_expr("lattice"), 1 - 6 * s


def _cor4_3(p):
    r1, r2 = p["rho1"], p["rho2"]
    Q = _q(3)
    q = _q()
    qi = 1 / q
    r = r1 * r2
    s1 = QSum(
        lambda n: prod(
            q**n,
            num=[poch(r1 * q, n, 3), poch(r2 * q, n, 3), poch(q * q / r, n, 3)],
            den=[poch(q * q / r1, n, 3), poch(q * q / r2, n, 3), poch(r * q, n, 3), Q**n],
        ),
        1,
    )
    s2 = QSum(
        lambda n: prod(
            q ** (2 * n),
            num=[_mono(1, 6 * n - 1), poch(qi, n, 3), poch(r1, n, 3), poch(r2, n, 3), poch(q / r, n, 3), poch(Q, 2 * n - 1, 3)],
            den=[qi, poch(q * q / r1, n, 3), poch(q * q / r2, n, 3), poch(r * q, n, 3), poch(Q, n, 3), poch(q, 2 * n, 3)],
        ),
        1,
    )
    return theta_a_expr("lattice"), 1 + 6 * s1 - 6 * s2


def _cor4_4(p):
    Q = _q(3)
    q = _q()
    qi = 1 / q
    s1 = QSum(lambda n: prod(_mono((-1) ** n, (3 * n * n + n) // 2), den=[Q**n]), 1)
    s2 = QSum(
        lambda n: prod(
            _mono((-1) ** n, (3 * n * n - n) // 2),
            num=[_mono(1, 6 * n - 1), poch(qi, n, 3), poch(Q, 2 * n - 1, 3)],
            den=[qi, poch(Q, n, 3), poch(q, 2 * n, 3)],
        ),
        1,
    )
    return theta_a_expr("lattice"), 1 + 6 * s1 - 6 * s2


# base q^2, a = -i/q


def _psi4_squared() -> Expr:
    psi = theta_psi_expr(4, "sum")
    return Mul(psi, psi)


def _cor5_wp(sign: int, n: int, extra_num=(), extra_den=(), scale=ONE) -> Product:
    """``(1 - s i q^{4n-1})/(1 - s i/q) (s i/q; q^2)_n (q^2;q^2)_{2n-1} / ((q^2;q^2)_n (-1;q^2)_{2n})``."""
    Q = _q(2)
    x = _mono(sign * I, -1)
    return prod(
        scale,
        num=[_mono(sign * I, 4 * n - 1), poch(x, n, 2), poch(Q, 2 * n - 1, 2)] + list(extra_num),
        den=[x, poch(Q, n, 2), poch(-ONE, 2 * n, 2)] + list(extra_den),
    )


def _cor5_1(p):
    Q = _q(2)
    x_minus = _mono(-I, -1)
    x_plus = _mono(I, -1)

    def term(n):
        t1 = _cor5_wp(-1, n, [poch(x_minus, n, 2)], [poch(Q, n, 2)], _mono(-I, 1) ** n)
        t2 = _cor5_wp(1, n, [poch(x_plus, n, 2)], [poch(Q, n, 2)], _mono(I, 1) ** n)
        return [t1, -t2]

    return _psi4_squared(), _mono(I / 2, -1) * QSum(term, 1, "cor5.1")


def _cor5_2(p):
    r = p["rho1"]
    Q = _q(2)
    q = _q()
    front = _mono(1 / (2 * I), -1)

    def term(n):
        w = (-ONE) ** n / r**n
        t1 = prod(w, num=[poch(_mono(I) * r * q, n, 2)], den=[poch(_mono(-I) * q / r, n, 2), Q**n])
        t2 = prod(w, num=[poch(_mono(-I) * r * q, n, 2)], den=[poch(_mono(I) * q / r, n, 2), Q**n])
        t3 = _cor5_wp(1, n, [poch(r, n, 2)], [poch(_mono(I) * q / r, n, 2)], w)
        t4 = _cor5_wp(-1, n, [poch(r, n, 2)], [poch(_mono(-I) * q / r, n, 2)], w)
        return [t1, -t2, t3, -t4]

    return _psi4_squared(), front * QSum(term, 1, "cor5.2")


def _cor5_3(p):
    Q = _q(2)
    head = QSum(lambda n: prod(_mono((-1) ** n, 4 * n * n + 4 * n), den=[_mono(1, 4 * n + 2)]), 0)

    def term(n):
        w = _mono(1, n * n - n)
        return [_cor5_wp(1, n, scale=w), -_cor5_wp(-1, n, scale=w)]

    return _psi4_squared(), head + _mono(1 / (2 * I), -1) * QSum(term, 1, "cor5.3")


def _psi2lambert(p):
    psi = theta_psi_expr(2, "sum")
    rhs = QSum(lambda n: prod(_mono(1, n), den=[_mono(-1, 2 * n + 1)]), 0, "psi^2 lambert")
    return Mul(psi, psi), rhs


def _qpsi2psi6() -> Expr:
    return _mono(1, 1) * Mul(theta_psi_expr(2, "sum"), theta_psi_expr(6, "sum"))


def _eq25(p):
    rhs = QSum(lambda n: prod(_mono(1, 6 * n - 5), den=[_mono(1, 12 * n - 10)]), 1) - QSum(
        lambda n: prod(_mono(1, 6 * n - 1), den=[_mono(1, 12 * n - 2)]), 1
    )
    return _qpsi2psi6(), rhs


def _cor6(p):
    Q = _q(6)

    def block(x: QMonomial, n: int, scale: QMonomial) -> Product:
        return prod(
            scale,
            num=[x * Q ** (2 * n), poch(x, n, 6), poch(x, n, 6), poch(Q, 2 * n - 1, 6)],
            den=[x, poch(Q, n, 6), poch(Q, n, 6), poch(Q * x * x, 2 * n, 6)],
        )

    def term(n):
        return [
            block(_mono(-1, -1), n, _mono((-1) ** n, 5 * n)),
            -block(_mono(1, -1), n, _mono(1, 5 * n)),
            block(_mono(1, -5), n, _mono(1, n)),
            -block(_mono(-1, -5), n, _mono((-1) ** n, n)),
        ]

    return 2 * _qpsi2psi6(), QSum(term, 1, "cor6")


def _eq27(p):
    psi3 = theta_psi_expr(3, "sum")
    lhs = _mono(1, 1) * Mul(Mul(psi3, Mul(psi3, psi3)), Inverse(theta_psi_expr(1, "sum")))
    rhs = QSum(lambda n: prod(_mono(1, 3 * n - 2), den=[_mono(1, 6 * n - 4)]), 1) - QSum(
        lambda n: prod(_mono(1, 3 * n - 1), den=[_mono(1, 6 * n - 2)]), 1
    )
    return lhs, rhs


# -- registry -------------------------------------------------------------


@dataclass(frozen=True)
class IdentityEntry:
    id: str
    description: str
    build: Callable
    default_params: Mapping[str, QMonomial] = field(default_factory=dict)
    constraints: tuple[str, ...] = ()
    anchor: str = ""
    order: int = 40
    pair_kind: str | None = None  # None, "pair" or "derived"
    default_pair: str | None = None

    def sides(self, params: Mapping[str, QMonomial] | None = None, pair: str | None = None) -> tuple[Expr, Expr]:
        merged = dict(self.default_params)
        for name, value in (params or {}).items():
            if name not in merged and name not in ("rho1", "rho2"):
                raise ValueError(f"{self.id}: unknown parameter {name!r}")
            merged[name] = value
        if self.pair_kind is None:
            if pair is not None:
                raise ValueError(f"{self.id} does not take a pair")
            return self.build(merged)
        aux = {k: merged.pop(k) for k in ("rho1", "rho2") if k in merged}
        pid = pair or self.default_pair
        spec = catalog_pair(pid) if self.pair_kind == "pair" else catalog_derived(pid)
        return self.build(merged, spec, spec.aux(aux))


_GENERIC = {"a": qm(2, 1), "k": qm(3, 1), "z": qm(5, 1)}
_AB_UNIT = {"a": qm(Fraction(5, 4), 0), "b": qm(Fraction(4, 3), 0)}

_ENTRIES = [
    IdentityEntry(
        "qgauss",
        "q-Gauss summation of a 2phi1 at argument C/AB",
        _qgauss,
        {"A": qm(1, 1), "B": qm(1, 2), "C": qm(1, 5)},
        ("C q^j != 1", "C/(AB) has positive q-exponent"),
        "q-Gauss sum",
    ),
    IdentityEntry(
        "eq03",
        "beta-series of a WP-Bailey pair against its alpha-series via the second chain",
        _eq03,
        {"a": qm(2, 1), "k": qm(3, 1)},
        ("q a^2/k^2 has positive q-exponent", "q a, q a^2/k non-singular"),
        "second-chain summation",
        pair_kind="pair",
        default_pair="trivial",
    ),
    IdentityEntry(
        "thm1",
        "four-series transformation for a WP-Bailey pair at (a,k) and (1/a,1/k)",
        _thm1,
        dict(_GENERIC),
        ("a, k, z share the same q-exponent", "no factor of the products vanishes"),
        "first-chain limit, reciprocal parameters",
        pair_kind="pair",
        default_pair="trivial",
    ),
    IdentityEntry(
        "thm2",
        "six-series transformation mixing (a,k), (-a,-k) and (a^2,k^2) in base q^2",
        _thm2,
        dict(_GENERIC),
        ("a, k, z share the same q-exponent",),
        "first-chain limit, quadratic parameters",
        pair_kind="pair",
        default_pair="singh",
    ),
    IdentityEntry(
        "thm3",
        "f2(a) - f2(b) - f2(1/a) + f2(1/b) built from a derived pair equals a pair-free product",
        _thm3,
        dict(_AB_UNIT),
        ("a, b constants (q-exponent 0) with a^2, b^2 != 1",),
        "derived-pair summation",
        pair_kind="derived",
        default_pair="trivial*",
    ),
    IdentityEntry(
        "eq117",
        "f(a,k,z) - f(1/a,1/k,1/z) as a rational function plus a theta quotient",
        _eq117,
        {"a": qm(2, 1), "k": qm(3, 2), "z": qm(5, 3)},
        ("no Lambert denominator vanishes",),
        "four-block Lambert identity",
    ),
    IdentityEntry(
        "cor1.1",
        "Lambert difference via the rho -> infinity Singh derived pair",
        _cor1_1,
        {"a": qm(2, 1)},
        ("a q^n, a^2 q^n != 1",),
        "Lambert difference, first form",
    ),
    IdentityEntry(
        "cor1.2",
        "Lambert difference via the derived pair with 1/a^2 in beta",
        _cor1_2,
        {"a": qm(2, 1)},
        ("a q^n, a^2 q^n != 1",),
        "Lambert difference, second form",
    ),
    IdentityEntry(
        "cor2",
        "separable a/b series equal to the two-parameter theta quotient",
        _cor2,
        {"a": qm(2, 1), "b": qm(3, 2)},
        ("a^2 q^n, b^2 q^n != 1",),
        "separable two-parameter identity, rho -> infinity pair",
    ),
    IdentityEntry(
        "cor3",
        "separable a/b series from the trivial derived pair",
        _cor3,
        dict(_AB_UNIT),
        ("a q^n, b q^n != +-1", "a, b constants"),
        "separable two-parameter identity, trivial pair",
    ),
    IdentityEntry("cor4.1", "a(q) through the q-Gauss form of f1 in base q^3", _cor4_1, {}, (), "a(q), first form", 60),
    IdentityEntry("cor4.2", "a(q) through the unit derived pair in base q^3", _cor4_2, {}, (), "a(q), second form", 60),
    IdentityEntry(
        "cor4.3",
        "a(q) through the Singh derived pair in base q^3",
        _cor4_3,
        {"rho1": qm(5, 3), "rho2": qm(7, 3)},
        ("rho1, rho2 != 0",),
        "a(q), third form",
        60,
    ),
    IdentityEntry("cor4.4", "a(q) through the rho -> infinity pair in base q^3", _cor4_4, {}, (), "a(q), fourth form", 60),
    IdentityEntry("cor5.1", "psi(q^4)^2 through the unit derived pair at a = -i/q", _cor5_1, {}, (), "psi^2(q^4), first form", 60),
    IdentityEntry(
        "cor5.2",
        "psi(q^4)^2 with one free Singh parameter",
        _cor5_2,
        {"rho1": qm(5, -1)},
        ("|rho1| > 1 (q-exponent < 0 formally)",),
        "psi^2(q^4), second form",
        60,
    ),
    IdentityEntry("cor5.3", "psi(q^4)^2 with both Singh parameters sent to infinity", _cor5_3, {}, (), "psi^2(q^4), third form", 60),
    IdentityEntry("psi2lambert", "psi(q^2)^2 as a single Lambert-type series", _psi2lambert, {}, (), "psi^2(q^2) Lambert series", 60),
    IdentityEntry("eq25", "q psi(q^2) psi(q^6) as a difference of Lambert series", _eq25, {}, (), "q psi(q^2) psi(q^6)", 60),
    IdentityEntry("cor6", "2 q psi(q^2) psi(q^6) through the unit derived pair in base q^6", _cor6, {}, (), "2 q psi(q^2) psi(q^6)", 60),
    IdentityEntry("eq27", "q psi(q^3)^3 / psi(q) as a difference of Lambert series", _eq27, {}, (), "q psi^3(q^3)/psi(q)", 60),
]

REGISTRY: dict[str, IdentityEntry] = {e.id: e for e in _ENTRIES}


def identity_ids() -> list[str]:
    return list(REGISTRY)


def get_identity(identity_id: str) -> IdentityEntry:
    try:
        return REGISTRY[identity_id]
    except KeyError:
        raise UnknownIdentity(identity_id) from None


def identity_sides(
    identity_id: str,
    params: Mapping[str, QMonomial] | None = None,
    order: int | None = None,
    backend: str = "exact",
    q0: complex = 0.3,
    pair: str | None = None,
    cfg: NumericConfig = DEFAULT_CONFIG,
):
    """Evaluate both sides: two QSeries (exact) or two complex numbers (numeric)."""
    entry = get_identity(identity_id)
    lhs, rhs = entry.sides(params, pair)
    if backend == "exact":
        n = entry.order if order is None else order
        return lhs.exact(n), rhs.exact(n)
    if backend == "numeric":
        q0 = as_cpoint(q0)
        if abs(q0) >= 1:
            raise ValueError("numeric evaluation needs |q0| < 1")
        return lhs.numeric(q0, cfg), rhs.numeric(q0, cfg)
    raise ValueError(f"unknown backend {backend!r}")


@dataclass
class VerificationReport:
    id: str
    backend: str
    order: int | None
    point: complex | None
    outcome: str
    first_mismatch: dict | None
    millis: float
    lhs: object = None
    rhs: object = None

    @property
    def passed(self) -> bool:
        return self.outcome == "pass"


NUMERIC_ABS_TOL = 1e-9
NUMERIC_REL_TOL = 1e-9


def first_mismatch(x: QSeries, y: QSeries) -> tuple[int, Coefficient, Coefficient] | None:
    hi = min(x.order, y.order)
    lo = min(x.val, y.val, hi)
    for e in range(lo, hi):
        if x[e] != y[e]:
            return e, x[e], y[e]
    return None


def verify(
    identity_id: str,
    params: Mapping[str, QMonomial] | None = None,
    order: int | None = None,
    backend: str = "exact",
    q0: complex = 0.3,
    pair: str | None = None,
    cfg: NumericConfig = DEFAULT_CONFIG,
) -> VerificationReport:
    entry = get_identity(identity_id)
    start = time.perf_counter()
    lhs, rhs = identity_sides(identity_id, params, order, backend, q0, pair, cfg)
    if backend == "exact":
        n = entry.order if order is None else order
        bad = first_mismatch(lhs, rhs)
        mismatch = None if bad is None else {"exponent": bad[0], "lhs": bad[1], "rhs": bad[2]}
        point = None
    else:
        n, point = None, complex(q0)
        diff = abs(lhs - rhs)
        ok = diff <= NUMERIC_ABS_TOL + NUMERIC_REL_TOL * max(abs(lhs), abs(rhs))
        mismatch = None if ok else {"exponent": None, "lhs": lhs, "rhs": rhs, "difference": diff}
    millis = (time.perf_counter() - start) * 1000
    outcome = "pass" if mismatch is None else "fail"
    return VerificationReport(identity_id, backend, n, point, outcome, mismatch, millis, lhs, rhs)
