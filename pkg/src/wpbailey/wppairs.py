"""WP-Bailey pairs, derived pairs, the defining-relation check and Andrews' second chain.

Pair generators have the signature ``(n, a, k, base=1, **aux) -> Product``
(or a list of Products for chained pairs); ``base`` replaces ``q`` by
``q**base``. Square roots never appear: ``(q sqrt(a), -q sqrt(a); q)_n /
(sqrt(a), -sqrt(a); q)_n`` is written as ``(1 - a q^{2n}) / (1 - a)``, and the
pair whose beta needs ``sqrt(k)`` takes ``s = k.sqrt()``.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .errors import UnknownPair
from .expr import ZERO_PRODUCT, Add, Product, Term, poch, prod
from .qnumeric import DEFAULT_CONFIG, NumericConfig
from .qseries import QMonomial, qm

__all__ = [
    "DerivedPairSpec",
    "PairSpec",
    "ProbeReport",
    "WPReport",
    "catalog_derived",
    "catalog_pair",
    "chain_step",
    "derived_limit_probe",
    "wp_check",
    "wp_rhs",
]

Generator = Callable[..., "Product | list[Product]"]


@dataclass(frozen=True)
class PairSpec:
    id: str
    alpha: Generator
    beta: Generator
    defaults: Mapping[str, QMonomial] = field(default_factory=dict)
    constraints: tuple[str, ...] = ()

    def aux(self, overrides: Mapping[str, QMonomial] | None = None) -> dict:
        merged = dict(self.defaults)
        for name, value in (overrides or {}).items():
            if name in merged:
                merged[name] = value
        return merged


@dataclass(frozen=True)
class DerivedPairSpec:
    id: str
    alpha_star: Generator
    beta_star: Generator
    source_pair: str
    defaults: Mapping[str, QMonomial] = field(default_factory=dict)

    def aux(self, overrides: Mapping[str, QMonomial] | None = None) -> dict:
        merged = dict(self.defaults)
        for name, value in (overrides or {}).items():
            if name in merged:
                merged[name] = value
        return merged


def _memo(fn):
    return functools.lru_cache(maxsize=1 << 16)(fn)


def _well_poised(a: QMonomial, Q: QMonomial, n: int):
    """Numerator/denominator factors of ``(1 - a q^{2n}) / (1 - a)``."""
    return a * Q ** (2 * n), a


def _derived_only(n: int):
    if n < 1:
        raise ValueError("derived pairs are defined for n >= 1")


# -- unit pair ------------------------------------------------------------


@_memo
def _unit_alpha(n, a, k, base=1):
    Q = qm(1, base)
    top, bottom = _well_poised(a, Q, n)
    return prod(
        (k / a) ** n,
        num=[top, poch(a, n, base), poch(a / k, n, base)],
        den=[bottom, poch(Q, n, base), poch(k * Q, n, base)],
    )


@_memo
def _unit_beta(n, a, k, base=1):
    return prod() if n == 0 else ZERO_PRODUCT


@_memo
def _unit_alpha_star(n, a, base=1):
    _derived_only(n)
    Q = qm(1, base)
    top, bottom = _well_poised(a, Q, n)
    return prod(
        a ** (-n),
        num=[top, poch(a, n, base), poch(a, n, base)],
        den=[bottom, poch(Q, n, base), poch(Q, n, base)],
    )


def _zero_star(n, a, base=1, **aux):
    _derived_only(n)
    return ZERO_PRODUCT


# -- trivial pair ---------------------------------------------------------


@_memo
def _trivial_alpha(n, a, k, base=1):
    return prod() if n == 0 else ZERO_PRODUCT


@_memo
def _trivial_beta(n, a, k, base=1):
    Q = qm(1, base)
    return prod(num=[poch(k, n, base), poch(k / a, n, base)], den=[poch(Q, n, base), poch(a * Q, n, base)])


@_memo
def _trivial_beta_star(n, a, base=1):
    _derived_only(n)
    Q = qm(1, base)
    return prod(num=[poch(1 / a, n, base)], den=[poch(a * Q, n, base), Q**n])


# -- Singh's pair ---------------------------------------------------------


@_memo
def _singh_alpha(n, a, k, base=1, rho1=qm(5, 1), rho2=qm(7, 1)):
    Q = qm(1, base)
    top, bottom = _well_poised(a, Q, n)
    r = rho1 * rho2
    return prod(
        (k / a) ** n,
        num=[top] + [poch(x, n, base) for x in (a, rho1, rho2, a * a * Q / (k * r))],
        den=[bottom] + [poch(x, n, base) for x in (Q, a * Q / rho1, a * Q / rho2, k * r / a)],
    )


@_memo
def _singh_beta(n, a, k, base=1, rho1=qm(5, 1), rho2=qm(7, 1)):
    Q = qm(1, base)
    r = rho1 * rho2
    return prod(
        num=[poch(x, n, base) for x in (k * rho1 / a, k * rho2 / a, k, a * Q / r)],
        den=[poch(x, n, base) for x in (a * Q / rho1, a * Q / rho2, k * r / a, Q)],
    )


@_memo
def _singh_alpha_star(n, a, base=1, rho1=qm(5, 1), rho2=qm(7, 1)):
    _derived_only(n)
    Q = qm(1, base)
    top, bottom = _well_poised(a, Q, n)
    r = rho1 * rho2
    return prod(
        a ** (-n),
        num=[top] + [poch(x, n, base) for x in (a, rho1, rho2, a * a * Q / r)],
        den=[bottom] + [poch(x, n, base) for x in (Q, a * Q / rho1, a * Q / rho2, r / a)],
    )


@_memo
def _singh_beta_star(n, a, base=1, rho1=qm(5, 1), rho2=qm(7, 1)):
    _derived_only(n)
    Q = qm(1, base)
    r = rho1 * rho2
    return prod(
        num=[poch(x, n, base) for x in (rho1 / a, rho2 / a, a * Q / r)],
        den=[poch(x, n, base) for x in (a * Q / rho1, a * Q / rho2, r / a)] + [Q**n],
    )


# -- Singh's pair with rho1, rho2 -> infinity -----------------------------


def _tri(n: int, base: int) -> QMonomial:
    """``(-1)^n q^{base * n(n-1)/2}``."""
    return QMonomial((-1) ** n, base * n * (n - 1) // 2)


@_memo
def _singh_inf_alpha(n, a, k, base=1):
    Q = qm(1, base)
    top, bottom = _well_poised(a, Q, n)
    return prod(_tri(n, base), num=[top, poch(a, n, base)], den=[bottom, poch(Q, n, base)])


@_memo
def _singh_inf_beta(n, a, k, base=1):
    Q = qm(1, base)
    return prod(_tri(n, base) * (k / a) ** n, num=[poch(k, n, base)], den=[poch(Q, n, base)])


@_memo
def _singh_inf_alpha_star(n, a, base=1):
    _derived_only(n)
    return _singh_inf_alpha(n, a, QMonomial(1, 0), base)


@_memo
def _singh_inf_beta_star(n, a, base=1):
    _derived_only(n)
    Q = qm(1, base)
    return prod(_tri(n, base) / a**n, den=[Q**n])


# -- the pair with sqrt(k) ------------------------------------------------


@_memo
def _sqrtk_alpha(n, a, k, base=1):
    s = k.sqrt()
    Q = qm(1, base)
    top, bottom = _well_poised(a, Q, n)
    return prod(
        (s * s / a) ** n,
        num=[top]
        + [poch(x, n, base) for x in (a, a / s, -a * Q / s, s * s / a)]
        + [poch(a * a * Q / (s * s), n, 2 * base)],
        den=[bottom]
        + [poch(x, n, base) for x in (Q, Q * s, -s, Q * a * a / (s * s))]
        + [poch(s * s * Q, n, 2 * base)],
    )


@_memo
def _sqrtk_beta(n, a, k, base=1):
    s = k.sqrt()
    Q = qm(1, base)
    return prod(
        num=[poch(s, n, base), poch((s * s / a) ** 2, n, base)],
        den=[poch(Q * s, n, base), poch(Q, n, base)],
    )


@_memo
def _sqrtk_alpha_star(n, a, base=1):
    _derived_only(n)
    Q = qm(1, base)
    top, bottom = _well_poised(a, Q, n)
    minus_one = QMonomial(-1, 0)
    return prod(
        a ** (-n),
        num=[top] + [poch(x, n, base) for x in (a, a, -a * Q, 1 / a)] + [poch(a * a * Q, n, 2 * base)],
        den=[bottom] + [poch(x, n, base) for x in (Q, Q, minus_one, Q * a * a)] + [poch(Q, n, 2 * base)],
    )


@_memo
def _sqrtk_beta_star(n, a, base=1):
    _derived_only(n)
    Q = qm(1, base)
    return prod(
        QMonomial(1, 0) / 2,
        num=[poch(1 / (a * a), n, base)],
        den=[poch(Q, n, base), Q**n],
    )


_RHO = {"rho1": qm(5, 1), "rho2": qm(7, 1)}

_PAIRS = {
    "unit": PairSpec("unit", _unit_alpha, _unit_beta, constraints=("a*q^j != 1", "k*q^j != 1")),
    "trivial": PairSpec("trivial", _trivial_alpha, _trivial_beta, constraints=("a*q^j != 1",)),
    "singh": PairSpec(
        "singh",
        _singh_alpha,
        _singh_beta,
        defaults=_RHO,
        constraints=("a*q^j/rho_i != 1", "k*rho1*rho2*q^j/a != 1"),
    ),
    "singh-rho-inf": PairSpec("singh-rho-inf", _singh_inf_alpha, _singh_inf_beta, constraints=("a*q^j != 1",)),
    "sqrtk": PairSpec(
        "sqrtk",
        _sqrtk_alpha,
        _sqrtk_beta,
        constraints=("k must be an exact square", "sqrt(k)*q^j != 1"),
    ),
}

_DERIVED = {
    "unit*": DerivedPairSpec("unit*", _unit_alpha_star, _zero_star, "unit"),
    "trivial*": DerivedPairSpec("trivial*", _zero_star, _trivial_beta_star, "trivial"),
    "singh*": DerivedPairSpec("singh*", _singh_alpha_star, _singh_beta_star, "singh", defaults=_RHO),
    "singh-rho-inf*": DerivedPairSpec("singh-rho-inf*", _singh_inf_alpha_star, _singh_inf_beta_star, "singh-rho-inf"),
    "sqrtk*": DerivedPairSpec("sqrtk*", _sqrtk_alpha_star, _sqrtk_beta_star, "sqrtk"),
}

PAIR_IDS = ("unit", "trivial", "singh", "sqrtk")
DERIVED_IDS = tuple(_DERIVED)


def catalog_pair(pair_id: str) -> PairSpec:
    try:
        return _PAIRS[pair_id]
    except KeyError:
        raise UnknownPair(pair_id) from None


def catalog_derived(pair_id: str) -> DerivedPairSpec:
    try:
        return _DERIVED[pair_id]
    except KeyError:
        raise UnknownPair(pair_id) from None


def _as_list(t) -> list[Product]:
    return [t] if isinstance(t, Product) else list(t)


def wp_rhs(pair: PairSpec, n: int, a: QMonomial, k: QMonomial, base: int = 1, **aux) -> list[Product]:
    """Summands of the well-poised relation expressing ``beta_n`` through ``alpha_0..alpha_n``."""
    Q = qm(1, base)
    terms = []
    for j in range(n + 1):
        weight = prod(
            num=[poch(k / a, n - j, base), poch(k, n + j, base)],
            den=[poch(Q, n - j, base), poch(a * Q, n + j, base)],
        )
        terms.extend(weight * p for p in _as_list(pair.alpha(j, a, k, base, **aux)))
    return terms


@dataclass
class WPReport:
    pair: str
    passed: bool
    n_max: int
    order: int
    first_failure: tuple | None = None

    def __bool__(self):
        return self.passed


def wp_check(
    pair: PairSpec,
    a: QMonomial,
    k: QMonomial,
    n_max: int,
    order: int,
    base: int = 1,
    **aux,
) -> WPReport:
    """Check ``alpha_0 = beta_0 = 1`` and the defining relation for ``n <= n_max``."""
    aux = pair.aux(aux)
    for n in range(n_max + 1):
        lhs = Add([Term(p) for p in _as_list(pair.beta(n, a, k, base, **aux))]).exact(order)
        rhs = Add([Term(p) for p in wp_rhs(pair, n, a, k, base, **aux)]).exact(order)
        if n == 0:
            one = Term(prod()).exact(order)
            alpha0 = Add([Term(p) for p in _as_list(pair.alpha(0, a, k, base, **aux))]).exact(order)
            if not (lhs.same_window(one) and alpha0.same_window(one)):
                return WPReport(pair.id, False, n_max, order, (0, None, lhs, alpha0))
        lo = min(lhs.val, rhs.val, order)
        for e in range(lo, min(lhs.order, rhs.order)):
            if lhs[e] != rhs[e]:
                return WPReport(pair.id, False, n_max, order, (n, e, lhs[e], rhs[e]))
    return WPReport(pair.id, True, n_max, order)


def chain_step(pair: PairSpec) -> PairSpec:
    """Andrews' second WP-Bailey chain applied to ``pair``.

    The new alpha_n(a, k) rescales alpha_n(a, q a^2/k); the new beta_n(a, k)
    is a finite sum over beta_j(a, q a^2/k), so it comes back as a list.
    """

    def alpha(n, a, k, base=1, **aux):
        Q = qm(1, base)
        k2 = Q * a * a / k
        ratio = k * k / (Q * a * a)
        weight = prod(ratio**n, num=[poch(k2, 2 * n, base)], den=[poch(k, 2 * n, base)])
        return [weight * p for p in _as_list(pair.alpha(n, a, k2, base, **aux))]

    def beta(n, a, k, base=1, **aux):
        Q = qm(1, base)
        k2 = Q * a * a / k
        ratio = k * k / (Q * a * a)
        out = []
        for j in range(n + 1):
            weight = prod(ratio**j, num=[poch(ratio, n - j, base)], den=[poch(Q, n - j, base)])
            out.extend(weight * p for p in _as_list(pair.beta(j, a, k2, base, **aux)))
        return out

    return PairSpec(f"chain({pair.id})", _memo(alpha), _memo(beta), pair.defaults, pair.constraints)


@dataclass
class ProbeReport:
    pair: str
    n: int
    eps: float
    alpha_residual: float
    beta_residual: float


def derived_limit_probe(
    pair: PairSpec,
    derived: DerivedPairSpec,
    a: complex,
    q: complex,
    n: int,
    eps: float,
    cfg: NumericConfig = DEFAULT_CONFIG,
    **aux,
) -> ProbeReport:
    """Residuals of ``alpha_n(a, 1-eps)`` and ``beta_n(a, 1-eps)/eps`` against the derived pair."""
    A = QMonomial(complex(a), 0)
    K = QMonomial(complex(1 - eps), 0)
    pair_aux = pair.aux(aux)
    star_aux = derived.aux(aux)

    def value(t):
        return sum(p.numeric(q, cfg) for p in _as_list(t))

    alpha = value(pair.alpha(n, A, K, **pair_aux))
    beta = value(pair.beta(n, A, K, **pair_aux)) / eps
    alpha_star = value(derived.alpha_star(n, A, **star_aux))
    beta_star = value(derived.beta_star(n, A, **star_aux))
    return ProbeReport(derived.id, n, eps, abs(alpha - alpha_star), abs(beta - beta_star))
