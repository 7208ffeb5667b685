"""Double-precision complex evaluation of q-products and q-series.

Points are plain Python ``complex`` values. This backend cross-checks the
exact kernel and handles parameters that are not q-monomials (for example
``k = 1 - eps`` when probing derived-pair limits).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

from .errors import NonConvergent, PoleProximity

__all__ = [
    "DEFAULT_CONFIG",
    "NumericConfig",
    "as_cpoint",
    "eval_series_at",
    "num_poch",
    "num_sum",
]


@dataclass(frozen=True)
class NumericConfig:
    term_tol: float = 1e-15
    streak: int = 3
    max_terms: int = 100_000
    pole_tol: float = 1e-8

    def __post_init__(self):
        if not 0 < self.term_tol < 1:
            raise ValueError("term_tol must lie in (0, 1)")
        if self.streak < 1:
            raise ValueError("streak must be >= 1")
        if self.pole_tol <= 0:
            raise ValueError("pole_tol must be positive")


DEFAULT_CONFIG = NumericConfig()


def as_cpoint(z) -> complex:
    z = complex(z)
    if not cmath.isfinite(z):
        raise ValueError(f"non-finite point {z}")
    return z


def _factor(x: complex, label, cfg: NumericConfig, check: bool) -> complex:
    f = 1 - x
    if check and abs(f) < cfg.pole_tol:
        raise PoleProximity(label or f"(1 - {x})", abs(f))
    return f


def num_poch(x, q, n=math.inf, cfg: NumericConfig = DEFAULT_CONFIG, *, check_poles=True) -> complex:
    """``(x; q)_n`` for finite ``n`` or ``n = math.inf`` (``None`` also means infinity).

    The infinite product stops once ``|x q^j| < term_tol`` for ``cfg.streak``
    consecutive factors.
    """
    x, q = as_cpoint(x), as_cpoint(q)
    if n is None:
        n = math.inf
    if n != math.inf:
        result = 1 + 0j
        xj = x
        for j in range(int(n)):
            result *= _factor(xj, f"(1 - x q^{j})", cfg, check_poles)
            xj *= q
        return result
    if abs(q) >= 1:
        raise ValueError("infinite product needs |q| < 1")
    result = 1 + 0j
    xj = x
    small = 0
    for j in range(cfg.max_terms):
        result *= _factor(xj, f"(1 - x q^{j})", cfg, check_poles)
        small = small + 1 if abs(xj) < cfg.term_tol else 0
        if small >= cfg.streak:
            return result
        xj *= q
    raise NonConvergent(f"infinite product did not settle in {cfg.max_terms} factors")


def num_sum(term: Callable[[int], complex], cfg: NumericConfig = DEFAULT_CONFIG, start: int = 1) -> complex:
    """Partial sums of ``term(n)`` until the relative tail stays below ``term_tol``."""
    total = 0j
    small = 0
    for n in range(start, start + cfg.max_terms):
        t = complex(term(n))
        total += t
        if t == 0 or abs(t) <= cfg.term_tol * abs(total):
            small += 1
            if small >= cfg.streak:
                return total
        else:
            small = 0
    raise NonConvergent(f"sum did not settle in {cfg.max_terms} terms")


def eval_series_at(x, q0) -> complex:
    """Evaluate the tracked window of an exact series at ``q0``."""
    q0 = as_cpoint(q0)
    if abs(q0) >= 1:
        raise ValueError("evaluation point must satisfy |q0| < 1")
    return x.evaluate(q0)
