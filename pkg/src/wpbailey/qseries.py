"""Exact truncated Laurent series in ``q`` over the Gaussian rationals.

A :class:`QSeries` stores the coefficients of exponents ``val <= e < order``.
Coefficients at ``order`` and beyond are unknown rather than zero, and every
operation returns the tightest order it can prove::

    >>> x = QSeries.from_list(0, [1, -1], order=6)      # 1 - q + O(q^6)
    >>> x.invert().window(0, 6)
    [1, 1, 1, 1, 1, 1]
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Mapping

from .errors import NonConvergent, SingularSeries, WindowExceedsOrder

__all__ = [
    "Coefficient",
    "QMonomial",
    "QSeries",
    "adaptive_sum",
    "coeff_window",
    "poch_finite",
    "poch_infinite",
    "qm",
    "series_invert",
    "substitute_power",
]

_ZERO = Fraction(0)


class Coefficient:
    """Exact Gaussian rational ``re + im*i``.

    Instances are treated as immutable. Plain ints and Fractions mix freely
    with coefficients; floats and complex numbers are rejected so nothing is
    ever rounded.
    """

    __slots__ = ("re", "im")

    def __init__(self, re: Rational | int = 0, im: Rational | int = 0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def _make(cls, re: Fraction, im: Fraction) -> Coefficient:
        c = object.__new__(cls)
        c.re = re
        c.im = im
        return c

    @staticmethod
    def coerce(value) -> Coefficient:
        if isinstance(value, Coefficient):
            return value
        if isinstance(value, (int, Fraction)):
            return Coefficient._make(Fraction(value), _ZERO)
        raise TypeError(f"cannot use {value!r} as an exact coefficient")

    @property
    def is_real(self) -> bool:
        return not self.im

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, Coefficient):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return not self.im and self.re == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __neg__(self):
        return Coefficient._make(-self.re, -self.im)

    def __add__(self, other):
        if isinstance(other, Coefficient):
            return Coefficient._make(self.re + other.re, self.im + other.im)
        if isinstance(other, (int, Fraction)):
            return Coefficient._make(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Coefficient):
            return Coefficient._make(self.re - other.re, self.im - other.im)
        if isinstance(other, (int, Fraction)):
            return Coefficient._make(self.re - other, self.im)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, Fraction)):
            return Coefficient._make(other - self.re, -self.im)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, Coefficient):
            a, b, c, d = self.re, self.im, other.re, other.im
            if not b:
                if not d:
                    return Coefficient._make(a * c, _ZERO)
                return Coefficient._make(a * c, a * d)
            if not d:
                return Coefficient._make(a * c, b * c)
            return Coefficient._make(a * c - b * d, a * d + b * c)
        if isinstance(other, (int, Fraction)):
            return Coefficient._make(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def inverse(self) -> Coefficient:
        if not self:
            raise ZeroDivisionError("inverse of zero coefficient")
        if not self.im:
            return Coefficient._make(1 / self.re, _ZERO)
        norm = self.re * self.re + self.im * self.im
        return Coefficient._make(self.re / norm, -self.im / norm)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division by zero coefficient")
            return Coefficient._make(self.re / other, self.im / other)
        if isinstance(other, Coefficient):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.inverse() * other
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if not self.im:
            # a reduced fraction stays reduced under powers
            p, d = self.re.numerator, self.re.denominator
            if n < 0:
                if not p:
                    raise ZeroDivisionError("zero coefficient has no inverse")
                p, d, n = d, p, -n
                if d < 0:
                    p, d = -p, -d
            return Coefficient._make(Fraction(p**n, d**n, _normalize=False), _ZERO)
        base = self if n >= 0 else self.inverse()
        result = Coefficient._make(Fraction(1), _ZERO)
        n = abs(n)
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conjugate(self) -> Coefficient:
        return Coefficient._make(self.re, -self.im)

    def __abs__(self) -> float:
        return abs(complex(self))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def sqrt(self) -> Coefficient:
        """Exact square root of a real rational square (or minus one)."""
        if self.im:
            raise ValueError(f"no exact square root implemented for {self}")
        r = self.re
        root = _rational_sqrt(abs(r))
        if root is None:
            raise ValueError(f"{self} is not the square of a Gaussian rational")
        if r < 0:
            return Coefficient._make(_ZERO, root)
        return Coefficient._make(root, _ZERO)

    def __repr__(self):
        return f"Coefficient({self.re!s}, {self.im!s})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


def _rational_sqrt(r: Fraction) -> Fraction | None:
    from math import isqrt

    n, d = r.numerator, r.denominator
    sn, sd = isqrt(n), isqrt(d)
    if sn * sn == n and sd * sd == d:
        return Fraction(sn, sd)
    return None


ONE = Coefficient(1)
ZERO = Coefficient(0)


def _as_scalar(value):
    """Exact scalars become Coefficients; complex/float pass through."""
    if isinstance(value, Coefficient):
        return value
    if isinstance(value, (int, Fraction)):
        return Coefficient.coerce(value)
    if isinstance(value, (float, complex)):
        return complex(value)
    raise TypeError(f"unsupported scalar {value!r}")


def _mix(a, b):
    if isinstance(a, complex) or isinstance(b, complex):
        return complex(a), complex(b)
    return a, b


@dataclass(frozen=True)
class QMonomial:
    """A parameter of the form ``coeff * q**expo``.

    ``coeff`` is an exact :class:`Coefficient`; a Python ``complex`` is also
    accepted for monomials that are only ever evaluated numerically.
    """

    coeff: Coefficient | complex
    expo: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coeff", _as_scalar(self.coeff))
        if not self.coeff:
            raise ValueError("QMonomial coefficient must be nonzero")
        if not isinstance(self.expo, int):
            raise TypeError("QMonomial exponent must be an integer")

    @property
    def is_exact(self) -> bool:
        return isinstance(self.coeff, Coefficient)

    def __mul__(self, other):
        if isinstance(other, QMonomial):
            a, b = _mix(self.coeff, other.coeff)
            return QMonomial(a * b, self.expo + other.expo)
        try:
            a, b = _mix(self.coeff, _as_scalar(other))
        except TypeError:
            return NotImplemented
        return QMonomial(a * b, self.expo)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, QMonomial):
            a, b = _mix(self.coeff, other.coeff)
            return QMonomial(a / b, self.expo - other.expo)
        try:
            a, b = _mix(self.coeff, _as_scalar(other))
        except TypeError:
            return NotImplemented
        return QMonomial(a / b, self.expo)

    def __rtruediv__(self, other):
        try:
            a, b = _mix(_as_scalar(other), self.coeff)
        except TypeError:
            return NotImplemented
        return QMonomial(a / b, -self.expo)

    def __neg__(self):
        return QMonomial(-self.coeff, self.expo)

    def __pow__(self, n: int):
        return QMonomial(self.coeff**n, self.expo * n)

    def inverse(self) -> QMonomial:
        return QMonomial(1 / self.coeff, -self.expo)

    def sqrt(self) -> QMonomial:
        """Square root; exact monomials need an even exponent and a square coefficient."""
        if not self.is_exact:
            return QMonomial(self.coeff**0.5, self._half_expo())
        return QMonomial(self.coeff.sqrt(), self._half_expo())

    def _half_expo(self) -> int:
        if self.expo % 2:
            raise ValueError(f"odd exponent in square root of {self}")
        return self.expo // 2

    def evaluate(self, q0: complex) -> complex:
        return complex(self.coeff) * complex(q0) ** self.expo

    def __str__(self):
        return f"{self.coeff}*q^{self.expo}" if self.expo else f"{self.coeff}"


def qm(coeff=1, expo: int = 1) -> QMonomial:
    """Shorthand: ``qm(3, 2)`` is ``3*q**2``; ``qm()`` is ``q``."""
    return QMonomial(coeff, expo)


class QSeries:
    """Truncated Laurent series ``sum_{val <= e < order} c_e q^e + O(q^order)``.

    The leading stored coefficient is nonzero; the zero series has no stored
    coefficients and ``val == order``.
    """

    __slots__ = ("val", "order", "coeffs")

    def __init__(self, coeffs: Mapping[int, object] | None = None, order: int = 0):
        coeffs = {e: c for e, c in (coeffs or {}).items() if e < order}
        if not coeffs:
            self._set(order, order, [])
            return
        lo = min(coeffs)
        dense = [ZERO] * (order - lo)
        for e, c in coeffs.items():
            dense[e - lo] = Coefficient.coerce(c)
        self._set(*_normalise(lo, dense, order))

    def _set(self, val, order, coeffs):
        self.val = val
        self.order = order
        self.coeffs = coeffs

    @classmethod
    def from_list(cls, val: int, coeffs: Iterable, order: int) -> QSeries:
        dense = [Coefficient.coerce(c) for c in coeffs][: max(order - val, 0)]
        return cls._raw(val, dense, order)

    @classmethod
    def _raw(cls, val: int, dense: list, order: int) -> QSeries:
        s = object.__new__(cls)
        s._set(*_normalise(val, dense, order))
        return s

    @classmethod
    def zero(cls, order: int) -> QSeries:
        return cls._raw(order, [], order)

    @classmethod
    def constant(cls, c, order: int) -> QSeries:
        return cls._raw(0, [Coefficient.coerce(c)], order)

    @classmethod
    def monomial(cls, m: QMonomial, order: int) -> QSeries:
        return cls._raw(m.expo, [m.coeff], order)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, e: int) -> Coefficient:
        if e >= self.order:
            raise WindowExceedsOrder(f"exponent {e} is beyond order {self.order}")
        if e < self.val or e - self.val >= len(self.coeffs):
            return ZERO
        return self.coeffs[e - self.val]

    def window(self, lo: int, hi: int) -> list[Coefficient]:
        if hi > self.order:
            raise WindowExceedsOrder(f"window end {hi} exceeds order {self.order}")
        return [self[e] for e in range(lo, hi)]

    def items(self):
        """(exponent, coefficient) pairs for the nonzero stored coefficients."""
        return [(self.val + i, c) for i, c in enumerate(self.coeffs) if c]

    def truncate(self, order: int) -> QSeries:
        if order >= self.order:
            return self
        return QSeries._raw(self.val, self.coeffs[: max(order - self.val, 0)], order)

    def __neg__(self):
        return QSeries._raw(self.val, [-c for c in self.coeffs], self.order)

    def __add__(self, other):
        other = _lift(other, self.order)
        if other is NotImplemented:
            return other
        order = min(self.order, other.order)
        lo = min(self.val, other.val, order)
        dense = [ZERO] * (order - lo)
        for s in (self, other):
            for i, c in enumerate(s.coeffs):
                e = s.val + i - lo
                if e >= len(dense):
                    break
                dense[e] = dense[e] + c
        return QSeries._raw(lo, dense, order)

    __radd__ = __add__

    def __sub__(self, other):
        other = _lift(other, self.order)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, QMonomial):
            return self.scale(other)
        if isinstance(other, (int, Fraction, Coefficient)):
            return self.scale(QMonomial(other, 0)) if other else QSeries.zero(self.order)
        if not isinstance(other, QSeries):
            return NotImplemented
        order = min(self.order + other.val, other.order + self.val)
        val = self.val + other.val
        if self.is_zero or other.is_zero or val >= order:
            return QSeries.zero(order)
        n = order - val
        a, b = self.coeffs[:n], other.coeffs[:n]
        dense = [ZERO] * n
        for i, x in enumerate(a):
            if not x:
                continue
            for j in range(min(len(b), n - i)):
                y = b[j]
                if y:
                    dense[i + j] = dense[i + j] + x * y
        return QSeries._raw(val, dense, order)

    __rmul__ = __mul__

    def scale(self, m: QMonomial) -> QSeries:
        """Exact multiplication by ``c*q^e``: shifts val and order by ``e``."""
        c = Coefficient.coerce(m.coeff)
        return QSeries._raw(self.val + m.expo, [c * x for x in self.coeffs], self.order + m.expo)

    def invert(self) -> QSeries:
        return series_invert(self)

    def __truediv__(self, other):
        if isinstance(other, QMonomial):
            return self.scale(other.inverse())
        if isinstance(other, (int, Fraction, Coefficient)):
            return self.scale(QMonomial(Coefficient.coerce(other).inverse(), 0))
        if isinstance(other, QSeries):
            return self * other.invert()
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            return self.invert() ** (-n)
        if n == 0:
            return QSeries.constant(1, self.order - self.val)
        result = self
        for _ in range(n - 1):
            result = result * self
        return result

    def evaluate(self, q0: complex) -> complex:
        q0 = complex(q0)
        return sum(complex(c) * q0**e for e, c in self.items())

    def same_window(self, other: QSeries) -> bool:
        """Coefficient equality on the common window below both orders."""
        order = min(self.order, other.order)
        lo = min(self.val, other.val, order)
        return all(self[e] == other[e] for e in range(lo, order))

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        # trailing stored zeros carry no information
        return (self.val, self.order, self.items()) == (other.val, other.order, other.items())

    __hash__ = None

    def __repr__(self):
        terms = " + ".join(f"({c})q^{e}" for e, c in self.items()) or "0"
        return f"{terms} + O(q^{self.order})"


def _normalise(val: int, dense: list, order: int):
    k = 0
    n = len(dense)
    while k < n and not dense[k]:
        k += 1
    if k == n or val + k >= order:
        return order, order, []
    end = min(n, order - val)
    return val + k, order, dense[k:end]


def _lift(x, order: int):
    if isinstance(x, QSeries):
        return x
    if isinstance(x, QMonomial):
        return QSeries.monomial(x, order)
    if isinstance(x, (int, Fraction, Coefficient)):
        return QSeries.constant(x, order)
    return NotImplemented


def series_invert(x: QSeries) -> QSeries:
    """Multiplicative inverse at the provable order ``order - 2*val``.

    The leading monomial is divided out and ``(1 + g)^-1`` is summed as a
    Neumann series in ``g`` (``val(g) >= 1``) via the usual recurrence.
    """
    if x.is_zero:
        raise SingularSeries(f"cannot invert {x!r}: zero through its window")
    lead = x.coeffs[0]
    inv_lead = lead.inverse()
    n = x.order - x.val
    g = [c * inv_lead for c in x.coeffs] + [ZERO] * (n - len(x.coeffs))
    y = [ONE] + [ZERO] * (n - 1)
    for k in range(1, n):
        acc = ZERO
        for j in range(1, k + 1):
            gj = g[j]
            if gj:
                acc = acc - gj * y[k - j]
        y[k] = acc
    return QSeries._raw(-x.val, [c * inv_lead for c in y], x.order - 2 * x.val)


def substitute_power(x: QSeries, k: int) -> QSeries:
    """The series ``x(q^k)``; its order is ``k * order``."""
    if k < 1:
        raise ValueError("substitute_power needs k >= 1")
    if x.is_zero:
        return QSeries.zero(k * x.order)
    dense = [ZERO] * ((len(x.coeffs) - 1) * k + 1)
    for i, c in enumerate(x.coeffs):
        dense[i * k] = c
    return QSeries._raw(k * x.val, dense, k * x.order)


def coeff_window(x: QSeries, lo: int, hi: int) -> list[Coefficient]:
    return x.window(lo, hi)


def poch_finite(x, base_power: int, n: int, order: int) -> QSeries:
    """``(x; q^base_power)_n`` truncated at ``order``; ``x`` a monomial or series."""
    if n < 0:
        raise ValueError("poch_finite needs n >= 0")
    if isinstance(x, QMonomial):
        from .expr import Poch, Product

        return Product(num=(Poch(x, base_power, n),)).series(order)
    result = QSeries.constant(1, order)
    for j in range(n):
        result = result * (1 - x * QMonomial(1, j * base_power))
    return result


def poch_infinite(x: QMonomial, base_power: int, order: int) -> QSeries:
    """``(x; q^base_power)_inf`` truncated at ``order`` (zero if a factor vanishes)."""
    from .expr import Poch, Product

    return Product(num=(Poch(x, base_power, None),)).series(order)


def adaptive_sum(
    term: Callable[[int], QSeries],
    order: int,
    start: int = 1,
    stop_streak: int = 3,
    max_terms: int = 100_000,
) -> QSeries:
    """Sum ``term(n)`` for ``n = start, start+1, ...`` below ``order``.

    Stops after ``stop_streak`` consecutive terms whose valuation is at or
    beyond ``order``. Terms with lower truncation order lower the result's.
    """
    total = QSeries.zero(order)
    streak = 0
    for n in range(start, start + max_terms):
        t = term(n)
        if t.val >= order:
            streak += 1
            if streak >= stop_streak:
                return total
            continue
        streak = 0
        total = total + t
    raise NonConvergent(f"no valuation growth after {max_terms} terms")
