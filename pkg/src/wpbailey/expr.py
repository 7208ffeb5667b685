"""Closed-form q-products and the expression trees built from them.

Every summand in this package is a :class:`Product`: a monomial times a
ratio of q-Pochhammer symbols, each stored compactly as ``(x; q^step)_length``.
Products evaluate exactly (as :class:`~wpbailey.qseries.QSeries`) or
numerically (as ``complex``), so every identity is written once and checked
on both backends.

Exact evaluation works at fixed *relative* precision: multiplying or dividing
by a factor ``1 - c q^m`` with a nonzero leading coefficient never loses
information, so a product of valuation ``v`` is computed to ``order - v``
coefficients and lands exactly at the requested order.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence, Union

from .errors import NonConvergent, PoleDetected, SingularSeries
from .qnumeric import DEFAULT_CONFIG, NumericConfig, num_poch, num_sum
from .qseries import Coefficient, QMonomial, QSeries, _ZERO

__all__ = [
    "Expr",
    "Poch",
    "Product",
    "QSum",
    "Custom",
    "as_expr",
    "factor",
    "poch",
    "prod",
]


@dataclass(frozen=True)
class Poch:
    """``(x; q^step)_length``; ``length=None`` is the infinite product."""

    x: QMonomial
    step: int = 1
    length: int | None = 1

    def __post_init__(self):
        if self.step < 1:
            raise ValueError("Pochhammer step must be positive")
        if self.length is not None and self.length < 0:
            raise ValueError("Pochhammer length must be nonnegative")

    def __str__(self):
        n = "inf" if self.length is None else self.length
        return f"({self.x}; q^{self.step})_{n}"


def poch(x: QMonomial, n: int | None = None, step: int = 1) -> Poch:
    return Poch(x, step, n)


def factor(x: QMonomial) -> Poch:
    """The single factor ``1 - x``."""
    return Poch(x, 1, 1)


def _to_poch(f) -> Poch:
    return f if isinstance(f, Poch) else factor(f)


def _describe(c, e: int) -> str:
    return f"(1 - ({c})*q^{e})"


@dataclass(frozen=True)
class Product:
    """``scale * prod(num) / prod(den)``; ``scale=None`` is the zero product."""

    scale: QMonomial | None = QMonomial(1, 0)
    num: tuple[Poch, ...] = ()
    den: tuple[Poch, ...] = ()

    @property
    def is_zero(self) -> bool:
        return self.scale is None

    def __mul__(self, other):
        if isinstance(other, Product):
            if self.is_zero or other.is_zero:
                return ZERO_PRODUCT
            return Product(self.scale * other.scale, self.num + other.num, self.den + other.den)
        if self.is_zero:
            return self
        try:
            return Product(self.scale * other, self.num, self.den)
        except TypeError:
            return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Product):
            if other.is_zero:
                raise ZeroDivisionError("division by the zero product")
            if self.is_zero:
                return self
            return Product(self.scale / other.scale, self.num + other.den, self.den + other.num)
        if self.is_zero:
            return self
        return Product(self.scale / other, self.num, self.den)

    def __neg__(self):
        return self if self.is_zero else Product(-self.scale, self.num, self.den)

    def normal_form(self, rel: int | None = None):
        """``(lead, val, binomials)`` with the product equal to
        ``lead * q^val * prod (1 - d q^p)^k`` over ``binomials[(d, p)] = k``.

        Only binomials with ``0 < p < rel`` are listed (none when ``rel`` is
        None). Returns None for a product that vanishes exactly.
        """
        if self.scale is None:
            return None
        if not self.scale.is_exact:
            raise TypeError("numeric parameters cannot be expanded exactly")
        lead = self.scale.coeff
        val = self.scale.expo
        limit = 1 if rel is None else rel
        binoms: dict = {}
        for sign, pochs in ((-1, self.den), (1, self.num)):
            for p in pochs:
                c, m, s = p.x.coeff, p.x.expo, p.step
                if not p.x.is_exact:
                    raise TypeError("numeric parameters cannot be expanded exactly")
                if m >= limit:
                    continue
                count = -((m - limit) // s)
                if p.length is not None:
                    count = min(count, p.length)
                inv_c = None
                for j in range(count):
                    e = m + j * s
                    if e > 0:
                        key = (c, e)
                        binoms[key] = binoms.get(key, 0) + sign
                        continue
                    if e == 0:
                        f = 1 - c
                        if not f:
                            if sign > 0:
                                return None
                            raise PoleDetected(_describe(c, e), f"in {p}")
                    else:
                        f = -c
                        val += sign * e
                        if -e < limit:
                            if inv_c is None:
                                inv_c = 1 / c
                            key = (inv_c, -e)
                            binoms[key] = binoms.get(key, 0) + sign
                    lead = lead * f if sign > 0 else lead / f
        return lead, val, {k: v for k, v in binoms.items() if v}

    def valuation(self) -> int | None:
        """Valuation in O(1) per Pochhammer symbol; None for a vanishing product."""
        if self.scale is None:
            return None
        if not self.scale.is_exact:
            raise TypeError("numeric parameters cannot be expanded exactly")
        val = self.scale.expo
        for sign, pochs in ((-1, self.den), (1, self.num)):
            for p in pochs:
                m, s = p.x.expo, p.step
                if m > 0:
                    continue
                if not p.x.is_exact:
                    raise TypeError("numeric parameters cannot be expanded exactly")
                n_neg = -(m // s) if m % s else -m // s
                if p.length is not None:
                    n_neg = min(n_neg, p.length)
                val += sign * (n_neg * m + s * n_neg * (n_neg - 1) // 2)
                if m % s == 0 and (p.length is None or -m // s < p.length) and not (1 - p.x.coeff):
                    if sign > 0:
                        return None
                    raise PoleDetected(_describe(p.x.coeff, 0), f"in {p}")
        return val

    def series(self, order: int) -> QSeries:
        v = self.valuation()
        if v is None or v >= order:
            return QSeries.zero(order)
        rel = order - v
        lead, val, binoms = self.normal_form(rel)
        kernel = _Kernel.for_terms([(lead, binoms)])
        buf = kernel.fresh(rel)
        kernel.apply_all(buf, binoms)
        return QSeries._raw(val, kernel.finish(buf, lead), order)

    def numeric(self, q0: complex, cfg: NumericConfig = DEFAULT_CONFIG) -> complex:
        if self.scale is None:
            return 0j
        q0 = complex(q0)
        value = self.scale.evaluate(q0)
        for p in self.num:
            value *= num_poch(p.x.evaluate(q0), q0**p.step, p.length, cfg, check_poles=False)
        for p in self.den:
            value /= num_poch(p.x.evaluate(q0), q0**p.step, p.length, cfg)
        return value

    def __str__(self):
        if self.scale is None:
            return "0"
        num = " ".join(str(p) for p in self.num) or "1"
        den = " ".join(str(p) for p in self.den) or "1"
        return f"{self.scale} * {num} / {den}"


ZERO_PRODUCT = Product(None)


def prod(scale=1, num: Iterable = (), den: Iterable = ()) -> Product:
    """Build a Product; ``num``/``den`` entries are Poch or QMonomial ``x`` (meaning ``1 - x``)."""
    if isinstance(scale, (int, Fraction, Coefficient, complex, float)):
        if not scale:
            return ZERO_PRODUCT
        scale = QMonomial(scale, 0)
    return Product(scale, tuple(_to_poch(f) for f in num), tuple(_to_poch(f) for f in den))


class _Kernel:
    """In-place multiplication/division of a coefficient buffer by binomials.

    Real problems run on bare Fractions; anything touching ``i`` runs on
    Coefficients.
    """

    def __init__(self, gaussian: bool):
        self.gaussian = gaussian
        self.one = Coefficient(1) if gaussian else Fraction(1)
        self.zero = Coefficient(0) if gaussian else _ZERO

    @classmethod
    def for_terms(cls, terms) -> _Kernel:
        for lead, binoms in terms:
            if not lead.is_real or any(not d.is_real for d, _ in binoms):
                return cls(True)
        return cls(False)

    def fresh(self, n: int) -> list:
        return [self.one] + [self.zero] * (n - 1)

    def apply_all(self, buf: list, binoms: dict) -> None:
        for (d, p), k in binoms.items():
            self.apply(buf, d, p, k)

    def apply(self, buf: list, d: Coefficient, p: int, power: int) -> None:
        n = len(buf)
        if p >= n or not power:
            return
        if not self.gaussian:
            d = d.re
        if power > 0:
            for _ in range(power):
                for i in range(n - 1, p - 1, -1):
                    b = buf[i - p]
                    if b:
                        buf[i] = buf[i] - d * b
        else:
            for _ in range(-power):
                for i in range(p, n):
                    b = buf[i - p]
                    if b:
                        buf[i] = buf[i] + d * b

    def finish(self, buf: list, lead: Coefficient, length: int | None = None) -> list:
        view = buf if length is None else buf[:length]
        if self.gaussian:
            return [lead * b for b in view]
        if lead.is_real:
            r = lead.re
            return [Coefficient._make(r * b, _ZERO) for b in view]
        return [lead * b for b in view]


ScalarLike = Union[int, Fraction, Coefficient, QMonomial]


class Expr:
    """Node of an identity side: evaluates to a QSeries or a complex number.

    ``exact(order)`` always returns a series whose truncation order is at
    least ``order``; nodes that lose precision (products, inverses, negative
    shifts) re-evaluate their children at a higher working order.
    """

    label = ""

    def exact(self, order: int) -> QSeries:
        raise NotImplementedError

    def numeric(self, q0: complex, cfg: NumericConfig = DEFAULT_CONFIG) -> complex:
        raise NotImplementedError

    def __add__(self, other):
        return Add((self, as_expr(other)))

    def __radd__(self, other):
        return Add((as_expr(other), self))

    def __sub__(self, other):
        return Add((self, -as_expr(other)))

    def __rsub__(self, other):
        return Add((as_expr(other), -self))

    def __neg__(self):
        return Scaled(QMonomial(-1, 0), self)

    def __mul__(self, other):
        if isinstance(other, (Expr, Product)):
            return Mul(self, as_expr(other))
        return Scaled(_monomial(other), self)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        if isinstance(other, (Expr, Product)):
            return Mul(self, Inverse(as_expr(other)))
        return Scaled(_monomial(other).inverse(), self)

    def __pow__(self, n: int):
        if n < 1:
            raise ValueError("only positive powers of expressions")
        result = self
        for _ in range(n - 1):
            result = Mul(result, self)
        return result


def _monomial(x) -> QMonomial:
    return x if isinstance(x, QMonomial) else QMonomial(x, 0)


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, Product):
        return Term(x)
    return Term(prod(scale=x))


class Term(Expr):
    def __init__(self, product: Product):
        self.product = product

    def exact(self, order):
        return self.product.series(order)

    def numeric(self, q0, cfg=DEFAULT_CONFIG):
        return self.product.numeric(q0, cfg)


def _peel(e: Expr) -> tuple[Coefficient, Expr]:
    """Split off constant exact scale factors: ``e == c * inner``."""
    c = Coefficient(1)
    while isinstance(e, Scaled) and e.m.expo == 0 and e.m.is_exact:
        c, e = c * e.m.coeff, e.inner
    return c, e


class Add(Expr):
    """Sum of expressions; the same subtree under opposite constant weights cancels.

    Cancelling by identity matters for formally divergent subtrees such as
    ``F(a) - F(b)`` at ``a == b``, whose difference is zero even though
    neither operand can be expanded.
    """

    def __init__(self, items: Sequence[Expr]):
        flat = []
        for it in items:
            c, inner = _peel(it)
            if not isinstance(inner, Add):
                flat.append(it)
            elif c == 1:
                flat.extend(inner.items)
            else:
                flat.extend(Scaled(QMonomial(c, 0), sub) for sub in inner.items)
        groups: dict[int, list] = {}
        for it in flat:
            c, inner = _peel(it)
            slot = groups.setdefault(id(inner), [Coefficient(0), inner, 0])
            slot[0] = slot[0] + c
            slot[2] += 1
        kept = []
        for it in flat:
            slot = groups.pop(id(_peel(it)[1]), None)
            if slot is None:
                continue
            weight, inner, count = slot
            if count == 1:
                kept.append(it)
            elif weight != 0:
                kept.append(Scaled(QMonomial(weight, 0), inner))
        self.items = tuple(kept)

    def exact(self, order):
        total = QSeries.zero(order)
        for it in self.items:
            total = total + it.exact(order)
        return total

    def numeric(self, q0, cfg=DEFAULT_CONFIG):
        return sum((it.numeric(q0, cfg) for it in self.items), 0j)


class Scaled(Expr):
    def __init__(self, m: QMonomial, inner: Expr):
        self.m = m
        self.inner = inner

    def exact(self, order):
        return self.inner.exact(order - self.m.expo).scale(self.m)

    def numeric(self, q0, cfg=DEFAULT_CONFIG):
        return self.m.evaluate(q0) * self.inner.numeric(q0, cfg)


_MAX_RETRIES = 12


class Mul(Expr):
    def __init__(self, left: Expr, right: Expr):
        self.left = left
        self.right = right

    def exact(self, order):
        work = order
        for _ in range(_MAX_RETRIES):
            r = self.left.exact(work) * self.right.exact(work)
            if r.order >= order:
                return r
            work += order - r.order
        raise SingularSeries(f"could not reach order {order} in a product")

    def numeric(self, q0, cfg=DEFAULT_CONFIG):
        return self.left.numeric(q0, cfg) * self.right.numeric(q0, cfg)


class Inverse(Expr):
    def __init__(self, inner: Expr):
        self.inner = inner

    def exact(self, order):
        work = order
        for _ in range(_MAX_RETRIES):
            x = self.inner.exact(work)
            if x.is_zero:
                work += max(order, 1)
                continue
            inv = x.invert()
            if inv.order >= order:
                return inv
            work += order - inv.order
        raise SingularSeries("cannot invert a series that vanishes to the working order")

    def numeric(self, q0, cfg=DEFAULT_CONFIG):
        return 1 / self.inner.numeric(q0, cfg)


class Custom(Expr):
    """Leaf with hand-written evaluators, e.g. brute-force lattice sums."""

    def __init__(self, exact_fn: Callable[[int], QSeries], numeric_fn: Callable[[complex, NumericConfig], complex], label=""):
        self.exact_fn = exact_fn
        self.numeric_fn = numeric_fn
        self.label = label

    def exact(self, order):
        return self.exact_fn(order)

    def numeric(self, q0, cfg=DEFAULT_CONFIG):
        return self.numeric_fn(complex(q0), cfg)


TermFn = Callable[[int], Union[Product, Sequence[Product]]]


def _products(t) -> Sequence[Product]:
    return (t,) if isinstance(t, Product) else tuple(t)


class QSum(Expr):
    """``sum_{n >= start} term(n)`` where ``term(n)`` is a Product or a list of them.

    Exact mode first scans valuations (cheap integer work), stops after
    ``stop_streak`` consecutive terms at or beyond the target order, then
    builds the visible terms incrementally: each list slot keeps a running
    binomial product and only the factors that differ from the previous term
    are multiplied in or divided out.
    """

    stop_streak = 3
    max_terms = 100_000

    def __init__(self, term: TermFn, start: int = 1, label: str = ""):
        self.term = term
        self.start = start
        self.label = label

    def _scan(self, order: int):
        plan = []
        streak = 0
        lowest = None
        for n in range(self.start, self.start + self.max_terms):
            visible = []
            for slot, p in enumerate(_products(self.term(n))):
                v = p.valuation()
                if v is not None and v < order:
                    visible.append((slot, p, v))
                    lowest = v if lowest is None else min(lowest, v)
            if visible:
                plan.append(visible)
                streak = 0
            else:
                streak += 1
                if streak >= self.stop_streak:
                    return plan, lowest
        raise NonConvergent(
            f"{self.label or 'sum'}: term valuations did not pass {order} within {self.max_terms} terms"
        )

    def exact(self, order):
        plan, lowest = self._scan(order)
        if not plan:
            return QSeries.zero(order)
        rel = order - lowest
        forms = [[(slot, p.normal_form(rel)) for slot, p, _ in entry] for entry in plan]
        kernel = _Kernel.for_terms([nf[0::2] for entry in forms for _, nf in entry])
        acc = [kernel.zero] * rel
        states: dict[int, tuple[dict, list]] = {}
        for entry in forms:
            for slot, (lead, val, binoms) in entry:
                state = states.get(slot)
                if state is None:
                    buf, diff = kernel.fresh(rel), binoms
                else:
                    current, buf = state
                    diff = {k: binoms.get(k, 0) - current.get(k, 0) for k in binoms.keys() | current.keys()}
                    if sum(map(abs, diff.values())) > sum(map(abs, binoms.values())):
                        buf, diff = kernel.fresh(rel), binoms
                kernel.apply_all(buf, diff)
                states[slot] = (binoms, buf)
                width = order - val
                off = val - lowest
                lv = lead if kernel.gaussian else lead.re
                if not kernel.gaussian and not lead.is_real:
                    raise AssertionError("kernel selection missed a Gaussian lead")
                for i in range(width):
                    b = buf[i]
                    if b:
                        acc[off + i] = acc[off + i] + lv * b
        if kernel.gaussian:
            dense = acc
        else:
            dense = [Coefficient._make(x, _ZERO) for x in acc]
        return QSeries._raw(lowest, dense, order)

    def numeric(self, q0, cfg=DEFAULT_CONFIG):
        q0 = complex(q0)
        return num_sum(
            lambda n: sum((p.numeric(q0, cfg) for p in _products(self.term(n))), 0j),
            cfg,
            start=self.start,
        )
