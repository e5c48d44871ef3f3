"""Truncated twisted group algebra of the positive cone.

A :class:`ConeSeries` is a finite sum ``sum c_x e_x`` over cone charges
``x = (a, b)`` with ``a, b >= 0`` and ``a + b <= order``.  Coefficients are
exact :class:`fractions.Fraction` values.  Products use the twisted rule
``e_x e_y = (-1)**<x, y> e_{x+y}``, which is commutative because the sign is
symmetric in ``x`` and ``y``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from . import _univariate as uni
from .lattice import Charge, Pairing, primitive_decompose

_ONE = Fraction(1)


class SeriesError(ValueError):
    """Raised on invalid series operands (order mismatch, non-unit input, ...)."""


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, str)):
        return Fraction(c)
    raise TypeError(f"coefficients must be exact rationals, got {type(c).__name__}")


class ConeSeries:
    """Immutable truncated series.  Zero coefficients are never stored."""

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Mapping | Iterable = (), order: int = 1):
        if not isinstance(order, int) or order < 1:
            raise SeriesError(f"truncation order must be a positive integer, got {order!r}")
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        clean = {}
        for key, c in items:
            a, b = key
            if a < 0 or b < 0:
                raise SeriesError(f"charge {(a, b)} is outside the closed positive cone")
            if a + b > order:
                continue
            c = _as_fraction(c)
            if c:
                clean[(a, b)] = clean.get((a, b), 0) + c
        self.coeffs = {key: c for key, c in clean.items() if c}
        self.order = order

    @classmethod
    def _raw(cls, coeffs: dict, order: int) -> "ConeSeries":
        # caller guarantees keys in the cone, degree <= order, nonzero Fractions
        obj = object.__new__(cls)
        obj.coeffs = coeffs
        obj.order = order
        return obj

    @classmethod
    def zero(cls, order: int) -> "ConeSeries":
        return cls((), order)

    @classmethod
    def one(cls, order: int) -> "ConeSeries":
        return cls._raw({(0, 0): _ONE}, order)

    @classmethod
    def monomial(cls, x, order: int, coeff=1) -> "ConeSeries":
        return cls({tuple(x): coeff}, order)

    def __getitem__(self, x) -> Fraction:
        return self.coeffs.get(tuple(x), Fraction(0))

    def __iter__(self):
        return iter(sorted(self.coeffs.items(), key=lambda kv: (kv[0][0] + kv[0][1], -kv[0][0])))

    def __len__(self):
        return len(self.coeffs)

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, ConeSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.order, frozenset(self.coeffs.items())))

    def __repr__(self):
        if not self.coeffs:
            return f"ConeSeries(0, order={self.order})"
        terms = []
        for (a, b), c in self:
            terms.append(f"{c}*e{(a, b)}" if (a, b) != (0, 0) else str(c))
        return f"ConeSeries({' + '.join(terms)}, order={self.order})"

    @property
    def constant(self) -> Fraction:
        return self.coeffs.get((0, 0), Fraction(0))

    def charges(self):
        return [Charge(*x) for x in self.coeffs]

    def _check(self, other: "ConeSeries") -> None:
        if self.order != other.order:
            raise SeriesError(f"truncation orders differ: {self.order} != {other.order}")

    def __add__(self, other):
        if not isinstance(other, ConeSeries):
            return NotImplemented
        self._check(other)
        out = dict(self.coeffs)
        for x, c in other.coeffs.items():
            s = out.get(x, 0) + c
            if s:
                out[x] = s
            else:
                out.pop(x, None)
        return ConeSeries._raw(out, self.order)

    def __neg__(self):
        return ConeSeries._raw({x: -c for x, c in self.coeffs.items()}, self.order)

    def __sub__(self, other):
        if not isinstance(other, ConeSeries):
            return NotImplemented
        return self + (-other)

    def scale(self, c) -> "ConeSeries":
        c = _as_fraction(c)
        if not c:
            return ConeSeries.zero(self.order)
        return ConeSeries._raw({x: c * v for x, v in self.coeffs.items()}, self.order)

    def truncate(self, order: int) -> "ConeSeries":
        """Image in the quotient keeping degrees ``<= order`` (which may exceed ``self.order``)."""
        return ConeSeries(self.coeffs, order)

    def homogeneous(self, d: int) -> dict:
        return {x: c for x, c in self.coeffs.items() if x[0] + x[1] == d}

    def min_degree(self) -> int | None:
        return min((x[0] + x[1] for x in self.coeffs), default=None)


def twisted_mul(f: ConeSeries, g: ConeSeries, p: Pairing) -> ConeSeries:
    f._check(g)
    return _mul(f.coeffs, g.coeffs, p.k, f.order)


def _mul(fc: dict, gc: dict, k: int, n: int) -> ConeSeries:
    if len(fc) > len(gc):
        fc, gc = gc, fc
    odd = k & 1
    gitems = sorted(gc.items(), key=lambda kv: kv[0][0] + kv[0][1])
    out: dict = {}
    get = out.get
    for (a1, b1), c1 in fc.items():
        room = n - a1 - b1
        for (a2, b2), c2 in gitems:
            if a2 + b2 > room:
                break
            key = (a1 + a2, b1 + b2)
            if odd and (a1 * b2 - a2 * b1) & 1:
                out[key] = get(key, 0) - c1 * c2
            else:
                out[key] = get(key, 0) + c1 * c2
    return ConeSeries._raw({x: c for x, c in out.items() if c}, n)


def times_monomial(f: ConeSeries, x, p: Pairing, order: int | None = None) -> ConeSeries:
    """``f * e_x`` truncated at ``order`` (default: ``f.order``)."""
    n = f.order if order is None else order
    xa, xb = x
    odd = p.k & 1
    out = {}
    for (a, b), c in f.coeffs.items():
        if a + b + xa + xb > n:
            continue
        out[(a + xa, b + xb)] = -c if odd and (a * xb - xa * b) & 1 else c
    return ConeSeries._raw(out, n)


def divide_monomial(f: ConeSeries, x, p: Pairing, order: int | None = None) -> ConeSeries:
    """The series ``u`` with ``u * e_x == f``; every term of ``f`` must be divisible by ``e_x``."""
    n = f.order if order is None else order
    xa, xb = x
    odd = p.k & 1
    out = {}
    for (a, b), c in f.coeffs.items():
        a0, b0 = a - xa, b - xb
        if a0 < 0 or b0 < 0:
            raise SeriesError(f"term e{(a, b)} is not divisible by e{(xa, xb)}")
        if a0 + b0 > n:
            continue
        out[(a0, b0)] = -c if odd and (a0 * xb - xa * b0) & 1 else c
    return ConeSeries._raw(out, n)


def _require_unit(f: ConeSeries) -> None:
    if f.constant != 1:
        raise SeriesError(f"expected a unit series with constant term 1, got constant {f.constant}")


def unit_inverse(f: ConeSeries, p: Pairing) -> ConeSeries:
    _require_unit(f)
    h = f - ConeSeries.one(f.order)
    # 1/(1+h) = sum (-h)^j; h has no constant term so at most `order` steps
    result = ConeSeries.one(f.order)
    term = ConeSeries.one(f.order)
    neg_h = -h
    for _ in range(f.order):
        term = twisted_mul(term, neg_h, p)
        if not term:
            break
        result = result + term
    return result


def unit_pow(f: ConeSeries, m, p: Pairing) -> ConeSeries:
    """``f**m`` for a unit series; ``m`` an integer, or a rational via exp/log."""
    _require_unit(f)
    if isinstance(m, Fraction) and m.denominator != 1:
        return series_exp(series_log(f, p).scale(m), p)
    m = int(m)
    if m < 0:
        f = unit_inverse(f, p)
        m = -m
    result = ConeSeries.one(f.order)
    base = f
    while m:
        if m & 1:
            result = twisted_mul(result, base, p)
        m >>= 1
        if m:
            base = twisted_mul(base, base, p)
    return result


def series_exp(f: ConeSeries, p: Pairing) -> ConeSeries:
    if f.constant:
        raise SeriesError("exp is only defined on series with zero constant term")
    result = ConeSeries.one(f.order)
    term = ConeSeries.one(f.order)
    for j in range(1, f.order + 1):
        term = twisted_mul(term, f, p).scale(Fraction(1, j))
        if not term:
            break
        result = result + term
    return result


def series_log(f: ConeSeries, p: Pairing) -> ConeSeries:
    _require_unit(f)
    h = f - ConeSeries.one(f.order)
    result = ConeSeries.zero(f.order)
    power = ConeSeries.one(f.order)
    for j in range(1, f.order + 1):
        power = twisted_mul(power, h, p)
        if not power:
            break
        result = result + power.scale(Fraction((-1) ** (j + 1), j))
    return result


def ray_series(x, coeffs, order: int) -> ConeSeries:
    """``sum_m coeffs[m] * e_{m x}`` for a list indexed by the multiple ``m``."""
    xa, xb = x
    out = {}
    for m, c in enumerate(coeffs):
        if c and m * (xa + xb) <= order:
            out[(m * xa, m * xb)] = c
    return ConeSeries._raw(out, order)


def ray_coefficients(f: ConeSeries, x) -> list[Fraction]:
    """Inverse of :func:`ray_series`: coefficients along the ray of ``x``.

    Raises :class:`SeriesError` if ``f`` has support off that ray.
    """
    xa, xb = x
    deg = xa + xb
    out = [Fraction(0)] * (f.order // deg + 1)
    for (a, b), c in f.coeffs.items():
        if a * xb != b * xa or (a + b) % deg:
            raise SeriesError(f"term e{(a, b)} is not on the ray through {(xa, xb)}")
        out[(a + b) // deg] = c
    return out


def dilog_truncated(x, order: int) -> ConeSeries:
    """``Li2(e_x) = sum_{m >= 1} e_{m x} / m**2``, truncated."""
    x = Charge(*x)
    if x.a < 0 or x.b < 0:
        raise SeriesError(f"charge {tuple(x)} is outside the closed positive cone")
    primitive_decompose(x)  # rejects zero
    terms = [Fraction(0)] + [Fraction(1, m * m) for m in range(1, order // x.degree + 1)]
    return ray_series(x, terms, order)


def ray_power(x, base: list, exponent, order: int) -> ConeSeries:
    """Unit series on the ray of ``x`` given as univariate ``base`` raised to a rational power."""
    n = order // (x[0] + x[1])
    return ray_series(x, uni.power(base, Fraction(exponent), n), order)
