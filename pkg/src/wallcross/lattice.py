"""Rank-2 charge lattice with its skew pairing and quadratic refinement.

Charges are written ``(a, b)`` for ``a*gamma1 + b*gamma2``.  The pairing is
fixed by ``<gamma1, gamma2> = k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import NamedTuple


class Charge(NamedTuple):
    a: int
    b: int

    def __add__(self, other):  # type: ignore[override]
        return Charge(self.a + other[0], self.b + other[1])

    def __sub__(self, other):
        return Charge(self.a - other[0], self.b - other[1])

    def __mul__(self, n):  # type: ignore[override]
        return Charge(n * self.a, n * self.b)

    __rmul__ = __mul__

    @property
    def degree(self) -> int:
        return self.a + self.b

    def in_cone(self) -> bool:
        return self.a >= 0 and self.b >= 0

    def __str__(self) -> str:
        return f"({self.a},{self.b})"


ZERO = Charge(0, 0)
GAMMA1 = Charge(1, 0)
GAMMA2 = Charge(0, 1)


@dataclass(frozen=True)
class Pairing:
    """Skew form with ``<gamma1, gamma2> = k``.

    ``k = 0`` is accepted so that degenerate, fully commuting examples can be
    built, but most of the factorization machinery needs ``k > 0``.
    """

    k: int

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 0:
            raise ValueError(f"pairing strength must be a non-negative integer, got {self.k!r}")

    def __call__(self, x, y) -> int:
        return self.k * (x[0] * y[1] - y[0] * x[1])


@dataclass(frozen=True)
class QuadraticRefinement:
    """Sign function fixed by its values on the basis."""

    s1: int = 1
    s2: int = 1

    def __post_init__(self):
        if self.s1 not in (1, -1) or self.s2 not in (1, -1):
            raise ValueError("quadratic refinement values must be +1 or -1")


ALL_REFINEMENTS = tuple(QuadraticRefinement(s1, s2) for s1 in (1, -1) for s2 in (1, -1))


def pair(x, y, p: Pairing) -> int:
    return p(x, y)


def refine(x, q: QuadraticRefinement, p: Pairing) -> int:
    """Value of the quadratic refinement on ``x``.

    Satisfies ``refine(x) * refine(y) == (-1)**pair(x, y) * refine(x + y)``.
    """
    a, b = x
    sign = -1 if (p.k * a * b) % 2 else 1
    if q.s1 == -1 and a % 2:
        sign = -sign
    if q.s2 == -1 and b % 2:
        sign = -sign
    return sign


def _check_nonzero(x) -> None:
    if x[0] == 0 and x[1] == 0:
        raise ValueError("the zero charge has no slope or primitive direction")


def slope_key(x):
    """Sort key putting larger slopes ``b/a`` first; ``(0, 1)`` comes first of all.

    Only meaningful for nonzero charges in the closed positive cone.
    """
    _check_nonzero(x)
    a, b = x
    if a == 0:
        return (0, Fraction(0))
    return (1, -Fraction(b, a))


def slope_compare(x, y) -> int:
    """-1 if ``x`` comes first in clockwise order, 1 if ``y`` does, 0 on the same ray."""
    for z in (x, y):
        _check_nonzero(z)
        if z[0] < 0 or z[1] < 0:
            raise ValueError(f"charge {tuple(z)} is outside the closed positive cone")
    # b_x / a_x > b_y / a_y  <=>  b_x a_y > b_y a_x on the cone
    lhs = x[1] * y[0]
    rhs = y[1] * x[0]
    return -1 if lhs > rhs else (1 if lhs < rhs else 0)


def primitive_decompose(x) -> tuple[Charge, int]:
    _check_nonzero(x)
    n = gcd(x[0], x[1])
    return Charge(x[0] // n, x[1] // n), n


def is_primitive(x) -> bool:
    return (x[0], x[1]) != (0, 0) and gcd(x[0], x[1]) == 1


def cone_charges(order: int, include_zero: bool = False):
    """All cone charges of degree at most ``order``, in increasing degree."""
    start = 0 if include_zero else 1
    for d in range(start, order + 1):
        for a in range(d, -1, -1):
            yield Charge(a, d - a)


def primitive_rays(order: int):
    """Primitive cone charges of degree at most ``order`` in clockwise order."""
    rays = [c for c in cone_charges(order) if is_primitive(c)]
    rays.sort(key=slope_key)
    return rays
