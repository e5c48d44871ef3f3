"""Stability data, support checks, walls along linear paths, and wall crossing.

Central charges carry exact rational real and imaginary parts.  On a rank-2
lattice ``Im(conj Z(x) Z(y)) = det(x, y) * w`` with
``w = Im(conj Z(gamma1) Z(gamma2))``, so along a linear path every wall sits
at a root of the quadratic ``w(t)``.  Roots are kept exactly as
``p + q*sqrt(D)``.

Orientation convention: when ``w > 0`` the image of a charge turns
counterclockwise as its slope ``b/a`` grows, so the Z-clockwise product is the
slope-clockwise product.  When ``w < 0`` the two orders swap.  Crossing a
wall keeps the Z-clockwise product of the sector fixed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Sequence

from .factor import Direction, RaySpectrum, factorize, spectrum_to_auto
from .lattice import Charge, Pairing, cone_charges, primitive_decompose, slope_compare, slope_key


class StabilityError(ValueError):
    pass


class SupportViolationError(StabilityError):
    def __init__(self, report: "SupportReport"):
        super().__init__("support property violated: " + "; ".join(str(v) for v in report.violations))
        self.report = report


class DegeneratePathError(StabilityError):
    """Alignment holds on an interval, or an endpoint lies on a wall."""


class NonGenericPathError(StabilityError):
    def __init__(self, message: str, collisions=()):
        super().__init__(message)
        self.collisions = list(collisions)


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


@dataclass(frozen=True)
class CentralCharge:
    """Values ``Z(gamma1) = z1`` and ``Z(gamma2) = z2`` as ``(re, im)`` rational pairs."""

    z1: tuple
    z2: tuple

    def __post_init__(self):
        object.__setattr__(self, "z1", (_frac(self.z1[0]), _frac(self.z1[1])))
        object.__setattr__(self, "z2", (_frac(self.z2[0]), _frac(self.z2[1])))

    @classmethod
    def from_values(cls, re1, im1, re2, im2) -> "CentralCharge":
        return cls((re1, im1), (re2, im2))

    def __call__(self, x) -> tuple[Fraction, Fraction]:
        a, b = x
        return (a * self.z1[0] + b * self.z2[0], a * self.z1[1] + b * self.z2[1])

    def wedge(self) -> Fraction:
        """``Im(conj Z(gamma1) * Z(gamma2))``; its sign is the orientation."""
        return self.z1[0] * self.z2[1] - self.z1[1] * self.z2[0]

    def orientation(self, lo=(1, 0), hi=(0, 1)) -> int:
        x, y = self(lo), self(hi)
        w = x[0] * y[1] - x[1] * y[0]
        return (w > 0) - (w < 0)

    def conjugate(self) -> "CentralCharge":
        return CentralCharge((self.z1[0], -self.z1[1]), (self.z2[0], -self.z2[1]))

    def scaled(self, c) -> "CentralCharge":
        c = _frac(c)
        return CentralCharge((c * self.z1[0], c * self.z1[1]), (c * self.z2[0], c * self.z2[1]))

    def interpolate(self, other: "CentralCharge", t) -> "CentralCharge":
        t = _frac(t)
        s = 1 - t
        return CentralCharge(
            (s * self.z1[0] + t * other.z1[0], s * self.z1[1] + t * other.z1[1]),
            (s * self.z2[0] + t * other.z2[0], s * self.z2[1] + t * other.z2[1]),
        )

    def values(self) -> tuple:
        return (*self.z1, *self.z2)


@dataclass(frozen=True)
class QuadraticForm:
    """``Q(a, b) = q11 a^2 + 2 q12 a b + q22 b^2``."""

    q11: Fraction
    q12: Fraction
    q22: Fraction

    def __post_init__(self):
        for name in ("q11", "q12", "q22"):
            object.__setattr__(self, name, _frac(getattr(self, name)))
        if self.q11 * self.q22 - self.q12 * self.q12 == 0:
            raise StabilityError("quadratic form is degenerate (zero determinant)")

    def __call__(self, x) -> Fraction:
        a, b = x
        return self.q11 * a * a + 2 * self.q12 * a * b + self.q22 * b * b

    def is_negative_definite(self) -> bool:
        return self.q11 < 0 and self.q11 * self.q22 - self.q12 * self.q12 > 0


@dataclass(frozen=True)
class StabilityData:
    charge: CentralCharge
    form: QuadraticForm
    spectrum: RaySpectrum
    pairing: Pairing

    @property
    def order(self) -> int:
        return self.spectrum.order

    def with_spectrum(self, spectrum: RaySpectrum) -> "StabilityData":
        return replace(self, spectrum=spectrum)


# -- support property ---------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    reason: str
    vector: tuple
    value: Fraction | None = None

    def __str__(self):
        extra = "" if self.value is None else f" (value {self.value})"
        return f"{self.reason} at {self.vector}{extra}"


@dataclass(frozen=True)
class SupportReport:
    violations: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def charges(self) -> list:
        return [v.vector for v in self.violations]


def _primitive_vector(v) -> tuple[int, int]:
    a, b = (_frac(c) for c in v)
    den = math.lcm(a.denominator, b.denominator)
    ia, ib = int(a * den), int(b * den)
    g = math.gcd(ia, ib)
    if ia < 0 or (ia == 0 and ib < 0):
        g = -g
    return (ia // g, ib // g)


def kernel_direction(z: CentralCharge) -> tuple[int, int] | None:
    """Primitive integer direction spanning ``ker Z`` on the real span, or None if injective.

    Returns ``(0, 0)`` when ``Z`` vanishes identically.
    """
    if z.wedge() != 0:
        return None
    if z.z1[0] or z.z2[0]:
        return _primitive_vector((z.z2[0], -z.z1[0]))
    if z.z1[1] or z.z2[1]:
        return _primitive_vector((z.z2[1], -z.z1[1]))
    return (0, 0)


def check_support(sd: StabilityData) -> SupportReport:
    out = []
    q, z = sd.form, sd.charge
    for x in sd.spectrum.support():
        val = q(x)
        if val <= 0:
            out.append(Violation("Q not positive on support charge", tuple(x), val))
        if z(x) == (0, 0):
            out.append(Violation("central charge vanishes on support charge", tuple(x)))
    ker = kernel_direction(z)
    if ker == (0, 0):
        if not q.is_negative_definite():
            out.append(Violation("Z vanishes identically but Q is not negative definite", (0, 0)))
    elif ker is not None:
        val = q(ker)
        if val >= 0:
            out.append(Violation("Q not negative on ker Z", ker, val))
    return SupportReport(tuple(out))


# -- exact quadratic surds ----------------------------------------------------


@dataclass(frozen=True)
class Surd:
    """``p + q * sqrt(d)`` with rational ``p, q`` and a non-square integer ``d`` (or ``q == 0``)."""

    p: Fraction
    q: Fraction = Fraction(0)
    d: int = 0

    def _lift(self, other):
        """``other`` rewritten over the radicand of ``self`` (or ``self``'s over ``other``'s)."""
        if not isinstance(other, Surd):
            return Surd(_frac(other), Fraction(0), self.d)
        if not other.q or not self.q or other.d == self.d:
            return other
        # sqrt(d2) = (r / d1) sqrt(d1) when d1 * d2 = r^2
        m = self.d * other.d
        r = math.isqrt(m)
        if r * r != m:
            raise ValueError("cannot mix different square roots")
        return Surd(other.p, other.q * Fraction(r, self.d), self.d)

    def _radicand(self, o: "Surd") -> int:
        return self.d if self.q else (o.d if o.q else self.d or o.d)

    def __add__(self, other):
        o = self._lift(other)
        return Surd(self.p + o.p, self.q + o.q, self._radicand(o))

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.p, -self.q, self.d)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        d = self._radicand(o)
        return Surd(self.p * o.p + self.q * o.q * d, self.p * o.q + self.q * o.p, d)

    __rmul__ = __mul__

    def sign(self) -> int:
        p, q = self.p, self.q
        if not q:
            return (p > 0) - (p < 0)
        sq = 1 if q > 0 else -1
        if not p or (p > 0) == (q > 0):
            return sq
        return (1 if p > 0 else -1) if p * p > q * q * self.d else sq

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __eq__(self, other):
        if isinstance(other, (Surd, int, Fraction)):
            return (self - other).sign() == 0
        return NotImplemented

    def __hash__(self):
        # q sqrt(d) is determined by q^2 d and the sign of q
        return hash((self.p, self.q * self.q * self.d, self.q > 0))

    def __float__(self):
        return float(self.p) + float(self.q) * math.sqrt(self.d)

    def rational(self) -> Fraction | None:
        return self.p if not self.q else None

    def __str__(self):
        if not self.q:
            return str(self.p)
        return f"{self.p} + {self.q}*sqrt({self.d})"


def _poly_at(coeffs, t: Surd) -> Surd:
    acc = Surd(Fraction(0), Fraction(0), t.d)
    for c in reversed(coeffs):
        acc = acc * t + c
    return acc


@dataclass(frozen=True)
class LinearPath:
    start: CentralCharge
    end: CentralCharge

    def component(self, which: int, part: int):
        """Linear coefficients ``[c0, c1]`` of one real component along the path."""
        s = (self.start.z1, self.start.z2)[which][part]
        e = (self.end.z1, self.end.z2)[which][part]
        return [s, e - s]

    def charge_poly(self, x):
        """``(re, im)`` of ``Z_t(x)`` as linear polynomials in ``t``."""
        a, b = x
        return tuple(
            [a * c1 + b * c2 for c1, c2 in zip(self.component(0, part), self.component(1, part))]
            for part in (0, 1)
        )

    def wedge_poly(self):
        """Coefficients ``[c0, c1, c2]`` of ``w(t) = Im(conj Z_t(gamma1) Z_t(gamma2))``."""
        r1, i1 = self.component(0, 0), self.component(0, 1)
        r2, i2 = self.component(1, 0), self.component(1, 1)
        return _sub(_pmul(r1, i2), _pmul(i1, r2))

    def at(self, t) -> CentralCharge:
        return self.start.interpolate(self.end, t)


def _pmul(f, g):
    out = [Fraction(0)] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        for j, b in enumerate(g):
            out[i + j] += a * b
    return out


def _sub(f, g):
    n = max(len(f), len(g))
    f = list(f) + [Fraction(0)] * (n - len(f))
    g = list(g) + [Fraction(0)] * (n - len(g))
    return [a - b for a, b in zip(f, g)]


def _real_roots(coeffs) -> list[tuple[Surd, int]]:
    """Real roots of a polynomial of degree <= 2 with the sign of the derivative there."""
    c0, c1, c2 = (list(coeffs) + [Fraction(0)] * 3)[:3]
    if c2 == 0:
        if c1 == 0:
            return []
        return [(Surd(-c0 / c1), 1 if c1 > 0 else -1)]
    disc = c1 * c1 - 4 * c2 * c0
    if disc < 0:
        return []
    if disc == 0:
        return [(Surd(-c1 / (2 * c2)), 0)]
    s = disc.numerator * disc.denominator
    r = math.isqrt(s)
    roots = []
    for sgn in (-1, 1):
        # 2 c2 t + c1 = sgn * sqrt(disc)
        if r * r == s:
            t = Surd((-c1 + sgn * Fraction(r, disc.denominator)) / (2 * c2))
        else:
            t = Surd(-c1 / (2 * c2), sgn * Fraction(1, disc.denominator) / (2 * c2), s)
        roots.append((t, sgn))
    roots.sort(key=lambda rt: float(rt[0]))
    if roots[0][0] == roots[1][0]:
        raise AssertionError("distinct roots expected")
    if not (roots[0][0] < roots[1][0]):
        roots.reverse()
    return roots


# -- walls --------------------------------------------------------------------


@dataclass(frozen=True)
class Wall:
    """Alignment of at least two independent charges on one ray at path time ``t``.

    ``rays`` are the extreme primitive charges of the aligned set, larger
    slope first.  ``orientation`` is the sign of ``Im(conj Z(lo) Z(hi))`` just
    before ``t`` (0 when the path only touches the wall).
    """

    t: Surd
    rays: tuple
    orientation: int
    charges: tuple = field(default=(), compare=False)

    @property
    def transversal(self) -> bool:
        return self.orientation != 0

    def reversed(self) -> "Wall":
        return Wall(1 - self.t, self.rays, -self.orientation, self.charges)

    def contains(self, ray) -> bool:
        hi, lo = self.rays
        return slope_compare(hi, ray) <= 0 and slope_compare(ray, lo) <= 0


def _aligned_groups(path: LinearPath, t: Surd, charges: Sequence[Charge]):
    """Partition charges with ``Z_t != 0`` into the two opposite rays of the image line."""
    vals = {}
    for x in charges:
        re, im = path.charge_poly(x)
        vals[x] = (_poly_at(re, t), _poly_at(im, t))
    nonzero = [x for x in charges if (vals[x][0] * vals[x][0] + vals[x][1] * vals[x][1]).sign() != 0]
    if not nonzero:
        return []
    ref = vals[nonzero[0]]
    plus, minus = [nonzero[0]], []
    for x in nonzero[1:]:
        re, im = vals[x]
        dot = (ref[0] * re + ref[1] * im).sign()
        (plus if dot > 0 else minus).append(x)
    return [g for g in (plus, minus) if g]


def _group_wall(t: Surd, group, orientation_before: int):
    rays = sorted({primitive_decompose(x)[0] for x in group}, key=slope_key)
    if len(rays) < 2:
        return None
    return Wall(t, (rays[0], rays[-1]), orientation_before, tuple(sorted(group, key=slope_key)))


def _candidates(support: Iterable, order: int | None) -> list[Charge]:
    base = sorted({Charge(*x) for x in support if tuple(x) != (0, 0)})
    for x in base:
        if not x.in_cone():
            raise StabilityError(f"charge {tuple(x)} is outside the closed positive cone")
    if order is None:
        return base
    closed = set(base)
    frontier = list(base)
    while frontier:
        nxt = []
        for x in frontier:
            for y in base:
                s = x + y
                if s.degree <= order and s not in closed:
                    closed.add(s)
                    nxt.append(s)
        frontier = nxt
    return sorted(closed)


def _walls_at_roots(path: LinearPath, charges, include_tangent=True):
    w = path.wedge_poly()
    if not any(w):
        groups = _aligned_groups(path, Surd(Fraction(1, 2)), charges)
        if any(_group_wall(Surd(Fraction(1, 2)), g, 0) for g in groups):
            raise DegeneratePathError("charges stay aligned along the whole path")
        return []
    for end in (Fraction(0), Fraction(1)):
        if _poly_at(w, Surd(end)).sign() == 0:
            if any(_group_wall(Surd(end), g, 0) for g in _aligned_groups(path, Surd(end), charges)):
                raise DegeneratePathError(f"path endpoint t={end} lies on a wall")
    walls = []
    for t, dsign in _real_roots(w):
        if t.sign() <= 0 or (1 - t).sign() <= 0:
            continue
        if dsign == 0 and not include_tangent:
            continue
        for g in _aligned_groups(path, t, charges):
            wall = _group_wall(t, g, -dsign)
            if wall is not None:
                walls.append(wall)
    return walls


def find_walls(z_start: CentralCharge, z_end: CentralCharge, support: Iterable,
               order: int | None = None) -> list[Wall]:
    """Walls met by ``Z_t = (1-t) z_start + t z_end`` for ``0 < t < 1``, sorted by ``t``.

    With ``order`` the candidates are closed under sums up to that degree.
    """
    charges = _candidates(support, order)
    walls = _walls_at_roots(LinearPath(z_start, z_end), charges)
    walls.sort(key=lambda w: float(w.t))
    return walls


# -- crossing -----------------------------------------------------------------


def cross_wall(sd: StabilityData, wall: Wall, charge_after: CentralCharge | None = None,
               assemble: Direction | str | None = None) -> StabilityData:
    """Replace the spectrum of the wall's sector by its re-factorization.

    The sector's slope-ordered product is assembled in the Z-clockwise order
    of the approach side and refactored in the opposite slope order.  The
    approach side is read from ``sd.charge`` (falling back to
    ``wall.orientation`` when ``sd.charge`` sits on the wall); ``assemble``
    overrides both.  The result carries ``charge_after``, or the complex
    conjugate of ``sd.charge``, which lies on the far side.
    """
    hi, lo = wall.rays
    for r in (hi, lo):
        if not Charge(*r).in_cone():
            raise StabilityError(f"wall ray {tuple(r)} is outside the cone model")
    if assemble is None:
        side = sd.charge.orientation(lo, hi) or wall.orientation
        if side == 0:
            raise StabilityError("cannot tell which side of the wall the data lies on")
        assemble = Direction.CLOCKWISE if side > 0 else Direction.COUNTERCLOCKWISE
    assemble = Direction(assemble)
    new_charge = charge_after if charge_after is not None else sd.charge.conjugate()

    inner = sd.spectrum.restrict(wall.contains)
    outer = sd.spectrum.restrict(lambda r: not wall.contains(r))
    if len(inner.entries) < 2 or sd.pairing.k == 0:
        # a single ray, or a commuting (k = 0) sector, reads the same in both orders
        return replace(sd, charge=new_charge)
    auto = spectrum_to_auto(inner, sd.pairing, assemble)
    crossed = factorize(auto, assemble.opposite)
    stray = [r for r in crossed.entries if not wall.contains(r)]
    if stray:
        raise StabilityError(f"refactorization left the wall sector at rays {stray}")
    out = StabilityData(new_charge, sd.form, outer.merged(crossed), sd.pairing)
    report = check_support(out)
    if not report.ok:
        raise SupportViolationError(report)
    return out


def _rational_between(lo: Surd, hi: Surd) -> Fraction:
    a, b = float(lo), float(hi)
    for den in (2, 8, 64, 1024, 2 ** 20, 2 ** 40):
        t = Fraction(round((a + b) / 2 * den), den)
        if lo < t and t < hi:
            return t
    raise AssertionError("failed to separate wall times")


def lift_path(sd0: StabilityData, z_end: CentralCharge) -> StabilityData:
    """Carry ``sd0`` along the straight path to ``z_end``, crossing each wall in turn."""
    path = LinearPath(sd0.charge, z_end)
    roots = [t for t, ds in _real_roots(path.wedge_poly()) if ds != 0] if any(path.wedge_poly()) else []
    # endpoint and degeneracy checks against the initial support
    _walls_at_roots(path, sd0.spectrum.support())
    roots = [t for t in roots if t.sign() > 0 and (1 - t).sign() > 0]
    roots.sort(key=float)
    sd = sd0
    for i, t in enumerate(roots):
        support = sd.spectrum.support()
        dsign = next(ds for r, ds in _real_roots(path.wedge_poly()) if r == t)
        walls = [w for g in _aligned_groups(path, t, support)
                 if (w := _group_wall(t, g, -dsign)) is not None]
        if len(walls) > 1:
            raise NonGenericPathError(
                f"{len(walls)} walls coincide at t={t}", [w.rays for w in walls]
            )
        nxt = roots[i + 1] if i + 1 < len(roots) else Surd(Fraction(1))
        after = path.at(_rational_between(t, nxt)) if i + 1 < len(roots) else z_end
        if walls:
            sd = cross_wall(sd, walls[0], charge_after=after,
                            assemble=Direction.CLOCKWISE if walls[0].orientation > 0
                            else Direction.COUNTERCLOCKWISE)
        else:
            sd = replace(sd, charge=after)
    return replace(sd, charge=z_end)
