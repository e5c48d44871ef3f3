"""Slope-ordered factorization into ray factors and DT invariant extraction.

A ray factor for the primitive charge ``g`` is ``exp`` of the ray logarithm
``sum_m d_m e_{m g}`` with

    d_m = -sum_{n | m} Omega(n g) * (n / m)**2,

i.e. the product over multiples of ``theta_{n g} ** Omega(n g)``.  Products are
ordered by slope: clockwise puts the largest slope ``b/a`` leftmost (applied
last), counterclockwise the smallest.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping

from .autos import TorusAuto, compose
from .lattice import Charge, Pairing, cone_charges, is_primitive, primitive_decompose, slope_key
from .series import ConeSeries, SeriesError, ray_coefficients


class Direction(str, Enum):
    CLOCKWISE = "clockwise"
    COUNTERCLOCKWISE = "counterclockwise"

    @property
    def opposite(self) -> "Direction":
        return Direction.COUNTERCLOCKWISE if self is Direction.CLOCKWISE else Direction.CLOCKWISE


class FactorizationError(RuntimeError):
    """The two generators disagree about a Lie coefficient: the input is not Poisson."""


class SpectrumError(ValueError):
    pass


@dataclass(frozen=True)
class RaySpectrum:
    """DT invariants ``Omega(n g)`` grouped by primitive ray ``g``.

    ``entries`` maps each primitive cone charge to a tuple of ``(n, Omega)``
    pairs with ``Omega != 0``, sorted by ``n``.  Lie-algebra data is derived
    on demand and never stored.
    """

    entries: Mapping[Charge, tuple]
    order: int

    def __post_init__(self):
        clean = {}
        for ray, rows in self.entries.items():
            ray = Charge(*ray)
            if not is_primitive(ray) or not ray.in_cone():
                raise SpectrumError(f"spectrum key {tuple(ray)} must be a primitive cone charge")
            kept = []
            for n, omega in sorted(rows):
                if n < 1:
                    raise SpectrumError(f"multiple {n} on ray {tuple(ray)} must be positive")
                if n * ray.degree > self.order:
                    raise SpectrumError(
                        f"charge {tuple(ray * n)} exceeds truncation order {self.order}"
                    )
                omega = Fraction(omega)
                if omega:
                    kept.append((n, omega))
            if kept:
                clean[ray] = tuple(kept)
        object.__setattr__(self, "entries", clean)

    @classmethod
    def from_omegas(cls, omegas: Mapping | Iterable, order: int) -> "RaySpectrum":
        """Build from ``{charge: Omega}`` with arbitrary (non-primitive) cone charges."""
        items = omegas.items() if isinstance(omegas, Mapping) else omegas
        grouped: dict = {}
        for x, omega in items:
            x = Charge(*x)
            if not x.in_cone():
                raise SpectrumError(f"charge {tuple(x)} is outside the closed positive cone")
            ray, n = primitive_decompose(x)
            rows = grouped.setdefault(ray, {})
            rows[n] = rows.get(n, 0) + Fraction(omega)
        return cls({r: tuple(rows.items()) for r, rows in grouped.items()}, order)

    @classmethod
    def empty(cls, order: int) -> "RaySpectrum":
        return cls({}, order)

    def __eq__(self, other):
        if not isinstance(other, RaySpectrum):
            return NotImplemented
        return self.order == other.order and self.entries == other.entries

    def __hash__(self):
        return hash((self.order, frozenset(self.entries.items())))

    def __bool__(self):
        return bool(self.entries)

    def omega(self, x) -> Fraction:
        ray, n = primitive_decompose(Charge(*x))
        return dict(self.entries.get(ray, ())).get(n, Fraction(0))

    def omegas(self) -> dict:
        return {ray * n: om for ray, rows in self.entries.items() for n, om in rows}

    def rays(self, direction: Direction | str = Direction.CLOCKWISE) -> list[Charge]:
        rays = sorted(self.entries, key=slope_key)
        return rays if Direction(direction) is Direction.CLOCKWISE else rays[::-1]

    def rows(self):
        """``(a, b, n, Omega)`` rows: slope descending, then multiple ascending."""
        return [(r.a, r.b, n, om) for r in self.rays() for n, om in self.entries[r]]

    def support(self) -> list[Charge]:
        return [ray * n for ray in self.rays() for n, _ in self.entries[ray]]

    def ray_log(self, ray) -> list[Fraction]:
        """Coefficients ``d_m`` of the ray logarithm, indexed by the multiple ``m``."""
        ray = Charge(*ray)
        return dilog_forward(dict(self.entries.get(ray, ())), self.order // ray.degree)

    def lie_element(self, x) -> Fraction:
        """Coefficient ``a(x)`` of ``e_x`` in the Lie-algebra data."""
        ray, m = primitive_decompose(Charge(*x))
        return self.ray_log(ray)[m] if m * ray.degree <= self.order else Fraction(0)

    def restrict(self, keep) -> "RaySpectrum":
        return RaySpectrum({r: rows for r, rows in self.entries.items() if keep(r)}, self.order)

    def merged(self, other: "RaySpectrum") -> "RaySpectrum":
        out = dict(self.entries)
        for r, rows in other.entries.items():
            if r in out:
                raise SpectrumError(f"ray {tuple(r)} present in both spectra")
            out[r] = rows
        return RaySpectrum(out, self.order)

    def is_integral(self) -> bool:
        return all(om.denominator == 1 for rows in self.entries.values() for _, om in rows)


def dilog_forward(omegas: Mapping[int, Fraction], max_mult: int) -> list[Fraction]:
    """Ray logarithm ``d_0..d_max`` from ``{n: Omega(n g)}``; ``d_0 = 0``."""
    d = [Fraction(0)] * (max_mult + 1)
    for n, om in omegas.items():
        om = Fraction(om)
        for j in range(1, max_mult // n + 1):
            d[n * j] -= om / (j * j)
    return d


def _invert_coeffs(d) -> dict:
    omega: dict = {}
    for m in range(1, len(d)):
        acc = -Fraction(d[m])
        for n, om in omega.items():
            if m % n == 0 and n < m:
                acc -= om * Fraction(n * n, m * m)
        if acc:
            omega[m] = acc
    return omega


def dilog_invert(raylog: ConeSeries | list) -> list[tuple[int, Fraction]]:
    """Solve ``d_m = -sum_{n|m} Omega(n) (n/m)**2`` for ``Omega`` by forward substitution.

    Accepts a series supported on a single ray, or a plain coefficient list
    ``[d_0, d_1, ...]`` (``d_0`` is ignored).
    """
    if isinstance(raylog, ConeSeries):
        if raylog.constant:
            raise SeriesError("a ray logarithm has no constant term")
        support = [x for x in raylog.coeffs]
        if not support:
            return []
        ray, _ = primitive_decompose(support[0])
        d = ray_coefficients(raylog, ray)
    else:
        d = list(raylog)
    return sorted(_invert_coeffs(d).items())


def ray_factor(ray, raylog: list, pairing: Pairing, order: int) -> TorusAuto:
    """``exp`` of the ray logarithm ``sum d_m e_{m ray}`` acting by Hamiltonian flow."""
    # {sum d_m e_{m g}, e_mu} = <g, mu> (sum m d_m e_{m g}) e_mu
    h = [m * Fraction(c) for m, c in enumerate(raylog)]
    return TorusAuto.from_ray(ray, h, pairing, order)


def _product(logs: Mapping, direction: Direction, pairing: Pairing, order: int) -> TorusAuto:
    rays = sorted((r for r, d in logs.items() if any(d)), key=slope_key)
    if direction is Direction.COUNTERCLOCKWISE:
        rays.reverse()
    result = TorusAuto.identity(pairing, order)
    for ray in reversed(rays):
        result = compose(ray_factor(ray, logs[ray], pairing, order), result)
    return result


def spectrum_to_auto(s: RaySpectrum, pairing: Pairing,
                     direction: Direction | str = Direction.CLOCKWISE) -> TorusAuto:
    direction = Direction(direction)
    logs = {r: s.ray_log(r) for r in s.entries}
    return _product(logs, direction, pairing, s.order)


def factorize(f: TorusAuto, direction: Direction | str = Direction.CLOCKWISE) -> RaySpectrum:
    """Unique spectrum whose ``direction``-ordered product equals ``f``.

    Works degree by degree: after matching ``f`` through degree ``d - 1``,
    the degree-``d`` mismatch of the generator multipliers reads
    ``c_g * <g, gamma_i>`` for each charge ``g`` of degree ``d``.
    """
    direction = Direction(direction)
    p = f.pairing
    n_max = f.order
    logs: dict = {}
    for d in range(1, n_max + 1):
        cur = {r: v[: d // r.degree + 1] for r, v in logs.items()}
        prod = _product(cur, direction, p, d)
        f1, f2 = f.u1.truncate(d), f.u2.truncate(d)
        for x in cone_charges(d):
            if x.degree != d:
                continue
            d1 = f1[x] - prod.u1[x]
            d2 = f2[x] - prod.u2[x]
            p1, p2 = p(x, (1, 0)), p(x, (0, 1))
            if p1:
                c = d1 / p1
                ok = (d2 == c * p2)
            elif p2:
                c = d2 / p2
                ok = not d1
            else:
                c, ok = Fraction(0), not d1 and not d2
            if not ok:
                raise FactorizationError(
                    f"generators disagree at charge {tuple(x)} (degree {d}); input is not a Poisson automorphism"
                )
            if c:
                ray, m = primitive_decompose(x)
                vec = logs.setdefault(ray, [Fraction(0)] * (n_max // ray.degree + 1))
                vec[m] += c
    return RaySpectrum({r: tuple(_invert_coeffs(v).items()) for r, v in logs.items()}, n_max)
