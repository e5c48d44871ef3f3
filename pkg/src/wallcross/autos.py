"""Formal Poisson automorphisms of the twisted torus, truncated at a fixed order.

An automorphism ``f`` is stored through its action on the two generators,
``f(e_1) = u1 * e_1`` and ``f(e_2) = u2 * e_2`` with unit series ``u1, u2``.
Multiplicativity then gives ``f(e_x) = u1**a * u2**b * e_x`` for ``x = (a, b)``;
note that no extra sign appears because the twisted product is commutative.

Composition follows function composition: ``compose(f, g)`` applies ``g``
first.  Automorphisms supported on a single ray (``theta`` factors and their
products along one ray) are recognised and applied through a fast path.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import _univariate as uni
from .lattice import (
    GAMMA1,
    GAMMA2,
    Charge,
    Pairing,
    QuadraticRefinement,
    cone_charges,
    primitive_decompose,
    refine,
)
from .series import (
    ConeSeries,
    SeriesError,
    _mul,
    divide_monomial,
    dilog_truncated,
    ray_coefficients,
    series_exp,
    series_log,
    times_monomial,
    twisted_mul,
    unit_inverse,
)

HamiltonianElement = ConeSeries


class AutoError(ValueError):
    """Mismatched orders/pairings or invalid automorphism data."""


def poisson_bracket(f: ConeSeries, g: ConeSeries, p: Pairing) -> ConeSeries:
    """``{e_x, e_y} = (-1)**<x,y> <x,y> e_{x+y}``, extended bilinearly."""
    if f.order != g.order:
        raise SeriesError(f"truncation orders differ: {f.order} != {g.order}")
    n = f.order
    k = p.k
    out: dict = {}
    gitems = sorted(g.coeffs.items(), key=lambda kv: kv[0][0] + kv[0][1])
    for (a1, b1), c1 in f.coeffs.items():
        room = n - a1 - b1
        for (a2, b2), c2 in gitems:
            if a2 + b2 > room:
                break
            w = k * (a1 * b2 - a2 * b1)
            if not w:
                continue
            if w & 1:
                w = -w
            key = (a1 + a2, b1 + b2)
            out[key] = out.get(key, 0) + w * c1 * c2
    return ConeSeries._raw({x: c for x, c in out.items() if c}, n)


def lie_bracket(f: HamiltonianElement, g: HamiltonianElement, p: Pairing) -> HamiltonianElement:
    """Bracket of the graded Lie algebra; same values as :func:`poisson_bracket`."""
    if f.constant or g.constant:
        raise SeriesError("Lie algebra elements have zero constant term")
    return poisson_bracket(f, g, p)


@dataclass(frozen=True, eq=False)
class TorusAuto:
    u1: ConeSeries
    u2: ConeSeries
    pairing: Pairing
    order: int
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        for u in (self.u1, self.u2):
            if u.order != self.order:
                raise AutoError(f"multiplier has order {u.order}, expected {self.order}")
            if u.constant != 1:
                raise AutoError("generator multipliers must have constant term 1")

    @classmethod
    def identity(cls, pairing: Pairing, order: int) -> "TorusAuto":
        one = ConeSeries.one(order)
        return cls(one, one, pairing, order)

    @classmethod
    def from_ray(cls, direction, hamiltonian: list, pairing: Pairing, order: int) -> "TorusAuto":
        """Flow of a Hamiltonian supported on one ray.

        ``hamiltonian[m]`` is the coefficient ``h_m`` of ``H = sum h_m t**m``
        with ``t = e_{direction}``, normalised so that ``e_mu`` is sent to
        ``exp(<direction, mu> H) * e_mu``.
        """
        direction = Charge(*direction)
        n = order // direction.degree
        h = list(hamiltonian[: n + 1]) + [Fraction(0)] * max(0, n + 1 - len(hamiltonian))
        us = []
        for gen in (GAMMA1, GAMMA2):
            pw = pairing(direction, gen)
            us.append(_ray_unit(direction, h, pw, order))
        auto = cls(us[0], us[1], pairing, order)
        auto._cache["ray"] = (direction, h)
        return auto

    def __eq__(self, other):
        if not isinstance(other, TorusAuto):
            return NotImplemented
        return (
            self.order == other.order
            and self.pairing == other.pairing
            and self.u1 == other.u1
            and self.u2 == other.u2
        )

    def __hash__(self):
        return hash((self.u1, self.u2, self.pairing, self.order))

    def is_identity(self) -> bool:
        return len(self.u1) == 1 and len(self.u2) == 1

    def multipliers(self):
        return self.u1, self.u2

    # -- single-ray detection -------------------------------------------------

    def ray(self):
        """``(direction, H)`` if this automorphism is the flow of a one-ray Hamiltonian."""
        if "ray" not in self._cache:
            self._cache["ray"] = self._detect_ray()
        return self._cache["ray"]

    def _detect_ray(self):
        support = [x for u in (self.u1, self.u2) for x in u.coeffs if x != (0, 0)]
        if not support:
            return None
        direction, _ = primitive_decompose(support[0])
        h = None
        n = self.order // direction.degree
        for u, gen in ((self.u1, GAMMA1), (self.u2, GAMMA2)):
            try:
                coeffs = ray_coefficients(u, direction)
            except SeriesError:
                return None
            pw = self.pairing(direction, gen)
            if pw == 0:
                if len(u) != 1:
                    return None
                continue
            coeffs = coeffs + [Fraction(0)] * (n + 1 - len(coeffs))
            cand = [c / pw for c in uni.log(coeffs, n)]
            if h is None:
                h = cand
            elif h != cand:
                return None
        return None if h is None else (direction, h)

    # -- action on the algebra ------------------------------------------------

    def multiplier(self, x, order: int | None = None) -> ConeSeries:
        """``w_x`` with ``f(e_x) = w_x * e_x``, truncated at ``order`` (default ``N - deg x``)."""
        a, b = x
        n = self.order - a - b if order is None else order
        if n < 0:
            return ConeSeries.zero(max(n, 0) or 1)
        key = ("w", a, b, n)
        if key not in self._cache:
            self._cache[key] = self._compute_multiplier(a, b, n)
        return self._cache[key]

    def _compute_multiplier(self, a: int, b: int, n: int) -> ConeSeries:
        n_eff = max(n, 1)
        ray = self.ray()
        if ray is not None:
            direction, h = ray
            return _ray_unit(direction, h, self.pairing(direction, (a, b)), n_eff)
        return _mul(self._gen_power(1, a, n_eff).coeffs, self._gen_power(2, b, n_eff).coeffs,
                    self.pairing.k, n_eff)

    def _gen_power(self, which: int, e: int, n: int) -> ConeSeries:
        key = ("p", which, e, n)
        if key not in self._cache:
            if e == 0:
                res = ConeSeries.one(n)
            else:
                u = self.u1 if which == 1 else self.u2
                prev = self._gen_power(which, e - 1, n)
                res = _mul(prev.coeffs, u.coeffs, self.pairing.k, n)
            self._cache[key] = res
        return self._cache[key]

    def image(self, x) -> ConeSeries:
        """``f(e_x)`` truncated at the automorphism's order."""
        x = tuple(x)
        if x[0] + x[1] > self.order:
            return ConeSeries.zero(self.order)
        w = self.multiplier(x)
        return times_monomial(ConeSeries._raw(w.coeffs, self.order), x, self.pairing)

    def apply(self, s: ConeSeries) -> ConeSeries:
        """``f(s)`` for a series of the same truncation order."""
        if s.order != self.order:
            raise AutoError(f"series order {s.order} does not match automorphism order {self.order}")
        ray = self.ray()
        if ray is not None:
            return self._apply_ray(s, *ray)
        out: dict = {}
        for x, c in s.coeffs.items():
            for y, v in self.image(x).coeffs.items():
                out[y] = out.get(y, 0) + c * v
        return ConeSeries._raw({y: v for y, v in out.items() if v}, self.order)

    def _apply_ray(self, s: ConeSeries, direction, h) -> ConeSeries:
        n = self.order
        da, db = direction
        dd = da + db
        odd = self.pairing.k & 1
        out: dict = {}
        for (a, b), c in s.coeffs.items():
            p = self.pairing(direction, (a, b))
            room = (n - a - b) // dd
            if p == 0:
                out[(a, b)] = out.get((a, b), 0) + c
                continue
            vp = self._ray_power(p, room)
            for m in range(min(room, len(vp) - 1) + 1):
                v = vp[m]
                if not v:
                    continue
                key = (a + m * da, b + m * db)
                term = c * v
                if odd and (m * p) & 1:
                    term = -term
                out[key] = out.get(key, 0) + term
        return ConeSeries._raw({y: v for y, v in out.items() if v}, n)

    def _ray_power(self, p: int, room: int) -> list:
        key = ("v", p)
        if key not in self._cache:
            direction, h = self.ray()
            n = self.order // direction.degree
            self._cache[key] = uni.exp([p * c for c in h], n)
        return self._cache[key]


def _ray_unit(direction, h: list, power: int, order: int) -> ConeSeries:
    """``exp(power * H)`` as a series on the ray of ``direction``."""
    n = order // (direction[0] + direction[1])
    vals = uni.exp([power * c for c in h[: n + 1]], n) if power else [Fraction(1)]
    da, db = direction
    return ConeSeries._raw({(m * da, m * db): c for m, c in enumerate(vals) if c}, order)


def _check_pair(f: TorusAuto, g: TorusAuto) -> None:
    if f.order != g.order:
        raise AutoError(f"truncation orders differ: {f.order} != {g.order}")
    if f.pairing != g.pairing:
        raise AutoError(f"pairings differ: k={f.pairing.k} vs k={g.pairing.k}")


def make_theta(x, omega, pairing: Pairing, order: int) -> TorusAuto:
    """``theta_x ** omega``: ``e_mu -> (1 - e_x) ** (omega <x, mu>) * e_mu``."""
    x = Charge(*x)
    if x.a < 0 or x.b < 0:
        raise AutoError(f"charge {tuple(x)} is outside the closed positive cone")
    direction, mult = primitive_decompose(x)
    omega = Fraction(omega)
    n = order // direction.degree
    # (1 - t^mult)^(omega * mult * <direction, mu>) = exp(<direction, mu> * H)
    h = [Fraction(0)] * (n + 1)
    if omega:
        for j in range(1, n // mult + 1):
            h[j * mult] = -omega * mult / j
    return TorusAuto.from_ray(direction, h, pairing, order)


def compose(f: TorusAuto, g: TorusAuto) -> TorusAuto:
    """``f o g`` (apply ``g`` first)."""
    _check_pair(f, g)
    if g.is_identity():
        return f
    if f.is_identity():
        return g
    k = f.pairing.k
    u1 = _mul(f.apply(g.u1).coeffs, f.u1.coeffs, k, f.order)
    u2 = _mul(f.apply(g.u2).coeffs, f.u2.coeffs, k, f.order)
    result = TorusAuto(u1, u2, f.pairing, f.order)
    rf, rg = f.ray(), g.ray()
    if rf is not None and rg is not None and rf[0] == rg[0]:
        result._cache["ray"] = (rf[0], [a + b for a, b in zip(rf[1], rg[1])])
    return result


def compose_all(autos, pairing: Pairing, order: int) -> TorusAuto:
    """``autos[0] o autos[1] o ... `` (the last one is applied first)."""
    result = TorusAuto.identity(pairing, order)
    for f in reversed(list(autos)):
        result = compose(f, result)
    return result


def invert(f: TorusAuto) -> TorusAuto:
    ray = f.ray()
    if ray is not None:
        direction, h = ray
        return TorusAuto.from_ray(direction, [-c for c in h], f.pairing, f.order)
    # g o f = id  <=>  g.u_i = 1 / g(f.u_i); each pass fixes one more degree
    g = TorusAuto.identity(f.pairing, f.order)
    for _ in range(f.order):
        u1 = unit_inverse(g.apply(f.u1), f.pairing)
        u2 = unit_inverse(g.apply(f.u2), f.pairing)
        g = TorusAuto(u1, u2, f.pairing, f.order)
    return g


def commutator(s: TorusAuto, t: TorusAuto) -> TorusAuto:
    """``t^-1 o s o t o s^-1``."""
    _check_pair(s, t)
    return compose_all([invert(t), s, t, invert(s)], s.pairing, s.order)


def hamiltonian_flow(h: HamiltonianElement, pairing: Pairing) -> TorusAuto:
    """``exp({h, .})`` computed by summing iterated Poisson brackets.

    Independent of the closed-form ``theta`` construction; used to cross-check it.
    """
    if h.constant:
        raise SeriesError("the Hamiltonian must have zero constant term")
    n = h.order
    big = h.truncate(n + 1)
    us = []
    for gen in (GAMMA1, GAMMA2):
        term = ConeSeries.monomial(gen, n + 1)
        total = term
        for j in range(1, n + 1):
            term = poisson_bracket(big, term, pairing).scale(Fraction(1, j))
            if not term:
                break
            total = total + term
        us.append(divide_monomial(total, gen, pairing, n))
    return TorusAuto(us[0], us[1], pairing, n)


def hamiltonian_of(f: TorusAuto) -> HamiltonianElement:
    """Inverse of :func:`hamiltonian_flow` for one-ray automorphisms."""
    ray = f.ray()
    if ray is None:
        raise AutoError("automorphism is not supported on a single ray")
    direction, h = ray
    # {sum d_m e_{m x}, e_mu} = <x, mu> (sum m d_m e_{m x}) e_mu
    coeffs = [Fraction(0)] + [c / m for m, c in enumerate(h) if m]
    from .series import ray_series

    return ray_series(direction, coeffs, f.order)


# -- checks -------------------------------------------------------------------


def poisson_violations(f: TorusAuto, max_degree: int | None = None):
    """Basis pairs ``(x, y)`` with ``f({e_x, e_y}) != {f(e_x), f(e_y)}``."""
    n = f.order if max_degree is None else max_degree
    bad = []
    charges = list(cone_charges(n))
    for i, x in enumerate(charges):
        fx = f.image(x)
        for y in charges[i + 1:]:
            if x.degree + y.degree > n:
                continue
            lhs = f.apply(poisson_bracket(ConeSeries.monomial(x, f.order),
                                          ConeSeries.monomial(y, f.order), f.pairing))
            rhs = poisson_bracket(fx, f.image(y), f.pairing)
            if lhs != rhs:
                bad.append((x, y))
    return bad


def homomorphism_violations(f: TorusAuto, max_degree: int | None = None):
    """Basis pairs with ``f(e_x e_y) != f(e_x) f(e_y)``, images built by repeated generator action."""
    n = f.order if max_degree is None else max_degree
    bad = []
    charges = list(cone_charges(n))
    for i, x in enumerate(charges):
        for y in charges[i:]:
            if x.degree + y.degree > n:
                continue
            prod = twisted_mul(ConeSeries.monomial(x, f.order), ConeSeries.monomial(y, f.order), f.pairing)
            if f.apply(prod) != twisted_mul(f.image(x), f.image(y), f.pairing):
                bad.append((x, y))
    return bad


# -- ordinary torus -----------------------------------------------------------


@dataclass(frozen=True)
class OrdinaryAutoDescription:
    """Action on ordinary coordinates ``x = z^gamma1``, ``y = z^gamma2``.

    ``x -> x * x_multiplier`` and ``y -> y * y_multiplier``; both multipliers
    are plain dictionaries ``(a, b) -> coefficient of x^a y^b``.
    """

    x_multiplier: dict
    y_multiplier: dict
    order: int


def untwist(f: TorusAuto, q: QuadraticRefinement = QuadraticRefinement()) -> OrdinaryAutoDescription:
    """Transport ``f`` to the ordinary torus through ``e_x = sigma(x) z^x``."""
    def conv(u):
        return {x: c * refine(x, q, f.pairing) for x, c in u.coeffs.items()}

    return OrdinaryAutoDescription(conv(f.u1), conv(f.u2), f.order)


def dilog_hamiltonian(x, omega, order: int) -> HamiltonianElement:
    """``-omega * Li2(e_x)``, whose flow is ``theta_x ** omega``."""
    return dilog_truncated(x, order).scale(-Fraction(omega))


__all__ = [
    "AutoError",
    "HamiltonianElement",
    "OrdinaryAutoDescription",
    "TorusAuto",
    "commutator",
    "compose",
    "compose_all",
    "dilog_hamiltonian",
    "hamiltonian_flow",
    "hamiltonian_of",
    "homomorphism_violations",
    "invert",
    "lie_bracket",
    "make_theta",
    "poisson_bracket",
    "poisson_violations",
    "series_exp",
    "series_log",
    "untwist",
]
