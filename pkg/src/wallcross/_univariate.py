# Truncated power series in one variable, stored as coefficient lists.
# Used for everything that lives on a single ray, where the twisted product
# carries no signs.
from __future__ import annotations

from fractions import Fraction

_ZERO = Fraction(0)


def mul(f, g, n):
    out = [_ZERO] * (n + 1)
    for i, a in enumerate(f[: n + 1]):
        if not a:
            continue
        for j in range(min(len(g), n + 1 - i)):
            b = g[j]
            if b:
                out[i + j] += a * b
    return out


def exp(f, n):
    """exp of a series with zero constant term (recurrence j*E_j = sum m f_m E_{j-m})."""
    assert not f or f[0] == 0
    f = list(f[: n + 1]) + [_ZERO] * max(0, n + 1 - len(f))
    e = [Fraction(1)] + [_ZERO] * n
    for j in range(1, n + 1):
        s = _ZERO
        for m in range(1, j + 1):
            if f[m]:
                s += m * f[m] * e[j - m]
        e[j] = s / j
    return e


def log(f, n):
    """log of a series with constant term 1."""
    assert f and f[0] == 1
    f = list(f[: n + 1]) + [_ZERO] * max(0, n + 1 - len(f))
    # L' = f'/f, solved by forward substitution
    out = [_ZERO] * (n + 1)
    for j in range(1, n + 1):
        s = j * f[j]
        for m in range(1, j):
            if out[m] and f[j - m]:
                s -= m * out[m] * f[j - m]
        out[j] = s / j
    return out


def power(f, r, n):
    """f**r for a unit series and any rational exponent r."""
    if r == 0:
        return [Fraction(1)] + [_ZERO] * n
    lg = log(f, n)
    return exp([c * r for c in lg], n)
