"""JSON stability files.

Layout::

    {
      "k": 1,
      "order": 8,
      "Z": {"gamma1": ["0", "1"], "gamma2": ["1", "0"]},
      "Q": [["1", "0"], ["0", "1"]],
      "omega": [{"gamma": [1, 0], "value": "1"}, {"gamma": [0, 1], "value": "1"}]
    }

Rationals are strings ``"p/q"`` (bare integers are accepted on input); floats
are rejected so files stay exact.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path

from .factor import RaySpectrum, SpectrumError
from .lattice import Pairing
from .stability import CentralCharge, QuadraticForm, StabilityData, StabilityError

_RATIONAL = re.compile(r"^\s*[+-]?\d+(\s*/\s*[+-]?\d+)?\s*$")


class StabilityFileError(ValueError):
    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        where = ""
        if line is not None:
            where += f"line {line}: "
        if field is not None:
            where += f"field '{field}': "
        super().__init__(where + message)
        self.field = field
        self.line = line


class _Reader:
    def __init__(self, text: str):
        self.text = text

    def fail(self, field: str, message: str, raw=None):
        line = None
        if raw is not None:
            token = json.dumps(raw)
            hits = [m.start() for m in re.finditer(re.escape(token), self.text)]
            if len(hits) == 1:
                line = self.text.count("\n", 0, hits[0]) + 1
        raise StabilityFileError(message, field, line)

    def rational(self, raw, field: str) -> Fraction:
        if isinstance(raw, bool) or not isinstance(raw, (str, int)):
            self.fail(field, f"expected a rational string 'p/q', got {raw!r}", raw)
        if isinstance(raw, int):
            return Fraction(raw)
        if not _RATIONAL.match(raw):
            self.fail(field, f"malformed rational {raw!r}", raw)
        try:
            return Fraction(raw.replace(" ", ""))
        except ZeroDivisionError:
            self.fail(field, f"zero denominator in {raw!r}", raw)

    def integer(self, raw, field: str) -> int:
        if isinstance(raw, bool) or not isinstance(raw, int):
            self.fail(field, f"expected an integer, got {raw!r}", raw)
        return raw

    def pair(self, raw, field: str):
        if not isinstance(raw, list) or len(raw) != 2:
            self.fail(field, f"expected a two-element list, got {raw!r}")
        return raw


def parse_stability(text: str, order: int | None = None) -> StabilityData:
    """Parse and validate a stability file; ``order`` overrides the file's truncation."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StabilityFileError(f"invalid JSON: {exc.msg} (column {exc.colno})", line=exc.lineno) from None
    r = _Reader(text)
    if not isinstance(doc, dict):
        r.fail("<root>", "top level must be an object")
    for key in ("k", "Z", "Q", "omega"):
        if key not in doc:
            r.fail(key, "missing")

    k = r.integer(doc["k"], "k")
    if k < 0:
        r.fail("k", f"pairing strength must be non-negative, got {k}", k)
    n = order if order is not None else r.integer(doc.get("order", 8), "order")
    if n < 1:
        r.fail("order", f"truncation order must be positive, got {n}", n)

    z = doc["Z"]
    if not isinstance(z, dict):
        r.fail("Z", "expected an object with gamma1 and gamma2")
    zs = []
    for g in ("gamma1", "gamma2"):
        if g not in z:
            r.fail(f"Z.{g}", "missing")
        re_im = r.pair(z[g], f"Z.{g}")
        zs.append((r.rational(re_im[0], f"Z.{g}[0]"), r.rational(re_im[1], f"Z.{g}[1]")))

    q = r.pair(doc["Q"], "Q")
    rows = [r.pair(q[i], f"Q[{i}]") for i in range(2)]
    qv = [[r.rational(rows[i][j], f"Q[{i}][{j}]") for j in range(2)] for i in range(2)]
    if qv[0][1] != qv[1][0]:
        r.fail("Q", "quadratic form matrix must be symmetric")
    try:
        form = QuadraticForm(qv[0][0], qv[0][1], qv[1][1])
    except StabilityError as exc:
        r.fail("Q", str(exc))

    if not isinstance(doc["omega"], list):
        r.fail("omega", "expected a list of {gamma, value} entries")
    omegas = {}
    for i, entry in enumerate(doc["omega"]):
        if not isinstance(entry, dict) or "gamma" not in entry or "value" not in entry:
            r.fail(f"omega[{i}]", "expected an object with 'gamma' and 'value'")
        g = r.pair(entry["gamma"], f"omega[{i}].gamma")
        a = r.integer(g[0], f"omega[{i}].gamma[0]")
        b = r.integer(g[1], f"omega[{i}].gamma[1]")
        if (a, b) == (0, 0):
            r.fail(f"omega[{i}].gamma", "the zero charge cannot carry an invariant")
        if a < 0 or b < 0:
            r.fail(f"omega[{i}].gamma", f"charge {(a, b)} is outside the closed positive cone")
        if a + b > n:
            r.fail(f"omega[{i}].gamma", f"charge {(a, b)} exceeds truncation order {n}")
        if (a, b) in omegas:
            r.fail(f"omega[{i}].gamma", f"duplicate charge {(a, b)}")
        omegas[(a, b)] = r.rational(entry["value"], f"omega[{i}].value")
    try:
        spectrum = RaySpectrum.from_omegas(omegas, n)
    except SpectrumError as exc:
        r.fail("omega", str(exc))
    return StabilityData(CentralCharge(*zs), form, spectrum, Pairing(k))


def dump_stability(sd: StabilityData) -> str:
    doc = {
        "k": sd.pairing.k,
        "order": sd.order,
        "Z": {
            "gamma1": [str(sd.charge.z1[0]), str(sd.charge.z1[1])],
            "gamma2": [str(sd.charge.z2[0]), str(sd.charge.z2[1])],
        },
        "Q": [
            [str(sd.form.q11), str(sd.form.q12)],
            [str(sd.form.q12), str(sd.form.q22)],
        ],
        "omega": [
            {"gamma": [a * n, b * n], "value": str(om)} for a, b, n, om in sd.spectrum.rows()
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def load_stability(path, order: int | None = None) -> StabilityData:
    return parse_stability(Path(path).read_text(), order)


def save_stability(sd: StabilityData, path) -> None:
    Path(path).write_text(dump_stability(sd))
