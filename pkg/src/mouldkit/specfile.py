"""Reading and writing diffeomorphism spec files.

A spec is a JSON document with every number given as an exact string::

    {
      "nu": 2,
      "multipliers": ["2", "1/2"],
      "h": [{"component": 1, "exponent": [2, 1], "coefficient": "3/4"}],
      "truncation": 6
    }

Errors carry the line of the offending field.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

from .alphabet import format_vector
from .operators import PreparedDiffeo
from .polys import TruncatedPoly
from .scalars import ZERO, Scalar, format_scalar, parse_scalar

__all__ = ["SpecError", "DEFAULT_DEGREE", "parse_spec", "parse_spec_text", "spec_to_dict", "dump_spec"]

DEFAULT_DEGREE = 6


class SpecError(ValueError):
    pass


def _line_of(text: str, pos: int) -> int:
    return text.count("\n", 0, pos) + 1


class _Locator:
    """Maps a key (and its n-th occurrence) to a line of the source text."""

    def __init__(self, text: str):
        self.text = text

    def line(self, key: str, occurrence: int = 0) -> int:
        hits = [m.start() for m in re.finditer(rf'"{re.escape(key)}"\s*:', self.text)]
        if occurrence < len(hits):
            return _line_of(self.text, hits[occurrence])
        if hits:
            return _line_of(self.text, hits[-1])
        return 1


def _number(value, what: str) -> Scalar:
    if isinstance(value, bool) or isinstance(value, float):
        raise ValueError(f"{what} must be an exact string, got {value!r}")
    if isinstance(value, int):
        return Scalar(value)
    if not isinstance(value, str):
        raise ValueError(f"{what} must be a string, got {type(value).__name__}")
    return parse_scalar(value)


def parse_spec_text(text: str, source: str = "<spec>", degree: int | None = None) -> PreparedDiffeo:
    """Parse spec text into a :class:`PreparedDiffeo`; ``degree`` overrides the truncation."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{source}:{exc.lineno}: malformed JSON: {exc.msg}") from None
    loc = _Locator(text)

    def fail(key, msg, occurrence=0):
        raise SpecError(f"{source}:{loc.line(key, occurrence)}: {msg}")

    if not isinstance(data, dict):
        raise SpecError(f"{source}:1: spec must be a JSON object")
    unknown = sorted(set(data) - {"nu", "multipliers", "h", "truncation"})
    if unknown:
        fail(unknown[0], f"unknown field {unknown[0]!r}")
    nu = data.get("nu")
    if isinstance(nu, bool) or not isinstance(nu, int) or nu < 1:
        fail("nu", f"nu must be a positive integer, got {nu!r}")
    raw_mu = data.get("multipliers")
    if not isinstance(raw_mu, list) or len(raw_mu) != nu:
        fail("multipliers", f"multipliers must be a list of {nu} exact strings")
    mu = []
    for i, s in enumerate(raw_mu):
        try:
            m = _number(s, f"multiplier {i + 1}")
        except ValueError as exc:
            fail("multipliers", str(exc))
        if not m:
            fail("multipliers", f"multiplier {i + 1} is zero; the linear part must be invertible")
        mu.append(m)
    N = data.get("truncation", DEFAULT_DEGREE)
    if isinstance(N, bool) or not isinstance(N, int) or N < 1:
        fail("truncation", f"truncation must be a positive integer, got {N!r}")
    if degree is not None:
        if degree < 1:
            raise SpecError(f"{source}: degree must be a positive integer, got {degree}")
        N = degree
    terms = data.get("h", [])
    if not isinstance(terms, list):
        fail("h", "h must be a list of terms")
    comps = [dict() for _ in range(nu)]
    for k, term in enumerate(terms):
        if not isinstance(term, dict) or set(term) != {"component", "exponent", "coefficient"}:
            fail("component", f"h[{k}] needs exactly the fields component, exponent, coefficient", k)
        i = term["component"]
        if isinstance(i, bool) or not isinstance(i, int) or not 1 <= i <= nu:
            fail("component", f"h[{k}]: component must be in 1..{nu}, got {i!r}", k)
        e = term["exponent"]
        if (
            not isinstance(e, list)
            or len(e) != nu
            or any(isinstance(c, bool) or not isinstance(c, int) or c < 0 for c in e)
        ):
            fail("exponent", f"h[{k}]: exponent must be {nu} nonnegative integers", k)
        e = tuple(e)
        if sum(e) < 2:
            if sum(e) == 1 and e[i - 1] == 1:
                msg = "linear terms belong in the multipliers"
            elif sum(e) == 1:
                msg = "off-diagonal linear term; f is not in prepared form"
            else:
                msg = "constant term; f must fix the origin"
            fail("exponent", f"h[{k}]: exponent {format_vector(e)} has degree {sum(e)} < 2: {msg}", k)
        try:
            c = _number(term["coefficient"], f"h[{k}] coefficient")
        except ValueError as exc:
            fail("coefficient", str(exc), k)
        comps[i - 1][e] = comps[i - 1].get(e, ZERO) + c
    h = tuple(TruncatedPoly(nu, N, c) for c in comps)
    return PreparedDiffeo(nu, tuple(mu), h, N)


def parse_spec(path, degree: int | None = None) -> PreparedDiffeo:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecError(f"{p}: cannot read spec: {exc.strerror}") from None
    return parse_spec_text(text, str(p), degree)


def spec_to_dict(f: PreparedDiffeo) -> dict:
    h = []
    for i, hi in enumerate(f.h, start=1):
        for m, c in hi.terms():
            h.append({"component": i, "exponent": list(m), "coefficient": format_scalar(c)})
    return {
        "nu": f.nu,
        "multipliers": [format_scalar(m) for m in f.mu],
        "h": h,
        "truncation": f.N,
    }


def dump_spec(f: PreparedDiffeo) -> str:
    return json.dumps(spec_to_dict(f), indent=2) + "\n"
