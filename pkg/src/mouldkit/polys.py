"""Truncated polynomials in nu variables and polynomial maps.

Everything lives in C[x_1..x_nu] modulo monomials of total degree > N;
products and substitutions drop those monomials as soon as they appear.
"""

from __future__ import annotations

from typing import Sequence

from .alphabet import format_vector, parse_vector
from .scalars import ONE, ZERO, Scalar, as_scalar, format_scalar, multiplier_power, parse_scalar

__all__ = [
    "TruncatedPoly",
    "monomials",
    "monomial_key",
    "poly_substitute",
    "flin_apply",
    "identity_map",
    "compose_maps",
    "inverse_map",
    "dump_jet",
    "load_jet",
]


def monomial_key(m):
    return (sum(m), tuple(-c for c in m))


def monomials(nu: int, N: int, min_degree: int = 0) -> list:
    """All exponent vectors with min_degree <= |m| <= N, in graded-lex order."""
    out = []

    def rec(prefix, left):
        if len(prefix) == nu - 1:
            out.append(prefix + (left,))
            return
        for k in range(left, -1, -1):
            rec(prefix + (k,), left - k)

    for d in range(min_degree, N + 1):
        if nu == 0:
            break
        rec((), d)
    return sorted(out, key=monomial_key)


class TruncatedPoly:
    __slots__ = ("nu", "N", "coeffs")

    def __init__(self, nu: int, N: int, coeffs=None):
        self.nu = nu
        self.N = N
        table = {}
        for m, c in (coeffs or {}).items():
            m = tuple(int(k) for k in m)
            if len(m) != nu or min(m, default=0) < 0:
                raise ValueError(f"bad exponent {m} for nu={nu}")
            if sum(m) > N:
                continue
            c = as_scalar(c)
            if c:
                table[m] = c
        self.coeffs = table

    @classmethod
    def _raw(cls, nu, N, coeffs):
        obj = cls.__new__(cls)
        obj.nu, obj.N, obj.coeffs = nu, N, coeffs
        return obj

    @classmethod
    def monomial(cls, nu, N, m, c=ONE):
        return cls(nu, N, {tuple(m): c})

    @classmethod
    def variable(cls, nu, N, i):
        e = [0] * nu
        e[i] = 1
        return cls(nu, N, {tuple(e): ONE})

    @classmethod
    def constant(cls, nu, N, c=ONE):
        return cls(nu, N, {(0,) * nu: c})

    def __getitem__(self, m) -> Scalar:
        return self.coeffs.get(tuple(m), ZERO)

    def terms(self):
        for m in sorted(self.coeffs, key=monomial_key):
            yield m, self.coeffs[m]

    def valuation(self) -> int | None:
        return min((sum(m) for m in self.coeffs), default=None)

    def homogeneous(self, d: int) -> "TruncatedPoly":
        return TruncatedPoly._raw(self.nu, self.N, {m: c for m, c in self.coeffs.items() if sum(m) == d})

    def truncate(self, N: int) -> "TruncatedPoly":
        return TruncatedPoly._raw(self.nu, N, {m: c for m, c in self.coeffs.items() if sum(m) <= N})

    def _check(self, other):
        if (self.nu, self.N) != (other.nu, other.N):
            raise ValueError("polynomials live in different truncated algebras")

    def __eq__(self, other):
        if not isinstance(other, TruncatedPoly):
            return NotImplemented
        return self.nu == other.nu and self.N == other.N and self.coeffs == other.coeffs

    def __add__(self, other):
        if not isinstance(other, TruncatedPoly):
            other = TruncatedPoly.constant(self.nu, self.N, as_scalar(other))
        self._check(other)
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            s = out.get(m, ZERO) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return TruncatedPoly._raw(self.nu, self.N, out)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedPoly._raw(self.nu, self.N, {m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TruncatedPoly):
            c = as_scalar(other)
            if not c:
                return TruncatedPoly._raw(self.nu, self.N, {})
            return TruncatedPoly._raw(self.nu, self.N, {m: c * v for m, v in self.coeffs.items()})
        self._check(other)
        N = self.N
        out: dict = {}
        for m1, c1 in self.coeffs.items():
            d1 = sum(m1)
            for m2, c2 in other.coeffs.items():
                if d1 + sum(m2) > N:
                    continue
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, ZERO) + c1 * c2
        return TruncatedPoly._raw(self.nu, N, {m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = TruncatedPoly.constant(self.nu, self.N)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for m, c in self.terms():
            mono = "*".join(
                f"x{i + 1}" if k == 1 else f"x{i + 1}^{k}" for i, k in enumerate(m) if k
            )
            parts.append(f"({format_scalar(c)})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


def poly_substitute(phi: TruncatedPoly, g: Sequence[TruncatedPoly]) -> TruncatedPoly:
    """phi o g, truncated; every g_i must have zero constant term."""
    nu, N = phi.nu, phi.N
    if len(g) != nu:
        raise ValueError(f"substitution needs {nu} components, got {len(g)}")
    zero = (0,) * nu
    for gi in g:
        if gi.nu != nu or gi.N != N:
            raise ValueError("substituted map lives in a different truncated algebra")
        if gi[zero]:
            raise ValueError("substituted map has a nonzero constant term")
    powers = [[TruncatedPoly.constant(nu, N)] for _ in range(nu)]
    result = TruncatedPoly._raw(nu, N, {})
    for m, c in phi.coeffs.items():
        term = TruncatedPoly.constant(nu, N, c)
        for i, k in enumerate(m):
            if not k:
                continue
            pw = powers[i]
            while len(pw) <= k:
                pw.append(pw[-1] * g[i])
            term = term * pw[k]
        result = result + term
    return result


def flin_apply(mu, phi: TruncatedPoly) -> TruncatedPoly:
    """phi o f_lin: scale x^m by prod mu_i^m_i."""
    return TruncatedPoly._raw(
        phi.nu, phi.N, {m: c * multiplier_power(mu, m) for m, c in phi.coeffs.items()}
    )


def identity_map(nu: int, N: int) -> tuple:
    return tuple(TruncatedPoly.variable(nu, N, i) for i in range(nu))


def compose_maps(f: Sequence[TruncatedPoly], g: Sequence[TruncatedPoly]) -> tuple:
    """The map f o g (apply g first)."""
    return tuple(poly_substitute(fi, g) for fi in f)


def inverse_map(g: Sequence[TruncatedPoly]) -> tuple:
    """Truncated inverse of a map whose linear part is the identity."""
    nu, N = g[0].nu, g[0].N
    ident = identity_map(nu, N)
    for i, gi in enumerate(g):
        lin = gi.homogeneous(1)
        if lin != ident[i] or gi[(0,) * nu]:
            raise ValueError("inverse_map needs a tangent-to-identity map")
    rest = tuple(gi - xi for gi, xi in zip(g, ident))
    inv = ident
    # each pass fixes one more degree
    for _ in range(N):
        inv = tuple(xi - ri for xi, ri in zip(ident, compose_maps(rest, inv)))
    return inv


def dump_jet(f: Sequence[TruncatedPoly]) -> str:
    lines = ["component\texponent\tcoefficient"]
    for i, fi in enumerate(f, start=1):
        for m, c in fi.terms():
            lines.append(f"{i}\t{format_vector(m)}\t{format_scalar(c)}")
    return "\n".join(lines) + "\n"


def load_jet(text: str, nu: int, N: int) -> tuple:
    comps = [dict() for _ in range(nu)]
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("component\t") or line.startswith("#"):
            continue
        try:
            i, e, c = line.split("\t")
            comps[int(i) - 1][parse_vector(e)] = parse_scalar(c)
        except (ValueError, IndexError) as exc:
            raise ValueError(f"jet line {lineno}: {exc}") from None
    return tuple(TruncatedPoly(nu, N, c) for c in comps)
