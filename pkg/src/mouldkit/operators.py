"""Linear operators on the truncated polynomial algebra.

An :class:`OperatorSeries` is stored as a sparse matrix on the monomial basis
``{x^m : |m| <= N}``: ``cols[m]`` maps each output monomial to its
coefficient in ``P(x^m)``. A homogeneous part of degree ``n`` sends ``x^m`` to
a multiple of ``x^(m+n)``, so the parts of a series are read off from the
difference between row and column exponents.

Composition is ``P @ Q`` (apply ``Q`` first). Mould expansions follow the
same convention: the operator attached to the word ``n1 ... nr`` is
``B_n1 @ ... @ B_nr``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Mapping, Sequence

from .alphabet import EMPTY, TruncationContext, format_vector
from .moulds import Mould, MouldError
from .polys import TruncatedPoly, identity_map, monomials
from .scalars import ONE, ZERO, Scalar, as_scalar, multiplier_power

__all__ = [
    "OperatorError",
    "HomOperator",
    "OperatorSeries",
    "PreparedDiffeo",
    "extract_B",
    "extract_D",
    "operator_mul",
    "operator_exp",
    "operator_log",
    "operator_inverse",
    "mould_expand",
    "conjugate",
    "commutes_with_flin",
    "has_resonant_support",
    "operator_to_map",
    "substitution_map",
    "map_to_operator",
    "bracket",
    "bch_star",
    "bch_adjoint",
]


class OperatorError(ValueError):
    pass


def _shift(row, col):
    return tuple(r - c for r, c in zip(row, col))


class HomOperator:
    """Homogeneous operator of degree ``n``: ``x^m -> beta[m] x^(m+n)``."""

    __slots__ = ("degree", "action")

    def __init__(self, degree, action: Mapping | None = None):
        self.degree = tuple(int(c) for c in degree)
        table = {}
        for m, b in (action or {}).items():
            m = tuple(m)
            b = as_scalar(b)
            if not b:
                continue
            if any(x + n < 0 for x, n in zip(m, self.degree)):
                raise OperatorError(
                    f"degree {format_vector(self.degree)} sends x^{format_vector(m)} outside the polynomials"
                )
            table[m] = b
        self.action = table

    @property
    def weight(self) -> int:
        return sum(self.degree)

    def __getitem__(self, m) -> Scalar:
        return self.action.get(tuple(m), ZERO)

    def __eq__(self, other):
        if not isinstance(other, HomOperator):
            return NotImplemented
        return self.degree == other.degree and self.action == other.action

    def __bool__(self):
        return bool(self.action)

    def to_series(self, nu: int, N: int) -> "OperatorSeries":
        cols = {}
        for m, b in self.action.items():
            row = tuple(x + n for x, n in zip(m, self.degree))
            if sum(row) <= N:
                cols[m] = {row: b}
        return OperatorSeries(nu, N, cols)

    def __repr__(self):
        return f"<HomOperator degree={format_vector(self.degree)} entries={len(self.action)}>"


class OperatorSeries:
    """A linear operator on C[x]/(degree > N), as a sparse monomial matrix."""

    __slots__ = ("nu", "N", "cols")

    def __init__(self, nu: int, N: int, cols: Mapping | None = None):
        self.nu = nu
        self.N = N
        table = {}
        for m, col in (cols or {}).items():
            m = tuple(m)
            if len(m) != nu or sum(m) > N or min(m) < 0:
                raise OperatorError(f"column x^{format_vector(m)} is outside the truncated basis")
            out = {}
            for r, c in col.items():
                r = tuple(r)
                if sum(r) > N:
                    continue
                if len(r) != nu or min(r) < 0:
                    raise OperatorError(f"row x^{format_vector(r)} is not a monomial")
                c = as_scalar(c)
                if c:
                    out[r] = c
            if out:
                table[m] = out
        self.cols = table

    @classmethod
    def _raw(cls, nu, N, cols):
        obj = cls.__new__(cls)
        obj.nu, obj.N, obj.cols = nu, N, cols
        return obj

    # constructors

    @classmethod
    def zero(cls, nu: int, N: int) -> "OperatorSeries":
        return cls._raw(nu, N, {})

    @classmethod
    def scalar(cls, nu: int, N: int, c=ONE) -> "OperatorSeries":
        c = as_scalar(c)
        if not c:
            return cls.zero(nu, N)
        return cls._raw(nu, N, {m: {m: c} for m in monomials(nu, N)})

    @classmethod
    def identity(cls, nu: int, N: int) -> "OperatorSeries":
        return cls.scalar(nu, N, ONE)

    @classmethod
    def flin(cls, mu: Sequence, N: int, inverse: bool = False) -> "OperatorSeries":
        """The substitution operator of the linear part, phi -> phi o f_lin."""
        nu = len(mu)
        cols = {}
        for m in monomials(nu, N):
            p = multiplier_power(mu, m)
            cols[m] = {m: p.reciprocal() if inverse else p}
        return cls._raw(nu, N, cols)

    @classmethod
    def from_map(cls, g: Sequence[TruncatedPoly]) -> "OperatorSeries":
        """Substitution operator phi -> phi o g of a map fixing the origin."""
        nu, N = g[0].nu, g[0].N
        cols = {}
        powers = [[TruncatedPoly.constant(nu, N)] for _ in range(nu)]
        for m in monomials(nu, N):
            term = TruncatedPoly.constant(nu, N)
            for i, k in enumerate(m):
                pw = powers[i]
                while len(pw) <= k:
                    pw.append(pw[-1] * g[i])
                if k:
                    term = term * pw[k]
            if term.coeffs:
                cols[m] = dict(term.coeffs)
        if any(gi[(0,) * nu] for gi in g):
            raise OperatorError("map has a nonzero constant term")
        return cls._raw(nu, N, cols)

    @classmethod
    def from_parts(cls, nu: int, N: int, parts, constant=ZERO) -> "OperatorSeries":
        """Sum of homogeneous parts plus ``constant`` times the identity."""
        result = cls.scalar(nu, N, constant)
        for op in (parts.values() if isinstance(parts, Mapping) else parts):
            result = result + op.to_series(nu, N)
        return result

    # access

    def entry(self, row, col) -> Scalar:
        return self.cols.get(tuple(col), {}).get(tuple(row), ZERO)

    def apply(self, phi: TruncatedPoly) -> TruncatedPoly:
        if phi.nu != self.nu or phi.N != self.N:
            raise OperatorError("polynomial lives in a different truncated algebra")
        out: dict = {}
        for m, c in phi.coeffs.items():
            for r, v in self.cols.get(m, {}).items():
                out[r] = out.get(r, ZERO) + c * v
        return TruncatedPoly(self.nu, self.N, out)

    def parts(self) -> dict:
        """Homogeneous components keyed by nonzero degree, in canonical order."""
        acc: dict = {}
        zero = (0,) * self.nu
        for m, col in self.cols.items():
            for r, v in col.items():
                d = _shift(r, m)
                if d != zero:
                    acc.setdefault(d, {})[m] = v
        keys = sorted(acc, key=lambda d: (sum(d), d))
        return {d: HomOperator._new(d, acc[d]) for d in keys}

    def part(self, degree) -> HomOperator:
        degree = tuple(degree)
        action = {}
        for m, col in self.cols.items():
            r = tuple(x + n for x, n in zip(m, degree))
            v = col.get(r)
            if v is not None:
                action[m] = v
        return HomOperator._new(degree, action)

    def letters(self) -> list:
        return list(self.parts())

    def diagonal(self) -> "OperatorSeries":
        return OperatorSeries._raw(
            self.nu, self.N, {m: {m: col[m]} for m, col in self.cols.items() if m in col}
        )

    @property
    def constant_part(self) -> Scalar:
        """The scalar c when the degree-zero part is c times the identity."""
        diag = self.diagonal()
        vals = {col[m] for m, col in diag.cols.items()}
        if len(diag.cols) == 0:
            return ZERO
        if len(vals) != 1 or len(diag.cols) != len(monomials(self.nu, self.N)):
            raise OperatorError("degree-zero part is not a multiple of the identity")
        return vals.pop()

    def is_raising(self) -> bool:
        """True when every entry strictly increases the polynomial degree."""
        return all(sum(r) > sum(m) for m, col in self.cols.items() for r in col)

    # algebra

    def _check(self, other):
        if not isinstance(other, OperatorSeries):
            raise TypeError(f"expected OperatorSeries, got {type(other).__name__}")
        if (self.nu, self.N) != (other.nu, other.N):
            raise OperatorError("operators act on different truncated algebras")

    def __eq__(self, other):
        if not isinstance(other, OperatorSeries):
            return NotImplemented
        return (self.nu, self.N) == (other.nu, other.N) and self.cols == other.cols

    def __bool__(self):
        return bool(self.cols)

    def __add__(self, other):
        self._check(other)
        cols = {m: dict(col) for m, col in self.cols.items()}
        for m, col in other.cols.items():
            tgt = cols.setdefault(m, {})
            for r, v in col.items():
                s = tgt.get(r, ZERO) + v
                if s:
                    tgt[r] = s
                else:
                    tgt.pop(r, None)
        return OperatorSeries._raw(self.nu, self.N, {m: c for m, c in cols.items() if c})

    def __neg__(self):
        return OperatorSeries._raw(
            self.nu, self.N, {m: {r: -v for r, v in col.items()} for m, col in self.cols.items()}
        )

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        if isinstance(c, OperatorSeries):
            raise TypeError("use @ to compose operators")
        c = as_scalar(c)
        if not c:
            return OperatorSeries.zero(self.nu, self.N)
        return OperatorSeries._raw(
            self.nu, self.N, {m: {r: c * v for r, v in col.items()} for m, col in self.cols.items()}
        )

    __rmul__ = __mul__

    def __matmul__(self, other):
        return operator_mul(self, other)

    def __repr__(self):
        entries = sum(len(c) for c in self.cols.values())
        return f"<OperatorSeries nu={self.nu} N={self.N} entries={entries}>"


def _hom_new(cls, degree, action):
    obj = cls.__new__(cls)
    obj.degree = degree
    obj.action = action
    return obj


HomOperator._new = classmethod(_hom_new)


def operator_mul(P: OperatorSeries, Q: OperatorSeries) -> OperatorSeries:
    """The composite P o Q."""
    P._check(Q)
    pc = P.cols
    cols = {}
    for m, col in Q.cols.items():
        out: dict = {}
        for r, q in col.items():
            for r2, p in pc.get(r, {}).items():
                out[r2] = out.get(r2, ZERO) + p * q
        out = {r: v for r, v in out.items() if v}
        if out:
            cols[m] = out
    return OperatorSeries._raw(P.nu, P.N, cols)


def _recip(n: int) -> Scalar:
    return Scalar._raw(1, 0, n)


def operator_exp(P: OperatorSeries) -> OperatorSeries:
    """exp(P) for a degree-raising P; the series stops once P^k vanishes."""
    if not P.is_raising():
        raise OperatorError("exp needs a degree-raising operator")
    result = OperatorSeries.identity(P.nu, P.N)
    power = result
    k = 0
    while True:
        k += 1
        power = operator_mul(power, P)
        if not power:
            return result
        result = result + power * _recip(factorial(k))


def operator_log(P: OperatorSeries) -> OperatorSeries:
    """log(P) for P = Id + (degree-raising)."""
    X = P - OperatorSeries.identity(P.nu, P.N)
    if not X.is_raising():
        raise OperatorError("log needs the identity plus a degree-raising operator")
    result = OperatorSeries.zero(P.nu, P.N)
    power = OperatorSeries.identity(P.nu, P.N)
    k = 0
    while True:
        k += 1
        power = operator_mul(power, X)
        if not power:
            return result
        result = result + power * (_recip(k) if k % 2 else -_recip(k))


def operator_inverse(P: OperatorSeries) -> OperatorSeries:
    """Inverse of a diagonal-invertible plus degree-raising operator."""
    nu, N = P.nu, P.N
    diag = P.diagonal()
    inv_diag = {}
    for m in monomials(nu, N):
        d = diag.cols.get(m, {}).get(m)
        if d is None:
            raise OperatorError(f"operator is not invertible: zero diagonal entry at x^{format_vector(m)}")
        inv_diag[m] = {m: d.reciprocal()}
    Dinv = OperatorSeries._raw(nu, N, inv_diag)
    X = P - diag
    if not X.is_raising():
        raise OperatorError("inverse needs the off-diagonal part to raise degree")
    Y = operator_mul(Dinv, X)
    result = OperatorSeries.identity(nu, N)
    power = result
    sign = 1
    while True:
        sign = -sign
        power = operator_mul(power, Y)
        if not power:
            break
        result = result + power * sign
    return operator_mul(result, Dinv)


@dataclass(frozen=True)
class PreparedDiffeo:
    """f(x) = diag(mu) x + h(x) with every h_i of valuation >= 2, truncated at N."""

    nu: int
    mu: tuple
    h: tuple
    N: int

    def __post_init__(self):
        mu = tuple(as_scalar(m) for m in self.mu)
        if len(mu) != self.nu:
            raise ValueError(f"expected {self.nu} multipliers, got {len(mu)}")
        if any(not m for m in mu):
            raise ValueError("multipliers must be nonzero")
        if self.N < 1:
            raise ValueError("truncation degree must be >= 1")
        h = tuple(self.h) if self.h else tuple(TruncatedPoly(self.nu, self.N) for _ in range(self.nu))
        if len(h) != self.nu:
            raise ValueError(f"h needs {self.nu} components, got {len(h)}")
        fixed = []
        for i, hi in enumerate(h):
            if not isinstance(hi, TruncatedPoly):
                hi = TruncatedPoly(self.nu, self.N, hi)
            if hi.nu != self.nu:
                raise ValueError(f"h_{i + 1} has the wrong number of variables")
            if hi.N != self.N:
                hi = TruncatedPoly(self.nu, self.N, hi.coeffs)
            low = hi.valuation()
            if low is not None and low < 2:
                raise ValueError(f"h_{i + 1} has a term of degree {low} < 2; f is not prepared")
            fixed.append(hi)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "h", tuple(fixed))

    @classmethod
    def from_terms(cls, mu, terms, N: int) -> "PreparedDiffeo":
        """Build from ``(component, exponent, coefficient)`` triples (components from 0)."""
        nu = len(mu)
        comps = [dict() for _ in range(nu)]
        for i, m, c in terms:
            m = tuple(m)
            comps[i][m] = comps[i].get(m, ZERO) + as_scalar(c)
        return cls(nu, tuple(mu), tuple(TruncatedPoly(nu, N, c) for c in comps), N)

    def linear_map(self) -> tuple:
        return tuple(
            TruncatedPoly.variable(self.nu, self.N, i) * self.mu[i] for i in range(self.nu)
        )

    def map(self) -> tuple:
        return tuple(l + hi for l, hi in zip(self.linear_map(), self.h))

    def epsilon(self) -> tuple:
        """eps(x) = h(f_lin^-1 x), so that f = (Id + eps) o f_lin."""
        inv = tuple(m.reciprocal() for m in self.mu)
        return tuple(
            TruncatedPoly._raw(self.nu, self.N, {m: c * multiplier_power(inv, m) for m, c in hi.coeffs.items()})
            for hi in self.h
        )

    def automorphism(self) -> OperatorSeries:
        return OperatorSeries.from_map(self.map())

    def flin(self) -> OperatorSeries:
        return OperatorSeries.flin(self.mu, self.N)

    def context(self, max_weight: int | None = None, letters=()) -> TruncationContext:
        W = self.N - 1 if max_weight is None else max_weight
        return TruncationContext(self.nu, self.mu, W, tuple(letters))

    def is_linear(self) -> bool:
        return all(not hi.coeffs for hi in self.h)


def extract_B(f: PreparedDiffeo) -> OperatorSeries:
    """Sum of the B_n with F = F_lin o (Id + sum B_n), F the substitution operator of f."""
    ident = identity_map(f.nu, f.N)
    shifted = tuple(x + e for x, e in zip(ident, f.epsilon()))
    return OperatorSeries.from_map(shifted) - OperatorSeries.identity(f.nu, f.N)


def extract_D(f: PreparedDiffeo) -> OperatorSeries:
    """Sum of the D_m with Id + sum B_n = exp(sum D_m)."""
    return operator_log(OperatorSeries.identity(f.nu, f.N) + extract_B(f))


def _suffix_table(M: Mould) -> dict:
    """For each suffix s of a supported word, the letters a with a.s also a suffix."""
    ext: dict = {}
    for w in M.values:
        for i in range(len(w) + 1):
            s = w[i:]
            ext.setdefault(s, set())
            if i:
                ext.setdefault(w[i - 1:], set())
                ext[s].add(w[i - 1])
    return ext


def mould_expand(M: Mould, parts, nu: int | None = None, N: int | None = None) -> OperatorSeries:
    """sum_w M^w B_w with B_(n1...nr) = B_n1 @ ... @ B_nr.

    ``parts`` is an OperatorSeries (split into homogeneous components) or a
    mapping degree -> HomOperator; in the latter case ``nu`` and ``N`` are
    required.
    """
    if isinstance(parts, OperatorSeries):
        nu, N = parts.nu, parts.N
        parts = parts.parts()
    elif nu is None or N is None:
        raise OperatorError("nu and N are required when parts is a mapping")
    if M.ctx.nu != nu:
        raise MouldError(f"mould has nu={M.ctx.nu}, operators have nu={nu}")
    ext = {s: sorted(v) for s, v in _suffix_table(M).items()}
    values = M.values
    cols = {}
    for m in monomials(nu, N):
        out: dict = {}
        stack = [(EMPTY, m, ONE)]
        while stack:
            suf, mono, c = stack.pop()
            v = values.get(suf)
            if v is not None:
                out[mono] = out.get(mono, ZERO) + v * c
            for a in ext.get(suf, ()):
                op = parts.get(a)
                if op is None:
                    continue
                beta = op.action.get(mono)
                if beta is None:
                    continue
                target = tuple(x + y for x, y in zip(mono, a))
                if sum(target) > N:
                    continue
                stack.append(((a,) + suf, target, c * beta))
        out = {r: v for r, v in out.items() if v}
        if out:
            cols[m] = out
    return OperatorSeries._raw(nu, N, cols)


def conjugate(theta: OperatorSeries, f: PreparedDiffeo) -> OperatorSeries:
    """The series C with theta o F o theta^-1 = F_lin o C."""
    if theta.N != f.N or theta.nu != f.nu:
        raise OperatorError("normalizator lives in a different truncated algebra")
    try:
        inv = operator_inverse(theta)
    except OperatorError as exc:
        raise OperatorError(f"normalizator is not invertible: {exc}") from None
    F = f.automorphism()
    Finv = OperatorSeries.flin(f.mu, f.N, inverse=True)
    return Finv @ theta @ F @ inv


def commutes_with_flin(P: OperatorSeries, mu: Sequence) -> bool:
    """Check P o F_lin == F_lin o P on the whole truncated basis."""
    L = OperatorSeries.flin(tuple(as_scalar(m) for m in mu), P.N)
    return operator_mul(P, L) == operator_mul(L, P)


def has_resonant_support(P: OperatorSeries, mu: Sequence) -> bool:
    """True when every homogeneous part of P has a resonant degree."""
    mu = tuple(as_scalar(m) for m in mu)
    return all(multiplier_power(mu, d) == ONE for d in P.parts())


def operator_to_map(P: OperatorSeries, mu: Sequence) -> tuple:
    """The map f with F_lin o P = (phi -> phi o f)."""
    mu = tuple(as_scalar(m) for m in mu)
    out = []
    for i in range(P.nu):
        xi = TruncatedPoly.variable(P.nu, P.N, i)
        yi = P.apply(xi)
        out.append(
            TruncatedPoly._raw(P.nu, P.N, {m: c * multiplier_power(mu, m) for m, c in yi.coeffs.items()})
        )
    return tuple(out)


def substitution_map(P: OperatorSeries) -> tuple:
    """The map g with P = (phi -> phi o g), read off the coordinate functions."""
    return tuple(P.apply(TruncatedPoly.variable(P.nu, P.N, i)) for i in range(P.nu))


def map_to_operator(f: Sequence[TruncatedPoly], mu: Sequence) -> OperatorSeries:
    """Inverse of :func:`operator_to_map`: the P with F_lin o P = (phi -> phi o f)."""
    mu = tuple(as_scalar(m) for m in mu)
    return OperatorSeries.flin(mu, f[0].N, inverse=True) @ OperatorSeries.from_map(f)


def bracket(A: OperatorSeries, B: OperatorSeries) -> OperatorSeries:
    return operator_mul(A, B) - operator_mul(B, A)


def bch_star(A: OperatorSeries, B: OperatorSeries, order: int = 3) -> OperatorSeries:
    """Baker-Campbell-Hausdorff series A * B through brackets of the given order.

    Order 1 is A + B; order 2 adds [A,B]/2; order 3 adds
    ([A,[A,B]] - [B,[A,B]])/12; order 4 adds -[B,[A,[A,B]]]/24.
    """
    if order < 1 or order > 4:
        raise OperatorError("bch_star supports orders 1 to 4")
    out = A + B
    if order >= 2:
        AB = bracket(A, B)
        out = out + AB * _recip(2)
    if order >= 3:
        out = out + (bracket(A, AB) - bracket(B, AB)) * _recip(12)
    if order >= 4:
        out = out - bracket(B, bracket(A, AB)) * _recip(24)
    return out


def bch_adjoint(A: OperatorSeries, B: OperatorSeries) -> OperatorSeries:
    """sum_m ad_A^m(B)/m!, which equals exp(A) B exp(-A) for degree-raising A."""
    out = B
    term = B
    k = 0
    while True:
        k += 1
        term = bracket(A, term) * _recip(k)
        if not term:
            return out
        out = out + term
