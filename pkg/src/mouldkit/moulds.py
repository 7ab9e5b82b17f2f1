"""Moulds: scalar tables on words, with their algebra.

A :class:`Mould` stores its nonzero values in a dict keyed by word. Missing
words evaluate to zero. Every operation truncates at the context's
``max_weight``.
"""

from __future__ import annotations

from math import factorial
from typing import Iterable

from .alphabet import (
    EMPTY,
    TruncationContext,
    Word,
    enumerate_words,
    format_word,
    letter_closure,
    parse_word,
    word_key,
    word_norm,
    word_weight,
)
from .scalars import ONE, ZERO, Scalar, as_scalar, format_scalar, parse_scalar

__all__ = [
    "Mould",
    "MouldError",
    "mould_zero",
    "mould_one",
    "mould_id",
    "mould_add",
    "mould_mul",
    "mould_inverse",
    "mould_compose",
    "mould_exp",
    "mould_log",
    "mould_power",
    "length1_power",
    "length1_exp",
    "length1_log",
    "mould_edelta",
    "conjugation_mould",
    "dump_tsv",
    "load_tsv",
]


class MouldError(ValueError):
    pass


class Mould:
    __slots__ = ("ctx", "values", "name")

    def __init__(self, ctx: TruncationContext, values=None, name: str | None = None):
        self.ctx = ctx
        self.name = name
        table = {}
        W = ctx.max_weight
        for w, v in (values or {}).items():
            v = as_scalar(v)
            if not v:
                continue
            w = tuple(tuple(n) for n in w)
            weights = [sum(n) for n in w]
            if sum(weights) > W:
                raise MouldError(f"word {format_word(w)} exceeds max weight {W}")
            if weights and min(weights) < 1:
                raise MouldError(f"word {format_word(w)} has a letter of weight < 1")
            table[w] = v
        self.values = table

    def __getitem__(self, w: Word) -> Scalar:
        return self.values.get(tuple(w), ZERO)

    def support(self) -> list:
        return sorted(self.values, key=word_key)

    def items(self):
        for w in self.support():
            yield w, self.values[w]

    def named(self, name: str) -> "Mould":
        return Mould(self.ctx, self.values, name)

    def restrict(self, predicate) -> "Mould":
        return Mould(self.ctx, {w: v for w, v in self.values.items() if predicate(w)}, self.name)

    def __eq__(self, other):
        if not isinstance(other, Mould):
            return NotImplemented
        return self.ctx == other.ctx and self.values == other.values

    def __add__(self, other):
        return mould_add(self, other)

    def __sub__(self, other):
        return mould_add(self, -other)

    def __neg__(self):
        return Mould(self.ctx, {w: -v for w, v in self.values.items()})

    def __mul__(self, other):
        if isinstance(other, Mould):
            return mould_mul(self, other)
        c = as_scalar(other)
        return Mould(self.ctx, {w: c * v for w, v in self.values.items()})

    def __rmul__(self, other):
        c = as_scalar(other)
        return Mould(self.ctx, {w: c * v for w, v in self.values.items()})

    def compose(self, other: "Mould") -> "Mould":
        return mould_compose(self, other)

    def inverse(self) -> "Mould":
        return mould_inverse(self)

    def exp(self) -> "Mould":
        return mould_exp(self)

    def log(self) -> "Mould":
        return mould_log(self)

    def edelta(self) -> "Mould":
        return mould_edelta(self)

    def __repr__(self):
        label = self.name or "Mould"
        return f"<{label} {self.ctx.header()} support={len(self.values)}>"


def _common(M: Mould, N: Mould) -> TruncationContext:
    a, b = M.ctx, N.ctx
    if a != b:
        raise MouldError(f"context mismatch: {a.header()} vs {b.header()}")
    if a.letters == b.letters:
        return a
    return a.with_letters(set(a.letters) | set(b.letters))


def _by_weight(M: Mould) -> dict:
    out: dict[int, list] = {}
    for w, v in M.values.items():
        out.setdefault(word_weight(w), []).append((w, v))
    return out


def mould_zero(ctx: TruncationContext) -> Mould:
    return Mould(ctx)


def mould_one(ctx: TruncationContext) -> Mould:
    """Neutral element of the product: 1 on the empty word."""
    return Mould(ctx, {EMPTY: ONE}, "1")


def mould_id(ctx: TruncationContext) -> Mould:
    """Neutral element of composition: 1 on every word of length one.

    The letters are closed under addition (up to the weight bound) so that
    I o N = N also on words whose norm is not itself a letter.
    """
    letters = letter_closure(ctx.letters, ctx.max_weight)
    return Mould(ctx.with_letters(letters), {(n,): ONE for n in letters}, "I")


def mould_add(M: Mould, N: Mould) -> Mould:
    ctx = _common(M, N)
    out = dict(M.values)
    for w, v in N.values.items():
        out[w] = out.get(w, ZERO) + v
    return Mould(ctx, out)


def mould_mul(M: Mould, N: Mould) -> Mould:
    """(M.N)^a = sum over a = a1 a2 (empty factors included) of M^a1 N^a2."""
    ctx = _common(M, N)
    W = ctx.max_weight
    right = _by_weight(N)
    out: dict = {}
    for w1, v1 in M.values.items():
        room = W - word_weight(w1)
        for k in range(room + 1):
            for w2, v2 in right.get(k, ()):
                w = w1 + w2
                out[w] = out.get(w, ZERO) + v1 * v2
    return Mould(ctx, out)


def mould_power(M: Mould, n: int) -> Mould:
    result = mould_one(M.ctx)
    for _ in range(n):
        result = mould_mul(result, M)
    return result


def mould_inverse(M: Mould) -> Mould:
    """Multiplicative inverse by recursion on word length."""
    c = M[EMPTY]
    if not c:
        raise MouldError("mould is not invertible: value on the empty word is 0")
    letters = set(M.ctx.letters)
    for w in M.values:
        letters.update(w)
    ctx = M.ctx.with_letters(letters)
    inv_c = c.reciprocal()
    inv = {EMPTY: inv_c}
    for w in enumerate_words(ctx, ctx.letters, ctx.max_weight):
        if not w:
            continue
        acc = ZERO
        for i in range(1, len(w) + 1):
            m = M.values.get(w[:i])
            if m is not None:
                r = inv.get(w[i:])
                if r is not None:
                    acc = acc + m * r
        if acc:
            inv[w] = -inv_c * acc
    return Mould(ctx, inv)


def mould_compose(M: Mould, N: Mould) -> Mould:
    """(M o N)^a = sum over nonempty splittings a = a1...ak of M^{|a1|...|ak|} N^a1...N^ak.

    Requires N to vanish on the empty word; the empty word keeps M's value.
    """
    ctx = _common(M, N)
    if N[EMPTY]:
        raise MouldError("composition needs the inner mould to vanish on the empty word")
    W = ctx.max_weight
    components: dict[tuple, list] = {}
    for w, v in N.values.items():
        components.setdefault(word_norm(w), []).append((w, v))
    out: dict = {}
    if M[EMPTY]:
        out[EMPTY] = M[EMPTY]
    for b, mv in M.values.items():
        if not b or word_weight(b) > W:
            continue
        partial = [(EMPTY, mv)]
        for letter in b:
            comp = components.get(letter)
            if not comp:
                partial = []
                break
            partial = [(w + u, c * v) for w, c in partial for u, v in comp]
        for w, c in partial:
            out[w] = out.get(w, ZERO) + c
    return Mould(ctx, out)


def mould_exp(M: Mould) -> Mould:
    """Exp M = sum_n M^n / n!, for M vanishing on the empty word."""
    if M[EMPTY]:
        raise MouldError("Exp needs a mould vanishing on the empty word")
    result = mould_one(M.ctx)
    power = result
    n = 0
    while True:
        n += 1
        power = mould_mul(power, M)
        if not power.values:
            break
        result = result + power * _recip(factorial(n))
    return result


def mould_log(M: Mould) -> Mould:
    """Log M = sum_{n>=1} (-1)^(n+1) (M - 1)^n / n, for M equal to 1 on the empty word."""
    if M[EMPTY] != ONE:
        raise MouldError("Log needs a mould equal to 1 on the empty word")
    X = M - mould_one(M.ctx)
    result = mould_zero(M.ctx)
    power = mould_one(M.ctx)
    n = 0
    while True:
        n += 1
        power = mould_mul(power, X)
        if not power.values:
            break
        coeff = _recip(n) if n % 2 else -_recip(n)
        result = result + power * coeff
    return result


def _recip(n: int) -> Scalar:
    return Scalar._raw(1, 0, n)


def _check_length1(Z: Mould) -> None:
    bad = [w for w in Z.values if len(w) != 1]
    if bad:
        raise MouldError(f"mould is not supported on length-1 words: {format_word(bad[0])}")


def length1_power(Z: Mould, r: int) -> Mould:
    """[Z]^r for Z supported on single letters: Z^a1 ... Z^ar on words of length r."""
    _check_length1(Z)
    W = Z.ctx.max_weight
    vals = {w[0]: v for w, v in Z.values.items()}
    partial = [(EMPTY, ONE, 0)]
    for _ in range(r):
        partial = [
            (w + (n,), c * v, k + sum(n))
            for w, c, k in partial
            for n, v in vals.items()
            if k + sum(n) <= W
        ]
    return Mould(Z.ctx, {w: c for w, c, _ in partial})


def _length1_series(Z: Mould, coeff) -> Mould:
    _check_length1(Z)
    W = Z.ctx.max_weight
    min_wt = min((sum(w[0]) for w in Z.values), default=W + 1)
    out = {}
    for r in range(1, W // max(min_wt, 1) + 1):
        c = coeff(r)
        for w, v in length1_power(Z, r).values.items():
            out[w] = c * v
    return Mould(Z.ctx, out)


def length1_exp(Z: Mould) -> Mould:
    """Exp Z = 1 + [Z]^l(a) / l(a)! word by word."""
    out = _length1_series(Z, lambda r: _recip(factorial(r)))
    return out + mould_one(Z.ctx)


def length1_log(Z: Mould) -> Mould:
    """log(1 + Z) for length-1-supported Z: (-1)^(l+1)/l * [Z]^l(a)."""
    return _length1_series(Z, lambda r: _recip(r) if r % 2 else -_recip(r))


def mould_edelta(M: Mould) -> Mould:
    """Scale each value by mu^(-||w||); this commutes an expansion past F_lin."""
    ctx = M.ctx
    cache: dict = {}
    out = {}
    for w, v in M.values.items():
        if not w:
            out[w] = v
            continue
        d = word_norm(w)
        f = cache.get(d)
        if f is None:
            f = cache[d] = ctx.power(d).reciprocal()
        out[w] = f * v
    return Mould(ctx, out)


def conjugation_mould(theta: Mould) -> Mould:
    """Mould of F_lin^-1 . Theta . F . Theta^-1 in the B-alphabet."""
    ctx = theta.ctx
    one_plus_i = mould_one(ctx) + mould_id(ctx)
    return mould_edelta(theta) * one_plus_i * mould_inverse(theta)


def dump_tsv(M: Mould, name: str | None = None) -> str:
    label = name or M.name or "M"
    lines = [f"# mould {label} {M.ctx.header()}", "word\tvalue"]
    for w, v in M.items():
        lines.append(f"{format_word(w)}\t{format_scalar(v)}")
    return "\n".join(lines) + "\n"


def load_tsv(text: str, letters: Iterable = ()) -> Mould:
    """Inverse of :func:`dump_tsv`; the alphabet is the given letters plus those in the table."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# mould "):
        raise MouldError("missing '# mould' header")
    head = lines[0].split()
    name = head[2]
    fields = dict(tok.split("=", 1) for tok in head[3:])
    nu = int(fields["nu"])
    mu = tuple(parse_scalar(s) for s in fields["mu"].split(","))
    W = int(fields["maxWeight"])
    values = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip() or line.startswith("word\t"):
            continue
        try:
            wtxt, vtxt = line.split("\t")
            values[parse_word(wtxt)] = parse_scalar(vtxt)
        except ValueError as exc:
            raise MouldError(f"line {lineno}: {exc}") from None
    all_letters = set(tuple(n) for n in letters)
    for w in values:
        all_letters.update(w)
    ctx = TruncationContext(nu, mu, W, tuple(all_letters))
    return Mould(ctx, values, name)
