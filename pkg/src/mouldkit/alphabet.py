"""Letters, words and the combinatorics every mould formula runs on.

A letter is a degree vector ``n`` in Z^nu, stored as a tuple of ints. A word
is a tuple of letters. The weight of a letter is its total degree
``sum(n)``; the weight of a word is the sum over its letters and bounds all
truncated enumerations.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .scalars import ONE, Scalar, as_scalar, format_scalar, multiplier_power

Letter = tuple
Word = tuple

EMPTY: Word = ()

__all__ = [
    "EMPTY",
    "Letter",
    "Word",
    "TruncationContext",
    "check_letter",
    "letter_weight",
    "word_weight",
    "word_norm",
    "word_concat",
    "word_key",
    "is_resonant",
    "enumerate_words",
    "partitions",
    "letter_closure",
    "format_vector",
    "format_word",
    "parse_vector",
    "parse_word",
]


def letter_weight(n: Letter) -> int:
    return sum(n)


def word_weight(w: Word) -> int:
    return sum(sum(n) for n in w)


def word_norm(w: Word, nu: int | None = None) -> tuple:
    """Componentwise sum of the letters of ``w``; ``nu`` is needed for the empty word."""
    if not w:
        if nu is None:
            raise ValueError("the norm of the empty word needs the dimension nu")
        return (0,) * nu
    return tuple(map(sum, zip(*w)))


def word_concat(a: Word, b: Word) -> Word:
    return tuple(a) + tuple(b)


def word_key(w: Word):
    """Canonical total order: weight, then length, then lexicographic letters."""
    return (word_weight(w), len(w), w)


def check_letter(n: Letter, nu: int, derivation: bool = True) -> Letter:
    """Validate a degree vector.

    Every letter has total degree at least 1. Derivation letters (the
    D-alphabet) additionally have all components >= -1 with at most one -1.
    Letters of substitution operators may have several negative components.
    """
    n = tuple(int(c) for c in n)
    if len(n) != nu:
        raise ValueError(f"letter {n} has length {len(n)}, expected {nu}")
    if sum(n) < 1:
        raise ValueError(f"letter {n} has total degree {sum(n)} < 1")
    if derivation:
        neg = [c for c in n if c < 0]
        if any(c < -1 for c in neg) or len(neg) > 1:
            raise ValueError(f"letter {n} is not the degree of a derivation")
    return n


@dataclass(frozen=True)
class TruncationContext:
    """Dimension, multipliers, weight bound and (optionally) an alphabet.

    Two contexts are compatible when ``nu``, ``mu`` and ``max_weight`` agree;
    the alphabet only drives enumerations (identity moulds, inverses).
    """

    nu: int
    mu: tuple
    max_weight: int
    letters: tuple = field(default=(), compare=False)

    def __post_init__(self):
        mu = tuple(as_scalar(m) for m in self.mu)
        if len(mu) != self.nu:
            raise ValueError(f"expected {self.nu} multipliers, got {len(mu)}")
        if any(not m for m in mu):
            raise ValueError("multipliers must be nonzero")
        if self.max_weight < 0:
            raise ValueError("max_weight must be >= 0")
        letters = tuple(sorted({tuple(n) for n in self.letters if 1 <= sum(n) <= self.max_weight}))
        for n in letters:
            if len(n) != self.nu:
                raise ValueError(f"letter {n} has wrong length")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "letters", letters)

    def with_letters(self, letters: Iterable[Letter]) -> "TruncationContext":
        return TruncationContext(self.nu, self.mu, self.max_weight, tuple(letters))

    def with_max_weight(self, max_weight: int) -> "TruncationContext":
        return TruncationContext(self.nu, self.mu, max_weight, self.letters)

    def power(self, d) -> Scalar:
        return multiplier_power(self.mu, d)

    def is_resonant(self, d) -> bool:
        return is_resonant(self, d)

    def words(self, max_weight: int | None = None) -> list:
        mw = self.max_weight if max_weight is None else max_weight
        return list(enumerate_words(self, self.letters, mw))

    def header(self) -> str:
        mu = ",".join(format_scalar(m) for m in self.mu)
        return f"nu={self.nu} mu={mu} maxWeight={self.max_weight}"


def is_resonant(ctx: TruncationContext, d) -> bool:
    """A degree is resonant when the product of multiplier powers equals one."""
    if len(d) != ctx.nu:
        raise ValueError(f"degree {tuple(d)} has length {len(d)}, expected {ctx.nu}")
    return multiplier_power(ctx.mu, d) == ONE


def enumerate_words(ctx: TruncationContext | None, letters: Iterable[Letter], max_weight: int) -> Iterator[Word]:
    """Yield every word over ``letters`` of weight <= ``max_weight`` exactly once.

    Output is sorted by (weight, length, lexicographic letters).
    """
    letters = sorted({tuple(n) for n in letters})
    for n in letters:
        if sum(n) < 1:
            raise ValueError(f"letter {n} has weight < 1")
    by_weight: dict[int, list] = {0: [EMPTY]}
    for wt in range(1, max_weight + 1):
        bucket = []
        for n in letters:
            k = sum(n)
            if k <= wt:
                bucket.extend((n,) + rest for rest in by_weight[wt - k])
        by_weight[wt] = bucket
    for wt in range(0, max_weight + 1):
        yield from sorted(by_weight[wt], key=lambda w: (len(w), w))


def partitions(w: Word, k: int) -> Iterator[tuple]:
    """All splittings of ``w`` into ``k`` consecutive nonempty factors."""
    n = len(w)
    if k < 1 or k > n:
        return
    for cuts in combinations(range(1, n), k - 1):
        bounds = (0,) + cuts + (n,)
        yield tuple(tuple(w[bounds[i]:bounds[i + 1]]) for i in range(k))


def letter_closure(letters: Iterable[Letter], max_weight: int) -> tuple:
    """All norms of nonempty words over ``letters`` with weight <= ``max_weight``."""
    base = sorted({tuple(n) for n in letters if 1 <= sum(n) <= max_weight})
    seen = set(base)
    frontier = list(base)
    while frontier:
        nxt = []
        for a in frontier:
            for b in base:
                c = tuple(x + y for x, y in zip(a, b))
                if sum(c) <= max_weight and c not in seen:
                    seen.add(c)
                    nxt.append(c)
        frontier = nxt
    return tuple(sorted(seen))


def format_vector(v: Sequence[int]) -> str:
    return "(" + ",".join(str(int(c)) for c in v) + ")"


def format_word(w: Word) -> str:
    if not w:
        return "()"
    return ".".join(format_vector(n) for n in w)


_VEC_RE = re.compile(r"\(\s*(-?\d+(?:\s*,\s*-?\d+)*)\s*\)")


def parse_vector(text: str) -> tuple:
    s = text.strip().replace("−", "-")
    m = _VEC_RE.fullmatch(s)
    if m is None:
        raise ValueError(f"malformed degree vector {text!r}")
    return tuple(int(c) for c in m.group(1).split(","))


def parse_word(text: str) -> Word:
    s = text.strip().replace("−", "-")
    if s == "()":
        return EMPTY
    return tuple(parse_vector(part) for part in s.split("."))
