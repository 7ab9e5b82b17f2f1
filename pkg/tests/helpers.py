"""Random objects and the small named corpus shared by the tests."""

from fractions import Fraction

from mouldkit.alphabet import TruncationContext
from mouldkit.moulds import Mould
from mouldkit.operators import OperatorSeries, PreparedDiffeo
from mouldkit.polys import monomials
from mouldkit.scalars import Scalar

MU_RES = (Scalar(2), Scalar(Fraction(1, 2)))


def small_rational(rng):
    return Fraction(rng.randint(-6, 6), rng.randint(1, 4))


def random_mould(rng, ctx, empty=None, density=0.7):
    """Random mould on the words of ``ctx``; ``empty`` fixes the value on the empty word."""
    vals = {}
    for w in ctx.words():
        if not w:
            if empty is not None:
                vals[w] = empty
            elif rng.random() < density:
                vals[w] = small_rational(rng)
        elif rng.random() < density:
            vals[w] = small_rational(rng)
    return Mould(ctx, vals)


def random_diffeo(rng, mu, N, nterms=5):
    """Random prepared map with nonlinear terms of degree 2..N."""
    nu = len(mu)
    pool = monomials(nu, N, min_degree=2)
    terms = []
    for _ in range(nterms):
        c = small_rational(rng) or Fraction(1)
        terms.append((rng.randrange(nu), rng.choice(pool), c))
    return PreparedDiffeo.from_terms(mu, terms, N), terms


def random_raising(rng, nu, N, density=0.4):
    """Random operator that raises degree and kills constants."""
    cols = {}
    for m in monomials(nu, N, min_degree=1):
        col = {}
        for r in monomials(nu, N, min_degree=sum(m) + 1):
            if rng.random() < density:
                col[r] = small_rational(rng)
        cols[m] = col
    return OperatorSeries(nu, N, cols)


def two_letter_context(W=4):
    return TruncationContext(1, (Scalar(2),), W, ((1,), (2,)))


def corpus(N):
    """Six diffeomorphisms covering nonresonant, resonant and complex multipliers."""
    half = Fraction(1, 2)
    i = Scalar(0, 1)
    return [
        ("nonresonant-1d", PreparedDiffeo.from_terms((2,), [(0, (2,), 1)], N)),
        ("flip-1d", PreparedDiffeo.from_terms((-1,), [(0, (2,), 1), (0, (3,), half)], N)),
        ("saddle-2d", PreparedDiffeo.from_terms(
            (2, half),
            [(0, (2, 0), 1), (0, (2, 1), 3), (1, (1, 1), -2), (1, (1, 2), half), (0, (0, 3), 1)],
            N,
        )),
        ("nonresonant-2d", PreparedDiffeo.from_terms(
            (2, 3), [(0, (1, 1), 1), (1, (2, 0), -1), (1, (0, 3), 2)], N,
        )),
        ("square-2d", PreparedDiffeo.from_terms(
            (2, 4), [(1, (2, 0), 1), (0, (1, 1), half), (1, (0, 2), 1)], N,
        )),
        ("rotation-2d", PreparedDiffeo.from_terms(
            (i, -i), [(0, (2, 0), 1), (1, (1, 1), i), (0, (2, 1), Fraction(-1, 3))], N,
        )),
    ]
