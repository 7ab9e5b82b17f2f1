import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from helpers import small_rational

from mouldkit.polys import (
    TruncatedPoly,
    compose_maps,
    dump_jet,
    flin_apply,
    identity_map,
    inverse_map,
    load_jet,
    monomials,
    poly_substitute,
)
from mouldkit.scalars import Scalar


def x(N, nu=1, i=0):
    return TruncatedPoly.variable(nu, N, i)


def random_poly(rng, nu, N, low=0):
    return TruncatedPoly(nu, N, {m: small_rational(rng) for m in monomials(nu, N, low) if rng.random() < 0.5})


def test_substitute_examples():
    X = x(3)
    g = (X + X * X,)
    assert poly_substitute(X, g) == X + X * X
    assert poly_substitute(X * X, g) == X * X + X * X * X * 2
    phi = X * X * X + X * 5
    assert poly_substitute(phi, identity_map(1, 3)) == phi


def test_substitute_rejects_constant_term():
    X = x(3)
    with pytest.raises(ValueError):
        poly_substitute(X, (X + 1,))


def test_truncation_drops_high_degrees():
    X = x(2)
    assert (X * X * X).coeffs == {}
    assert TruncatedPoly(1, 2, {(3,): 1}).coeffs == {}


def test_flin_apply_examples():
    X = x(4)
    assert flin_apply((Scalar(2),), X * X * X) == X * X * X * 8
    x1, x2 = x(3, 2, 0), x(3, 2, 1)
    assert flin_apply((Scalar(2), Scalar(1) / 2), x1 * x2) == x1 * x2


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_flin_apply_is_multiplicative(seed):
    rng = random.Random(seed)
    mu = (Scalar(2), Scalar(Fraction(-1, 3)))
    p, q = random_poly(rng, 2, 4), random_poly(rng, 2, 4)
    assert flin_apply(mu, p * q) == flin_apply(mu, p) * flin_apply(mu, q)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_substitution_is_an_algebra_morphism(seed):
    rng = random.Random(seed)
    g = tuple(v + random_poly(rng, 2, 4, low=2) for v in identity_map(2, 4))
    p, q = random_poly(rng, 2, 4), random_poly(rng, 2, 4)
    assert poly_substitute(p * q, g) == poly_substitute(p, g) * poly_substitute(q, g)
    assert poly_substitute(p + q, g) == poly_substitute(p, g) + poly_substitute(q, g)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_inverse_map(seed):
    rng = random.Random(seed)
    g = tuple(v + random_poly(rng, 2, 4, low=2) for v in identity_map(2, 4))
    assert compose_maps(g, inverse_map(g)) == identity_map(2, 4)
    assert compose_maps(inverse_map(g), g) == identity_map(2, 4)


def test_jet_roundtrip():
    rng = random.Random(3)
    f = tuple(random_poly(rng, 2, 3, low=1) for _ in range(2))
    text = dump_jet(f)
    assert text.startswith("component\texponent\tcoefficient\n")
    assert load_jet(text, 2, 3) == f
