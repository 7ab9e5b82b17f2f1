import random

import pytest
from hypothesis import given, settings, strategies as st

from helpers import MU_RES, corpus, random_diffeo, two_letter_context

from mouldkit.alphabet import EMPTY, TruncationContext
from mouldkit.operators import OperatorSeries, PreparedDiffeo, commutes_with_flin, extract_D
from mouldkit.polys import compose_maps, identity_map
from mouldkit.prenormal import (
    Dem_mould,
    Den_mould,
    ResonanceError,
    StationarityError,
    dem_mould,
    dulac_iterate,
    linearization_mould,
    linearize,
    resonance_profile,
    sem_explicit,
    sem_moulds,
    trim_iterate,
    verify_prenormal,
)
from mouldkit.scalars import Scalar

seeds = st.integers(0, 10**6)


def test_dem_single_letter():
    ctx = TruncationContext(1, (Scalar(2),), 3, ((1,),))
    assert Dem_mould(ctx)[((1,),)] == 2


def test_dem_vanishes_on_resonant_letters():
    ctx = TruncationContext(2, MU_RES, 3, ((1, 1), (2, 0)))
    D = Dem_mould(ctx)
    assert D[((1, 1),)] == 0
    assert D[((2, 0),)] == Scalar(4) / 3


def test_dem_closed_form():
    ctx = two_letter_context(3)
    d = dem_mould(ctx)
    # l = 2, norm (2): (-1/2) / (1 - 1/4)
    assert d[((1,), (1,))] == Scalar(-2) / 3
    assert d[((1,),)] == 2


def test_den_restricts_to_weight():
    ctx = two_letter_context(3)
    G = Den_mould(ctx, 2)
    assert G[((1,),)] == 0 and G[((2,),)] == Scalar(4) / 3


def test_sem_on_short_words():
    ctx = two_letter_context(3)
    Sem, sem = sem_moulds(ctx, ctx)
    assert Sem[EMPTY] == 1 and sem[EMPTY] == 1
    # a nonresonant letter is cancelled
    assert Sem[((1,),)] == 0 and sem[((2,),)] == 0
    assert sem_explicit(ctx, ((1,),)) == 0


def test_sem_keeps_resonant_letters():
    ctx = TruncationContext(2, MU_RES, 3, ((1, 1), (2, 0)))
    Sem, _ = sem_moulds(ctx, ctx)
    assert Sem[((1, 1),)] == 1 and sem_explicit(ctx, ((1, 1),)) == 1
    assert Sem[((2, 0),)] == 0


@settings(max_examples=8, deadline=None)
@given(seeds)
def test_sem_explicit_matches_algebraic(seed):
    f, _ = random_diffeo(random.Random(seed), MU_RES, 4)
    ctx = f.context(max_weight=3, letters=extract_D(f).letters())
    Sem, _ = sem_moulds(ctx, ctx)
    assert all(sem_explicit(ctx, w) == Sem[w] for w in ctx.words())


def test_resonance_profile():
    ctx = TruncationContext(2, MU_RES, 4, ((1, 1), (2, 0), (0, 3), (2, 2)))
    prof = resonance_profile(ctx)
    assert prof.K == 2 and prof.Nk[2] == ((2, 0),)
    assert prof.Nk[3] == ((0, 3),) and 4 not in prof.Nk
    only_res = TruncationContext(1, (Scalar(1),), 3, ((1,), (2,)))
    assert resonance_profile(only_res).K is None
    assert resonance_profile(only_res).describe() == "K=none"


@pytest.mark.parametrize("iterate", [trim_iterate, dulac_iterate])
def test_linear_map_is_already_normal(iterate):
    f = PreparedDiffeo.from_terms(MU_RES, [], 4)
    trace = iterate(f)
    assert trace.stages == [] and trace.stationary
    assert trace.final == OperatorSeries.identity(2, 4)


def test_nonresonant_trim_linearizes():
    f = PreparedDiffeo.from_terms((2, 3), [(0, (2, 0), 1), (1, (1, 1), -1)], 5)
    trace = trim_iterate(f)
    assert trace.final_map() == f.linear_map()
    dulac = dulac_iterate(f)
    assert dulac.final_map() == f.linear_map()
    theta, ok = linearize(f)
    assert ok
    g = tuple(theta.apply(x) for x in identity_map(2, 5))
    # both normalizators invert the linearizing map
    assert compose_maps(trace.normalizator_map(), g) == identity_map(2, 5)
    assert compose_maps(dulac.normalizator_map(), g) == identity_map(2, 5)


def test_linearization_values():
    ctx = TruncationContext(1, (Scalar(2),), 3, ((1,), (2,)))
    L = linearization_mould(ctx)
    assert L[((1,),)] == -2
    assert L[((1,), (1,))] == Scalar(8) / 3
    assert L[EMPTY] == 1


def test_linearization_rejects_resonance():
    f = PreparedDiffeo.from_terms(MU_RES, [(0, (2, 1), 1)], 4)
    with pytest.raises(ResonanceError):
        linearize(f)


@pytest.mark.parametrize("name,f", corpus(4), ids=[n for n, _ in corpus(4)])
def test_corpus_normal_forms(name, f):
    for iterate in (trim_iterate, dulac_iterate):
        trace = iterate(f)
        assert trace.stationary
        assert commutes_with_flin(trace.final, f.mu)
        assert verify_prenormal(trace).ok, verify_prenormal(trace).format()
        g = trace.normalizator_map()
        assert compose_maps(f.map(), g) == compose_maps(g, trace.final_map())


def test_poincare_degrees_increase():
    f, _ = random_diffeo(random.Random(7), MU_RES, 5, nterms=6)
    ks = [st.K for st in dulac_iterate(f).stages]
    assert ks == sorted(ks) and len(set(ks)) == len(ks)


def test_sweep_cap():
    f = PreparedDiffeo.from_terms((2,), [(0, (2,), 1)], 4)
    assert len(trim_iterate(f).stages) >= 1
    with pytest.raises(StationarityError):
        trim_iterate(f, max_sweeps=0)
