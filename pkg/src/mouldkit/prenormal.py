"""Prenormal forms of a diffeomorphism by mould calculus.

Two normalization procedures are implemented, both as a chain of stages
``F_i -> exp(V_i) F_i exp(-V_i)``:

* the trimming procedure removes, at every stage, all homogeneous
  components of nonresonant degree (generator built from ``Dem``);
* the Poincare procedure removes only the nonresonant components of the
  lowest weight ``K`` (generator built from ``Den``).

At each stage the current automorphism is written ``F_i = F_lin o P_i``.
``P_i - Id`` gives the B-alphabet and ``log P_i`` the D-alphabet. The new
``P_(i+1)`` is the mould expansion of ``Sem`` (D side) or ``sem`` (B side),
and both expansions are checked against the direct operator computation.

Sign convention: with ``F = F_lin o (Id + sum B)`` and ``F_lin B_n =
mu^n B_n F_lin``, the cancelling generator is ``Dem^m = 1 / (1 - mu^-m)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

from .alphabet import (
    EMPTY,
    TruncationContext,
    enumerate_words,
    format_vector,
    format_word,
    letter_closure,
    word_norm,
)
from .moulds import (
    Mould,
    length1_exp,
    mould_compose,
    mould_edelta,
    mould_exp,
    mould_id,
    mould_log,
    mould_mul,
    mould_one,
)
from .operators import (
    OperatorSeries,
    PreparedDiffeo,
    commutes_with_flin,
    extract_B,
    mould_expand,
    operator_exp,
    operator_inverse,
    operator_log,
    operator_to_map,
    substitution_map,
)
from .polys import compose_maps, identity_map
from .scalars import ONE, ZERO, Scalar

__all__ = [
    "ResonanceError",
    "StationarityError",
    "ResonanceProfile",
    "Stage",
    "NormalizationTrace",
    "VerificationReport",
    "Dem_mould",
    "dem_mould",
    "Den_mould",
    "den_mould",
    "simplified_moulds",
    "sem_moulds",
    "poin_moulds",
    "sem_explicit",
    "resonance_profile",
    "trim_step",
    "trim_iterate",
    "poin_step",
    "dulac_iterate",
    "trem_moulds",
    "dulac_moulds",
    "linearization_mould",
    "linearize",
    "verify_prenormal",
]


class ResonanceError(ValueError):
    pass


class StationarityError(RuntimeError):
    pass


def _recip(n: int) -> Scalar:
    return Scalar._raw(1, 0, n)


def _cancel(ctx: TruncationContext, m) -> Scalar:
    """1 / (1 - mu^-m), the coefficient that kills a component of degree m."""
    return (ONE - ctx.power(m).reciprocal()).reciprocal()


# generators


def Dem_mould(ctx: TruncationContext, letters=None) -> Mould:
    """Dem on the D-alphabet: 1/(1 - mu^-m) on nonresonant single letters."""
    letters = ctx.letters if letters is None else letters
    vals = {}
    for m in letters:
        m = tuple(m)
        if 1 <= sum(m) <= ctx.max_weight and not ctx.is_resonant(m):
            vals[(m,)] = _cancel(ctx, m)
    return Mould(ctx.with_letters(set(ctx.letters) | {tuple(m) for m in letters}), vals, "Dem")


def _closed_generator(ctx, letters, keep, name) -> Mould:
    """(-1)^(l+1)/l * 1/(1 - mu^-||w||) on words whose norm passes ``keep``."""
    letters = sorted({tuple(m) for m in letters if 1 <= sum(m) <= ctx.max_weight})
    cache: dict = {}
    vals = {}
    for w in enumerate_words(ctx, letters, ctx.max_weight):
        if not w:
            continue
        d = word_norm(w)
        c = cache.get(d)
        if c is None:
            c = cache[d] = _cancel(ctx, d) if keep(d) else ZERO
        if c:
            l = len(w)
            vals[w] = c * (_recip(l) if l % 2 else -_recip(l))
    return Mould(ctx.with_letters(set(ctx.letters) | set(letters)), vals, name)


def dem_mould(ctx: TruncationContext, letters=None) -> Mould:
    """dem on the B-alphabet: Dem read through D_m = sum (Log I)^w B_w."""
    letters = ctx.letters if letters is None else letters
    return _closed_generator(ctx, letters, lambda d: not ctx.is_resonant(d), "dem")


def Den_mould(ctx: TruncationContext, K: int, letters=None) -> Mould:
    """Den: like Dem but only on nonresonant letters of weight K."""
    letters = ctx.letters if letters is None else letters
    chosen = [tuple(m) for m in letters if sum(m) == K]
    out = Dem_mould(ctx, chosen).values
    return Mould(ctx.with_letters(set(ctx.letters) | {tuple(m) for m in letters}), out, "Den")


def den_mould(ctx: TruncationContext, K: int, letters=None) -> Mould:
    letters = ctx.letters if letters is None else letters
    return _closed_generator(
        ctx, letters, lambda d: sum(d) == K and not ctx.is_resonant(d), "den"
    )


def simplified_moulds(G: Mould, g: Mould) -> tuple:
    """Moulds of the simplified operator from the D-side and B-side generators.

    Returns (e^D(Exp G) Exp I Exp(-G), e^D(Exp g) (1 + I) Exp(-g)).
    """
    dctx, bctx = G.ctx, g.ctx
    S = mould_mul(
        mould_mul(mould_edelta(length1_exp(G)), length1_exp(mould_id(dctx))),
        length1_exp(-G),
    )
    s = mould_mul(
        mould_mul(mould_edelta(mould_exp(g)), mould_one(bctx) + mould_id(bctx)),
        mould_exp(-g),
    )
    return S, s


def sem_moulds(d_ctx: TruncationContext, b_ctx: TruncationContext) -> tuple:
    """(Sem, sem) on the D- and B-alphabets of the given contexts."""
    S, s = simplified_moulds(Dem_mould(d_ctx), dem_mould(b_ctx))
    return S.named("Sem"), s.named("sem")


def poin_moulds(d_ctx: TruncationContext, b_ctx: TruncationContext, K: int) -> tuple:
    """(Poin, poin) for a Poincare step at weight K."""
    S, s = simplified_moulds(Den_mould(d_ctx, K), den_mould(b_ctx, K))
    return S.named("Poin"), s.named("poin")


def sem_explicit(ctx: TruncationContext, word) -> Scalar:
    """Closed form of Sem on one word of the D-alphabet.

    Expanding the three-factor product over splittings w = a.b.c gives
    Sem^w = sum_i mu^-||a|| Pi(a)/i! * X(w^{>i}), with a = w^{<=i} free of
    resonant letters, and X(u) = sum_j (-1)^l(u^{>=j}) Pi(u^{>=j}) /
    ((j-1)! (l-j+1)!) over suffixes u^{>=j} free of resonant letters
    (j = l+1 is the empty suffix). Pi is the product of Dem over letters.
    """
    w = tuple(tuple(n) for n in word)
    if not w:
        return ONE
    res = [ctx.is_resonant(n) for n in w]
    dem = [ZERO if r else _cancel(ctx, n) for n, r in zip(w, res)]

    def last_resonant(lo):
        # 1-based index in w of the last resonant letter at or after lo, else lo - 1
        d = lo - 1
        for k in range(lo, len(w) + 1):
            if res[k - 1]:
                d = k
        return d

    def X(lo):
        # suffix u = w[lo-1:], positions lo..l of w
        l = len(w) - lo + 1
        if l == 0:
            return ONE
        start = last_resonant(lo) - lo + 2  # first admissible j, relative to u
        total = ZERO
        for j in range(start, l + 2):
            tail = l - j + 1
            prod = ONE
            for k in range(lo - 1 + j - 1, len(w)):
                prod = prod * dem[k]
            term = prod * _recip(factorial(j - 1) * factorial(tail))
            total = total + (-term if tail % 2 else term)
        return total

    q = next((k for k, r in enumerate(res) if r), len(w))
    total = X(1)
    prod = ONE
    for i in range(1, q + 1):
        prod = prod * dem[i - 1]
        coeff = ctx.power(word_norm(w[:i])).reciprocal() * prod * _recip(factorial(i))
        total = total + coeff * X(i + 1)
    return total


@dataclass(frozen=True)
class ResonanceProfile:
    K: int | None
    Nk: dict

    def describe(self) -> str:
        if self.K is None:
            return "K=none"
        return f"K={self.K}"


def resonance_profile(ctx: TruncationContext, letters=None) -> ResonanceProfile:
    """Degree of resonance: lowest weight carrying a nonresonant letter."""
    letters = ctx.letters if letters is None else letters
    Nk: dict = {}
    for m in sorted({tuple(n) for n in letters}):
        if not ctx.is_resonant(m):
            Nk.setdefault(sum(m), []).append(m)
    Nk = {k: tuple(v) for k, v in sorted(Nk.items())}
    return ResonanceProfile(min(Nk) if Nk else None, Nk)


# stages


@dataclass
class Stage:
    """One simplification sweep F_lin o before -> F_lin o after."""

    index: int
    kind: str
    K: int | None
    b_letters: tuple
    d_letters: tuple
    moulds: dict
    before: OperatorSeries
    after: OperatorSeries
    normalizator: OperatorSeries

    def stage_map(self, mu) -> tuple:
        return operator_to_map(self.before, mu)

    def result_map(self, mu) -> tuple:
        return operator_to_map(self.after, mu)

    def normalizator_map(self) -> tuple:
        return substitution_map(self.normalizator)


def _alphabets(P: OperatorSeries):
    ident = OperatorSeries.identity(P.nu, P.N)
    B = P - ident
    D = operator_log(P)
    return B, D


def _run_stage(P, mu, index, kind, K=None, check=True) -> Stage:
    nu, N = P.nu, P.N
    B, D = _alphabets(P)
    bparts, dparts = B.parts(), D.parts()
    W = max(N - 1, 0)
    d_ctx = TruncationContext(nu, mu, W, tuple(dparts))
    b_ctx = TruncationContext(nu, mu, W, tuple(bparts))
    if kind == "trim":
        G, g = Dem_mould(d_ctx), dem_mould(b_ctx)
        names = ("Dem", "dem", "Sem", "sem")
    else:
        G, g = Den_mould(d_ctx, K), den_mould(b_ctx, K)
        names = ("Den", "den", "Poin", "poin")
    V = mould_expand(G, dparts, nu, N)
    E = operator_exp(V)
    Einv = operator_exp(-V)
    Flin = OperatorSeries.flin(mu, N)
    Finv = OperatorSeries.flin(mu, N, inverse=True)
    after = Finv @ E @ Flin @ P @ Einv
    S, s = simplified_moulds(G, g)
    moulds = {
        names[0]: G.named(names[0]),
        names[1]: g.named(names[1]),
        names[2]: S.named(names[2]),
        names[3]: s.named(names[3]),
    }
    if check:
        if mould_expand(g, bparts, nu, N) != V:
            raise AssertionError(f"stage {index}: {names[0]} and {names[1]} give different generators")
        if mould_expand(S, dparts, nu, N) != after:
            raise AssertionError(f"stage {index}: {names[2]} expansion differs from the conjugated operator")
        if mould_expand(s, bparts, nu, N) != after:
            raise AssertionError(f"stage {index}: {names[3]} expansion differs from the conjugated operator")
    return Stage(index, kind, K, tuple(bparts), tuple(dparts), moulds, P, after, E)


def trim_step(P: OperatorSeries, mu, index: int = 0, check: bool = True) -> Stage:
    """Cancel every nonresonant D-component of F_lin o P in one conjugation."""
    return _run_stage(P, tuple(mu), index, "trim", check=check)


def poin_step(P: OperatorSeries, mu, index: int = 0, check: bool = True) -> Stage | None:
    """Cancel the nonresonant D-components of lowest weight; None when there are none."""
    _, D = _alphabets(P)
    W = max(P.N - 1, 0)
    prof = resonance_profile(TruncationContext(P.nu, tuple(mu), W), D.letters())
    if prof.K is None:
        return None
    return _run_stage(P, tuple(mu), index, "poincare", K=prof.K, check=check)


@dataclass
class NormalizationTrace:
    kind: str
    diffeo: PreparedDiffeo
    stages: list
    final: OperatorSeries
    stationary: bool
    moulds: dict = field(default_factory=dict)

    @property
    def normalizator(self) -> OperatorSeries:
        """Theta = Theta_r ... Theta_1, so that Theta F Theta^-1 = F_lin o final."""
        theta = OperatorSeries.identity(self.diffeo.nu, self.diffeo.N)
        for st in self.stages:
            theta = st.normalizator @ theta
        return theta

    def normalizator_map(self) -> tuple:
        """g = g_1 o ... o g_r with f o g = g o f_final."""
        g = identity_map(self.diffeo.nu, self.diffeo.N)
        for st in self.stages:
            g = compose_maps(g, st.normalizator_map())
        return g

    def final_map(self) -> tuple:
        return operator_to_map(self.final, self.diffeo.mu)


def _iterate(f: PreparedDiffeo, step, kind: str, max_sweeps, check) -> NormalizationTrace:
    N = f.N
    cap = N if max_sweeps is None else max_sweeps
    P = OperatorSeries.identity(f.nu, N) + extract_B(f)
    stages = []
    for i in range(cap + 1):
        st = step(P, f.mu, i, check)
        if st is None or st.after == P:
            break
        if i == cap:
            raise StationarityError(
                f"{kind}: no stationary limit after {cap} sweeps; "
                f"last stage letters {[format_vector(d) for d in st.d_letters]}"
            )
        stages.append(st)
        P = st.after
    trace = NormalizationTrace(kind, f, stages, P, True)
    if kind == "trim":
        trace.moulds = trem_moulds(f)
    else:
        trace.moulds = dulac_moulds(f)
    return trace


def trim_iterate(f: PreparedDiffeo, max_sweeps: int | None = None, check: bool = True) -> NormalizationTrace:
    """Iterate trimming sweeps until F_lin o P stops changing (at most N sweeps)."""
    return _iterate(f, trim_step, "trim", max_sweeps, check)


def dulac_iterate(f: PreparedDiffeo, max_sweeps: int | None = None, check: bool = True) -> NormalizationTrace:
    """Iterate Poincare sweeps until no nonresonant component is left."""
    return _iterate(f, poin_step, "dulac", max_sweeps, check)


# universal composite moulds


def _closure_contexts(f: PreparedDiffeo):
    W = max(f.N - 1, 0)
    B = extract_B(f)
    D = operator_log(OperatorSeries.identity(f.nu, f.N) + B)
    b_ctx = TruncationContext(f.nu, f.mu, W, letter_closure(B.letters(), W))
    d_ctx = TruncationContext(f.nu, f.mu, W, letter_closure(D.letters(), W))
    return d_ctx, b_ctx


def _stationary_compose(outer: Mould, start: Mould, cap: int) -> Mould:
    cur = start
    for _ in range(cap):
        nxt = mould_compose(outer, cur)
        if nxt == cur:
            return cur
        cur = nxt
    raise StationarityError("composite mould did not become stationary")


def trem_moulds(f: PreparedDiffeo) -> dict:
    """Universal Sem/sem and their stationary composites Trem/trem.

    trem - 1 = lim (sem - 1) o ... o (sem - 1) and
    Log Trem = lim Log Sem o ... o Log Sem, tabulated on the closure of the
    alphabets of f (every stage alphabet consists of norms of such words).
    """
    d_ctx, b_ctx = _closure_contexts(f)
    Sem, sem = sem_moulds(d_ctx, b_ctx)
    cap = d_ctx.max_weight + 2
    one = mould_one(b_ctx)
    x = sem - one
    trem = (one + _stationary_compose(x, x, cap)).named("trem")
    logsem = mould_log(Sem)
    Trem = mould_exp(_stationary_compose(logsem, logsem, cap)).named("Trem")
    return {"Sem": Sem, "sem": sem, "Trem": Trem, "trem": trem}


def dulac_moulds(f: PreparedDiffeo) -> dict:
    """Universal Dulac/dulac: composites of Poin/poin over increasing weights K."""
    d_ctx, b_ctx = _closure_contexts(f)
    ks = sorted(
        {sum(m) for m in d_ctx.letters if not d_ctx.is_resonant(m)}
        | {sum(m) for m in b_ctx.letters if not b_ctx.is_resonant(m)}
    )
    one = mould_one(b_ctx)
    x = None
    logx = None
    for k in ks:
        Poin, poin = poin_moulds(d_ctx, b_ctx, k)
        px, lp = poin - one, mould_log(Poin)
        x = px if x is None else mould_compose(px, x)
        logx = lp if logx is None else mould_compose(lp, logx)
    dulac = one if x is None else one + x
    Dulac = mould_one(d_ctx) if logx is None else mould_exp(logx)
    return {"Dulac": Dulac.named("Dulac"), "dulac": dulac.named("dulac")}


# linearization


def linearization_mould(ctx: TruncationContext, letters=None) -> Mould:
    """Theta^(n1..nr) = prod_i 1/(mu^-(n_i + ... + n_r) - 1).

    The expansion Theta of this mould satisfies Theta^-1 F Theta = F_lin.
    """
    letters = ctx.letters if letters is None else letters
    letters = sorted({tuple(m) for m in letters if 1 <= sum(m) <= ctx.max_weight})
    cache: dict = {}
    vals = {EMPTY: ONE}
    for w in enumerate_words(ctx, letters, ctx.max_weight):
        if not w:
            continue
        head = _factor(ctx, word_norm(w), cache)
        vals[w] = head * vals[w[1:]]
    return Mould(ctx.with_letters(letters), vals, "LinearizationTheta")


def _factor(ctx, d, cache):
    c = cache.get(d)
    if c is None:
        if ctx.is_resonant(d):
            raise ResonanceError(
                f"resonant: linearization mould undefined (suffix norm {format_vector(d)})"
            )
        c = cache[d] = (ctx.power(d).reciprocal() - ONE).reciprocal()
    return c


def linearize(f: PreparedDiffeo) -> tuple:
    """Return (Theta, ok) where ok is Theta^-1 F Theta == F_lin exactly.

    The substitution map g of Theta satisfies g o f = f_lin o g.
    """
    B = extract_B(f)
    ctx = f.context(letters=B.letters())
    theta = mould_expand(linearization_mould(ctx), B)
    lhs = operator_inverse(theta) @ f.automorphism() @ theta
    return theta, lhs == f.flin()


# verification


@dataclass
class VerificationReport:
    entries: list = field(default_factory=list)

    def add(self, name: str, ok: bool, detail: str = "") -> None:
        self.entries.append((name, bool(ok), detail))

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.entries)

    def check(self, name: str, test, detail: str = "") -> None:
        """Record ``test()``; an arithmetic or domain error counts as a failure."""
        try:
            ok = bool(test())
        except (ValueError, ArithmeticError) as exc:
            self.add(name, False, f"{detail}: {exc}" if detail else str(exc))
            return
        self.add(name, ok, detail)

    def failures(self) -> list:
        return [e for e in self.entries if not e[1]]

    def format(self) -> str:
        lines = []
        for name, ok, detail in self.entries:
            tag = "PASS" if ok else "FAIL"
            lines.append(f"{tag} {name}" + (f": {detail}" if detail else ""))
        lines.append("OK" if self.ok else "FAILED")
        return "\n".join(lines) + "\n"


def _resonant_support(M: Mould) -> list:
    return [w for w in M.values if w and not M.ctx.is_resonant(word_norm(w))]


def verify_prenormal(trace: NormalizationTrace, f: PreparedDiffeo | None = None) -> VerificationReport:
    """Re-check a finished trace without re-running the normalization."""
    f = trace.diffeo if f is None else f
    rep = VerificationReport()
    mu, N, nu = f.mu, f.N, f.nu
    fmap = f.map()
    P0 = OperatorSeries.identity(nu, N) + extract_B(f)

    start = trace.stages[0].before if trace.stages else trace.final
    rep.add("start", start == P0, "first stage starts from f")

    chain_ok = True
    bad = ""
    prev = P0
    for st in trace.stages:
        if st.before != prev:
            chain_ok, bad = False, f"stage {st.index} does not start where the previous one ended"
            break
        g = st.normalizator_map()
        if compose_maps(st.stage_map(mu), g) != compose_maps(g, st.result_map(mu)):
            chain_ok, bad = False, f"stage {st.index}: normalizator does not conjugate"
            break
        prev = st.after
    if chain_ok and prev != trace.final:
        chain_ok, bad = False, "last stage does not end at the final form"
    g = trace.normalizator_map()
    ffinal = trace.final_map()
    if chain_ok and compose_maps(fmap, g) != compose_maps(g, ffinal):
        chain_ok, bad = False, "composed normalizator does not conjugate f to the final form"
    rep.add("conjugacy", chain_ok, bad or f"{len(trace.stages)} stages chained")

    for st in trace.stages:
        names = ("Sem", "sem") if st.kind == "trim" else ("Poin", "poin")

        def stage_ok(st=st, names=names):
            B, D = _alphabets(st.before)
            pairs = ((names[0], D.parts()), (names[1], B.parts()))
            if any(name not in st.moulds for name, _ in pairs):
                return False
            return all(mould_expand(st.moulds[name], parts, nu, N) == st.after for name, parts in pairs)

        rep.check(f"stage-{st.index} expansion", stage_ok, f"{names[0]}/{names[1]} reproduce the stage result")

    rep.add("commutes with F_lin", commutes_with_flin(trace.final, mu))

    if trace.kind == "trim":
        names = ("Trem", "trem")
    elif trace.kind == "dulac":
        names = ("Dulac", "dulac")
    else:
        names = ()
    for name in names:
        M = trace.moulds.get(name)
        if M is None:
            rep.add(f"{name} support", False, "table missing")
            continue
        off = _resonant_support(M)
        rep.add(
            f"{name} support",
            not off,
            "only resonant norms" if not off else f"nonresonant word {format_word(off[0])}",
        )
    low = trace.moulds.get(names[1]) if names else None
    if low is not None:
        rep.check(
            f"{names[1]} expansion",
            lambda: mould_expand(low, extract_B(f)) == trace.final,
            "expansion on the B-alphabet of f",
        )
    if trace.kind == "trim" and {"Sem", "sem", "Trem", "trem"} <= set(trace.moulds):
        m = trace.moulds

        def small_fixed_point():
            one = mould_one(m["sem"].ctx)
            xs, xt = m["sem"] - one, m["trem"] - one
            return mould_compose(xs, xt) == xt and mould_compose(xt, xs) == xt

        def big_fixed_point():
            ls, lt = mould_log(m["Sem"]), mould_log(m["Trem"])
            return mould_compose(ls, lt) == lt and mould_compose(lt, ls) == lt

        rep.check("trem fixed point", small_fixed_point, "(trem-1) = (sem-1)o(trem-1) = (trem-1)o(sem-1)")
        rep.check("Trem fixed point", big_fixed_point, "Log Trem = Log Sem o Log Trem = Log Trem o Log Sem")
    return rep
