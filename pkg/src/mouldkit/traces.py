"""Writing normalization traces to disk and checking them back.

Layout of a trace directory::

    spec.json            the diffeomorphism
    trace.json           kind, truncation, per-stage degree of resonance
    stage-<i>/           one directory per sweep
        Dem.tsv dem.tsv Sem.tsv sem.tsv   (Den/den/Poin/poin for dulac runs)
        B-letters.txt D-letters.txt
        stage-map.tsv result-map.tsv normalizator.tsv
        report.txt
    Trem.tsv trem.tsv Sem.tsv sem.tsv     (Dulac.tsv dulac.tsv for dulac runs)
    normal-form.tsv normalizator.tsv report.txt

All files are written in canonical order so repeated runs are byte-identical.
"""

from __future__ import annotations

import json
from pathlib import Path

from .alphabet import format_vector, parse_vector
from .moulds import dump_tsv, load_tsv
from .operators import OperatorSeries, PreparedDiffeo, extract_B, map_to_operator, mould_expand
from .polys import compose_maps, dump_jet, identity_map, load_jet
from .prenormal import (
    NormalizationTrace,
    Stage,
    VerificationReport,
    linearization_mould,
    verify_prenormal,
)
from .specfile import dump_spec, parse_spec

__all__ = ["dump_trace", "load_trace", "dump_linearization", "verify_trace_dir"]

_STAGE_MOULDS = {"trim": ("Dem", "dem", "Sem", "sem"), "dulac": ("Den", "den", "Poin", "poin")}
_TOP_MOULDS = {"trim": ("Sem", "sem", "Trem", "trem"), "dulac": ("Dulac", "dulac")}


def _write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8", newline="\n")


def _letters_text(kind: str, letters) -> str:
    return f"# {kind}-alphabet\n" + "".join(format_vector(n) + "\n" for n in letters)


def _read_letters(path: Path) -> tuple:
    out = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if line and not line.startswith("#"):
            out.append(parse_vector(line))
    return tuple(out)


def _stage_report(trace: NormalizationTrace, report: VerificationReport, index: int) -> str:
    tag = f"stage-{index} "
    lines = [e for e in report.entries if e[0].startswith(tag)]
    sub = VerificationReport(lines)
    return sub.format()


def dump_trace(trace: NormalizationTrace, out_dir, report: VerificationReport | None = None) -> VerificationReport:
    """Write ``trace`` under ``out_dir`` and return the verification report."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    f = trace.diffeo
    mu = f.mu
    report = verify_prenormal(trace) if report is None else report
    _write(out / "spec.json", dump_spec(f))
    meta = {
        "kind": trace.kind,
        "nu": f.nu,
        "truncation": f.N,
        "stationary": trace.stationary,
        "stages": [{"index": st.index, "K": st.K} for st in trace.stages],
    }
    _write(out / "trace.json", json.dumps(meta, indent=2) + "\n")
    for st in trace.stages:
        d = out / f"stage-{st.index}"
        d.mkdir(exist_ok=True)
        for name in _STAGE_MOULDS[trace.kind]:
            _write(d / f"{name}.tsv", dump_tsv(st.moulds[name], name))
        _write(d / "B-letters.txt", _letters_text("B", st.b_letters))
        _write(d / "D-letters.txt", _letters_text("D", st.d_letters))
        _write(d / "stage-map.tsv", dump_jet(st.stage_map(mu)))
        _write(d / "result-map.tsv", dump_jet(st.result_map(mu)))
        _write(d / "normalizator.tsv", dump_jet(st.normalizator_map()))
        _write(d / "report.txt", _stage_report(trace, report, st.index))
    for name in _TOP_MOULDS[trace.kind]:
        _write(out / f"{name}.tsv", dump_tsv(trace.moulds[name], name))
    _write(out / "normal-form.tsv", dump_jet(trace.final_map()))
    _write(out / "normalizator.tsv", dump_jet(trace.normalizator_map()))
    _write(out / "report.txt", report.format())
    return report


def load_trace(trace_dir) -> NormalizationTrace:
    """Rebuild a trace from its directory; operators come back from the stored jets."""
    root = Path(trace_dir)
    meta = json.loads((root / "trace.json").read_text(encoding="utf-8"))
    kind = meta["kind"]
    if kind not in _STAGE_MOULDS:
        raise ValueError(f"{root}: trace of kind {kind!r} is not a normalization chain")
    f = parse_spec(root / "spec.json")
    nu, N, mu = f.nu, f.N, f.mu
    stages = []
    for info in meta["stages"]:
        i = info["index"]
        d = root / f"stage-{i}"
        moulds = {
            name: load_tsv((d / f"{name}.tsv").read_text(encoding="utf-8"))
            for name in _STAGE_MOULDS[kind]
        }
        before = map_to_operator(load_jet((d / "stage-map.tsv").read_text(encoding="utf-8"), nu, N), mu)
        after = map_to_operator(load_jet((d / "result-map.tsv").read_text(encoding="utf-8"), nu, N), mu)
        g = load_jet((d / "normalizator.tsv").read_text(encoding="utf-8"), nu, N)
        stages.append(
            Stage(
                i,
                "trim" if kind == "trim" else "poincare",
                info["K"],
                _read_letters(d / "B-letters.txt"),
                _read_letters(d / "D-letters.txt"),
                moulds,
                before,
                after,
                OperatorSeries.from_map(g),
            )
        )
    final = map_to_operator(load_jet((root / "normal-form.tsv").read_text(encoding="utf-8"), nu, N), mu)
    moulds = {
        name: load_tsv((root / f"{name}.tsv").read_text(encoding="utf-8"))
        for name in _TOP_MOULDS[kind]
    }
    return NormalizationTrace(kind, f, stages, final, bool(meta["stationary"]), moulds)


def dump_linearization(f: PreparedDiffeo, theta: OperatorSeries, out_dir) -> VerificationReport:
    """Write the linearizing normalizator of ``f``; the map g satisfies g o f = f_lin o g."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    B = extract_B(f)
    ctx = f.context(letters=B.letters())
    M = linearization_mould(ctx)
    g = tuple(theta.apply(x) for x in identity_map(f.nu, f.N))
    _write(out / "spec.json", dump_spec(f))
    _write(out / "trace.json", json.dumps({"kind": "linearize", "nu": f.nu, "truncation": f.N}, indent=2) + "\n")
    _write(out / "LinearizationTheta.tsv", dump_tsv(M, "LinearizationTheta"))
    _write(out / "normalizator.tsv", dump_jet(g))
    report = _verify_linearization(out)
    _write(out / "normal-form.tsv", dump_jet(f.linear_map()))
    _write(out / "report.txt", report.format())
    return report


def _verify_linearization(root: Path) -> VerificationReport:
    f = parse_spec(root / "spec.json")
    rep = VerificationReport()
    g = load_jet((root / "normalizator.tsv").read_text(encoding="utf-8"), f.nu, f.N)
    ok = compose_maps(g, f.map()) == compose_maps(f.linear_map(), g)
    rep.add("conjugacy", ok, "g o f = f_lin o g")
    M = load_tsv((root / "LinearizationTheta.tsv").read_text(encoding="utf-8"))
    theta = mould_expand(M, extract_B(f))
    rep.add("expansion", theta == OperatorSeries.from_map(g), "LinearizationTheta expands to the normalizator")
    return rep


def verify_trace_dir(trace_dir) -> VerificationReport:
    """Check a stored trace (normalization chain or linearization) from its files alone."""
    root = Path(trace_dir)
    meta = json.loads((root / "trace.json").read_text(encoding="utf-8"))
    if meta.get("kind") == "linearize":
        return _verify_linearization(root)
    return verify_prenormal(load_trace(root))
