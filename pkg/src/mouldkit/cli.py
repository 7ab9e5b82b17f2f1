"""Command-line front end.

    mouldkit trim      --spec FILE [--degree N] --out DIR
    mouldkit dulac     --spec FILE [--degree N] --out DIR
    mouldkit linearize --spec FILE [--degree N] --out DIR
    mouldkit mould     --spec FILE --name NAME [--max-weight W] [--format tsv]
    mouldkit verify    --trace DIR

Exit status is 0 when every internal check passes, 1 when a check fails or
the computation cannot be carried out, and 2 for unusable input.
"""

from __future__ import annotations

import argparse
import os
import sys

from .moulds import Mould, dump_tsv
from .operators import OperatorSeries, PreparedDiffeo, extract_B, operator_log
from .polys import dump_jet
from .prenormal import (
    Dem_mould,
    Den_mould,
    ResonanceError,
    StationarityError,
    dem_mould,
    den_mould,
    dulac_iterate,
    dulac_moulds,
    linearization_mould,
    linearize,
    resonance_profile,
    sem_moulds,
    simplified_moulds,
    trem_moulds,
    trim_iterate,
)
from .specfile import DEFAULT_DEGREE, SpecError, parse_spec
from .traces import dump_linearization, dump_trace, verify_trace_dir

MOULD_NAMES = (
    "Dem", "dem", "Sem", "sem",
    "Den", "den", "Poin", "poin",
    "Trem", "trem", "Dulac", "dulac",
    "LinearizationTheta",
)


def thread_limit() -> int:
    """Value of MOULDKIT_THREADS (default 1); all work currently runs in one thread."""
    raw = os.environ.get("MOULDKIT_THREADS", "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise SpecError(f"MOULDKIT_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise SpecError(f"MOULDKIT_THREADS must be a positive integer, got {raw!r}")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mouldkit", description="Mould-calculus normal forms of diffeomorphisms.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("trim", "iterate full simplification to the trimmed form"),
        ("dulac", "iterate Poincare steps to the Poincare-Dulac normal form"),
        ("linearize", "conjugate to the linear part with the linearization mould"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("--spec", required=True)
        p.add_argument("--degree", type=int, default=None, help=f"truncation degree (default: spec value or {DEFAULT_DEGREE})")
        p.add_argument("--out", required=True)
    p = sub.add_parser("mould", help="print a mould table")
    p.add_argument("--spec", required=True)
    p.add_argument("--name", required=True, choices=MOULD_NAMES)
    p.add_argument("--max-weight", type=int, default=4)
    p.add_argument("--format", default="tsv", choices=("tsv",))
    p = sub.add_parser("verify", help="re-check a stored trace directory")
    p.add_argument("--trace", required=True)
    return parser


def mould_table(f: PreparedDiffeo, name: str, max_weight: int):
    """The named mould for the alphabets of ``f`` up to ``max_weight``."""
    if max_weight < 1:
        raise SpecError("--max-weight must be >= 1")
    g = PreparedDiffeo(f.nu, f.mu, f.h, max_weight + 1)
    B = extract_B(g)
    D = operator_log(OperatorSeries.identity(g.nu, g.N) + B)
    b_ctx = g.context(letters=B.letters())
    d_ctx = g.context(letters=D.letters())
    if name in ("Dem", "dem", "Sem", "sem"):
        table = {"Dem": lambda: Dem_mould(d_ctx), "dem": lambda: dem_mould(b_ctx)}
        if name in table:
            return table[name]()
        return dict(zip(("Sem", "sem"), sem_moulds(d_ctx, b_ctx)))[name]
    if name in ("Den", "den", "Poin", "poin"):
        K = resonance_profile(d_ctx).K
        if K is None:
            # nothing to cancel: zero generators
            G, gen = Mould(d_ctx, name="Den"), Mould(b_ctx, name="den")
        else:
            G, gen = Den_mould(d_ctx, K), den_mould(b_ctx, K)
        if name == "Den":
            return G
        if name == "den":
            return gen
        return dict(zip(("Poin", "poin"), simplified_moulds(G, gen)))[name]
    if name in ("Trem", "trem"):
        return trem_moulds(g)[name]
    if name in ("Dulac", "dulac"):
        return dulac_moulds(g)[name]
    return linearization_mould(b_ctx)


def _print_report(report) -> None:
    sys.stdout.write(report.format())


def run(args) -> int:
    thread_limit()
    if args.command == "verify":
        report = verify_trace_dir(args.trace)
        _print_report(report)
        return 0 if report.ok else 1
    f = parse_spec(args.spec, getattr(args, "degree", None))
    if args.command == "mould":
        M = mould_table(f, args.name, args.max_weight)
        sys.stdout.write(dump_tsv(M, args.name))
        return 0
    if args.command == "linearize":
        theta, ok = linearize(f)
        report = dump_linearization(f, theta, args.out)
        _print_report(report)
        return 0 if ok and report.ok else 1
    trace = trim_iterate(f) if args.command == "trim" else dulac_iterate(f)
    report = dump_trace(trace, args.out)
    sys.stdout.write(dump_jet(trace.final_map()))
    _print_report(report)
    return 0 if report.ok else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (StationarityError, ResonanceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
