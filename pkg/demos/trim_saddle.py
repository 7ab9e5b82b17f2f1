"""Trim a resonant saddle and look at each sweep.

Run with ``python3 demos/trim_saddle.py``.
"""

from pathlib import Path

from mouldkit.moulds import dump_tsv
from mouldkit.polys import dump_jet
from mouldkit.prenormal import trim_iterate, verify_prenormal
from mouldkit.specfile import parse_spec

SPEC = Path(__file__).parent / "specs" / "saddle.json"


def main():
    f = parse_spec(SPEC)
    print("input map")
    print(dump_jet(f.map()))
    trace = trim_iterate(f)
    for st in trace.stages:
        print(f"sweep {st.index}: {len(st.d_letters)} D-letters, {len(st.moulds['Sem'].values)} nonzero Sem entries")
    print("trimmed form")
    print(dump_jet(trace.final_map()))
    print("trem up to weight 2")
    trem = trace.moulds["trem"].restrict(lambda w: sum(map(sum, w)) <= 2)
    print(dump_tsv(trem, "trem"))
    print(verify_prenormal(trace).format())


if __name__ == "__main__":
    main()
