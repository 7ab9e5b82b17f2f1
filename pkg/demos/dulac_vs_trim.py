"""Compare the Poincare-Dulac form with the trimmed form of the same saddle.

Both keep only resonant monomials. The two procedures build different
normalizators, so the script prints whether the resulting jets coincide.

Run with ``python3 demos/dulac_vs_trim.py``.
"""

from pathlib import Path

from mouldkit.polys import dump_jet
from mouldkit.prenormal import dulac_iterate, trim_iterate
from mouldkit.specfile import parse_spec

SPEC = Path(__file__).parent / "specs" / "saddle.json"


def main():
    f = parse_spec(SPEC)
    trim = trim_iterate(f)
    dulac = dulac_iterate(f)
    print(f"trim: {len(trim.stages)} sweeps; dulac: {len(dulac.stages)} sweeps at K = {[s.K for s in dulac.stages]}")
    print("trimmed form")
    print(dump_jet(trim.final_map()))
    print("Poincare-Dulac form")
    print(dump_jet(dulac.final_map()))
    print("identical:", trim.final_map() == dulac.final_map())


if __name__ == "__main__":
    main()
