"""Linearize x -> 2x + x^2 and compare with the Koenigs recursion.

Run with ``python3 demos/linearize_koenigs.py``.
"""

from fractions import Fraction
from math import comb
from pathlib import Path

from mouldkit.operators import substitution_map
from mouldkit.polys import compose_maps
from mouldkit.prenormal import linearize
from mouldkit.specfile import parse_spec

SPEC = Path(__file__).parent / "specs" / "quadratic-1d.json"


def koenigs(N):
    # c o f = 2 c with f = 2x + x^2, solved degree by degree
    c = [Fraction(0), Fraction(1)]
    for k in range(2, N + 1):
        # coefficient of x^k in sum_j c_j (2x + x^2)^j, j < k
        s = Fraction(0)
        for j in range(1, k):
            i = k - j  # number of x^2 factors
            if i <= j:
                s += c[j] * comb(j, i) * 2 ** (j - i)
        c.append(s / (2 - 2**k))
    return c


def main():
    f = parse_spec(SPEC)
    theta, ok = linearize(f)
    g = substitution_map(theta)
    print("linearizing map g with g o f = 2 g:", "ok" if ok else "not linearizable")
    for k in range(1, f.N + 1):
        ours = g[0].coeffs.get((k,), 0)
        print(f"  x^{k}: {ours}   recursion: {koenigs(f.N)[k]}")
    print("conjugacy holds:", compose_maps(g, f.map()) == compose_maps(f.linear_map(), g))


if __name__ == "__main__":
    main()
