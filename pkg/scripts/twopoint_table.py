"""Exact binomial probability against the lattice asymptotic for two-point laws."""
import argparse

from selfnorm import distributions as D
from selfnorm import exact_twopoint as ET

CASES = {
    "a_neg": (-1.0, 1.0, 0.5, 0.5),
    "a_zero": (0.0, 1.0, 0.3, 0.7),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[50, 100, 500, 1000, 2000, 5000])
    ap.add_argument("--lattice", choices=["ceil", "none", "literal"], default="ceil")
    args = ap.parse_args()
    p2 = D.PowerLaw(2)
    f = ET.segment_ratio(1, 2, p2)
    cases = dict(CASES, a_pos=(1.0, 2.0, 0.5, 0.5 * (f(0.5) + 1)))
    print(f"{'case':8} {'n':>6} {'log exact':>14} {'log asympt':>14} {'ratio':>9}")
    for tag, (a, b, q, z) in cases.items():
        for n in args.n:
            r = ET.asymptotic_prob(a, b, q, p2, z, n, args.lattice)
            print(f"{tag:8} {n:6d} {r.log_exact:14.6f} {r.log_total:14.6f} {r.ratio:9.5f}")


if __name__ == "__main__":
    main()
