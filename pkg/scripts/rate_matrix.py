"""J_z by all three routes over a matrix of laws and levels."""
import argparse
import time

import numpy as np

from selfnorm import distributions as D
from selfnorm.shao_rate import j_boundary, j_halfplane, j_supinf

LAWS = {
    "two_point(-1,1,.5)": D.TwoPoint(-1, 1, 0.5),
    "two_point(-1,1,.8)": D.TwoPoint(-1, 1, 0.8),
    "finite3": D.FiniteDiscrete(((-1, 0.25), (0, 0.5), (2, 0.25))),
    "gaussian(-.5,1)": D.Gaussian(-0.5, 1),
    "gaussian(0,1)": D.Gaussian(0, 1),
}
SLOW = {
    "pareto(1,3,-2)": D.ShiftedPareto(1, 3, -2),
    "pareto(1,1.5,-2.5)": D.ShiftedPareto(1, 1.5, -2.5),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=float, default=2.0)
    ap.add_argument("--levels", type=int, default=5)
    ap.add_argument("--heavy", action="store_true", help="include the Pareto laws (slow)")
    args = ap.parse_args()
    norm = D.PowerLaw(args.p)
    laws = dict(LAWS, **SLOW) if args.heavy else LAWS
    print(f"{'law':20} {'z':>6} {'sup-inf':>13} {'half-plane':>13} {'boundary':>13} {'gap':>8}")
    for name, dist in laws.items():
        zs = np.linspace(D.z_star(dist, norm) + 0.05, 0.95, args.levels + 2)[1:-1]
        for z in zs:
            t0 = time.perf_counter()
            vals = (j_supinf(dist, args.p, z), j_halfplane(dist, args.p, z),
                    -j_boundary(dist, norm, z).rate)
            gap = max(vals) - min(vals)
            print(f"{name:20} {z:6.3f} {vals[0]:13.9f} {vals[1]:13.9f} {vals[2]:13.9f} "
                  f"{gap:8.1e}  ({time.perf_counter() - t0:.1f} s)", flush=True)


if __name__ == "__main__":
    main()
