"""Exact asymptotic estimate against tilted Monte Carlo, Gaussian(-0.5, 1), p = 2."""
import argparse
import math

from selfnorm import distributions as D
from selfnorm.exact_prefactor import asymptotic_estimate
from selfnorm.shao_rate import j_boundary
from selfnorm.simulate import importance_mc


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--z", type=float, default=0.67)
    ap.add_argument("--n", type=int, nargs="+", default=[50, 100, 200, 400])
    ap.add_argument("--trials", type=int, default=1_000_000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--threads", type=int, default=4)
    ap.add_argument("--form", choices=["scaled", "unscaled"], default="scaled")
    args = ap.parse_args()
    dist, norm = D.Gaussian(-0.5, 1), D.PowerLaw(2)
    sol = j_boundary(dist, norm, args.z)
    print(f"J = {-sol.rate:.7f}, alpha_hat = {sol.alpha_hat}, tilt = {sol.tilt}")
    print(f"{'n':>5} {'estimate':>12} {'sampled':>12} {'rel SE':>8} {'ratio':>8}")
    for n in args.n:
        rep = asymptotic_estimate(dist, norm, args.z, n, solution=sol, form=args.form)
        est = importance_mc(dist, norm, args.z, n, args.trials, args.seed, args.threads,
                            solution=sol)
        ratio = math.exp(rep.log_value - est.log_value)
        print(f"{n:5d} {rep.value:12.4e} {est.value:12.4e} {est.rel_error:8.2%} {ratio:8.4f}")


if __name__ == "__main__":
    main()
