"""Rate-function grid and boundary polyline for Gaussian(-0.5, 1), p = 2, z = 0.67.

Writes <out> (x1, x2, rate) and <out stem>_boundary.csv, then prints the
minimum of the rate along the boundary.  Plotting is left to the reader's tool.
"""
import argparse
import csv

from selfnorm import cli


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="contour_grid.csv")
    args = ap.parse_args()
    code = cli.run(["contour", "--out", args.out])
    if code:
        raise SystemExit(code)
    with open(cli.boundary_path(args.out)) as fh:
        rows = [(float(r["x1"]), float(r["x2"]), float(r["rate"])) for r in csv.DictReader(fh)]
    x1, x2, rate = min(rows, key=lambda r: r[2])
    print(f"boundary minimum {rate:.6f} at ({x1:.4f}, {x2:.4f})")


if __name__ == "__main__":
    main()
