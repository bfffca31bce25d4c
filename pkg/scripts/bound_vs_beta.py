"""Lower bound on the tachyon speed as a function of the preferred-frame speed.

Compares the 4 s / 1.75 m setup with a 360 s / 5.4e-6 configuration, chi = pi/2.
Writes a CSV to stdout.
"""
import argparse
import csv
import math
import sys

import numpy as np

from eberhard.kinematics import SiderealClock
from eberhard.window import scan_bounds


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--chi", type=float, default=90.0, help="degrees")
    args = ap.parse_args()

    betas = np.geomspace(1e-5, 0.99, args.n)
    chi = [math.radians(args.chi)]
    clock = SiderealClock()
    ours = scan_bounds(betas, chi, 1.6e-4, 4.0, clock).values[:, 0]
    long_run = scan_bounds(betas, chi, 5.4e-6, 360.0, clock).values[:, 0]

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["beta", "beta_t_min", "beta_t_min_long_bin", "ratio"])
    for b, x, y in zip(betas, ours, long_run):
        w.writerow([f"{b:.6e}", f"{x:.6e}", f"{y:.6e}", f"{y / x:.4f}"])


if __name__ == "__main__":
    main()
