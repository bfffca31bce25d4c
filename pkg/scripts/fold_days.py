"""Simulate N sidereal days under quantum-mechanical rates and report folded statistics.

Shows the 1/sqrt(N) shrinkage of the folded scatter.
"""
import argparse
import dataclasses
import math

from eberhard.analysis import fold, poisson_gof, summary
from eberhard.optics import PolarizerSettings, RateModel
from eberhard.simulator import SimConfig, simulate


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--days", type=int, nargs="+", default=[1, 4, 9, 16, 21, 25])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    base = SimConfig(rm=RateModel(1.14, 12.05, 0.3, 4.0), pol=PolarizerSettings(), seed=args.seed)
    print(f"{'days':>5} {'n_av':>8} {'sigma':>7} {'sqrt(n/N)':>9} {'dn_max':>7} {'gof_p(day0)':>11}")
    for n in args.days:
        s = simulate(dataclasses.replace(base, n_days=n))
        n_av, sigma, dn = summary(fold(s))
        p = poisson_gof(s.counts[0]).p_value
        print(f"{n:5d} {n_av:8.4f} {sigma:7.4f} {math.sqrt(4.56 / n):9.4f} {dn:7.3f} {p:11.3f}")


if __name__ == "__main__":
    main()
