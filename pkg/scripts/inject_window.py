"""Inject the no-correlation window and show what the detector finds."""
import argparse
import math

from eberhard.analysis import detect, fold
from eberhard.kinematics import PreferredFrame, TachyonSpeed
from eberhard.optics import RateModel
from eberhard.simulator import SimConfig, simulate, window_intervals
from eberhard.window import Geometry


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--beta", type=float, default=1.2e-3)
    ap.add_argument("--beta-t", type=float, default=1e3)
    ap.add_argument("--eta", type=float, default=0.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cfg = SimConfig(
        geometry=Geometry(1.75, 0.0, 280e-6),
        pf=PreferredFrame(args.beta, math.pi / 2),
        ts=TachyonSpeed(args.beta_t),
        rm=RateModel(1.14, 12.05, 0.3, 4.0),
        eta=args.eta,
        seed=args.seed,
    )
    print("true windows [s]:", [(round(a, 1), round(b, 1)) for a, b in window_intervals(cfg)])
    det = detect(fold(simulate(cfg)), cfg.rm, cfg.pol, 5.0)
    print("found [s]:      ", [(round(a, 1), round(b, 1)) for a, b in det.intervals])
    print(f"max departure {det.delta_n:.2f} counts/bin, {len(det.flags)} flagged bins")


if __name__ == "__main__":
    main()
