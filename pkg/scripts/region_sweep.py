"""Sample KD values of random pure states and compare them with the region boundary.

For each dimension, draws Haar-random (pure state, frame) pairs and reports
the smallest region margin, the most negative real part, the largest
imaginary part and the largest modulus. Optionally writes every sampled
value to a CSV for plotting.

    python scripts/region_sweep.py --dims 2,3,4 --trials 10000 --csv results/region.csv
"""

import argparse
import csv
from pathlib import Path

import numpy as np

from kdrep.qops import DensityOperator, random_pure_vector
from kdrep.represent import region_margins, represent_state
from kdrep.suites import random_frame


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dims", default="2,3,4")
    parser.add_argument("--trials", type=int, default=10_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--csv", type=Path, help="write sampled values (dim, re, im, margin)")
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    samples = []
    for d in (int(x) for x in args.dims.split(",")):
        values = []
        for _ in range(args.trials):
            frame = random_frame(d, rng)
            rho = DensityOperator.pure(random_pure_vector(d, rng))
            values.append(represent_state(rho, frame).entries)
        mu = np.concatenate(values)
        margins = region_margins(mu)
        print(f"d={d}: min margin {margins.min():+.3e}, min Re {mu.real.min():+.6f} (bound -0.125), "
              f"max Im {mu.imag.max():+.6f} (bound 0.25), max |mu| {np.abs(mu).max():.6f}")
        samples += [(d, z.real, z.imag, m) for z, m in zip(mu, margins)]

    if args.csv:
        args.csv.parent.mkdir(parents=True, exist_ok=True)
        with args.csv.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["dim", "re", "im", "margin"])
            w.writerows(samples)


if __name__ == "__main__":
    main()
