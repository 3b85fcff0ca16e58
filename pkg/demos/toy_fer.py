"""Frame error rates of the toy code as substitutions are traded for erasures.

Run:  python3 demos/toy_fer.py [--trials 4000] [--workers 2]
"""

import argparse
import csv
import io

from dnaouter import ChannelParams, CodeConfig
from dnaouter.fixtures import EXAMPLE_H
from dnaouter.sim import FerConfig, sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=4000)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    code = CodeConfig.from_parity_check(EXAMPLE_H, w=4, a=3)
    points = [(0.8, 0.0, 0.2), (0.8, 0.1, 0.1), (0.8, 0.2, 0.0)]
    configs = [
        FerConfig(
            code,
            ChannelParams(pc, pe, ps, code.l),
            schemes=("independent", "joint-strict", "joint-skip"),
            min_frame_errors=args.trials,
            max_trials=args.trials,
            seed=args.seed,
            workers=args.workers,
            decoder="nearest",
        )
        for pc, pe, ps in points
    ]
    rows = list(csv.DictReader(io.StringIO(sweep(configs))))
    print(f"{'p_e':>5} {'p_s':>5}  {'scheme':<13} {'FER':>8}  {'+-95%':>7}")
    for r in rows:
        print(f"{float(r['p_e']):5.2f} {float(r['p_s']):5.2f}  {r['scheme']:<13} {float(r['fer']):8.4f}  {float(r['ci95_halfwidth']):7.4f}")


if __name__ == "__main__":
    main()
