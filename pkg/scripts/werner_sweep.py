"""Convex-roof G and E_F along the two-qubit Werner line against closed forms.

    python scripts/werner_sweep.py --points 21
"""
import argparse

import numpy as np

from asymq.measures import (RoofOptions, eof_convex_roof, g_convex_roof, wootters_concurrence,
                            wootters_eof)
from asymq.states import werner_like


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--points", type=int, default=11)
    p.add_argument("--restarts", type=int, default=16)
    args = p.parse_args()
    opts = RoofOptions(restarts=args.restarts)
    print(f"{'p':>6} {'G roof':>10} {'C exact':>10} {'E_F roof':>10} {'E_F exact':>10}")
    for prob in np.linspace(0, 1, args.points):
        st = werner_like(prob)
        print(f"{prob:6.3f} {g_convex_roof(st, opts).value:10.6f} {wootters_concurrence(st):10.6f} "
              f"{eof_convex_roof(st, opts).value:10.6f} {wootters_eof(st):10.6f}")


if __name__ == "__main__":
    main()
