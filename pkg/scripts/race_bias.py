"""Chi-square of first/second seed frequencies for the three samplers.

Contrasts clock keys with fixed-lambda priorities; the latter reuses the
draws of race losers and drifts away from the exact second-seed law.
"""
import argparse

import numpy as np

from accelseed.bench import distribution_check
from accelseed.core import Dataset


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--trials", type=int, default=100_000)
    a = p.parse_args()
    ds = Dataset(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 2.0], [3.0, 3.0], [-4.0, 1.0]]),
                 [1.0, 2.0, 0.5, 1.5, 3.0])
    for sampler in ("cdf", "race", "race-fixed"):
        v = distribution_check(ds, trials=a.trials, sampler=sampler)
        print(f"{sampler:>10}: first chi2={v.first_stat:9.2f} p={v.first_p:.3g}   "
              f"second chi2={v.second_stat:9.2f} p={v.second_p:.3g}   "
              f"{'ok' if v.ok else 'REJECTED'}")


if __name__ == "__main__":
    main()
