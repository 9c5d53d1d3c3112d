"""Mean fraction of remaining candidates the queue inspects per selection."""
import argparse

import numpy as np

from accelseed import bench


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--ns", default="20000,60000,200000")
    p.add_argument("--k", type=int, default=512)
    p.add_argument("--seed", type=int, default=3)
    a = p.parse_args()
    print(f"{'n':>8} {'mean':>8} {'median':>8} {'p95':>8}")
    for n in (int(x) for x in a.ns.split(",")):
        ds = bench.gaussian_mixture(n, 4, 64, seed=2024)
        _, res = bench.run_seeding(ds, "kpp-fast", a.k, a.seed)
        f = np.asarray(res.examined_fractions)
        print(f"{n:>8} {f.mean():>8.4f} {np.median(f):>8.4f} {np.quantile(f, 0.95):>8.4f}")


if __name__ == "__main__":
    main()
