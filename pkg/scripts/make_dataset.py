"""Write a synthetic Gaussian-mixture dataset to CSV."""
import argparse

from accelseed.bench import gaussian_mixture
from accelseed.io import save_csv


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("output")
    p.add_argument("--n", type=int, default=200_000)
    p.add_argument("--dim", type=int, default=4)
    p.add_argument("--clusters", type=int, default=64)
    p.add_argument("--separation", type=float, default=10.0)
    p.add_argument("--seed", type=int, default=0)
    a = p.parse_args()
    ds = gaussian_mixture(a.n, a.dim, a.clusters, separation=a.separation, seed=a.seed)
    save_csv(ds, a.output)
    print(f"wrote {ds.n} x {ds.dim} points to {a.output}")


if __name__ == "__main__":
    main()
